#include "workflows.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

namespace fcsmpc_cli {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct ModelDeleter {
  void operator()(fcsmpc_model* m) const { fcsmpc_model_free(m); }
};
struct CycleDeleter {
  void operator()(fcsmpc_cycle* c) const { fcsmpc_cycle_free(c); }
};
struct ControllerDeleter {
  void operator()(fcsmpc_controller* c) const { fcsmpc_controller_free(c); }
};
struct TrajectoryDeleter {
  void operator()(fcsmpc_trajectory* t) const { fcsmpc_trajectory_free(t); }
};

using ModelPtr = std::unique_ptr<fcsmpc_model, ModelDeleter>;
using CyclePtr = std::unique_ptr<fcsmpc_cycle, CycleDeleter>;
using ControllerPtr = std::unique_ptr<fcsmpc_controller, ControllerDeleter>;
using TrajectoryPtr = std::unique_ptr<fcsmpc_trajectory, TrajectoryDeleter>;

class ApiString {
 public:
  char** slot() { return &data_; }
  ~ApiString() { fcsmpc_string_free(data_); }
  std::string str() const { return data_ ? data_ : ""; }

 private:
  char* data_ = nullptr;
};

void check(fcsmpc_status status) {
  if (status != FCSMPC_OK) {
    throw ApiError(status, fcsmpc_last_error());
  }
}

std::vector<double> flatten(const MatrixData& m) {
  std::vector<double> flat;
  for (const auto& row : m) {
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return flat;
}

Json matrix_json_from_flat(const std::vector<double>& flat, int rows,
                           int cols) {
  Json out = Json::array();
  for (int r = 0; r < rows; ++r) {
    Json row = Json::array();
    for (int c = 0; c < cols; ++c) {
      row.push_back(flat[r * cols + c]);
    }
    out.push_back(std::move(row));
  }
  return out;
}

ModelPtr build_model(const RunConfig& config) {
  fcsmpc_model* raw = nullptr;
  switch (config.plant.kind) {
    case PlantConfig::Kind::amplifier: {
      const AmplifierConfig& amp = *config.plant.amplifier;
      fcsmpc_amplifier_params params;
      params.bus_voltage = amp.bus_voltage;
      params.stage_inductance = amp.stage_inductance;
      params.stage_capacitance = amp.stage_capacitance;
      params.stage_resistance = amp.stage_resistance;
      params.load_inductance = amp.load_inductance;
      params.load_resistance = amp.load_resistance;
      check(fcsmpc_model_amplifier(&params, *config.sampling_hz, &raw));
      break;
    }
    case PlantConfig::Kind::continuous: {
      const auto a = flatten(config.plant.A);
      const auto b = flatten(config.plant.B);
      const auto c = flatten(config.plant.C);
      check(fcsmpc_model_from_continuous(
          static_cast<int32_t>(config.plant.A.size()),
          static_cast<int32_t>(config.plant.B.empty() ? 0
                                                      : config.plant.B[0].size()),
          static_cast<int32_t>(config.plant.C.size()), a.data(), b.data(),
          c.data(), *config.sampling_hz, &raw));
      break;
    }
    case PlantConfig::Kind::discrete: {
      const auto a = flatten(config.plant.A);
      const auto b = flatten(config.plant.B);
      const auto c = flatten(config.plant.C);
      check(fcsmpc_model_from_discrete(
          static_cast<int32_t>(config.plant.A.size()),
          static_cast<int32_t>(config.plant.B.empty() ? 0
                                                      : config.plant.B[0].size()),
          static_cast<int32_t>(config.plant.C.size()), a.data(), b.data(),
          c.data(), config.plant.sample_period, &raw));
      break;
    }
  }
  return ModelPtr(raw);
}

fcsmpc_norm norm_of(const std::string& name) {
  if (name == "one_norm") return FCSMPC_NORM_ONE;
  if (name == "inf_norm") return FCSMPC_NORM_INF;
  return FCSMPC_NORM_TWO;
}

fcsmpc_solver solver_of(const std::string& name) {
  return name == "exhaustive" ? FCSMPC_SOLVER_EXHAUSTIVE
                              : FCSMPC_SOLVER_BRANCH_AND_BOUND;
}

std::string effective_solver(const MpcConfig& mpc,
                             const CommandOptions& options) {
  return options.solver.empty() ? mpc.solver : options.solver;
}

CyclePtr build_cycle(const RunConfig& config, const fcsmpc_model* model) {
  fcsmpc_cycle* raw = nullptr;
  if (config.cycle_file) {
    std::ifstream in(*config.cycle_file);
    if (!in) {
      throw ApiError(FCSMPC_ERR_IO,
                     "cannot open cycle file: " + *config.cycle_file);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    check(fcsmpc_cycle_from_json(buffer.str().c_str(), &raw));
    return CyclePtr(raw);
  }
  if (!config.cycle_search) {
    throw ConfigError("cycle_search",
                      "required when no reference.cycle_file is given");
  }
  if (!config.y_ref) {
    throw ConfigError("reference.y_ref",
                      "required for the limit cycle search");
  }
  const auto gamma = flatten(config.cycle_search->gamma);
  check(fcsmpc_cycle_search(model, config.y_ref->data(), gamma.data(),
                            norm_of(config.cycle_search->norm),
                            config.cycle_search->period,
                            config.cycle_search->budget, &raw));
  return CyclePtr(raw);
}

struct ResolvedWeights {
  std::vector<double> q, r, p;
  double margin = 0.0;
  bool synthesized = false;
};

ResolvedWeights resolve_weights(const MpcConfig& mpc,
                                const fcsmpc_model* model) {
  int32_t n = 0, m = 0, q = 0;
  check(fcsmpc_model_dims(model, &n, &m, &q));
  const int dim = mpc.controller == "limit_cycle" ? n : q;

  ResolvedWeights weights;
  weights.q = flatten(mpc.Q);
  weights.r = flatten(mpc.R);
  if (mpc.P) {
    weights.p = flatten(*mpc.P);
  } else {
    if (mpc.controller != "limit_cycle") {
      throw ConfigError("mpc.P",
                        "\"auto\" requires the limit_cycle controller");
    }
    weights.p.assign(static_cast<std::size_t>(dim) * dim, 0.0);
    check(fcsmpc_terminal_cost_compute(model, weights.q.data(),
                                       mpc.epsilon.value_or(0.0),
                                       weights.p.data(), &weights.margin));
    weights.synthesized = true;
  }
  return weights;
}

ControllerPtr build_controller(const MpcConfig& mpc, const fcsmpc_model* model,
                               const fcsmpc_cycle* cycle,
                               const RunConfig& config,
                               ResolvedWeights* out_weights = nullptr) {
  ResolvedWeights weights = resolve_weights(mpc, model);
  const double* x_lower =
      mpc.state_bounds ? mpc.state_bounds->lower.data() : nullptr;
  const double* x_upper =
      mpc.state_bounds ? mpc.state_bounds->upper.data() : nullptr;

  fcsmpc_controller* raw = nullptr;
  if (mpc.controller == "limit_cycle") {
    if (cycle == nullptr) {
      throw ConfigError("reference",
                        "limit_cycle controller needs a reference cycle");
    }
    check(fcsmpc_controller_cycle_tracking(
        model, mpc.horizon, weights.q.data(), weights.r.data(),
        weights.p.data(), cycle, x_lower, x_upper, &raw));
  } else {
    if (!config.y_ref) {
      throw ConfigError("reference.y_ref",
                        "required for the standard controller");
    }
    const double* y_lower =
        mpc.output_bounds ? mpc.output_bounds->lower.data() : nullptr;
    const double* y_upper =
        mpc.output_bounds ? mpc.output_bounds->upper.data() : nullptr;
    check(fcsmpc_controller_standard(model, mpc.horizon, weights.q.data(),
                                     weights.r.data(), weights.p.data(),
                                     config.y_ref->data(), x_lower, x_upper,
                                     y_lower, y_upper, &raw));
  }
  if (out_weights) {
    *out_weights = std::move(weights);
  }
  return ControllerPtr(raw);
}

fs::path prepare_output_dir(const RunConfig& config,
                            const CommandOptions& options) {
  const fs::path dir =
      options.out_dir.empty() ? config.output.dir : options.out_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw ApiError(FCSMPC_ERR_IO,
                   "cannot create output directory " + dir.string() + ": " +
                       ec.message());
  }
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) {
    throw ApiError(FCSMPC_ERR_IO, "cannot write " + path.string());
  }
  out << content;
  if (!out) {
    throw ApiError(FCSMPC_ERR_IO, "short write to " + path.string());
  }
}

Json model_json(const fcsmpc_model* model) {
  int32_t n = 0, m = 0, q = 0;
  check(fcsmpc_model_dims(model, &n, &m, &q));
  std::vector<double> a(static_cast<std::size_t>(n) * n);
  std::vector<double> b(static_cast<std::size_t>(n) * m);
  std::vector<double> c(static_cast<std::size_t>(q) * n);
  check(fcsmpc_model_matrices(model, a.data(), b.data(), c.data()));
  double sample_period = 0.0;
  check(fcsmpc_model_sample_period(model, &sample_period));
  return Json{{"A", matrix_json_from_flat(a, n, n)},
              {"B", matrix_json_from_flat(b, n, m)},
              {"C", matrix_json_from_flat(c, q, n)},
              {"sample_period", sample_period},
              {"input_bits", m}};
}

std::vector<int> cycle_mode_sequence(const fcsmpc_cycle* cycle,
                                     const fcsmpc_model* model) {
  int32_t m = 0;
  check(fcsmpc_model_dims(model, nullptr, &m, nullptr));
  int32_t period = 0;
  check(fcsmpc_cycle_period(cycle, &period));
  std::vector<int> modes;
  if (m != 2) {
    return modes;
  }
  for (int32_t phase = 0; phase < period; ++phase) {
    std::vector<int32_t> bits(m);
    check(fcsmpc_cycle_input_at(cycle, phase, bits.data()));
    int32_t mode = 0;
    check(fcsmpc_mode_of_input(bits.data(), &mode));
    modes.push_back(mode);
  }
  return modes;
}

struct SimArtifacts {
  TrajectoryPtr trajectory;
  Json report;
  double seconds = 0.0;
};

SimArtifacts run_simulation(const RunConfig& config, const MpcConfig& mpc,
                            const fcsmpc_model* model,
                            const fcsmpc_cycle* cycle,
                            const CommandOptions& options) {
  int32_t n = 0;
  check(fcsmpc_model_dims(model, &n, nullptr, nullptr));
  if (static_cast<int32_t>(config.sim.x0.size()) != n) {
    throw ConfigError("sim.x0", "must have " + std::to_string(n) +
                                    " entries for this plant");
  }
  if (cycle == nullptr && config.sim.ripple_window == 0) {
    throw ConfigError("sim.ripple_window",
                      "required when no reference cycle is available");
  }

  ControllerPtr controller = build_controller(mpc, model, cycle, config);

  fcsmpc_trajectory* raw = nullptr;
  const auto t0 = Clock::now();
  check(fcsmpc_simulate(controller.get(), config.sim.x0.data(),
                        config.sim.steps,
                        solver_of(effective_solver(mpc, options)), &raw));
  SimArtifacts artifacts;
  artifacts.trajectory.reset(raw);
  artifacts.seconds = std::chrono::duration<double>(Clock::now() - t0).count();

  ApiString report;
  check(fcsmpc_trajectory_report_json(
      artifacts.trajectory.get(), cycle, config.sim.convergence_tol,
      config.sim.ripple_window, config.sim.mode_period_max, report.slot()));
  artifacts.report = Json::parse(report.str());
  return artifacts;
}

std::string summary_line(const std::string& name, const Json& report,
                         double seconds, int steps) {
  std::ostringstream os;
  os << name << ": ripple=" << report["ripple"][0].get<double>();
  if (report["converged_at"].is_null()) {
    os << " converged_at=none";
  } else {
    os << " converged_at=" << report["converged_at"].get<int>();
  }
  os << " mean_output=" << report["mean_output"][0].get<double>()
     << " (" << 1e3 * seconds / steps << " ms/solve)";
  return os.str();
}

}  // namespace

int exit_code_of(fcsmpc_status status) {
  switch (status) {
    case FCSMPC_OK:
      return 0;
    case FCSMPC_ERR_VALIDATION:
    case FCSMPC_ERR_DIMENSION:
      return 2;
    case FCSMPC_ERR_SINGULAR:
    case FCSMPC_ERR_UNSTABLE:
      return 3;
    case FCSMPC_ERR_INFEASIBLE:
      return 4;
    case FCSMPC_ERR_CAPACITY:
      return 5;
    case FCSMPC_ERR_IO:
      return 6;
    case FCSMPC_ERR_INTERNAL:
      return 1;
  }
  return 1;
}

int cmd_discretize(const RunConfig& config, const CommandOptions& options) {
  ModelPtr model = build_model(config);
  double radius = 0.0;
  check(fcsmpc_model_spectral_radius(model.get(), &radius));

  const fs::path dir = prepare_output_dir(config, options);
  const fs::path path = dir / (config.output.prefix + "_system.json");
  write_file(path, model_json(model.get()).dump(2) + "\n");
  if (!options.quiet) {
    std::printf("wrote %s; spectral radius %.12g\n", path.c_str(), radius);
  }
  return 0;
}

int cmd_limit_cycle(const RunConfig& config, const CommandOptions& options) {
  if (!config.cycle_search) {
    throw ConfigError("cycle_search", "missing required section");
  }
  if (!config.y_ref) {
    throw ConfigError("reference.y_ref", "required to score the limit cycle");
  }
  ModelPtr model = build_model(config);
  CyclePtr cycle = build_cycle(config, model.get());

  int32_t q = 0;
  check(fcsmpc_model_dims(model.get(), nullptr, nullptr, &q));
  double cost = 0.0;
  const auto gamma = flatten(config.cycle_search->gamma);
  check(fcsmpc_cycle_cost(cycle.get(), model.get(), config.y_ref->data(),
                          gamma.data(), norm_of(config.cycle_search->norm),
                          &cost));
  std::vector<double> ripple(q);
  check(fcsmpc_cycle_ripple(cycle.get(), model.get(), ripple.data()));
  int32_t period = 0;
  check(fcsmpc_cycle_period(cycle.get(), &period));
  uint64_t index = 0;
  check(fcsmpc_cycle_index(cycle.get(), &index));

  Json summary{{"period", period},
               {"index", index},
               {"cost", cost},
               {"ripple", ripple}};
  const std::vector<int> modes = cycle_mode_sequence(cycle.get(), model.get());
  if (!modes.empty()) {
    summary["modes"] = modes;
  }

  const fs::path dir = prepare_output_dir(config, options);
  ApiString cycle_json;
  check(fcsmpc_cycle_to_json(cycle.get(), cycle_json.slot()));
  ApiString cycle_csv;
  check(fcsmpc_cycle_to_csv(cycle.get(), model.get(), cycle_csv.slot()));
  write_file(dir / (config.output.prefix + "_cycle.json"),
             cycle_json.str() + "\n");
  write_file(dir / (config.output.prefix + "_cycle.csv"), cycle_csv.str());
  write_file(dir / (config.output.prefix + "_cycle_summary.json"),
             summary.dump(2) + "\n");

  if (!options.quiet) {
    std::ostringstream os;
    os << "cycle p=" << period << " cost=" << cost << " ripple=" << ripple[0];
    if (!modes.empty()) {
      os << " modes={";
      for (std::size_t i = 0; i < modes.size(); ++i) {
        os << (i ? "," : "") << modes[i];
      }
      os << "}";
    }
    std::printf("%s\n", os.str().c_str());
  }
  return 0;
}

int cmd_terminal_cost(const RunConfig& config, const CommandOptions& options) {
  if (!config.mpc) {
    throw ConfigError("mpc", "missing required section");
  }
  ModelPtr model = build_model(config);
  int32_t n = 0;
  check(fcsmpc_model_dims(model.get(), &n, nullptr, nullptr));
  if (static_cast<int32_t>(config.mpc->Q.size()) != n) {
    throw ConfigError("mpc.Q", "must be " + std::to_string(n) + "x" +
                                   std::to_string(n) + " for this plant");
  }
  const auto q = flatten(config.mpc->Q);

  Json result;
  double margin = 0.0;
  if (config.mpc->P) {
    const auto p = flatten(*config.mpc->P);
    int32_t valid = 0;
    check(fcsmpc_terminal_cost_verify(model.get(), q.data(), p.data(), &valid,
                                      &margin));
    result = Json{{"P", matrix_json_from_flat(p, n, n)},
                  {"margin", margin},
                  {"valid", valid != 0},
                  {"source", "verified"}};
  } else {
    std::vector<double> p(static_cast<std::size_t>(n) * n);
    check(fcsmpc_terminal_cost_compute(model.get(), q.data(),
                                       config.mpc->epsilon.value_or(0.0),
                                       p.data(), &margin));
    result = Json{{"P", matrix_json_from_flat(p, n, n)},
                  {"margin", margin},
                  {"valid", true},
                  {"source", "computed"}};
  }

  const fs::path dir = prepare_output_dir(config, options);
  const fs::path path = dir / (config.output.prefix + "_terminal.json");
  write_file(path, result.dump(2) + "\n");
  if (!options.quiet) {
    std::printf("%s P: valid=%s margin=%.6g (wrote %s)\n",
                result["source"].get<std::string>().c_str(),
                result["valid"].get<bool>() ? "true" : "false", margin,
                path.c_str());
  }
  return result["valid"].get<bool>() ? 0 : 3;
}

int cmd_simulate(const RunConfig& config, const CommandOptions& options) {
  if (!config.mpc) {
    throw ConfigError("mpc", "missing required section");
  }
  ModelPtr model = build_model(config);
  CyclePtr cycle;
  if (config.mpc->controller == "limit_cycle" || config.cycle_file ||
      config.cycle_search) {
    cycle = build_cycle(config, model.get());
  }

  SimArtifacts artifacts =
      run_simulation(config, *config.mpc, model.get(), cycle.get(), options);

  const fs::path dir = prepare_output_dir(config, options);
  ApiString csv;
  check(fcsmpc_trajectory_to_csv(artifacts.trajectory.get(), csv.slot()));
  write_file(dir / (config.output.prefix + "_trajectory.csv"), csv.str());
  write_file(dir / (config.output.prefix + "_report.json"),
             artifacts.report.dump(2) + "\n");

  if (!options.quiet) {
    std::printf("%s\n",
                summary_line(config.output.prefix, artifacts.report,
                             artifacts.seconds, config.sim.steps)
                    .c_str());
  }
  return 0;
}

int cmd_compare(const RunConfig& config, const CommandOptions& options) {
  if (config.compare_variants.size() < 2) {
    throw ConfigError("compare.variants",
                      "needs at least two variants (use simulate for one)");
  }
  std::set<std::string> names;
  for (const MpcConfig& variant : config.compare_variants) {
    if (!names.insert(variant.name).second) {
      throw ConfigError("compare.variants",
                        "duplicate variant name: " + variant.name);
    }
  }

  ModelPtr model = build_model(config);
  CyclePtr cycle;
  const bool any_cycle_tracking =
      std::any_of(config.compare_variants.begin(),
                  config.compare_variants.end(), [](const MpcConfig& v) {
                    return v.controller == "limit_cycle";
                  });
  if (any_cycle_tracking || config.cycle_file || config.cycle_search) {
    cycle = build_cycle(config, model.get());
  }

  const fs::path dir = prepare_output_dir(config, options);
  std::string table =
      "name,controller,N,solver,ripple,converged_at,mean_output,ms_per_solve\n";
  std::vector<std::string> lines;
  for (const MpcConfig& variant : config.compare_variants) {
    SimArtifacts artifacts =
        run_simulation(config, variant, model.get(), cycle.get(), options);

    ApiString csv;
    check(fcsmpc_trajectory_to_csv(artifacts.trajectory.get(), csv.slot()));
    write_file(dir / (config.output.prefix + "_" + variant.name +
                      "_trajectory.csv"),
               csv.str());

    const Json& report = artifacts.report;
    std::ostringstream row;
    row << variant.name << "," << variant.controller << "," << variant.horizon
        << "," << effective_solver(variant, options) << ","
        << report["ripple"][0].get<double>() << ",";
    if (report["converged_at"].is_null()) {
      row << "none";
    } else {
      row << report["converged_at"].get<int>();
    }
    row << "," << report["mean_output"][0].get<double>() << ","
        << 1e3 * artifacts.seconds / config.sim.steps;
    table += row.str() + "\n";
    lines.push_back(summary_line(variant.name, report, artifacts.seconds,
                                 config.sim.steps));
  }

  write_file(dir / (config.output.prefix + "_compare.csv"), table);
  if (!options.quiet) {
    for (const std::string& line : lines) {
      std::printf("%s\n", line.c_str());
    }
  }
  return 0;
}

}  // namespace fcsmpc_cli
