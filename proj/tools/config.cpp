#include "config.hpp"

#include <fstream>
#include <sstream>

namespace fcsmpc_cli {

namespace {

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

const Json& expect(const Json& j, const std::string& base,
                   const std::string& key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(join(base, key), "missing required field");
  }
  return j[key];
}

double expect_number(const Json& j, const std::string& path) {
  if (!j.is_number()) {
    throw ConfigError(path, "must be a number");
  }
  return j.get<double>();
}

int expect_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) {
    throw ConfigError(path, "must be an integer");
  }
  return j.get<int>();
}

std::string expect_string(const Json& j, const std::string& path) {
  if (!j.is_string()) {
    throw ConfigError(path, "must be a string");
  }
  return j.get<std::string>();
}

std::vector<double> expect_vector(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) {
    throw ConfigError(path, "must be a non-empty array of numbers");
  }
  std::vector<double> v;
  v.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    v.push_back(expect_number(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return v;
}

MatrixData expect_matrix(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) {
    throw ConfigError(path, "must be a non-empty array of rows");
  }
  MatrixData m;
  m.reserve(j.size());
  std::size_t cols = 0;
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string row_path = path + "[" + std::to_string(r) + "]";
    std::vector<double> row = expect_vector(j[r], row_path);
    if (r == 0) {
      cols = row.size();
    } else if (row.size() != cols) {
      throw ConfigError(row_path, "rows must all have " +
                                      std::to_string(cols) + " entries");
    }
    m.push_back(std::move(row));
  }
  return m;
}

Json matrix_json(const MatrixData& m) {
  Json rows = Json::array();
  for (const auto& row : m) rows.push_back(row);
  return rows;
}

AmplifierConfig parse_amplifier(const Json& j, const std::string& base) {
  AmplifierConfig amp;
  amp.bus_voltage = expect_number(expect(j, base, "V_bus"), join(base, "V_bus"));
  amp.stage_inductance = expect_number(expect(j, base, "L"), join(base, "L"));
  amp.stage_capacitance = expect_number(expect(j, base, "C"), join(base, "C"));
  amp.stage_resistance = expect_number(expect(j, base, "R"), join(base, "R"));
  amp.load_inductance = expect_number(expect(j, base, "L_m"), join(base, "L_m"));
  amp.load_resistance = expect_number(expect(j, base, "R_m"), join(base, "R_m"));
  return amp;
}

Json serialize_amplifier(const AmplifierConfig& amp) {
  return Json{{"V_bus", amp.bus_voltage},   {"L", amp.stage_inductance},
              {"C", amp.stage_capacitance}, {"R", amp.stage_resistance},
              {"L_m", amp.load_inductance}, {"R_m", amp.load_resistance}};
}

PlantConfig parse_plant(const Json& j) {
  PlantConfig plant;
  if (!j.is_object()) {
    throw ConfigError("plant", "must be an object");
  }
  const int variants = static_cast<int>(j.contains("amplifier")) +
                       static_cast<int>(j.contains("continuous")) +
                       static_cast<int>(j.contains("discrete"));
  if (variants != 1) {
    throw ConfigError(
        "plant", "exactly one of amplifier/continuous/discrete is required");
  }
  if (j.contains("amplifier")) {
    plant.kind = PlantConfig::Kind::amplifier;
    plant.amplifier = parse_amplifier(j["amplifier"], "plant.amplifier");
  } else if (j.contains("continuous")) {
    plant.kind = PlantConfig::Kind::continuous;
    const Json& c = j["continuous"];
    plant.A = expect_matrix(expect(c, "plant.continuous", "A"),
                            "plant.continuous.A");
    plant.B = expect_matrix(expect(c, "plant.continuous", "B"),
                            "plant.continuous.B");
    plant.C = expect_matrix(expect(c, "plant.continuous", "C"),
                            "plant.continuous.C");
  } else {
    plant.kind = PlantConfig::Kind::discrete;
    const Json& d = j["discrete"];
    plant.A = expect_matrix(expect(d, "plant.discrete", "A"),
                            "plant.discrete.A");
    plant.B = expect_matrix(expect(d, "plant.discrete", "B"),
                            "plant.discrete.B");
    plant.C = expect_matrix(expect(d, "plant.discrete", "C"),
                            "plant.discrete.C");
    plant.sample_period =
        expect_number(expect(d, "plant.discrete", "sample_period"),
                      "plant.discrete.sample_period");
  }
  return plant;
}

Json serialize_plant(const PlantConfig& plant) {
  switch (plant.kind) {
    case PlantConfig::Kind::amplifier:
      return Json{{"amplifier", serialize_amplifier(*plant.amplifier)}};
    case PlantConfig::Kind::continuous:
      return Json{{"continuous",
                   Json{{"A", matrix_json(plant.A)},
                        {"B", matrix_json(plant.B)},
                        {"C", matrix_json(plant.C)}}}};
    case PlantConfig::Kind::discrete:
      return Json{{"discrete",
                   Json{{"A", matrix_json(plant.A)},
                        {"B", matrix_json(plant.B)},
                        {"C", matrix_json(plant.C)},
                        {"sample_period", plant.sample_period}}}};
  }
  throw ConfigError("plant", "unknown plant kind");
}

BoundsConfig parse_bounds(const Json& j, const std::string& base) {
  BoundsConfig bounds;
  bounds.lower = expect_vector(expect(j, base, "lower"), join(base, "lower"));
  bounds.upper = expect_vector(expect(j, base, "upper"), join(base, "upper"));
  if (bounds.lower.size() != bounds.upper.size()) {
    throw ConfigError(base, "lower and upper must have equal length");
  }
  return bounds;
}

Json serialize_bounds(const BoundsConfig& bounds) {
  return Json{{"lower", bounds.lower}, {"upper", bounds.upper}};
}

CycleSearchConfig parse_cycle_search(const Json& j, const std::string& base) {
  CycleSearchConfig search;
  search.period = expect_int(expect(j, base, "p"), join(base, "p"));
  if (search.period < 1) {
    throw ConfigError(join(base, "p"), "must be >= 1");
  }
  search.gamma =
      expect_matrix(expect(j, base, "Gamma"), join(base, "Gamma"));
  if (j.contains("norm")) {
    search.norm = expect_string(j["norm"], join(base, "norm"));
    if (search.norm != "two_norm" && search.norm != "one_norm" &&
        search.norm != "inf_norm") {
      throw ConfigError(join(base, "norm"),
                        "must be two_norm, one_norm or inf_norm");
    }
  }
  if (j.contains("budget")) {
    if (!j["budget"].is_number_unsigned()) {
      throw ConfigError(join(base, "budget"),
                        "must be a nonnegative integer");
    }
    search.budget = j["budget"].get<std::uint64_t>();
  }
  return search;
}

Json serialize_cycle_search(const CycleSearchConfig& search) {
  Json j{{"p", search.period},
         {"Gamma", matrix_json(search.gamma)},
         {"norm", search.norm}};
  if (search.budget != 0) {
    j["budget"] = search.budget;
  }
  return j;
}

MpcConfig parse_mpc(const Json& j, const std::string& base) {
  MpcConfig mpc;
  if (j.contains("name")) {
    mpc.name = expect_string(j["name"], join(base, "name"));
  }
  mpc.controller =
      expect_string(expect(j, base, "controller"), join(base, "controller"));
  if (mpc.controller != "standard" && mpc.controller != "limit_cycle") {
    throw ConfigError(join(base, "controller"),
                      "must be standard or limit_cycle");
  }
  mpc.horizon = expect_int(expect(j, base, "N"), join(base, "N"));
  if (mpc.horizon < 1) {
    throw ConfigError(join(base, "N"), "must be >= 1");
  }
  mpc.Q = expect_matrix(expect(j, base, "Q"), join(base, "Q"));
  mpc.R = expect_matrix(expect(j, base, "R"), join(base, "R"));
  const Json& p = expect(j, base, "P");
  if (p.is_string()) {
    if (p.get<std::string>() != "auto") {
      throw ConfigError(join(base, "P"),
                        "must be a matrix or the string \"auto\"");
    }
  } else {
    mpc.P = expect_matrix(p, join(base, "P"));
  }
  if (j.contains("epsilon")) {
    mpc.epsilon = expect_number(j["epsilon"], join(base, "epsilon"));
  }
  if (j.contains("solver")) {
    mpc.solver = expect_string(j["solver"], join(base, "solver"));
    if (mpc.solver != "bnb" && mpc.solver != "exhaustive") {
      throw ConfigError(join(base, "solver"), "must be bnb or exhaustive");
    }
  }
  if (j.contains("state_bounds")) {
    mpc.state_bounds =
        parse_bounds(j["state_bounds"], join(base, "state_bounds"));
  }
  if (j.contains("output_bounds")) {
    mpc.output_bounds =
        parse_bounds(j["output_bounds"], join(base, "output_bounds"));
  }
  return mpc;
}

Json serialize_mpc(const MpcConfig& mpc) {
  Json j;
  if (!mpc.name.empty()) {
    j["name"] = mpc.name;
  }
  j["controller"] = mpc.controller;
  j["N"] = mpc.horizon;
  j["Q"] = matrix_json(mpc.Q);
  j["R"] = matrix_json(mpc.R);
  j["P"] = mpc.P ? matrix_json(*mpc.P) : Json("auto");
  if (mpc.epsilon) {
    j["epsilon"] = *mpc.epsilon;
  }
  j["solver"] = mpc.solver;
  if (mpc.state_bounds) {
    j["state_bounds"] = serialize_bounds(*mpc.state_bounds);
  }
  if (mpc.output_bounds) {
    j["output_bounds"] = serialize_bounds(*mpc.output_bounds);
  }
  return j;
}

SimConfig parse_sim(const Json& j, const std::string& base) {
  SimConfig sim;
  sim.x0 = expect_vector(expect(j, base, "x0"), join(base, "x0"));
  sim.steps = expect_int(expect(j, base, "steps"), join(base, "steps"));
  if (sim.steps < 1) {
    throw ConfigError(join(base, "steps"), "must be >= 1");
  }
  if (j.contains("convergence_tol")) {
    sim.convergence_tol =
        expect_number(j["convergence_tol"], join(base, "convergence_tol"));
    if (!(sim.convergence_tol > 0.0)) {
      throw ConfigError(join(base, "convergence_tol"), "must be positive");
    }
  }
  if (j.contains("ripple_window")) {
    sim.ripple_window =
        expect_int(j["ripple_window"], join(base, "ripple_window"));
    if (sim.ripple_window < 0) {
      throw ConfigError(join(base, "ripple_window"), "must be >= 0");
    }
  }
  if (j.contains("mode_period_max")) {
    sim.mode_period_max =
        expect_int(j["mode_period_max"], join(base, "mode_period_max"));
    if (sim.mode_period_max < 1) {
      throw ConfigError(join(base, "mode_period_max"), "must be >= 1");
    }
  }
  return sim;
}

Json serialize_sim(const SimConfig& sim) {
  return Json{{"x0", sim.x0},
              {"steps", sim.steps},
              {"convergence_tol", sim.convergence_tol},
              {"ripple_window", sim.ripple_window},
              {"mode_period_max", sim.mode_period_max}};
}

}  // namespace

RunConfig parse_config(const Json& j) {
  if (!j.is_object()) {
    throw ConfigError("", "config must be a JSON object");
  }
  RunConfig config;
  config.plant = parse_plant(expect(j, "", "plant"));

  if (j.contains("sampling")) {
    config.sampling_hz = expect_number(
        expect(j["sampling"], "sampling", "f_s"), "sampling.f_s");
    if (!(*config.sampling_hz > 0.0)) {
      throw ConfigError("sampling.f_s", "must be positive");
    }
  }
  if (config.plant.kind != PlantConfig::Kind::discrete &&
      !config.sampling_hz) {
    throw ConfigError("sampling.f_s",
                      "required for amplifier and continuous plants");
  }

  if (j.contains("reference")) {
    const Json& ref = j["reference"];
    if (!ref.is_object()) {
      throw ConfigError("reference", "must be an object");
    }
    if (ref.contains("y_ref") == ref.contains("cycle_file")) {
      throw ConfigError("reference",
                        "exactly one of y_ref/cycle_file is required");
    }
    if (ref.contains("y_ref")) {
      config.y_ref = expect_vector(ref["y_ref"], "reference.y_ref");
    } else {
      config.cycle_file =
          expect_string(ref["cycle_file"], "reference.cycle_file");
    }
  }

  if (j.contains("cycle_search")) {
    config.cycle_search = parse_cycle_search(j["cycle_search"], "cycle_search");
  }
  if (j.contains("mpc")) {
    config.mpc = parse_mpc(j["mpc"], "mpc");
  }
  if (j.contains("sim")) {
    config.sim = parse_sim(j["sim"], "sim");
  }
  if (j.contains("output")) {
    const Json& out = j["output"];
    if (out.contains("dir")) {
      config.output.dir = expect_string(out["dir"], "output.dir");
    }
    if (out.contains("prefix")) {
      config.output.prefix = expect_string(out["prefix"], "output.prefix");
    }
  }
  if (j.contains("compare")) {
    const Json& cmp = expect(j["compare"], "compare", "variants");
    if (!cmp.is_array() || cmp.empty()) {
      throw ConfigError("compare.variants", "must be a non-empty array");
    }
    for (std::size_t i = 0; i < cmp.size(); ++i) {
      const std::string base = "compare.variants[" + std::to_string(i) + "]";
      MpcConfig variant = parse_mpc(expect(cmp[i], base, "mpc"), base + ".mpc");
      variant.name = expect_string(expect(cmp[i], base, "name"),
                                   base + ".name");
      config.compare_variants.push_back(std::move(variant));
    }
  }
  return config;
}

Json serialize_config(const RunConfig& config) {
  Json j;
  j["plant"] = serialize_plant(config.plant);
  if (config.sampling_hz) {
    j["sampling"] = Json{{"f_s", *config.sampling_hz}};
  }
  if (config.y_ref) {
    j["reference"] = Json{{"y_ref", *config.y_ref}};
  } else if (config.cycle_file) {
    j["reference"] = Json{{"cycle_file", *config.cycle_file}};
  }
  if (config.cycle_search) {
    j["cycle_search"] = serialize_cycle_search(*config.cycle_search);
  }
  if (config.mpc) {
    j["mpc"] = serialize_mpc(*config.mpc);
  }
  j["sim"] = serialize_sim(config.sim);
  j["output"] = Json{{"dir", config.output.dir},
                     {"prefix", config.output.prefix}};
  if (!config.compare_variants.empty()) {
    Json variants = Json::array();
    for (const MpcConfig& variant : config.compare_variants) {
      Json v = Json{{"name", variant.name}, {"mpc", serialize_mpc(variant)}};
      v["mpc"].erase("name");
      variants.push_back(std::move(v));
    }
    j["compare"] = Json{{"variants", std::move(variants)}};
  }
  return j;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("", "cannot open config file: " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  const Json parsed = Json::parse(buffer.str(), nullptr, false);
  if (parsed.is_discarded()) {
    throw ConfigError("", "config file is not valid JSON: " + path);
  }
  return parse_config(parsed);
}

}  // namespace fcsmpc_cli
