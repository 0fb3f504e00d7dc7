#include "fcsmpc/serialize.hpp"

#include <cstdio>

namespace fcsmpc {

namespace {

std::string format_full(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double number_at(const Json& j, const std::string& where) {
  if (!j.is_number()) {
    throw ValidationError(where + " must be a number");
  }
  return j.get<double>();
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(m(i, j));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) {
    throw ValidationError(where + " must be a non-empty array of rows");
  }
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) {
    throw ValidationError(where + "[0] must be a non-empty array");
  }
  const std::size_t cols = j[0].size();
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw ValidationError(where + " rows must all have " +
                            std::to_string(cols) + " entries");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(r, c) = number_at(j[r][c], where + "[" + std::to_string(r) + "][" +
                                       std::to_string(c) + "]");
    }
  }
  numerics::require_finite(m, where);
  return m;
}

Json vector_to_json(const Vector& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    arr.push_back(v(i));
  }
  return arr;
}

Vector vector_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) {
    throw ValidationError(where + " must be a non-empty array");
  }
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(i) = number_at(j[i], where + "[" + std::to_string(i) + "]");
  }
  if (!v.allFinite()) {
    throw ValidationError(where + " contains non-finite entries");
  }
  return v;
}

Json system_to_json(const DiscreteSystem& sys) {
  return Json{{"A", matrix_to_json(sys.A)},
              {"B", matrix_to_json(sys.B)},
              {"C", matrix_to_json(sys.C)},
              {"sample_period", sys.sample_period},
              {"input_bits", sys.inputs()}};
}

DiscreteSystem system_from_json(const Json& j) {
  for (const char* key : {"A", "B", "C", "sample_period"}) {
    if (!j.contains(key)) {
      throw ValidationError(std::string("system is missing field ") + key);
    }
  }
  DiscreteSystem sys;
  sys.A = matrix_from_json(j["A"], "A");
  sys.B = matrix_from_json(j["B"], "B");
  sys.C = matrix_from_json(j["C"], "C");
  sys.sample_period = number_at(j["sample_period"], "sample_period");
  validate_system(sys);
  return sys;
}

Json cycle_to_json(const LimitCycle& cycle) {
  Json inputs = Json::array();
  for (const InputVector& u : cycle.inputs) {
    inputs.push_back(u.to_bits());
  }
  Json states = Json::array();
  for (const Vector& x : cycle.states) {
    states.push_back(vector_to_json(x));
  }
  return Json{{"period", cycle.period},
              {"index", cycle.index},
              {"inputs", std::move(inputs)},
              {"states", std::move(states)}};
}

LimitCycle cycle_from_json(const Json& j) {
  for (const char* key : {"period", "inputs", "states"}) {
    if (!j.contains(key)) {
      throw ValidationError(std::string("cycle is missing field ") + key);
    }
  }
  LimitCycle cycle;
  if (!j["period"].is_number_integer()) {
    throw ValidationError("cycle period must be an integer");
  }
  cycle.period = j["period"].get<int>();
  if (cycle.period < 1) {
    throw ValidationError("cycle period must be >= 1");
  }
  if (!j["inputs"].is_array() || !j["states"].is_array() ||
      j["inputs"].size() != static_cast<std::size_t>(cycle.period) ||
      j["states"].size() != static_cast<std::size_t>(cycle.period)) {
    throw ValidationError("cycle inputs/states must list one entry per phase");
  }
  for (const Json& bits_json : j["inputs"]) {
    if (!bits_json.is_array() || bits_json.empty()) {
      throw ValidationError("cycle inputs must be arrays of bits");
    }
    std::vector<int> bits;
    for (const Json& b : bits_json) {
      if (!b.is_number_integer()) {
        throw ValidationError("cycle input bits must be integers");
      }
      bits.push_back(b.get<int>());
    }
    cycle.inputs.push_back(InputVector::from_bits(bits));
  }
  for (std::size_t i = 0; i < j["states"].size(); ++i) {
    cycle.states.push_back(vector_from_json(
        j["states"][i], "states[" + std::to_string(i) + "]"));
  }
  if (j.contains("index")) {
    if (!j["index"].is_number_integer() && !j["index"].is_number_unsigned()) {
      throw ValidationError("cycle index must be an integer");
    }
    cycle.index = j["index"].get<std::uint64_t>();
  }
  if (cycle.index == 0) {
    cycle.index = index_of_input_sequence(cycle.inputs);
  }
  return cycle;
}

Json terminal_cost_to_json(const TerminalCost& tc) {
  return Json{{"P", matrix_to_json(tc.P)}, {"margin", tc.margin}};
}

Json report_to_json(const SteadyStateReport& report) {
  Json j;
  j["converged"] = report.converged;
  j["converged_at"] =
      report.converged_at ? Json(*report.converged_at) : Json(nullptr);
  j["ripple"] = vector_to_json(report.ripple);
  j["mean_output"] = vector_to_json(report.mean_output);
  j["mode_cycle"] =
      report.mode_cycle ? Json(*report.mode_cycle) : Json(nullptr);
  j["cost_monotone_after"] = report.cost_monotone_after
                                 ? Json(*report.cost_monotone_after)
                                 : Json(nullptr);
  j["max_cost_violation"] = report.max_cost_violation;
  j["window"] = report.window;
  return j;
}

std::string cycle_to_csv(const LimitCycle& cycle, const DiscreteSystem& sys) {
  const int n = sys.states();
  const int m = sys.inputs();
  const int q = sys.outputs();

  std::string csv = "phase";
  for (int i = 1; i <= n; ++i) csv += ",x" + std::to_string(i);
  for (int i = 1; i <= m; ++i) csv += ",u" + std::to_string(i);
  csv += ",mode";
  for (int i = 1; i <= q; ++i) csv += ",y" + std::to_string(i);
  csv += "\n";

  for (int phase = 0; phase < cycle.period; ++phase) {
    csv += std::to_string(phase);
    for (int i = 0; i < n; ++i) {
      csv += "," + format_full(cycle.states[phase](i));
    }
    for (int i = 0; i < m; ++i) {
      csv += "," + std::to_string(cycle.inputs[phase].bit(i));
    }
    csv += "," + std::to_string(static_cast<int>(cycle.inputs[phase].digit()) + 1);
    const Vector y = sys.C * cycle.states[phase];
    for (int i = 0; i < q; ++i) {
      csv += "," + format_full(y(i));
    }
    csv += "\n";
  }
  return csv;
}

std::string trajectory_to_csv(const Trajectory& traj) {
  const int steps = traj.steps();
  const int n = steps > 0 ? static_cast<int>(traj.states[0].size()) : 0;
  const int m = steps > 0 ? traj.inputs[0].size() : 0;
  const int q = steps > 0 ? static_cast<int>(traj.outputs[0].size()) : 0;

  std::string csv = "k,t_seconds";
  for (int i = 1; i <= n; ++i) csv += ",x" + std::to_string(i);
  for (int i = 1; i <= m; ++i) csv += ",u" + std::to_string(i);
  csv += ",mode";
  for (int i = 1; i <= q; ++i) csv += ",y" + std::to_string(i);
  csv += ",J_star\n";

  for (int k = 0; k < steps; ++k) {
    csv += std::to_string(k);
    csv += "," + format_full(k * traj.sample_period);
    for (int i = 0; i < n; ++i) {
      csv += "," + format_full(traj.states[k](i));
    }
    for (int i = 0; i < m; ++i) {
      csv += "," + std::to_string(traj.inputs[k].bit(i));
    }
    csv += "," + std::to_string(traj.modes[k]);
    for (int i = 0; i < q; ++i) {
      csv += "," + format_full(traj.outputs[k](i));
    }
    csv += "," + format_full(traj.costs[k]);
    csv += "\n";
  }
  return csv;
}

}  // namespace fcsmpc
