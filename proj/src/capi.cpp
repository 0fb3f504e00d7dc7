#include "fcsmpc/fcsmpc.h"

#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "fcsmpc/serialize.hpp"

struct fcsmpc_model {
  fcsmpc::DiscreteSystem sys;
};

struct fcsmpc_cycle {
  fcsmpc::LimitCycle cycle;
};

struct fcsmpc_controller {
  fcsmpc::MpcProblem problem;
};

struct fcsmpc_trajectory {
  fcsmpc::Trajectory traj;
};

namespace {

thread_local std::string g_last_error;

fcsmpc_status status_of(fcsmpc::ErrorCode code) {
  using fcsmpc::ErrorCode;
  switch (code) {
    case ErrorCode::validation:
      return FCSMPC_ERR_VALIDATION;
    case ErrorCode::dimension:
      return FCSMPC_ERR_DIMENSION;
    case ErrorCode::singular:
      return FCSMPC_ERR_SINGULAR;
    case ErrorCode::unstable:
      return FCSMPC_ERR_UNSTABLE;
    case ErrorCode::infeasible:
      return FCSMPC_ERR_INFEASIBLE;
    case ErrorCode::capacity:
      return FCSMPC_ERR_CAPACITY;
    case ErrorCode::io:
      return FCSMPC_ERR_IO;
    case ErrorCode::internal:
      return FCSMPC_ERR_INTERNAL;
  }
  return FCSMPC_ERR_INTERNAL;
}

template <typename Fn>
fcsmpc_status guarded(Fn&& fn) {
  try {
    fn();
    return FCSMPC_OK;
  } catch (const fcsmpc::Error& err) {
    g_last_error = err.what();
    return status_of(err.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return FCSMPC_ERR_INTERNAL;
  } catch (const std::exception& err) {
    g_last_error = err.what();
    return FCSMPC_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return FCSMPC_ERR_INTERNAL;
  }
}

fcsmpc_status fail_validation(const char* message) {
  g_last_error = message;
  return FCSMPC_ERR_VALIDATION;
}

void require_arg(const void* p, const char* name) {
  if (p == nullptr) {
    throw fcsmpc::ValidationError(std::string(name) + " must not be NULL");
  }
}

fcsmpc::Matrix matrix_from_buffer(const double* data, int rows, int cols,
                                  const char* name) {
  require_arg(data, name);
  if (rows < 1 || cols < 1) {
    throw fcsmpc::DimensionError(std::string(name) +
                                 " dimensions must be positive");
  }
  fcsmpc::Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      m(r, c) = data[r * cols + c];
    }
  }
  fcsmpc::numerics::require_finite(m, name);
  return m;
}

void matrix_to_buffer(const fcsmpc::Matrix& m, double* out) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      out[r * m.cols() + c] = m(r, c);
    }
  }
}

fcsmpc::Vector vector_from_buffer(const double* data, int size,
                                  const char* name) {
  require_arg(data, name);
  fcsmpc::Vector v(size);
  for (int i = 0; i < size; ++i) {
    v(i) = data[i];
  }
  return v;
}

fcsmpc::InputVector input_from_bits(const int32_t* bits, int m,
                                    const char* name) {
  require_arg(bits, name);
  std::vector<int> values(bits, bits + m);
  return fcsmpc::InputVector::from_bits(values);
}

void input_to_bits(const fcsmpc::InputVector& u, int32_t* out) {
  for (int i = 0; i < u.size(); ++i) {
    out[i] = u.bit(i);
  }
}

fcsmpc::CycleNorm norm_of(fcsmpc_norm norm) {
  switch (norm) {
    case FCSMPC_NORM_TWO:
      return fcsmpc::CycleNorm::two_norm;
    case FCSMPC_NORM_ONE:
      return fcsmpc::CycleNorm::one_norm;
    case FCSMPC_NORM_INF:
      return fcsmpc::CycleNorm::inf_norm;
  }
  throw fcsmpc::ValidationError("unknown norm selector");
}

fcsmpc::Solver solver_of(fcsmpc_solver solver) {
  switch (solver) {
    case FCSMPC_SOLVER_EXHAUSTIVE:
      return fcsmpc::Solver::exhaustive;
    case FCSMPC_SOLVER_BRANCH_AND_BOUND:
      return fcsmpc::Solver::branch_and_bound;
  }
  throw fcsmpc::ValidationError("unknown solver selector");
}

std::optional<fcsmpc::BoxBounds> box_from_buffers(const double* lower,
                                                  const double* upper, int dim,
                                                  const char* what) {
  if (lower == nullptr && upper == nullptr) {
    return std::nullopt;
  }
  if (lower == nullptr || upper == nullptr) {
    throw fcsmpc::ValidationError(std::string(what) +
                                  " bounds need both lower and upper arrays");
  }
  fcsmpc::BoxBounds box;
  box.lower = vector_from_buffer(lower, dim, what);
  box.upper = vector_from_buffer(upper, dim, what);
  return box;
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* fcsmpc_version(void) { return "0.1.0"; }

const char* fcsmpc_last_error(void) { return g_last_error.c_str(); }

void fcsmpc_string_free(char* s) { delete[] s; }

/* ---- plant models -------------------------------------------------- */

fcsmpc_status fcsmpc_model_amplifier(const fcsmpc_amplifier_params* params,
                                     double sampling_hz, fcsmpc_model** out) {
  if (!params || !out) return fail_validation("params/out must not be NULL");
  return guarded([&] {
    fcsmpc::AmplifierParams p;
    p.bus_voltage = params->bus_voltage;
    p.stage_inductance = params->stage_inductance;
    p.stage_capacitance = params->stage_capacitance;
    p.stage_resistance = params->stage_resistance;
    p.load_inductance = params->load_inductance;
    p.load_resistance = params->load_resistance;
    auto model = std::make_unique<fcsmpc_model>();
    model->sys =
        fcsmpc::zoh_discretize(fcsmpc::build_amplifier(p), sampling_hz);
    *out = model.release();
  });
}

fcsmpc_status fcsmpc_model_from_continuous(int32_t states, int32_t inputs,
                                           int32_t outputs, const double* a,
                                           const double* b, const double* c,
                                           double sampling_hz,
                                           fcsmpc_model** out) {
  if (!out) return fail_validation("out must not be NULL");
  return guarded([&] {
    fcsmpc::ContinuousSystem sys;
    sys.A = matrix_from_buffer(a, states, states, "A");
    sys.B = matrix_from_buffer(b, states, inputs, "B");
    sys.C = matrix_from_buffer(c, outputs, states, "C");
    auto model = std::make_unique<fcsmpc_model>();
    model->sys = fcsmpc::zoh_discretize(sys, sampling_hz);
    *out = model.release();
  });
}

fcsmpc_status fcsmpc_model_from_discrete(int32_t states, int32_t inputs,
                                         int32_t outputs, const double* a,
                                         const double* b, const double* c,
                                         double sample_period,
                                         fcsmpc_model** out) {
  if (!out) return fail_validation("out must not be NULL");
  return guarded([&] {
    auto model = std::make_unique<fcsmpc_model>();
    model->sys.A = matrix_from_buffer(a, states, states, "A");
    model->sys.B = matrix_from_buffer(b, states, inputs, "B");
    model->sys.C = matrix_from_buffer(c, outputs, states, "C");
    model->sys.sample_period = sample_period;
    fcsmpc::validate_system(model->sys);
    *out = model.release();
  });
}

void fcsmpc_model_free(fcsmpc_model* model) { delete model; }

fcsmpc_status fcsmpc_model_dims(const fcsmpc_model* model, int32_t* states,
                                int32_t* inputs, int32_t* outputs) {
  if (!model) return fail_validation("model must not be NULL");
  if (states) *states = model->sys.states();
  if (inputs) *inputs = model->sys.inputs();
  if (outputs) *outputs = model->sys.outputs();
  return FCSMPC_OK;
}

fcsmpc_status fcsmpc_model_matrices(const fcsmpc_model* model, double* a,
                                    double* b, double* c) {
  if (!model) return fail_validation("model must not be NULL");
  if (a) matrix_to_buffer(model->sys.A, a);
  if (b) matrix_to_buffer(model->sys.B, b);
  if (c) matrix_to_buffer(model->sys.C, c);
  return FCSMPC_OK;
}

fcsmpc_status fcsmpc_model_sample_period(const fcsmpc_model* model,
                                         double* sample_period) {
  if (!model || !sample_period)
    return fail_validation("model/sample_period must not be NULL");
  *sample_period = model->sys.sample_period;
  return FCSMPC_OK;
}

fcsmpc_status fcsmpc_model_spectral_radius(const fcsmpc_model* model,
                                           double* radius) {
  if (!model || !radius)
    return fail_validation("model/radius must not be NULL");
  return guarded(
      [&] { *radius = fcsmpc::numerics::spectral_radius(model->sys.A); });
}

fcsmpc_status fcsmpc_model_step(const fcsmpc_model* model, const double* x,
                                const int32_t* u_bits, double* x_next) {
  if (!model || !x || !u_bits || !x_next)
    return fail_validation("model/x/u_bits/x_next must not be NULL");
  return guarded([&] {
    const fcsmpc::Vector state =
        vector_from_buffer(x, model->sys.states(), "x");
    const fcsmpc::InputVector u =
        input_from_bits(u_bits, model->sys.inputs(), "u_bits");
    const fcsmpc::Vector next = fcsmpc::step(model->sys, state, u);
    for (int i = 0; i < next.size(); ++i) x_next[i] = next(i);
  });
}

fcsmpc_status fcsmpc_model_output(const fcsmpc_model* model, const double* x,
                                  double* y) {
  if (!model || !x || !y) return fail_validation("model/x/y must not be NULL");
  return guarded([&] {
    const fcsmpc::Vector state =
        vector_from_buffer(x, model->sys.states(), "x");
    const fcsmpc::Vector out = fcsmpc::output(model->sys, state);
    for (int i = 0; i < out.size(); ++i) y[i] = out(i);
  });
}

fcsmpc_status fcsmpc_mode_of_input(const int32_t* u_bits, int32_t* mode) {
  if (!u_bits || !mode) return fail_validation("u_bits/mode must not be NULL");
  return guarded([&] {
    *mode = fcsmpc::mode_of_input(input_from_bits(u_bits, 2, "u_bits"));
  });
}

fcsmpc_status fcsmpc_input_of_mode(int32_t mode, int32_t* u_bits) {
  if (!u_bits) return fail_validation("u_bits must not be NULL");
  return guarded([&] { input_to_bits(fcsmpc::input_of_mode(mode), u_bits); });
}

/* ---- limit cycles --------------------------------------------------- */

fcsmpc_status fcsmpc_cycle_search(const fcsmpc_model* model,
                                  const double* y_ref, const double* gamma,
                                  fcsmpc_norm norm, int32_t period,
                                  uint64_t budget, fcsmpc_cycle** out) {
  if (!model || !out) return fail_validation("model/out must not be NULL");
  return guarded([&] {
    const int q = model->sys.outputs();
    fcsmpc::CycleCriterion criterion;
    criterion.y_ref = vector_from_buffer(y_ref, q, "y_ref");
    criterion.gamma = matrix_from_buffer(gamma, q, q, "gamma");
    criterion.norm = norm_of(norm);
    auto cycle = std::make_unique<fcsmpc_cycle>();
    cycle->cycle = fcsmpc::optimal_limit_cycle(
        model->sys, criterion, period,
        budget == 0 ? fcsmpc::kDefaultCycleBudget : budget);
    *out = cycle.release();
  });
}

fcsmpc_status fcsmpc_cycle_from_inputs(const fcsmpc_model* model,
                                       int32_t period, const int32_t* bits,
                                       fcsmpc_cycle** out) {
  if (!model || !bits || !out)
    return fail_validation("model/bits/out must not be NULL");
  return guarded([&] {
    if (period < 1) {
      throw fcsmpc::ValidationError("period must be >= 1");
    }
    const int m = model->sys.inputs();
    std::vector<fcsmpc::InputVector> inputs;
    inputs.reserve(period);
    for (int i = 0; i < period; ++i) {
      inputs.push_back(input_from_bits(bits + i * m, m, "bits"));
    }
    auto cycle = std::make_unique<fcsmpc_cycle>();
    cycle->cycle = fcsmpc::cycle_from_inputs(model->sys, inputs);
    *out = cycle.release();
  });
}

fcsmpc_status fcsmpc_cycle_from_json(const char* json, fcsmpc_cycle** out) {
  if (!json || !out) return fail_validation("json/out must not be NULL");
  return guarded([&] {
    const auto parsed = fcsmpc::Json::parse(json, nullptr, false);
    if (parsed.is_discarded()) {
      throw fcsmpc::IoError("cycle JSON is not valid JSON");
    }
    auto cycle = std::make_unique<fcsmpc_cycle>();
    cycle->cycle = fcsmpc::cycle_from_json(parsed);
    *out = cycle.release();
  });
}

void fcsmpc_cycle_free(fcsmpc_cycle* cycle) { delete cycle; }

fcsmpc_status fcsmpc_cycle_period(const fcsmpc_cycle* cycle, int32_t* period) {
  if (!cycle || !period)
    return fail_validation("cycle/period must not be NULL");
  *period = cycle->cycle.period;
  return FCSMPC_OK;
}

fcsmpc_status fcsmpc_cycle_index(const fcsmpc_cycle* cycle, uint64_t* index) {
  if (!cycle || !index) return fail_validation("cycle/index must not be NULL");
  *index = cycle->cycle.index;
  return FCSMPC_OK;
}

fcsmpc_status fcsmpc_cycle_state_at(const fcsmpc_cycle* cycle, int32_t phase,
                                    double* x) {
  if (!cycle || !x) return fail_validation("cycle/x must not be NULL");
  return guarded([&] {
    if (phase < 0 || phase >= cycle->cycle.period) {
      throw fcsmpc::ValidationError("phase out of range");
    }
    const fcsmpc::Vector& state = cycle->cycle.states[phase];
    for (int i = 0; i < state.size(); ++i) x[i] = state(i);
  });
}

fcsmpc_status fcsmpc_cycle_input_at(const fcsmpc_cycle* cycle, int32_t phase,
                                    int32_t* u_bits) {
  if (!cycle || !u_bits)
    return fail_validation("cycle/u_bits must not be NULL");
  return guarded([&] {
    if (phase < 0 || phase >= cycle->cycle.period) {
      throw fcsmpc::ValidationError("phase out of range");
    }
    input_to_bits(cycle->cycle.inputs[phase], u_bits);
  });
}

fcsmpc_status fcsmpc_cycle_cost(const fcsmpc_cycle* cycle,
                                const fcsmpc_model* model, const double* y_ref,
                                const double* gamma, fcsmpc_norm norm,
                                double* cost) {
  if (!cycle || !model || !cost)
    return fail_validation("cycle/model/cost must not be NULL");
  return guarded([&] {
    const int q = model->sys.outputs();
    fcsmpc::CycleCriterion criterion;
    criterion.y_ref = vector_from_buffer(y_ref, q, "y_ref");
    criterion.gamma = matrix_from_buffer(gamma, q, q, "gamma");
    criterion.norm = norm_of(norm);
    *cost = fcsmpc::cycle_cost(cycle->cycle, criterion, model->sys.C);
  });
}

fcsmpc_status fcsmpc_cycle_ripple(const fcsmpc_cycle* cycle,
                                  const fcsmpc_model* model, double* ripple) {
  if (!cycle || !model || !ripple)
    return fail_validation("cycle/model/ripple must not be NULL");
  return guarded([&] {
    const fcsmpc::Vector r = fcsmpc::cycle_ripple(cycle->cycle, model->sys.C);
    for (int i = 0; i < r.size(); ++i) ripple[i] = r(i);
  });
}

fcsmpc_status fcsmpc_cycle_to_json(const fcsmpc_cycle* cycle, char** out) {
  if (!cycle || !out) return fail_validation("cycle/out must not be NULL");
  return guarded([&] {
    *out = copy_string(fcsmpc::cycle_to_json(cycle->cycle).dump(2));
  });
}

fcsmpc_status fcsmpc_cycle_to_csv(const fcsmpc_cycle* cycle,
                                  const fcsmpc_model* model, char** out) {
  if (!cycle || !model || !out)
    return fail_validation("cycle/model/out must not be NULL");
  return guarded([&] {
    *out = copy_string(fcsmpc::cycle_to_csv(cycle->cycle, model->sys));
  });
}

/* ---- terminal cost --------------------------------------------------- */

fcsmpc_status fcsmpc_terminal_cost_compute(const fcsmpc_model* model,
                                           const double* q, double epsilon,
                                           double* p_out, double* margin) {
  if (!model || !p_out) return fail_validation("model/p_out must not be NULL");
  return guarded([&] {
    const int n = model->sys.states();
    const fcsmpc::Matrix weight = matrix_from_buffer(q, n, n, "Q");
    const double eps =
        epsilon > 0.0 ? epsilon : fcsmpc::default_terminal_epsilon(weight);
    const fcsmpc::TerminalCost tc =
        fcsmpc::compute_terminal_P(model->sys.A, weight, eps);
    matrix_to_buffer(tc.P, p_out);
    if (margin) *margin = tc.margin;
  });
}

fcsmpc_status fcsmpc_terminal_cost_verify(const fcsmpc_model* model,
                                          const double* q, const double* p,
                                          int32_t* valid, double* margin) {
  if (!model || !valid) return fail_validation("model/valid must not be NULL");
  return guarded([&] {
    const int n = model->sys.states();
    const fcsmpc::TerminalVerification result = fcsmpc::verify_terminal_P(
        model->sys.A, matrix_from_buffer(q, n, n, "Q"),
        matrix_from_buffer(p, n, n, "P"));
    *valid = result.valid ? 1 : 0;
    if (margin) *margin = result.margin;
  });
}

/* ---- controllers ----------------------------------------------------- */

fcsmpc_status fcsmpc_controller_standard(
    const fcsmpc_model* model, int32_t horizon, const double* q_weight,
    const double* r_weight, const double* p_weight, const double* y_ref,
    const double* x_lower, const double* x_upper, const double* y_lower,
    const double* y_upper, fcsmpc_controller** out) {
  if (!model || !out) return fail_validation("model/out must not be NULL");
  return guarded([&] {
    const int q = model->sys.outputs();
    const int m = model->sys.inputs();
    const int n = model->sys.states();
    auto controller = std::make_unique<fcsmpc_controller>();
    controller->problem.sys = model->sys;
    controller->problem.horizon = horizon;
    controller->problem.weights.Q = matrix_from_buffer(q_weight, q, q, "Q");
    controller->problem.weights.R = matrix_from_buffer(r_weight, m, m, "R");
    controller->problem.weights.P = matrix_from_buffer(p_weight, q, q, "P");
    controller->problem.reference =
        fcsmpc::ConstantOutputReference{vector_from_buffer(y_ref, q, "y_ref")};
    controller->problem.state_bounds =
        box_from_buffers(x_lower, x_upper, n, "state");
    controller->problem.output_bounds =
        box_from_buffers(y_lower, y_upper, q, "output");
    fcsmpc::validate_problem(controller->problem);
    *out = controller.release();
  });
}

fcsmpc_status fcsmpc_controller_cycle_tracking(
    const fcsmpc_model* model, int32_t horizon, const double* q_weight,
    const double* r_weight, const double* p_weight, const fcsmpc_cycle* cycle,
    const double* x_lower, const double* x_upper, fcsmpc_controller** out) {
  if (!model || !cycle || !out)
    return fail_validation("model/cycle/out must not be NULL");
  return guarded([&] {
    const int m = model->sys.inputs();
    const int n = model->sys.states();
    auto controller = std::make_unique<fcsmpc_controller>();
    controller->problem.sys = model->sys;
    controller->problem.horizon = horizon;
    controller->problem.weights.Q = matrix_from_buffer(q_weight, n, n, "Q");
    controller->problem.weights.R = matrix_from_buffer(r_weight, m, m, "R");
    controller->problem.weights.P = matrix_from_buffer(p_weight, n, n, "P");
    controller->problem.reference = cycle->cycle;
    controller->problem.state_bounds =
        box_from_buffers(x_lower, x_upper, n, "state");
    fcsmpc::validate_problem(controller->problem);
    *out = controller.release();
  });
}

void fcsmpc_controller_free(fcsmpc_controller* controller) {
  delete controller;
}

fcsmpc_status fcsmpc_controller_step(const fcsmpc_controller* controller,
                                     const double* x, uint64_t k,
                                     const int32_t* u_prev_bits,
                                     fcsmpc_solver solver, int32_t* u_bits,
                                     double* cost, uint64_t* nodes_explored) {
  if (!controller || !x || !u_bits)
    return fail_validation("controller/x/u_bits must not be NULL");
  return guarded([&] {
    const int m = controller->problem.sys.inputs();
    const fcsmpc::InputVector u_prev =
        u_prev_bits ? input_from_bits(u_prev_bits, m, "u_prev_bits")
                    : fcsmpc::InputVector::zero(m);
    const fcsmpc::ControlDecision decision = fcsmpc::controller_step(
        controller->problem,
        vector_from_buffer(x, controller->problem.sys.states(), "x"), k,
        u_prev, solver_of(solver));
    input_to_bits(decision.input, u_bits);
    if (cost) *cost = decision.cost;
    if (nodes_explored) *nodes_explored = decision.nodes_explored;
  });
}

/* ---- closed-loop simulation ------------------------------------------ */

fcsmpc_status fcsmpc_simulate(const fcsmpc_controller* controller,
                              const double* x0, int32_t steps,
                              fcsmpc_solver solver, fcsmpc_trajectory** out) {
  if (!controller || !x0 || !out)
    return fail_validation("controller/x0/out must not be NULL");
  return guarded([&] {
    auto trajectory = std::make_unique<fcsmpc_trajectory>();
    trajectory->traj = fcsmpc::simulate(
        controller->problem,
        vector_from_buffer(x0, controller->problem.sys.states(), "x0"), steps,
        solver_of(solver));
    *out = trajectory.release();
  });
}

void fcsmpc_trajectory_free(fcsmpc_trajectory* trajectory) {
  delete trajectory;
}

fcsmpc_status fcsmpc_trajectory_steps(const fcsmpc_trajectory* trajectory,
                                      int32_t* steps) {
  if (!trajectory || !steps)
    return fail_validation("trajectory/steps must not be NULL");
  *steps = trajectory->traj.steps();
  return FCSMPC_OK;
}

fcsmpc_status fcsmpc_trajectory_state_at(const fcsmpc_trajectory* trajectory,
                                         int32_t k, double* x) {
  if (!trajectory || !x)
    return fail_validation("trajectory/x must not be NULL");
  return guarded([&] {
    if (k < 0 || k >= static_cast<int32_t>(trajectory->traj.states.size())) {
      throw fcsmpc::ValidationError("state index out of range");
    }
    const fcsmpc::Vector& state = trajectory->traj.states[k];
    for (int i = 0; i < state.size(); ++i) x[i] = state(i);
  });
}

fcsmpc_status fcsmpc_trajectory_output_at(const fcsmpc_trajectory* trajectory,
                                          int32_t k, double* y) {
  if (!trajectory || !y)
    return fail_validation("trajectory/y must not be NULL");
  return guarded([&] {
    if (k < 0 || k >= static_cast<int32_t>(trajectory->traj.outputs.size())) {
      throw fcsmpc::ValidationError("output index out of range");
    }
    const fcsmpc::Vector& out = trajectory->traj.outputs[k];
    for (int i = 0; i < out.size(); ++i) y[i] = out(i);
  });
}

fcsmpc_status fcsmpc_trajectory_input_at(const fcsmpc_trajectory* trajectory,
                                         int32_t k, int32_t* u_bits) {
  if (!trajectory || !u_bits)
    return fail_validation("trajectory/u_bits must not be NULL");
  return guarded([&] {
    if (k < 0 || k >= trajectory->traj.steps()) {
      throw fcsmpc::ValidationError("input index out of range");
    }
    input_to_bits(trajectory->traj.inputs[k], u_bits);
  });
}

fcsmpc_status fcsmpc_trajectory_cost_at(const fcsmpc_trajectory* trajectory,
                                        int32_t k, double* cost) {
  if (!trajectory || !cost)
    return fail_validation("trajectory/cost must not be NULL");
  return guarded([&] {
    if (k < 0 || k >= trajectory->traj.steps()) {
      throw fcsmpc::ValidationError("cost index out of range");
    }
    *cost = trajectory->traj.costs[k];
  });
}

fcsmpc_status fcsmpc_trajectory_mode_at(const fcsmpc_trajectory* trajectory,
                                        int32_t k, int32_t* mode) {
  if (!trajectory || !mode)
    return fail_validation("trajectory/mode must not be NULL");
  return guarded([&] {
    if (k < 0 || k >= trajectory->traj.steps()) {
      throw fcsmpc::ValidationError("mode index out of range");
    }
    *mode = trajectory->traj.modes[k];
  });
}

fcsmpc_status fcsmpc_trajectory_nodes_at(const fcsmpc_trajectory* trajectory,
                                         int32_t k, uint64_t* nodes) {
  if (!trajectory || !nodes)
    return fail_validation("trajectory/nodes must not be NULL");
  return guarded([&] {
    if (k < 0 || k >= trajectory->traj.steps()) {
      throw fcsmpc::ValidationError("node index out of range");
    }
    *nodes = trajectory->traj.nodes_explored[k];
  });
}

fcsmpc_status fcsmpc_trajectory_to_csv(const fcsmpc_trajectory* trajectory,
                                       char** out) {
  if (!trajectory || !out)
    return fail_validation("trajectory/out must not be NULL");
  return guarded([&] {
    *out = copy_string(fcsmpc::trajectory_to_csv(trajectory->traj));
  });
}

fcsmpc_status fcsmpc_trajectory_report_json(
    const fcsmpc_trajectory* trajectory, const fcsmpc_cycle* cycle,
    double convergence_tol, int32_t window, int32_t max_mode_period,
    char** out) {
  if (!trajectory || !out)
    return fail_validation("trajectory/out must not be NULL");
  return guarded([&] {
    const fcsmpc::SteadyStateReport report = fcsmpc::steady_state_report(
        trajectory->traj, cycle ? &cycle->cycle : nullptr, convergence_tol,
        window, max_mode_period);
    *out = copy_string(fcsmpc::report_to_json(report).dump(2));
  });
}

} /* extern "C" */
