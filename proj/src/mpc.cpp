#include "fcsmpc/mpc.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace fcsmpc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_symmetric_weight(const Matrix& m, const char* label,
                              Eigen::Index dim) {
  if (m.rows() != dim || m.cols() != dim) {
    std::ostringstream os;
    os << label << " must be " << dim << "x" << dim << ", got " << m.rows()
       << "x" << m.cols();
    throw DimensionError(os.str());
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw ValidationError(std::string(label) + " must be symmetric");
  }
}

double min_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
  return es.eigenvalues().minCoeff();
}

void require_box(const BoxBounds& box, Eigen::Index dim, const char* label) {
  if (box.lower.size() != dim || box.upper.size() != dim) {
    throw DimensionError(std::string(label) + " bounds must have " +
                         std::to_string(dim) + " entries");
  }
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (std::isnan(box.lower(i)) || std::isnan(box.upper(i)) ||
        box.lower(i) > box.upper(i)) {
      throw ValidationError(std::string(label) + " bounds are not well-ordered at entry " +
                            std::to_string(i));
    }
  }
}

bool inside_box(const BoxBounds& box, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v(i) < box.lower(i) || v(i) > box.upper(i)) {
      return false;
    }
  }
  return true;
}

// Everything a depth-first sweep over the input tree needs, precomputed per
// solve so that the per-node work is one matrix-vector product and two
// quadratic forms.
struct SearchContext {
  const MpcProblem* prob = nullptr;
  int horizon = 0;
  int fanout = 0;
  bool cycle_mode = false;

  // Cycle tracking: reference state per horizon slot 0..N.
  std::vector<const Vector*> state_ref;

  // Constant-output tracking.
  Vector y_ref;

  std::vector<Vector> forced;   // B*u per digit
  Matrix delta_penalty;         // (prev, next) -> du' R du
  Matrix slot_penalty;          // (digit, slot i) -> (u - ubar_{i|k})' R (...)
  std::uint32_t prev_digit0 = 0;

  std::vector<Vector> x_stack;
  Vector tmp_state, tmp_out, err_state, err_out;

  bool prune = false;
  bool found = false;
  double incumbent = kInf;
  std::vector<std::uint32_t> digits;
  std::vector<std::uint32_t> best_digits;
  std::uint64_t nodes = 0;
};

SearchContext make_context(const MpcProblem& prob, const Vector& x,
                           std::uint64_t k, const InputVector& u_prev) {
  const DiscreteSystem& sys = prob.sys;
  const int n = sys.states();
  const int m = sys.inputs();
  const int horizon = prob.horizon;

  if (x.size() != n) {
    throw DimensionError("initial state has " + std::to_string(x.size()) +
                         " entries, expected " + std::to_string(n));
  }
  if (u_prev.size() != m) {
    throw DimensionError("previous input has " + std::to_string(u_prev.size()) +
                         " bits, expected " + std::to_string(m));
  }

  SearchContext ctx;
  ctx.prob = &prob;
  ctx.horizon = horizon;
  ctx.fanout = static_cast<int>(sys.control_set_size());
  ctx.cycle_mode = prob.tracks_cycle();
  ctx.prev_digit0 = u_prev.digit();

  ctx.forced.reserve(ctx.fanout);
  std::vector<Vector> input_vectors;
  input_vectors.reserve(ctx.fanout);
  for (int d = 0; d < ctx.fanout; ++d) {
    const InputVector u(m, static_cast<std::uint32_t>(d));
    input_vectors.push_back(u.to_vector());
    ctx.forced.push_back(sys.B * input_vectors.back());
  }

  if (ctx.cycle_mode) {
    const LimitCycle& cycle = prob.cycle();
    const int p = cycle.period;
    ctx.state_ref.resize(horizon + 1);
    for (int i = 0; i <= horizon; ++i) {
      const int phase = static_cast<int>((k + static_cast<std::uint64_t>(i)) %
                                         static_cast<std::uint64_t>(p));
      ctx.state_ref[i] = &cycle.states[phase];
    }
    Matrix phase_penalty(ctx.fanout, p);
    for (int d = 0; d < ctx.fanout; ++d) {
      for (int phase = 0; phase < p; ++phase) {
        const Vector delta = input_vectors[d] - cycle.inputs[phase].to_vector();
        phase_penalty(d, phase) = delta.dot(prob.weights.R * delta);
      }
    }
    ctx.slot_penalty = Matrix(ctx.fanout, horizon);
    for (int i = 0; i < horizon; ++i) {
      const int phase = static_cast<int>((k + static_cast<std::uint64_t>(i)) %
                                         static_cast<std::uint64_t>(p));
      ctx.slot_penalty.col(i) = phase_penalty.col(phase);
    }
  } else {
    ctx.y_ref = std::get<ConstantOutputReference>(prob.reference).y_ref;
    ctx.delta_penalty = Matrix(ctx.fanout, ctx.fanout);
    for (int dp = 0; dp < ctx.fanout; ++dp) {
      for (int d = 0; d < ctx.fanout; ++d) {
        const Vector delta = input_vectors[d] - input_vectors[dp];
        ctx.delta_penalty(dp, d) = delta.dot(prob.weights.R * delta);
      }
    }
  }

  ctx.x_stack.assign(horizon + 1, Vector(n));
  ctx.x_stack[0] = x;
  ctx.tmp_state = Vector(n);
  ctx.tmp_out = Vector(sys.outputs());
  ctx.err_state = Vector(n);
  ctx.err_out = Vector(sys.outputs());
  ctx.digits.assign(horizon, 0);
  ctx.best_digits.assign(horizon, 0);
  return ctx;
}

// (x_i - ref)' Q (x_i - ref) or (y_i - y_ref)' Q (y_i - y_ref) at slot i.
inline double stage_state_cost(SearchContext& ctx, int depth) {
  const MpcProblem& prob = *ctx.prob;
  if (ctx.cycle_mode) {
    ctx.err_state = ctx.x_stack[depth] - *ctx.state_ref[depth];
    ctx.tmp_state.noalias() = prob.weights.Q * ctx.err_state;
    return ctx.err_state.dot(ctx.tmp_state);
  }
  ctx.err_out.noalias() = prob.sys.C * ctx.x_stack[depth];
  ctx.err_out -= ctx.y_ref;
  ctx.tmp_out.noalias() = prob.weights.Q * ctx.err_out;
  return ctx.err_out.dot(ctx.tmp_out);
}

inline double terminal_cost(SearchContext& ctx) {
  const MpcProblem& prob = *ctx.prob;
  if (ctx.cycle_mode) {
    ctx.err_state = ctx.x_stack[ctx.horizon] - *ctx.state_ref[ctx.horizon];
    ctx.tmp_state.noalias() = prob.weights.P * ctx.err_state;
    return ctx.err_state.dot(ctx.tmp_state);
  }
  ctx.err_out.noalias() = prob.sys.C * ctx.x_stack[ctx.horizon];
  ctx.err_out -= ctx.y_ref;
  ctx.tmp_out.noalias() = prob.weights.P * ctx.err_out;
  return ctx.err_out.dot(ctx.tmp_out);
}

inline bool admissible(SearchContext& ctx, const Vector& x) {
  const MpcProblem& prob = *ctx.prob;
  if (prob.state_bounds && !inside_box(*prob.state_bounds, x)) {
    return false;
  }
  if (prob.output_bounds) {
    ctx.tmp_out.noalias() = prob.sys.C * x;
    if (!inside_box(*prob.output_bounds, ctx.tmp_out)) {
      return false;
    }
  }
  return true;
}

void depth_first(SearchContext& ctx, int depth, std::uint32_t prev_digit,
                 double accumulated) {
  if (depth == ctx.horizon) {
    const double total = accumulated + terminal_cost(ctx);
    if (total < ctx.incumbent) {
      ctx.incumbent = total;
      ctx.best_digits = ctx.digits;
      ctx.found = true;
    }
    return;
  }

  const double state_part = stage_state_cost(ctx, depth);
  const Vector& x_here = ctx.x_stack[depth];
  Vector& x_next = ctx.x_stack[depth + 1];
  for (int d = 0; d < ctx.fanout; ++d) {
    ++ctx.nodes;
    const double input_part = ctx.cycle_mode
                                  ? ctx.slot_penalty(d, depth)
                                  : ctx.delta_penalty(prev_digit, d);
    const double next_accumulated = accumulated + (state_part + input_part);
    if (ctx.prune && ctx.found && next_accumulated >= ctx.incumbent) {
      continue;
    }
    x_next.noalias() = ctx.prob->sys.A * x_here;
    x_next += ctx.forced[d];
    if (!admissible(ctx, x_next)) {
      continue;
    }
    ctx.digits[depth] = static_cast<std::uint32_t>(d);
    depth_first(ctx, depth + 1, static_cast<std::uint32_t>(d),
                next_accumulated);
  }
}

MpcSolution run_search(const MpcProblem& prob, const Vector& x,
                       std::uint64_t k, const InputVector& u_prev, bool prune,
                       std::uint64_t budget) {
  validate_problem(prob);
  SearchContext ctx = make_context(prob, x, k, u_prev);

  if (!prune) {
    const int total_bits = prob.sys.inputs() * prob.horizon;
    if (total_bits > 63 || (1ull << total_bits) > budget) {
      std::ostringstream os;
      os << "exhaustive enumeration needs 2^" << total_bits
         << " sequences, exceeding the budget of " << budget;
      throw CapacityError(os.str());
    }
  }

  ctx.prune = prune;
  depth_first(ctx, 0, ctx.prev_digit0, 0.0);

  if (!ctx.found) {
    throw InfeasibleError(
        "no feasible input sequence: the state/output constraints exclude "
        "every candidate over the horizon");
  }

  MpcSolution solution;
  solution.cost = ctx.incumbent;
  solution.inputs.reserve(prob.horizon);
  for (int i = 0; i < prob.horizon; ++i) {
    solution.inputs.emplace_back(prob.sys.inputs(), ctx.best_digits[i]);
  }
  solution.nodes_explored =
      prune ? ctx.nodes
            : (1ull << (prob.sys.inputs() * prob.horizon));
  return solution;
}

}  // namespace

void validate_problem(const MpcProblem& prob) {
  validate_system(prob.sys);
  if (prob.horizon < 1) {
    throw ValidationError("prediction horizon must be >= 1, got " +
                          std::to_string(prob.horizon));
  }

  const int n = prob.sys.states();
  const int m = prob.sys.inputs();
  const int q = prob.sys.outputs();

  const Eigen::Index weight_dim = prob.tracks_cycle() ? n : q;
  require_symmetric_weight(prob.weights.Q, "Q", weight_dim);
  require_symmetric_weight(prob.weights.P, "P", weight_dim);
  require_symmetric_weight(prob.weights.R, "R", m);

  const double scale_q = std::max(1.0, prob.weights.Q.cwiseAbs().maxCoeff());
  const double scale_r = std::max(1.0, prob.weights.R.cwiseAbs().maxCoeff());
  if (min_eigenvalue(prob.weights.Q) < -1e-10 * scale_q) {
    throw ValidationError("Q must be positive semidefinite");
  }
  if (min_eigenvalue(prob.weights.R) < -1e-10 * scale_r) {
    throw ValidationError("R must be positive semidefinite");
  }
  if (!(min_eigenvalue(prob.weights.P) > 0.0)) {
    throw ValidationError("P must be positive definite");
  }

  if (prob.tracks_cycle()) {
    const LimitCycle& cycle = prob.cycle();
    for (const InputVector& u : cycle.inputs) {
      if (u.size() != m) {
        throw DimensionError("cycle input width does not match the plant");
      }
    }
    for (const Vector& xc : cycle.states) {
      if (xc.size() != n) {
        throw DimensionError("cycle state dimension does not match the plant");
      }
    }
    verify_periodicity(prob.sys, cycle);
  } else {
    const auto& ref = std::get<ConstantOutputReference>(prob.reference);
    if (ref.y_ref.size() != q) {
      throw DimensionError("output reference has " +
                           std::to_string(ref.y_ref.size()) +
                           " entries, expected " + std::to_string(q));
    }
  }

  if (prob.state_bounds) {
    require_box(*prob.state_bounds, n, "state");
  }
  if (prob.output_bounds) {
    require_box(*prob.output_bounds, q, "output");
  }
}

double standard_cost(const MpcProblem& prob, const Vector& x,
                     const InputVector& u_prev,
                     const std::vector<InputVector>& sequence) {
  if (prob.tracks_cycle()) {
    throw ValidationError("standard_cost requires a constant-output reference");
  }
  validate_problem(prob);
  if (static_cast<int>(sequence.size()) != prob.horizon) {
    throw DimensionError("input sequence length " +
                         std::to_string(sequence.size()) +
                         " does not match the horizon " +
                         std::to_string(prob.horizon));
  }
  const Vector& y_ref = std::get<ConstantOutputReference>(prob.reference).y_ref;

  double total = 0.0;
  Vector state = x;
  Vector u_before = u_prev.to_vector();
  for (int i = 0; i < prob.horizon; ++i) {
    const Vector y_err = prob.sys.C * state - y_ref;
    const Vector du = sequence[i].to_vector() - u_before;
    const double stage = y_err.dot(prob.weights.Q * y_err) +
                         du.dot(prob.weights.R * du);
    total += stage;
    state = step(prob.sys, state, sequence[i]);
    u_before = sequence[i].to_vector();
  }
  const Vector y_err = prob.sys.C * state - y_ref;
  return total + y_err.dot(prob.weights.P * y_err);
}

double lc_cost(const MpcProblem& prob, const Vector& x, std::uint64_t k,
               const std::vector<InputVector>& sequence) {
  if (!prob.tracks_cycle()) {
    throw ValidationError("lc_cost requires a limit-cycle reference");
  }
  validate_problem(prob);
  if (static_cast<int>(sequence.size()) != prob.horizon) {
    throw DimensionError("input sequence length " +
                         std::to_string(sequence.size()) +
                         " does not match the horizon " +
                         std::to_string(prob.horizon));
  }
  const LimitCycle& cycle = prob.cycle();

  double total = 0.0;
  Vector state = x;
  for (int i = 0; i < prob.horizon; ++i) {
    const ReferencePoint ref = reference_at(cycle, k, i);
    const Vector x_err = state - ref.state;
    const Vector u_err = sequence[i].to_vector() - ref.input.to_vector();
    const double stage = x_err.dot(prob.weights.Q * x_err) +
                         u_err.dot(prob.weights.R * u_err);
    total += stage;
    state = step(prob.sys, state, sequence[i]);
  }
  const ReferencePoint ref = reference_at(cycle, k, prob.horizon);
  const Vector x_err = state - ref.state;
  return total + x_err.dot(prob.weights.P * x_err);
}

ReferencePoint reference_at(const LimitCycle& cycle, std::uint64_t k, int i) {
  if (cycle.period < 1) {
    throw ValidationError("limit cycle is empty");
  }
  if (i < 0) {
    throw ValidationError("horizon offset must be nonnegative");
  }
  const int phase = static_cast<int>(
      (k + static_cast<std::uint64_t>(i)) % static_cast<std::uint64_t>(cycle.period));
  return ReferencePoint{cycle.states[phase], cycle.inputs[phase]};
}

MpcSolution solve_exhaustive(const MpcProblem& prob, const Vector& x,
                             std::uint64_t k, const InputVector& u_prev,
                             std::uint64_t budget) {
  return run_search(prob, x, k, u_prev, /*prune=*/false, budget);
}

MpcSolution solve_branch_and_bound(const MpcProblem& prob, const Vector& x,
                                   std::uint64_t k, const InputVector& u_prev) {
  return run_search(prob, x, k, u_prev, /*prune=*/true, 0);
}

ControlDecision controller_step(const MpcProblem& prob, const Vector& x,
                                std::uint64_t k, const InputVector& u_prev,
                                Solver solver) {
  const MpcSolution solution =
      solver == Solver::exhaustive
          ? solve_exhaustive(prob, x, k, u_prev)
          : solve_branch_and_bound(prob, x, k, u_prev);
  return ControlDecision{solution.inputs.front(), solution.cost,
                         solution.nodes_explored};
}

}  // namespace fcsmpc
