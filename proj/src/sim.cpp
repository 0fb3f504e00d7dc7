#include "fcsmpc/sim.hpp"

#include <limits>
#include <sstream>

namespace fcsmpc {

Trajectory simulate(const MpcProblem& prob, const Vector& x0, int steps,
                    Solver solver) {
  validate_problem(prob);
  if (steps < 1) {
    throw ValidationError("simulation length must be >= 1, got " +
                          std::to_string(steps));
  }
  if (x0.size() != prob.sys.states()) {
    throw DimensionError("initial state has " + std::to_string(x0.size()) +
                         " entries, expected " +
                         std::to_string(prob.sys.states()));
  }

  Trajectory traj;
  traj.sample_period = prob.sys.sample_period;
  traj.states.reserve(steps + 1);
  traj.inputs.reserve(steps);
  traj.outputs.reserve(steps + 1);
  traj.costs.reserve(steps);
  traj.modes.reserve(steps);
  traj.nodes_explored.reserve(steps);

  Vector x = x0;
  InputVector u_prev = InputVector::zero(prob.sys.inputs());
  traj.states.push_back(x);
  traj.outputs.push_back(output(prob.sys, x));

  for (int k = 0; k < steps; ++k) {
    ControlDecision decision;
    try {
      decision = controller_step(prob, x, static_cast<std::uint64_t>(k),
                                 u_prev, solver);
    } catch (const InfeasibleError& err) {
      std::ostringstream os;
      os << "simulation infeasible at step " << k << ": " << err.what();
      throw InfeasibleError(os.str());
    }

    traj.inputs.push_back(decision.input);
    traj.costs.push_back(decision.cost);
    traj.modes.push_back(static_cast<int>(decision.input.digit()) + 1);
    traj.nodes_explored.push_back(decision.nodes_explored);

    x = step(prob.sys, x, decision.input);
    traj.states.push_back(x);
    traj.outputs.push_back(output(prob.sys, x));
    u_prev = decision.input;
  }
  return traj;
}

std::optional<int> detect_convergence(const Trajectory& traj,
                                      const LimitCycle& cycle, double tol) {
  if (!(tol > 0.0)) {
    throw ValidationError("convergence tolerance must be positive");
  }
  if (cycle.period < 1 || cycle.states.empty()) {
    throw ValidationError("reference cycle is empty");
  }
  if (!traj.states.empty() &&
      traj.states[0].size() != cycle.states[0].size()) {
    throw DimensionError("trajectory and cycle state dimensions differ");
  }
  const int p = cycle.period;
  const int total = static_cast<int>(traj.states.size());
  const int window = 2 * p;
  if (total < window) {
    return std::nullopt;
  }

  // on_cycle[j]: state j is within tol of its phase reference.
  std::vector<char> on_cycle(total);
  for (int j = 0; j < total; ++j) {
    const Vector& ref = cycle.states[j % p];
    on_cycle[j] =
        (traj.states[j] - ref).cwiseAbs().maxCoeff() <= tol ? 1 : 0;
  }

  int run = 0;
  for (int j = 0; j <= total - 1; ++j) {
    run = on_cycle[j] ? run + 1 : 0;
    if (run >= window) {
      return j - window + 1;
    }
  }
  return std::nullopt;
}

namespace {

void require_window(const Trajectory& traj, int window) {
  if (window < 1) {
    throw ValidationError("window must be >= 1, got " +
                          std::to_string(window));
  }
  if (window > static_cast<int>(traj.outputs.size())) {
    throw ValidationError("window of " + std::to_string(window) +
                          " samples exceeds the trajectory length of " +
                          std::to_string(traj.outputs.size()));
  }
}

}  // namespace

Vector steady_state_ripple(const Trajectory& traj, int window) {
  require_window(traj, window);
  const int total = static_cast<int>(traj.outputs.size());
  const int q = static_cast<int>(traj.outputs.front().size());
  Vector low = Vector::Constant(q, std::numeric_limits<double>::infinity());
  Vector high = Vector::Constant(q, -std::numeric_limits<double>::infinity());
  for (int j = total - window; j < total; ++j) {
    low = low.cwiseMin(traj.outputs[j]);
    high = high.cwiseMax(traj.outputs[j]);
  }
  return high - low;
}

Vector steady_state_mean(const Trajectory& traj, int window) {
  require_window(traj, window);
  const int total = static_cast<int>(traj.outputs.size());
  const int q = static_cast<int>(traj.outputs.front().size());
  Vector sum = Vector::Zero(q);
  for (int j = total - window; j < total; ++j) {
    sum += traj.outputs[j];
  }
  return sum / static_cast<double>(window);
}

LyapunovReport lyapunov_decrease_report(const Trajectory& traj) {
  LyapunovReport report;
  const int count = static_cast<int>(traj.costs.size());
  if (count < 2) {
    report.monotone_after = 0;
    return report;
  }

  int last_violation = -1;
  for (int k = 0; k + 1 < count; ++k) {
    const double increase = traj.costs[k + 1] - traj.costs[k];
    const double allowance = 1e-8 * (1.0 + traj.costs[k]);
    if (increase > allowance) {
      last_violation = k;
    }
    if (increase > report.max_violation) {
      report.max_violation = increase;
    }
  }
  if (report.max_violation < 0.0) {
    report.max_violation = 0.0;
  }
  if (last_violation == count - 2) {
    report.monotone_after = std::nullopt;  // violated up to the end
  } else {
    report.monotone_after = last_violation + 1;
  }
  return report;
}

std::optional<std::vector<int>> detect_mode_cycle(const Trajectory& traj,
                                                  int max_period) {
  if (max_period < 1) {
    throw ValidationError("max mode period must be >= 1");
  }
  const int count = static_cast<int>(traj.modes.size());
  // Candidate periods are judged over a shared window of 3*max_period
  // samples (clipped to the trajectory); otherwise a short run of repeated
  // modes inside a longer cycle would alias as period 1.
  const int window = std::min(count, 3 * max_period);
  for (int period = 1; period <= max_period; ++period) {
    const int span = std::max(3 * period, window);
    if (span > count) {
      break;
    }
    bool repeats = true;
    for (int j = count - span; j + period < count; ++j) {
      if (traj.modes[j] != traj.modes[j + period]) {
        repeats = false;
        break;
      }
    }
    if (!repeats) {
      continue;
    }
    // Rotate so slot j corresponds to steps k with k mod period = j.
    int start = count - span;
    start += (period - start % period) % period;
    std::vector<int> sequence(period);
    for (int j = 0; j < period; ++j) {
      sequence[(start + j) % period] = traj.modes[start + j];
    }
    return sequence;
  }
  return std::nullopt;
}

SteadyStateReport steady_state_report(const Trajectory& traj,
                                      const LimitCycle* cycle,
                                      double convergence_tol, int window,
                                      int max_mode_period) {
  SteadyStateReport report;
  if (window <= 0) {
    if (cycle == nullptr) {
      throw ValidationError(
          "a ripple window is required when no reference cycle is given");
    }
    window = 10 * cycle->period;
  }
  window = std::min(window, static_cast<int>(traj.outputs.size()));
  report.window = window;

  if (cycle != nullptr) {
    report.converged_at = detect_convergence(traj, *cycle, convergence_tol);
    report.converged = report.converged_at.has_value();
  }
  report.ripple = steady_state_ripple(traj, window);
  report.mean_output = steady_state_mean(traj, window);
  report.mode_cycle = detect_mode_cycle(traj, max_mode_period);

  const LyapunovReport lyapunov = lyapunov_decrease_report(traj);
  report.cost_monotone_after = lyapunov.monotone_after;
  report.max_cost_violation = lyapunov.max_violation;
  return report;
}

}  // namespace fcsmpc
