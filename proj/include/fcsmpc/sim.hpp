#pragma once

#include <optional>

#include "fcsmpc/mpc.hpp"

namespace fcsmpc {

/// Closed-loop record. `states` has one more entry than `inputs`; outputs
/// are recorded for every state, costs and modes once per applied input.
/// The mode entry is the input digit + 1, which for the 2-input amplifier
/// coincides with its operation-mode numbering.
struct Trajectory {
  std::vector<Vector> states;
  std::vector<InputVector> inputs;
  std::vector<Vector> outputs;
  std::vector<double> costs;
  std::vector<int> modes;
  std::vector<std::uint64_t> nodes_explored;
  double sample_period = 0.0;

  int steps() const { return static_cast<int>(inputs.size()); }
};

/// Runs the receding-horizon loop from x0 for `steps` samples. The pre-history
/// input at k = 0 is the all-zero vector.
Trajectory simulate(const MpcProblem& prob, const Vector& x0, int steps,
                    Solver solver);

/// Smallest k such that ||x(j) - cycle state at phase j mod p||_inf <= tol
/// for all j in [k, k+2p); nullopt when no such window exists.
std::optional<int> detect_convergence(const Trajectory& traj,
                                      const LimitCycle& cycle, double tol);

/// Per-output peak-to-peak over the final `window` recorded outputs.
Vector steady_state_ripple(const Trajectory& traj, int window);

/// Per-output mean over the final `window` recorded outputs.
Vector steady_state_mean(const Trajectory& traj, int window);

struct LyapunovReport {
  /// Earliest step after which J*(k+1) - J*(k) <= 1e-8 * (1 + J*(k)) holds
  /// for all remaining steps; nullopt when the final pair still violates.
  std::optional<int> monotone_after;
  /// Largest positive jump J*(k+1) - J*(k) anywhere (0 when non-increasing).
  double max_violation = 0.0;
};

LyapunovReport lyapunov_decrease_report(const Trajectory& traj);

/// Smallest period T <= max_period whose mode sequence repeats exactly over
/// the final three periods, rotated so that slot j holds the mode applied at
/// simulation steps k with k mod T = j.
std::optional<std::vector<int>> detect_mode_cycle(const Trajectory& traj,
                                                  int max_period);

struct SteadyStateReport {
  std::optional<int> converged_at;
  Vector ripple;
  Vector mean_output;
  std::optional<std::vector<int>> mode_cycle;
  std::optional<int> cost_monotone_after;
  double max_cost_violation = 0.0;
  int window = 0;
  bool converged = false;
};

/// Aggregated steady-state metrics. `cycle` may be null (no convergence
/// detection); window 0 selects 10 cycle periods when a cycle is given.
SteadyStateReport steady_state_report(const Trajectory& traj,
                                      const LimitCycle* cycle,
                                      double convergence_tol, int window,
                                      int max_mode_period);

}  // namespace fcsmpc
