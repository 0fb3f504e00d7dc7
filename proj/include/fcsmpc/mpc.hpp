#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "fcsmpc/limit_cycle.hpp"
#include "fcsmpc/terminal_cost.hpp"

namespace fcsmpc {

/// Default cap on exhaustive enumeration, (2^m)^N candidates.
inline constexpr std::uint64_t kDefaultSolveBudget = 1ull << 24;

enum class Solver { exhaustive, branch_and_bound };

/// Stage and terminal weights. For constant-output tracking Q and P act on
/// the output, for limit-cycle tracking on the state; R always acts on the
/// input.
struct MpcWeights {
  Matrix Q;
  Matrix R;
  Matrix P;
};

struct ConstantOutputReference {
  Vector y_ref;
};

using TrackingReference = std::variant<ConstantOutputReference, LimitCycle>;

/// Axis-aligned box; entries may be +-infinity for one-sided bounds.
struct BoxBounds {
  Vector lower;
  Vector upper;
};

struct MpcProblem {
  DiscreteSystem sys;
  int horizon = 1;
  MpcWeights weights;
  TrackingReference reference;
  std::optional<BoxBounds> state_bounds;
  std::optional<BoxBounds> output_bounds;

  bool tracks_cycle() const {
    return std::holds_alternative<LimitCycle>(reference);
  }
  const LimitCycle& cycle() const { return std::get<LimitCycle>(reference); }
};

/// Checks dimensions, weight symmetry/definiteness, bound ordering and (for
/// cycle tracking) the periodicity certificate. Throws on violation.
void validate_problem(const MpcProblem& prob);

struct MpcSolution {
  std::vector<InputVector> inputs;
  double cost = 0.0;
  std::uint64_t nodes_explored = 0;
};

struct ControlDecision {
  InputVector input;
  double cost = 0.0;
  std::uint64_t nodes_explored = 0;
};

/// Cost of an input sequence for constant-output tracking: stage terms
/// (y_i - y_ref)' Q (y_i - y_ref) + du_i' R du_i for i = 0..N-1 plus the
/// terminal (y_N - y_ref)' P (y_N - y_ref), with du_0 = u_0 - u_prev.
double standard_cost(const MpcProblem& prob, const Vector& x,
                     const InputVector& u_prev,
                     const std::vector<InputVector>& sequence);

/// Cost of an input sequence for limit-cycle tracking at time k: stage terms
/// (x_i - xbar)' Q (x_i - xbar) + (u_i - ubar)' R (u_i - ubar) plus the
/// terminal (x_N - xbar)' P (x_N - xbar), with references indexed (k+i) mod p.
double lc_cost(const MpcProblem& prob, const Vector& x, std::uint64_t k,
               const std::vector<InputVector>& sequence);

/// Cycle reference at horizon offset `i` from time `k`: the state phase
/// (k+i) mod p and the matching input (meaningful for i <= N-1).
struct ReferencePoint {
  const Vector& state;
  const InputVector& input;
};
ReferencePoint reference_at(const LimitCycle& cycle, std::uint64_t k, int i);

/// Enumerates every admissible input sequence; sequences violating the state
/// or output box at any step are discarded. Ties broken lexicographically
/// (sequence read as a base-2^m number, smallest wins).
MpcSolution solve_exhaustive(const MpcProblem& prob, const Vector& x,
                             std::uint64_t k, const InputVector& u_prev,
                             std::uint64_t budget = kDefaultSolveBudget);

/// Depth-first branch-and-bound with the accumulated stage cost as lower
/// bound. Returns exactly the solve_exhaustive solution (same cost, same
/// sequence under the shared tie-break).
MpcSolution solve_branch_and_bound(const MpcProblem& prob, const Vector& x,
                                   std::uint64_t k, const InputVector& u_prev);

/// Receding-horizon step: solves and returns the first input of the optimal
/// sequence together with the optimal cost.
ControlDecision controller_step(const MpcProblem& prob, const Vector& x,
                                std::uint64_t k, const InputVector& u_prev,
                                Solver solver);

}  // namespace fcsmpc
