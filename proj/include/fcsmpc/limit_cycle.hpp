#pragma once

#include <cstdint>
#include <vector>

#include "fcsmpc/model.hpp"

namespace fcsmpc {

/// Default cap on the number of enumerated candidate cycles.
inline constexpr std::uint64_t kDefaultCycleBudget = 1ull << 24;

/// A p-periodic steady-state trajectory of a discrete system under a
/// p-periodic input sequence. `index` is the 1-based enumeration id of the
/// input sequence within the (2^m)^p candidates.
struct LimitCycle {
  int period = 0;
  std::vector<Vector> states;       ///< phase 0..p-1
  std::vector<InputVector> inputs;  ///< phase 0..p-1
  std::uint64_t index = 0;
};

enum class CycleNorm { two_norm, one_norm, inf_norm };

/// Selection criterion: mean distance of the weighted cycle output to the
/// weighted reference, under the chosen norm.
struct CycleCriterion {
  Vector y_ref;
  Matrix gamma;  ///< q x q output weighting
  CycleNorm norm = CycleNorm::two_norm;
};

/// Canonical bijection between enumeration ids and p-periodic input
/// sequences: index-1 written in base 2^m with p digits, most significant
/// digit first.
std::vector<InputVector> input_sequence_from_index(std::uint64_t index,
                                                   int input_bits, int period);

/// Inverse of input_sequence_from_index.
std::uint64_t index_of_input_sequence(const std::vector<InputVector>& inputs);

/// Constructs the unique limit cycle induced by a p-periodic input sequence,
/// anchoring phase 0 at (I - A^p)^{-1} [A^{p-1}B ... B] stacked-inputs.
LimitCycle cycle_from_inputs(const DiscreteSystem& sys,
                             const std::vector<InputVector>& inputs);

/// Mean weighted output deviation of the cycle from the reference.
double cycle_cost(const LimitCycle& cycle, const CycleCriterion& criterion,
                  const Matrix& output_matrix);

/// Exhaustive search over all (2^m)^p candidate cycles; ties broken by the
/// smallest enumeration index.
LimitCycle optimal_limit_cycle(const DiscreteSystem& sys,
                               const CycleCriterion& criterion, int period,
                               std::uint64_t budget = kDefaultCycleBudget);

/// Per-output peak-to-peak value over the cycle.
Vector cycle_ripple(const LimitCycle& cycle, const Matrix& output_matrix);

/// Checks that stepping each phase reproduces the next one within `tol`
/// per entry; throws ValidationError otherwise.
void verify_periodicity(const DiscreteSystem& sys, const LimitCycle& cycle,
                        double tol = 1e-8);

/// Operation-mode sequence of a 2-input cycle.
std::vector<int> cycle_modes(const LimitCycle& cycle);

}  // namespace fcsmpc
