#include "fcsmpc/limit_cycle.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace fcsmpc {

namespace {

// Checked (2^m)^p computation; throws CapacityError above `budget`.
std::uint64_t candidate_count(int input_bits, int period,
                              std::uint64_t budget) {
  if (period < 1) {
    throw ValidationError("cycle period must be >= 1, got " +
                          std::to_string(period));
  }
  const int total_bits = input_bits * period;
  if (total_bits > 63) {
    throw CapacityError("cycle enumeration needs 2^" +
                        std::to_string(total_bits) +
                        " candidates, beyond the representable range");
  }
  if (budget != 0 && (1ull << total_bits) > budget) {
    std::ostringstream os;
    os << "cycle enumeration needs 2^" << total_bits
       << " candidates, exceeding the budget of " << budget;
    throw CapacityError(os.str());
  }
  return 1ull << total_bits;
}

// Shared machinery for constructing cycles from input sequences with the
// (I - A^p) factor and the reachability block row precomputed once.
class CycleBuilder {
 public:
  CycleBuilder(const DiscreteSystem& sys, int period)
      : sys_(sys), period_(period) {
    const int n = sys.states();
    const int m = sys.inputs();

    Matrix a_power = Matrix::Identity(n, n);
    reach_ = Matrix::Zero(n, m * period);
    // reach = [A^{p-1}B ... AB B], filled right to left.
    for (int i = period - 1; i >= 0; --i) {
      reach_.middleCols(i * m, m) = a_power * sys.B;
      a_power = sys.A * a_power;
    }
    Matrix anchor_system = Matrix::Identity(n, n) - a_power;
    anchor_lu_.compute(anchor_system);
    anchor_system_ = std::move(anchor_system);

    Eigen::JacobiSVD<Matrix> svd(anchor_system_);
    const double smin = svd.singularValues()(n - 1);
    const double smax = svd.singularValues()(0);
    if (!(smin > 0.0) || smax / smin > numerics::kConditionLimit) {
      throw SingularMatrixError(
          "(I - A^p) is numerically singular; no unique limit cycle exists");
    }
  }

  LimitCycle build(const std::vector<InputVector>& inputs) const {
    const int m = sys_.inputs();

    Vector stacked(m * period_);
    for (int i = 0; i < period_; ++i) {
      stacked.segment(i * m, m) = inputs[i].to_vector();
    }

    LimitCycle cycle;
    cycle.period = period_;
    cycle.inputs = inputs;
    cycle.index = index_of_input_sequence(inputs);
    cycle.states.resize(period_);
    const Vector rhs = reach_ * stacked;
    Vector anchor = anchor_lu_.solve(rhs);
    // one refinement step keeps the periodicity certificate comfortable even
    // when (I - A^p) is poorly conditioned (spectral radius close to one)
    anchor += anchor_lu_.solve(rhs - anchor_system_ * anchor);
    cycle.states[0] = std::move(anchor);
    for (int i = 0; i + 1 < period_; ++i) {
      cycle.states[i + 1] =
          sys_.A * cycle.states[i] + sys_.B * inputs[i].to_vector();
    }
    return cycle;
  }

 private:
  const DiscreteSystem& sys_;
  int period_;
  Matrix reach_;
  Matrix anchor_system_;
  Eigen::PartialPivLU<Matrix> anchor_lu_;
};

void require_output_dims(const LimitCycle& cycle, const Matrix& output_matrix) {
  if (cycle.states.empty()) {
    throw ValidationError("limit cycle has no states");
  }
  if (output_matrix.cols() != cycle.states[0].size()) {
    throw DimensionError("output matrix has " +
                         std::to_string(output_matrix.cols()) +
                         " columns, expected " +
                         std::to_string(cycle.states[0].size()));
  }
}

double deviation_norm(const Vector& v, CycleNorm norm) {
  switch (norm) {
    case CycleNorm::two_norm:
      return v.norm();
    case CycleNorm::one_norm:
      return v.lpNorm<1>();
    case CycleNorm::inf_norm:
      return v.lpNorm<Eigen::Infinity>();
  }
  throw ValidationError("unknown cycle norm");
}

}  // namespace

std::vector<InputVector> input_sequence_from_index(std::uint64_t index,
                                                   int input_bits,
                                                   int period) {
  const std::uint64_t total = candidate_count(input_bits, period, 0);
  if (index < 1 || index > total) {
    std::ostringstream os;
    os << "cycle index " << index << " out of range [1, " << total << "]";
    throw ValidationError(os.str());
  }

  std::uint64_t remainder = index - 1;
  const std::uint64_t base = 1ull << input_bits;
  std::vector<InputVector> inputs(period, InputVector::zero(input_bits));
  for (int i = period - 1; i >= 0; --i) {
    inputs[i] = InputVector(input_bits,
                            static_cast<std::uint32_t>(remainder % base));
    remainder /= base;
  }
  return inputs;
}

std::uint64_t index_of_input_sequence(const std::vector<InputVector>& inputs) {
  if (inputs.empty()) {
    throw ValidationError("input sequence must not be empty");
  }
  const int input_bits = inputs[0].size();
  std::uint64_t value = 0;
  for (const InputVector& u : inputs) {
    if (u.size() != input_bits) {
      throw DimensionError("input sequence mixes input widths");
    }
    value = (value << input_bits) | u.digit();
  }
  return value + 1;
}

LimitCycle cycle_from_inputs(const DiscreteSystem& sys,
                             const std::vector<InputVector>& inputs) {
  validate_system(sys);
  if (inputs.empty()) {
    throw ValidationError("input sequence must not be empty");
  }
  for (const InputVector& u : inputs) {
    if (u.size() != sys.inputs()) {
      throw DimensionError("cycle input width " + std::to_string(u.size()) +
                           " does not match system input count " +
                           std::to_string(sys.inputs()));
    }
  }
  CycleBuilder builder(sys, static_cast<int>(inputs.size()));
  return builder.build(inputs);
}

double cycle_cost(const LimitCycle& cycle, const CycleCriterion& criterion,
                  const Matrix& output_matrix) {
  require_output_dims(cycle, output_matrix);
  const int q = static_cast<int>(output_matrix.rows());
  if (criterion.y_ref.size() != q) {
    throw DimensionError("reference output has " +
                         std::to_string(criterion.y_ref.size()) +
                         " entries, expected " + std::to_string(q));
  }
  if (criterion.gamma.rows() != q || criterion.gamma.cols() != q) {
    throw DimensionError("criterion weighting must be q x q");
  }

  double total = 0.0;
  for (const Vector& x : cycle.states) {
    const Vector deviation =
        criterion.gamma * (output_matrix * x - criterion.y_ref);
    total += deviation_norm(deviation, criterion.norm);
  }
  return total / static_cast<double>(cycle.period);
}

LimitCycle optimal_limit_cycle(const DiscreteSystem& sys,
                               const CycleCriterion& criterion, int period,
                               std::uint64_t budget) {
  validate_system(sys);
  const double rho = numerics::spectral_radius(sys.A);
  if (!(rho < 1.0)) {
    throw UnstableSystemError(
        "limit cycle search requires a Schur stable system (spectral radius " +
        std::to_string(rho) + ")");
  }
  const std::uint64_t total =
      candidate_count(sys.inputs(), period, budget ? budget : kDefaultCycleBudget);

  CycleBuilder builder(sys, period);
  LimitCycle best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::uint64_t c = 1; c <= total; ++c) {
    LimitCycle candidate =
        builder.build(input_sequence_from_index(c, sys.inputs(), period));
    const double cost = cycle_cost(candidate, criterion, sys.C);
    if (cost < best_cost) {
      best_cost = cost;
      best = std::move(candidate);
    }
  }
  return best;
}

Vector cycle_ripple(const LimitCycle& cycle, const Matrix& output_matrix) {
  require_output_dims(cycle, output_matrix);
  const int q = static_cast<int>(output_matrix.rows());
  Vector low = Vector::Constant(q, std::numeric_limits<double>::infinity());
  Vector high = Vector::Constant(q, -std::numeric_limits<double>::infinity());
  for (const Vector& x : cycle.states) {
    const Vector y = output_matrix * x;
    low = low.cwiseMin(y);
    high = high.cwiseMax(y);
  }
  return high - low;
}

void verify_periodicity(const DiscreteSystem& sys, const LimitCycle& cycle,
                        double tol) {
  if (cycle.period < 1 ||
      cycle.states.size() != static_cast<std::size_t>(cycle.period) ||
      cycle.inputs.size() != static_cast<std::size_t>(cycle.period)) {
    throw ValidationError("limit cycle phase counts are inconsistent");
  }
  for (int i = 0; i < cycle.period; ++i) {
    const Vector next = step(sys, cycle.states[i], cycle.inputs[i]);
    const Vector& expected = cycle.states[(i + 1) % cycle.period];
    const double err = (next - expected).cwiseAbs().maxCoeff();
    if (!(err <= tol)) {
      std::ostringstream os;
      os << "cycle is not periodic for this system: phase " << i
         << " advances with error " << err << " (tolerance " << tol << ")";
      throw ValidationError(os.str());
    }
  }
}

std::vector<int> cycle_modes(const LimitCycle& cycle) {
  std::vector<int> modes;
  modes.reserve(cycle.inputs.size());
  for (const InputVector& u : cycle.inputs) {
    modes.push_back(mode_of_input(u));
  }
  return modes;
}

}  // namespace fcsmpc
