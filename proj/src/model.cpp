#include "fcsmpc/model.hpp"

#include <sstream>

namespace fcsmpc {

namespace {

void require_positive(double value, const char* field) {
  if (!(value > 0.0)) {
    std::ostringstream os;
    os << field << " must be positive, got " << value;
    throw ValidationError(os.str());
  }
}

void require_nonnegative(double value, const char* field) {
  if (!(value >= 0.0)) {
    std::ostringstream os;
    os << field << " must be nonnegative, got " << value;
    throw ValidationError(os.str());
  }
}

void require_state_dim(const DiscreteSystem& sys, const Vector& x) {
  if (x.size() != sys.states()) {
    std::ostringstream os;
    os << "state vector has " << x.size() << " entries, expected "
       << sys.states();
    throw DimensionError(os.str());
  }
}

}  // namespace

InputVector::InputVector(int bit_count, std::uint32_t digit)
    : bit_count_(bit_count), digit_(digit) {
  if (bit_count < 1 || bit_count > 24) {
    throw ValidationError("input bit count must be in [1, 24], got " +
                          std::to_string(bit_count));
  }
  if (digit >= (1u << bit_count)) {
    throw ValidationError("input digit " + std::to_string(digit) +
                          " out of range for " + std::to_string(bit_count) +
                          " bits");
  }
}

InputVector InputVector::ones(int bit_count) {
  return InputVector(bit_count, (1u << bit_count) - 1);
}

InputVector InputVector::from_bits(const std::vector<int>& bits) {
  std::uint32_t digit = 0;
  for (int b : bits) {
    if (b != 0 && b != 1) {
      throw ValidationError("input entries must be 0 or 1, got " +
                            std::to_string(b));
    }
    digit = (digit << 1) | static_cast<std::uint32_t>(b);
  }
  return InputVector(static_cast<int>(bits.size()), digit);
}

int InputVector::bit(int pos) const {
  if (pos < 0 || pos >= bit_count_) {
    throw DimensionError("input bit position " + std::to_string(pos) +
                         " out of range");
  }
  return static_cast<int>((digit_ >> (bit_count_ - 1 - pos)) & 1u);
}

Vector InputVector::to_vector() const {
  Vector v(bit_count_);
  for (int i = 0; i < bit_count_; ++i) {
    v(i) = static_cast<double>(bit(i));
  }
  return v;
}

std::vector<int> InputVector::to_bits() const {
  std::vector<int> bits(bit_count_);
  for (int i = 0; i < bit_count_; ++i) {
    bits[i] = bit(i);
  }
  return bits;
}

void validate_system(const ContinuousSystem& sys) {
  numerics::require_square(sys.A, "A");
  numerics::require_finite(sys.A, "A");
  numerics::require_finite(sys.B, "B");
  numerics::require_finite(sys.C, "C");
  if (sys.B.rows() != sys.A.rows()) {
    throw DimensionError("B must have as many rows as A");
  }
  if (sys.C.cols() != sys.A.cols()) {
    throw DimensionError("C must have as many columns as A");
  }
  if (sys.B.cols() < 1) {
    throw DimensionError("system needs at least one input");
  }
}

void validate_system(const DiscreteSystem& sys) {
  ContinuousSystem shape{sys.A, sys.B, sys.C};
  validate_system(shape);
  if (!(sys.sample_period > 0.0)) {
    throw ValidationError("sample_period must be positive, got " +
                          std::to_string(sys.sample_period));
  }
  if (sys.inputs() > 24) {
    throw ValidationError("at most 24 binary inputs are supported");
  }
}

ContinuousSystem build_amplifier(const AmplifierParams& params) {
  require_positive(params.bus_voltage, "bus_voltage");
  require_positive(params.stage_inductance, "stage_inductance");
  require_positive(params.stage_capacitance, "stage_capacitance");
  require_nonnegative(params.stage_resistance, "stage_resistance");
  require_positive(params.load_inductance, "load_inductance");
  require_positive(params.load_resistance, "load_resistance");

  const double l = params.stage_inductance;
  const double c = params.stage_capacitance;
  const double r = params.stage_resistance;
  const double lm = params.load_inductance;
  const double rm = params.load_resistance;
  const double vbus = params.bus_voltage;

  // State order (i_Lp, v_Cp, i_Ln, v_Cn, i_o); output is i_o.
  ContinuousSystem sys;
  sys.A = Matrix::Zero(5, 5);
  sys.A << -r / l, -1.0 / l, 0.0, 0.0, r / l,
      1.0 / c, 0.0, 0.0, 0.0, -1.0 / c,
      0.0, 0.0, -r / l, -1.0 / l, -r / l,
      0.0, 0.0, 1.0 / c, 0.0, 1.0 / c,
      r / lm, 1.0 / lm, -r / lm, -1.0 / lm, -(2.0 * r + rm) / lm;

  sys.B = Matrix::Zero(5, 2);
  sys.B(0, 0) = vbus / l;
  sys.B(2, 1) = vbus / l;

  sys.C = Matrix::Zero(1, 5);
  sys.C(0, 4) = 1.0;
  return sys;
}

DiscreteSystem zoh_discretize(const ContinuousSystem& sys,
                              double sampling_hz) {
  validate_system(sys);
  if (!(sampling_hz > 0.0)) {
    throw ValidationError("sampling frequency must be positive, got " +
                          std::to_string(sampling_hz));
  }

  const int n = sys.states();
  const int m = sys.inputs();
  const double period = 1.0 / sampling_hz;

  Matrix augmented = Matrix::Zero(n + m, n + m);
  augmented.topLeftCorner(n, n) = sys.A;
  augmented.topRightCorner(n, m) = sys.B;

  const Matrix phi = numerics::mat_exp(augmented * period);

  DiscreteSystem out;
  out.A = phi.topLeftCorner(n, n);
  out.B = phi.topRightCorner(n, m);
  out.C = sys.C;
  out.sample_period = period;
  return out;
}

Vector step(const DiscreteSystem& sys, const Vector& x, const InputVector& u) {
  require_state_dim(sys, x);
  if (u.size() != sys.inputs()) {
    throw DimensionError("input vector has " + std::to_string(u.size()) +
                         " entries, expected " + std::to_string(sys.inputs()));
  }
  return sys.A * x + sys.B * u.to_vector();
}

Vector output(const DiscreteSystem& sys, const Vector& x) {
  require_state_dim(sys, x);
  return sys.C * x;
}

int mode_of_input(const InputVector& u) {
  if (u.size() != 2) {
    throw ValidationError(
        "operation modes are defined for 2-input amplifiers, got m = " +
        std::to_string(u.size()));
  }
  return static_cast<int>(u.digit()) + 1;
}

InputVector input_of_mode(int mode) {
  if (mode < 1 || mode > 4) {
    throw ValidationError("operation mode must be in [1, 4], got " +
                          std::to_string(mode));
  }
  return InputVector(2, static_cast<std::uint32_t>(mode - 1));
}

}  // namespace fcsmpc
