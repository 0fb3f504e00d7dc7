#pragma once

#include <cstdint>
#include <vector>

#include "fcsmpc/numerics.hpp"

namespace fcsmpc {

/// Circuit constants of the two-stage switched power amplifier.
struct AmplifierParams {
  double bus_voltage = 0.0;       ///< V
  double stage_inductance = 0.0;  ///< H
  double stage_capacitance = 0.0; ///< F
  double stage_resistance = 0.0;  ///< Ohm (parasitic)
  double load_inductance = 0.0;   ///< H
  double load_resistance = 0.0;   ///< Ohm
};

/// Continuous-time state-space model dx/dt = A x + B u, y = C x.
struct ContinuousSystem {
  Matrix A;
  Matrix B;
  Matrix C;

  int states() const { return static_cast<int>(A.rows()); }
  int inputs() const { return static_cast<int>(B.cols()); }
  int outputs() const { return static_cast<int>(C.rows()); }
};

/// Discrete-time model x(k+1) = A x(k) + B u(k), y(k) = C x(k) with inputs
/// restricted to the finite set {0,1}^m.
struct DiscreteSystem {
  Matrix A;
  Matrix B;
  Matrix C;
  double sample_period = 0.0;  ///< seconds

  int states() const { return static_cast<int>(A.rows()); }
  int inputs() const { return static_cast<int>(B.cols()); }
  int outputs() const { return static_cast<int>(C.rows()); }
  /// Cardinality of the control set, 2^m.
  std::uint32_t control_set_size() const { return 1u << inputs(); }
};

/// One element of the finite control set {0,1}^m. An input is identified by
/// its bit pattern read as a base-2^m digit: entry 0 (the first switch pair)
/// is the most significant bit, the last entry the least significant.
class InputVector {
 public:
  InputVector() = default;
  InputVector(int bit_count, std::uint32_t digit);

  static InputVector zero(int bit_count) { return InputVector(bit_count, 0); }
  static InputVector ones(int bit_count);
  static InputVector from_bits(const std::vector<int>& bits);

  int size() const { return bit_count_; }
  /// Entry at position pos: 0 is the first vector entry.
  int bit(int pos) const;
  /// The bit pattern as a base-2^m digit in [0, 2^m).
  std::uint32_t digit() const { return digit_; }
  Vector to_vector() const;
  std::vector<int> to_bits() const;

  bool operator==(const InputVector&) const = default;

 private:
  int bit_count_ = 0;
  std::uint32_t digit_ = 0;
};

/// Validates dimensional consistency and finiteness; throws on violation.
void validate_system(const ContinuousSystem& sys);
void validate_system(const DiscreteSystem& sys);

/// Builds the 5-state switched amplifier model with state order
/// (i_Lp, v_Cp, i_Ln, v_Cn, i_o) and output i_o. Parameters must be
/// positive; a zero parasitic resistance is tolerated.
ContinuousSystem build_amplifier(const AmplifierParams& params);

/// Zero-order-hold discretization at sampling frequency `sampling_hz`,
/// computed from the matrix exponential of the augmented block matrix
/// [[A, B], [0, 0]] scaled by the sample period.
DiscreteSystem zoh_discretize(const ContinuousSystem& sys, double sampling_hz);

/// One simulation step A x + B u.
Vector step(const DiscreteSystem& sys, const Vector& x, const InputVector& u);

/// Output map C x.
Vector output(const DiscreteSystem& sys, const Vector& x);

/// Operation mode 1..4 of the two-stage amplifier for an (S_p, S_n) input.
/// Only defined for m = 2.
int mode_of_input(const InputVector& u);

/// Inverse of mode_of_input.
InputVector input_of_mode(int mode);

}  // namespace fcsmpc
