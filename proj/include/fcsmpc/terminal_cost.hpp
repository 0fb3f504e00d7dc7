#pragma once

#include "fcsmpc/numerics.hpp"

namespace fcsmpc {

/// Terminal weight P with the certified margin: the smallest eigenvalue of
/// (P - Q - A' P A), positive when the convergence condition holds.
struct TerminalCost {
  Matrix P;
  double margin = 0.0;
};

struct TerminalVerification {
  bool valid = false;
  double margin = 0.0;  ///< -(max eigenvalue of -P + Q + A'PA)
};

/// Scale-aware default shift: 1e-6 * trace(Q) / n.
double default_terminal_epsilon(const Matrix& q);

/// Synthesizes P as the discrete Lyapunov solution of P = A'PA + Q + eps*I,
/// which makes -P + Q + A'PA = -eps*I up to the solver residual. Requires a
/// Schur stable A and PSD Q.
TerminalCost compute_terminal_P(const Matrix& a, const Matrix& q,
                                double epsilon);

/// Checks a candidate P: valid iff -P + Q + A'PA is negative definite and P
/// is positive definite. A must be Schur stable; P must be symmetric within
/// 1e-10 relative.
TerminalVerification verify_terminal_P(const Matrix& a, const Matrix& q,
                                       const Matrix& p);

}  // namespace fcsmpc
