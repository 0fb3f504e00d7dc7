#pragma once

#include <Eigen/Dense>
#include <string_view>

#include "fcsmpc/errors.hpp"

namespace fcsmpc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace numerics {

/// Condition estimate above which a linear system is reported singular
/// instead of solved.
inline constexpr double kConditionLimit = 1e12;

/// Throws DimensionError unless m is square.
void require_square(const Matrix& m, std::string_view label);

/// Throws ValidationError if m contains NaN or infinities.
void require_finite(const Matrix& m, std::string_view label);

/// Matrix exponential by scaling-and-squaring with a degree-13 Pade
/// approximant. `tol` is the requested relative accuracy; values below
/// machine precision are served at machine precision.
Matrix mat_exp(const Matrix& m, double tol = 1e-12);

/// Solves m * X = rhs by LU with iterative refinement. The result satisfies
/// ||m*X - rhs||_inf <= 1e-10 * (1 + ||rhs||_inf). A condition estimate
/// above kConditionLimit raises SingularMatrixError mentioning `label`.
Matrix solve_linear(const Matrix& m, const Matrix& rhs,
                    std::string_view label = "matrix");

/// Largest eigenvalue modulus of a square matrix.
double spectral_radius(const Matrix& m);

/// Unique solution P of P = A' P A + S for Schur stable A, computed from the
/// n^2 x n^2 Kronecker system vec(P) = (I - A' (x) A')^{-1} vec(S). S must be
/// symmetric positive semidefinite. The returned P is exactly symmetric.
Matrix solve_discrete_lyapunov(const Matrix& a, const Matrix& s);

}  // namespace numerics
}  // namespace fcsmpc
