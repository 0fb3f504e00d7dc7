#include "fcsmpc/terminal_cost.hpp"

#include <sstream>

namespace fcsmpc {

namespace {

void require_symmetric(const Matrix& m, const char* label) {
  numerics::require_square(m, label);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw ValidationError(std::string(label) +
                          " must be symmetric (asymmetry above 1e-10)");
  }
}

void require_schur_stable(const Matrix& a, const char* context) {
  const double rho = numerics::spectral_radius(a);
  if (!(rho < 1.0)) {
    std::ostringstream os;
    os << context << " requires a Schur stable A (spectral radius " << rho
       << ")";
    throw UnstableSystemError(os.str());
  }
}

}  // namespace

double default_terminal_epsilon(const Matrix& q) {
  numerics::require_square(q, "Q");
  if (q.rows() == 0) {
    throw ValidationError("Q must not be empty");
  }
  return 1e-6 * q.trace() / static_cast<double>(q.rows());
}

TerminalCost compute_terminal_P(const Matrix& a, const Matrix& q,
                                double epsilon) {
  numerics::require_square(a, "A");
  require_symmetric(q, "Q");
  if (a.rows() != q.rows()) {
    throw DimensionError("Q must match the state dimension of A");
  }
  if (!(epsilon > 0.0)) {
    throw ValidationError("epsilon must be positive, got " +
                          std::to_string(epsilon));
  }
  {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (q + q.transpose()));
    const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -1e-10 * scale) {
      throw ValidationError("Q must be positive semidefinite");
    }
  }
  require_schur_stable(a, "terminal cost synthesis");

  const Matrix shifted =
      q + epsilon * Matrix::Identity(q.rows(), q.cols());
  TerminalCost result;
  result.P = numerics::solve_discrete_lyapunov(a, shifted);
  const TerminalVerification check = verify_terminal_P(a, q, result.P);
  result.margin = check.margin;
  return result;
}

TerminalVerification verify_terminal_P(const Matrix& a, const Matrix& q,
                                       const Matrix& p) {
  numerics::require_square(a, "A");
  require_symmetric(q, "Q");
  require_symmetric(p, "P");
  if (a.rows() != q.rows() || a.rows() != p.rows()) {
    throw DimensionError("A, Q and P must share the state dimension");
  }
  require_schur_stable(a, "terminal cost verification");

  Matrix condition = -p + q + a.transpose() * p * a;
  condition = 0.5 * (condition + condition.transpose().eval());

  Eigen::SelfAdjointEigenSolver<Matrix> condition_eigs(condition);
  Eigen::SelfAdjointEigenSolver<Matrix> p_eigs(0.5 * (p + p.transpose()));

  TerminalVerification result;
  const double lambda_max = condition_eigs.eigenvalues().maxCoeff();
  const double p_min = p_eigs.eigenvalues().minCoeff();
  result.margin = -lambda_max;
  result.valid = lambda_max < 0.0 && p_min > 0.0;
  return result;
}

}  // namespace fcsmpc
