#include "fcsmpc/numerics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace fcsmpc::numerics {

namespace {

std::string format_scalar(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

void require_square(const Matrix& m, std::string_view label) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << label << " must be square, got " << m.rows() << "x" << m.cols();
    throw DimensionError(os.str());
  }
}

void require_finite(const Matrix& m, std::string_view label) {
  if (!m.allFinite()) {
    throw ValidationError(std::string(label) +
                          " contains non-finite entries (NaN or Inf)");
  }
}

Matrix mat_exp(const Matrix& m, double tol) {
  require_square(m, "mat_exp input");
  require_finite(m, "mat_exp input");
  if (!(tol > 0.0)) {
    throw ValidationError("mat_exp tolerance must be positive, got " +
                          format_scalar(tol));
  }

  const Eigen::Index n = m.rows();
  if (n == 0) {
    return Matrix(0, 0);
  }

  // Degree-13 Pade coefficients (Higham 2005). theta13 is the 1-norm below
  // which the approximant meets double precision without scaling.
  static constexpr double kPade13[] = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
      1187353796428800.0,  129060195264000.0,   10559470521600.0,
      670442572800.0,      33522128640.0,       1323241920.0,
      40840800.0,          960960.0,            16380.0,
      182.0,               1.0};
  static constexpr double kTheta13 = 5.371920351148152;

  const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
  if (norm1 == 0.0) {
    return Matrix::Identity(n, n);
  }
  int squarings = 0;
  if (norm1 > kTheta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / kTheta13)));
  }
  const Matrix a = m / std::pow(2.0, squarings);

  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a2 * a4;
  const Matrix ident = Matrix::Identity(n, n);

  Matrix u = a * (a6 * (kPade13[13] * a6 + kPade13[11] * a4 + kPade13[9] * a2) +
                  kPade13[7] * a6 + kPade13[5] * a4 + kPade13[3] * a2 +
                  kPade13[1] * ident);
  Matrix v = a6 * (kPade13[12] * a6 + kPade13[10] * a4 + kPade13[8] * a2) +
             kPade13[6] * a6 + kPade13[4] * a4 + kPade13[2] * a2 +
             kPade13[0] * ident;

  Matrix f = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) {
    f = f * f;
  }
  return f;
}

Matrix solve_linear(const Matrix& m, const Matrix& rhs,
                    std::string_view label) {
  require_square(m, label);
  require_finite(m, label);
  require_finite(rhs, "right-hand side");
  if (rhs.rows() != m.rows()) {
    std::ostringstream os;
    os << "right-hand side has " << rhs.rows() << " rows, expected "
       << m.rows();
    throw DimensionError(os.str());
  }

  const Eigen::Index n = m.rows();
  if (n == 0) {
    return Matrix(0, rhs.cols());
  }

  Eigen::JacobiSVD<Matrix> svd(m);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(n - 1);
  const double cond =
      smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (!(cond < kConditionLimit)) {
    std::ostringstream os;
    os << label << " is numerically singular (condition estimate "
       << format_scalar(cond) << " exceeds " << format_scalar(kConditionLimit)
       << ")";
    throw SingularMatrixError(os.str());
  }

  Eigen::PartialPivLU<Matrix> lu(m);
  Matrix x = lu.solve(rhs);

  const double rhs_norm = rhs.cwiseAbs().maxCoeff();
  const double target = 1e-10 * (1.0 + rhs_norm);
  Matrix residual = rhs - m * x;
  for (int iter = 0; iter < 4; ++iter) {
    if (residual.cwiseAbs().maxCoeff() <= 0.25 * target) {
      break;
    }
    x += lu.solve(residual);
    residual = rhs - m * x;
  }
  if (residual.cwiseAbs().maxCoeff() > target) {
    std::ostringstream os;
    os << label << " solve did not reach the residual bound (residual "
       << format_scalar(residual.cwiseAbs().maxCoeff()) << ", bound "
       << format_scalar(target) << ")";
    throw SingularMatrixError(os.str());
  }
  return x;
}

double spectral_radius(const Matrix& m) {
  require_square(m, "spectral_radius input");
  require_finite(m, "spectral_radius input");
  if (m.rows() == 0) {
    return 0.0;
  }
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::internal, "eigenvalue iteration failed to converge");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix solve_discrete_lyapunov(const Matrix& a, const Matrix& s) {
  require_square(a, "Lyapunov dynamics matrix");
  require_square(s, "Lyapunov right-hand side");
  require_finite(a, "Lyapunov dynamics matrix");
  require_finite(s, "Lyapunov right-hand side");
  if (a.rows() != s.rows()) {
    std::ostringstream os;
    os << "Lyapunov right-hand side is " << s.rows() << "x" << s.cols()
       << ", expected " << a.rows() << "x" << a.rows();
    throw DimensionError(os.str());
  }

  const Eigen::Index n = a.rows();
  const double s_scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-10 * s_scale) {
    throw ValidationError("Lyapunov right-hand side must be symmetric");
  }
  {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (s + s.transpose()));
    if (es.eigenvalues().minCoeff() < -1e-10 * s_scale) {
      throw ValidationError(
          "Lyapunov right-hand side must be positive semidefinite (min "
          "eigenvalue " +
          format_scalar(es.eigenvalues().minCoeff()) + ")");
    }
  }

  const double rho = spectral_radius(a);
  if (!(rho < 1.0)) {
    throw UnstableSystemError(
        "discrete Lyapunov equation requires a Schur stable matrix "
        "(spectral radius " +
        format_scalar(rho) + ")");
  }

  // vec(A' P A) = (A' (x) A') vec(P) with column-stacking vec().
  const Matrix at = a.transpose();
  Matrix kron = Matrix::Zero(n * n, n * n);
  for (Eigen::Index bi = 0; bi < n; ++bi) {
    for (Eigen::Index bj = 0; bj < n; ++bj) {
      kron.block(bi * n, bj * n, n, n) = at(bi, bj) * at;
    }
  }
  Matrix system = Matrix::Identity(n * n, n * n) - kron;

  Eigen::Map<const Vector> vec_s(s.data(), n * n);
  Vector vec_p =
      solve_linear(system, vec_s, "discrete Lyapunov system (I - A'(x)A')");

  Matrix p = Eigen::Map<const Matrix>(vec_p.data(), n, n);
  p = (0.5 * (p + p.transpose())).eval();
  return p;
}

}  // namespace fcsmpc::numerics
