#pragma once

#include <random>

#include "fcsmpc/limit_cycle.hpp"
#include "fcsmpc/model.hpp"

namespace helpers {

using fcsmpc::Matrix;
using fcsmpc::Vector;

inline fcsmpc::AmplifierParams table1_params() {
  fcsmpc::AmplifierParams params;
  params.bus_voltage = 360.0;
  params.stage_inductance = 44e-6;
  params.stage_capacitance = 0.4e-6;
  params.stage_resistance = 62.2e-6;
  params.load_inductance = 20e-3;
  params.load_resistance = 10.0;
  return params;
}

inline const fcsmpc::DiscreteSystem& amplifier_400khz() {
  static const fcsmpc::DiscreteSystem sys =
      fcsmpc::zoh_discretize(fcsmpc::build_amplifier(table1_params()), 400e3);
  return sys;
}

/// The published optimal state cycle (columns = phases), printed to four
/// decimals; state order (i_Lp, v_Cp, i_Ln, v_Cn, i_o).
inline const Matrix& published_state_cycle() {
  static const Matrix states = [] {
    Matrix m(5, 6);
    m << -7.3138, 8.2415, 3.7586, 19.3138, 11.0141, 0.9858,
        112.2068, 76.5487, 76.5490, 112.2073, 171.2443, 171.2440,
        -14.0433, -16.2847, 4.2848, 2.0433, -2.9709, -9.0291,
        67.7927, 8.7557, 8.7560, 67.7932, 103.4513, 103.4510,
        6.0003, 5.9987, 6.0013, 5.9997, 5.9994, 6.0006;
    return m;
  }();
  return states;
}

/// The published optimal input cycle, mode sequence {3,2,3,1,1,1}.
inline std::vector<fcsmpc::InputVector> published_input_cycle() {
  return {fcsmpc::InputVector(2, 2), fcsmpc::InputVector(2, 1),
          fcsmpc::InputVector(2, 2), fcsmpc::InputVector(2, 0),
          fcsmpc::InputVector(2, 0), fcsmpc::InputVector(2, 0)};
}

inline Matrix random_matrix(std::mt19937_64& rng, int rows, int cols,
                            double low = -1.0, double high = 1.0) {
  std::uniform_real_distribution<double> dist(low, high);
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      m(r, c) = dist(rng);
    }
  }
  return m;
}

inline Vector random_vector(std::mt19937_64& rng, int size, double low = -1.0,
                            double high = 1.0) {
  std::uniform_real_distribution<double> dist(low, high);
  Vector v(size);
  for (int i = 0; i < size; ++i) {
    v(i) = dist(rng);
  }
  return v;
}

/// Random matrix rescaled to a target spectral radius below 1.
inline Matrix random_stable(std::mt19937_64& rng, int n,
                            double radius_low = 0.2,
                            double radius_high = 0.95) {
  std::uniform_real_distribution<double> radius_dist(radius_low, radius_high);
  for (;;) {
    Matrix m = random_matrix(rng, n, n);
    const double rho = fcsmpc::numerics::spectral_radius(m);
    if (rho > 1e-6) {
      return m * (radius_dist(rng) / rho);
    }
  }
}

inline Matrix random_psd(std::mt19937_64& rng, int n, double scale = 1.0) {
  const Matrix m = random_matrix(rng, n, n);
  return scale * (m.transpose() * m);
}

/// Fixed-step classical Runge-Kutta rollout of dx/dt = A x + B u over one
/// sample period with constant u; test-only reference for the discretization.
inline Vector rk4_hold(const fcsmpc::ContinuousSystem& sys, const Vector& x0,
                       const Vector& u, double period, int substeps) {
  const double h = period / substeps;
  Vector x = x0;
  const Vector forced = sys.B * u;
  for (int i = 0; i < substeps; ++i) {
    const Vector k1 = sys.A * x + forced;
    const Vector k2 = sys.A * (x + 0.5 * h * k1) + forced;
    const Vector k3 = sys.A * (x + 0.5 * h * k2) + forced;
    const Vector k4 = sys.A * (x + h * k3) + forced;
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

/// True when `actual` equals some cyclic rotation of `expected`.
inline bool is_rotation_of(const std::vector<int>& actual,
                           const std::vector<int>& expected) {
  if (actual.size() != expected.size() || actual.empty()) {
    return false;
  }
  const int n = static_cast<int>(actual.size());
  for (int shift = 0; shift < n; ++shift) {
    bool match = true;
    for (int i = 0; i < n; ++i) {
      if (actual[(i + shift) % n] != expected[i]) {
        match = false;
        break;
      }
    }
    if (match) {
      return true;
    }
  }
  return false;
}

}  // namespace helpers
