#pragma once

// Preferences on the positive orthant of the unit sphere and the hypervolume
// scalarization s_lambda(y) = (min_m max(0, (z_m - y_m) / lambda_m))^M.
// Objective vectors y are in minimization convention.

#include "pmtmobo/core.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace pmtmobo {

class Preference {
 public:
  Preference() = default;

  /// Normalizes `direction` onto the unit sphere; all entries must be positive.
  explicit Preference(const Vector& direction) {
    if (direction.size() < 1) throw InputError("Preference: empty vector");
    if (!direction.allFinite() || (direction.array() <= 0.0).any()) {
      throw InputError("Preference: components must be positive and finite");
    }
    lambda_ = direction / direction.norm();
  }

  [[nodiscard]] const Vector& values() const { return lambda_; }
  [[nodiscard]] Eigen::Index size() const { return lambda_.size(); }
  double operator[](Eigen::Index i) const { return lambda_[i]; }

 private:
  Vector lambda_;
};

/// |N(0, I)| normalized: uniform on the positive orthant of the sphere.
inline Preference sample_preference(Eigen::Index M, Rng& rng) {
  if (M < 1) throw InputError("sample_preference: M must be >= 1");
  Vector v(M);
  for (Eigen::Index i = 0; i < M; ++i) {
    double a = 0.0;
    while (a == 0.0) a = std::abs(standard_normal(rng));
    v[i] = a;
  }
  return Preference(v);
}

/// Deterministic set of P preferences: evenly spaced angles for M = 2, a
/// Fibonacci lattice on the positive octant for M = 3, a single diagonal for M = 1.
inline std::vector<Preference> preference_grid(Eigen::Index M, int P) {
  if (P < 1) throw InputError("preference_grid: P must be >= 1");
  std::vector<Preference> grid;
  grid.reserve(static_cast<std::size_t>(P));
  if (M == 1) {
    for (int i = 0; i < P; ++i) grid.emplace_back(Vector::Ones(1));
    return grid;
  }
  if (M == 2) {
    for (int i = 0; i < P; ++i) {
      const double a = (i + 0.5) / P * std::numbers::pi / 2.0;
      grid.emplace_back(vec({std::cos(a), std::sin(a)}));
    }
    return grid;
  }
  if (M == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < P; ++i) {
      // z uniform in (0, 1), azimuth wrapped into the first quadrant
      const double z = 1.0 - (i + 0.5) / P;
      const double r = std::sqrt(1.0 - z * z);
      const double phi = std::fmod(i * golden, std::numbers::pi / 2.0);
      const double a = std::max(phi, 1e-6);
      grid.emplace_back(vec({r * std::cos(a) + 1e-9, r * std::sin(a) + 1e-9, z}));
    }
    return grid;
  }
  throw InputError("preference_grid: only M in {1, 2, 3} supported");
}

inline double hv_scalarize(const Preference& lambda, const Vector& y, const Vector& z) {
  require_same_size(lambda.size(), y.size(), "hv_scalarize objective");
  require_same_size(lambda.size(), z.size(), "hv_scalarize reference");
  double m = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < y.size(); ++i) m = std::min(m, std::max(0.0, (z[i] - y[i]) / lambda[i]));
  return std::pow(m, static_cast<double>(y.size()));
}

/// Scores an acquisition vector given in maximization convention (e.g. -mu + sqrt(beta) sigma).
inline double scalarize_ucb(const Preference& lambda, const Vector& ucb, const Vector& z) {
  return hv_scalarize(lambda, -ucb, z);
}

/// c_M = pi^{M/2} / (2^M Gamma(M/2 + 1)); HV(Y, z) = c_M * E_lambda[max_y s_lambda(y)].
inline double hv_scalarization_constant(Eigen::Index M) {
  const double m = static_cast<double>(M);
  return std::pow(std::numbers::pi, m / 2.0) / (std::pow(2.0, m) * std::tgamma(m / 2.0 + 1.0));
}

}  // namespace pmtmobo
