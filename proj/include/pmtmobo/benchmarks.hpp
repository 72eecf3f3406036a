#pragma once

// Parametric DTLZ families: F(x, theta) = DTLZ(x^theta) with theta in [0.8, 1].

#include "pmtmobo/core.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

namespace pmtmobo {

struct BenchmarkDef {
  std::string name;
  int D = 0;
  int V = 0;
  int M = 0;
  Vector theta_lower;
  Vector theta_upper;
  Vector reference_point;  // for hypervolume reporting
  std::function<Vector(const Vector& x, const Vector& theta)> evaluator;
  std::function<Matrix(const Vector& theta, int n)> front;  // rows are objective vectors

  [[nodiscard]] bool evaluable() const { return static_cast<bool>(evaluator); }
  [[nodiscard]] bool has_analytic_front() const { return static_cast<bool>(front); }
};

namespace dtlz {

inline double g_sphere(const Vector& xp, int M) {
  double g = 0.0;
  for (Eigen::Index i = M - 1; i < xp.size(); ++i) g += (xp[i] - 0.5) * (xp[i] - 0.5);
  return g;
}

inline double g_rastrigin(const Vector& xp, int M) {
  const double k = static_cast<double>(xp.size() - (M - 1));
  double s = 0.0;
  for (Eigen::Index i = M - 1; i < xp.size(); ++i) {
    const double d = xp[i] - 0.5;
    s += d * d - std::cos(20.0 * std::numbers::pi * d);
  }
  return 100.0 * (k + s);
}

inline Vector dtlz1(const Vector& xp, int M) {
  const double g = g_rastrigin(xp, M);
  Vector f(M);
  for (int m = 0; m < M; ++m) {
    double v = 0.5 * (1.0 + g);
    for (int i = 0; i < M - 1 - m; ++i) v *= xp[i];
    if (m > 0) v *= 1.0 - xp[M - 1 - m];
    f[m] = v;
  }
  return f;
}

inline Vector spherical(const Vector& xp, int M, double g) {
  Vector f(M);
  for (int m = 0; m < M; ++m) {
    double v = 1.0 + g;
    for (int i = 0; i < M - 1 - m; ++i) v *= std::cos(xp[i] * std::numbers::pi / 2.0);
    if (m > 0) v *= std::sin(xp[M - 1 - m] * std::numbers::pi / 2.0);
    f[m] = v;
  }
  return f;
}

inline Vector dtlz2(const Vector& xp, int M) { return spherical(xp, M, g_sphere(xp, M)); }
inline Vector dtlz3(const Vector& xp, int M) { return spherical(xp, M, g_rastrigin(xp, M)); }

/// Componentwise x^theta (a scalar theta applies to every coordinate).
inline Vector power_transform(const Vector& x, const Vector& theta) {
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double t = theta.size() == 1 ? theta[0] : theta[i];
    out[i] = std::pow(x[i], t);
  }
  return out;
}

}  // namespace dtlz

/// which in {1, 2, 3}.
inline BenchmarkDef make_dtlz(int which, int D = 8, int M = 2) {
  if (which < 1 || which > 3) throw InputError("make_dtlz: unknown DTLZ variant");
  if (M < 2 || M > 3 || D < M) throw InputError("make_dtlz: need M in {2,3} and D >= M");
  BenchmarkDef b;
  b.name = "dtlz" + std::to_string(which);
  b.D = D;
  b.V = 1;
  b.M = M;
  b.theta_lower = Vector::Constant(1, 0.8);
  b.theta_upper = Vector::Constant(1, 1.0);
  b.reference_point = Vector::Constant(M, which == 1 ? 500.0 : 2.0);
  b.evaluator = [which, M](const Vector& x, const Vector& theta) {
    const Vector xp = dtlz::power_transform(x, theta);
    if (which == 1) return dtlz::dtlz1(xp, M);
    if (which == 2) return dtlz::dtlz2(xp, M);
    return dtlz::dtlz3(xp, M);
  };
  if (M == 2) {
    b.front = [which](const Vector&, int n) {
      if (n < 2) throw InputError("analytic_front: n must be >= 2");
      Matrix F(n, 2);
      for (int i = 0; i < n; ++i) {
        const double s = static_cast<double>(i) / (n - 1);
        if (which == 1) {
          F(i, 0) = 0.5 * s;
          F(i, 1) = 0.5 - 0.5 * s;
        } else {
          const double t = s * std::numbers::pi / 2.0;
          F(i, 0) = std::cos(t);
          F(i, 1) = std::sin(t);
        }
      }
      return F;
    };
  }
  return b;
}

/// Registry entry for problems that need an external simulator.
inline BenchmarkDef make_documented(const std::string& name, int D, int V, int M) {
  BenchmarkDef b;
  b.name = name;
  b.D = D;
  b.V = V;
  b.M = M;
  b.theta_lower = Vector::Zero(V);
  b.theta_upper = Vector::Ones(V);
  return b;
}

inline std::vector<std::string> benchmark_names() {
  return {"dtlz1", "dtlz2", "dtlz3", "lamp", "solar", "magnetic", "uav"};
}

inline BenchmarkDef find_benchmark(const std::string& name) {
  if (name == "dtlz1") return make_dtlz(1);
  if (name == "dtlz2") return make_dtlz(2);
  if (name == "dtlz3") return make_dtlz(3);
  if (name == "lamp") return make_documented(name, 9, 1, 3);
  if (name == "solar") return make_documented(name, 9, 1, 2);
  if (name == "magnetic") return make_documented(name, 3, 2, 3);
  if (name == "uav") return make_documented(name, 12, 2, 2);
  throw InputError("unknown benchmark: " + name);
}

inline void check_domain(const BenchmarkDef& b, const Vector& x, const Vector& theta) {
  require_same_size(x.size(), b.D, "benchmark decision vector");
  require_same_size(theta.size(), b.V, "benchmark task vector");
  if (!x.allFinite() || (x.array() < 0.0).any() || (x.array() > 1.0).any()) {
    throw InputError(b.name + ": decision vector outside [0,1]^D");
  }
  constexpr double tol = 1e-12;
  if (!theta.allFinite() || (theta.array() < b.theta_lower.array() - tol).any() ||
      (theta.array() > b.theta_upper.array() + tol).any()) {
    throw InputError(b.name + ": task parameter outside its domain");
  }
}

inline Vector evaluate(const BenchmarkDef& b, const Vector& x, const Vector& theta) {
  if (!b.evaluable()) throw CapabilityError(b.name + " requires an external simulator and cannot be evaluated");
  check_domain(b, x, theta);
  Vector f = b.evaluator(x, theta);
  if (!f.allFinite()) throw NumericalError(b.name + ": non-finite objective value");
  return f;
}

inline std::vector<Vector> sample_tasks(const BenchmarkDef& b, int K, Rng& rng) {
  if (K < 1) throw InputError("sample_tasks: K must be >= 1");
  std::vector<Vector> tasks;
  tasks.reserve(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    Vector t(b.V);
    for (int v = 0; v < b.V; ++v) t[v] = b.theta_lower[v] + (b.theta_upper[v] - b.theta_lower[v]) * uniform01(rng);
    tasks.push_back(std::move(t));
  }
  return tasks;
}

inline Matrix analytic_front(const BenchmarkDef& b, const Vector& theta, int n) {
  if (!b.has_analytic_front()) throw CapabilityError(b.name + ": no analytic Pareto front available");
  return b.front(theta, n);
}

}  // namespace pmtmobo
