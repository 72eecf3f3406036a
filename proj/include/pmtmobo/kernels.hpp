#pragma once

// Covariance functions over joint inputs (x, theta). A joint input is a single
// vector whose last V entries are the task parameters; V = number of task
// lengthscales. With V = 0 the composite kernel is a scaled isotropic RBF over x.

#include "pmtmobo/core.hpp"

#include <cmath>
#include <string>

namespace pmtmobo {

inline constexpr double kLengthscaleMin = 0.1;
inline constexpr double kLengthscaleMax = 2.5;

struct DecisionKernelParams {
  double lengthscale = 1.0;

  void validate() const {
    if (!(lengthscale >= kLengthscaleMin && lengthscale <= kLengthscaleMax)) {
      throw InputError("decision lengthscale must lie in [0.1, 2.5], got " + std::to_string(lengthscale));
    }
  }
};

struct TaskKernelParams {
  Vector lengthscales;

  [[nodiscard]] Eigen::Index dim() const { return lengthscales.size(); }
  void validate() const {
    if ((lengthscales.array() <= 0.0).any() || !lengthscales.allFinite()) {
      throw InputError("task lengthscales must be positive");
    }
  }
};

struct CompositeKernel {
  DecisionKernelParams decision;
  TaskKernelParams task;
  double output_scale = 1.0;

  [[nodiscard]] Eigen::Index task_dim() const { return task.dim(); }
  void validate() const {
    decision.validate();
    task.validate();
    if (!(output_scale > 0.0) || !std::isfinite(output_scale)) throw InputError("output_scale must be positive");
  }

  /// Default initialization: all lengthscales and the output scale at 1.
  static CompositeKernel with_task_dim(Eigen::Index V) {
    return CompositeKernel{{1.0}, {Vector::Ones(V)}, 1.0};
  }
};

template <typename A, typename B>
double squared_distance(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

template <typename A, typename B>
double scaled_squared_distance(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b, const Vector& ls) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double d = (a[i] - b[i]) / ls[i];
    s += d * d;
  }
  return s;
}

inline double rbf_iso(const Vector& x, const Vector& xp, const DecisionKernelParams& p) {
  require_same_size(x.size(), xp.size(), "rbf_iso");
  const double l = p.lengthscale;
  return std::exp(-squared_distance(x, xp) / (2.0 * l * l));
}

inline double rbf_ard(const Vector& theta, const Vector& thetap, const TaskKernelParams& p) {
  require_same_size(theta.size(), thetap.size(), "rbf_ard");
  require_same_size(theta.size(), p.dim(), "rbf_ard lengthscales");
  return std::exp(-0.5 * scaled_squared_distance(theta, thetap, p.lengthscales));
}

inline double composite(const Vector& x, const Vector& theta, const Vector& xp, const Vector& thetap,
                        const CompositeKernel& k) {
  return k.output_scale * rbf_iso(x, xp, k.decision) * rbf_ard(theta, thetap, k.task);
}

/// Kernel between two joint inputs. Hot path: no allocation.
template <typename A, typename B>
double composite_joint(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b, const CompositeKernel& k) {
  const Eigen::Index V = k.task_dim();
  const Eigen::Index D = a.size() - V;
  const double l = k.decision.lengthscale;
  const double dec = std::exp(-squared_distance(a.head(D), b.head(D)) / (2.0 * l * l));
  if (V == 0) return k.output_scale * dec;
  const double task = std::exp(-0.5 * scaled_squared_distance(a.tail(V), b.tail(V), k.task.lengthscales));
  return k.output_scale * dec * task;
}

/// Gram matrix over the rows of `inputs` (N x (D+V)).
inline Matrix gram_matrix(const Matrix& inputs, const CompositeKernel& k) {
  if (inputs.rows() == 0) throw InputError("gram_matrix: empty input list");
  if (inputs.cols() < k.task_dim()) throw ShapeError("gram_matrix: input narrower than task dimension");
  const Eigen::Index n = inputs.rows();
  Matrix K(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    K(j, j) = composite_joint(inputs.row(j), inputs.row(j), k);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = composite_joint(inputs.row(i), inputs.row(j), k);
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

/// Cross-covariance: rows of `a` against rows of `b`.
inline Matrix cross_covariance(const Matrix& a, const Matrix& b, const CompositeKernel& k) {
  require_same_size(a.cols(), b.cols(), "cross_covariance");
  Matrix K(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) K(i, j) = composite_joint(a.row(i), b.row(j), k);
  }
  return K;
}

// Constraint transforms: lengthscale in [0.1, 2.5] through a scaled sigmoid,
// positive quantities through softplus.

inline double sigmoid(double u) {
  if (u >= 0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

inline double softplus(double u) { return u > 30.0 ? u : std::log1p(std::exp(u)); }

inline double softplus_inverse(double y) {
  if (!(y > 0.0)) throw InputError("softplus_inverse: argument must be positive");
  return y > 30.0 ? y : std::log(std::expm1(y));
}

inline double bounded_lengthscale(double u) {
  return kLengthscaleMin + (kLengthscaleMax - kLengthscaleMin) * sigmoid(u);
}

inline double bounded_lengthscale_inverse(double l) {
  // keep strictly inside the open interval so the logit stays finite
  const double span = kLengthscaleMax - kLengthscaleMin;
  double p = (l - kLengthscaleMin) / span;
  p = std::min(std::max(p, 1e-12), 1.0 - 1e-12);
  return std::log(p / (1.0 - p));
}

}  // namespace pmtmobo
