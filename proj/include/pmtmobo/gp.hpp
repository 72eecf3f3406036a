#pragma once

// Exact GP regression with a CompositeKernel over joint inputs (x, theta).
// Targets are normalized to zero mean and unit variance internally; all
// predictions are returned in the original target units.

#include "pmtmobo/kernels.hpp"
#include "pmtmobo/nnet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>
#include <vector>

namespace pmtmobo {

inline constexpr double kNoiseFloor = 1e-6;

struct Posterior {
  double mean = 0.0;
  double variance = 0.0;
};

struct BatchPosterior {
  Vector mean;
  Vector variance;
};

struct Hyperparameters {
  CompositeKernel kernel;
  double noise_variance = 1e-2;
};

struct GPFitOptions {
  bool normalize_targets = true;
  double initial_jitter = 1e-8;
  double max_jitter = 1e-2;
};

struct TargetNormalization {
  double mean = 0.0;
  double std = 1.0;
};

inline TargetNormalization target_normalization(const Vector& y) {
  TargetNormalization n;
  if (y.size() == 0) return n;
  n.mean = y.mean();
  const double var = (y.array() - n.mean).square().mean();
  n.std = (y.size() > 1 && var > 1e-24) ? std::sqrt(var) : 1.0;
  return n;
}

namespace detail {

inline std::vector<Eigen::Index> canonical_order(const Matrix& X, const Vector& y) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(X.rows()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index c = 0; c < X.cols(); ++c) {
      if (X(a, c) != X(b, c)) return X(a, c) < X(b, c);
    }
    return y[a] < y[b];
  });
  return idx;
}

/// Cholesky of (K + noise I) with escalating jitter. Returns the jitter used.
inline double robust_cholesky(const Matrix& K, double noise, const GPFitOptions& opt, Eigen::LLT<Matrix>& llt) {
  const Eigen::Index n = K.rows();
  Matrix A = K;
  A.diagonal().array() += noise;
  llt.compute(A);
  if (llt.info() == Eigen::Success && llt.matrixLLT().diagonal().allFinite()) return 0.0;
  for (double jitter = opt.initial_jitter; jitter <= opt.max_jitter * (1 + 1e-12); jitter *= 10.0) {
    Matrix B = A;
    B.diagonal().array() += jitter;
    llt.compute(B);
    if (llt.info() == Eigen::Success && llt.matrixLLT().diagonal().allFinite()) return jitter;
  }
  std::ostringstream msg;
  msg << "Cholesky failed after jitter escalation to " << opt.max_jitter << " (n=" << n
      << ", noise=" << noise << ", diag range=[" << K.diagonal().minCoeff() << ", " << K.diagonal().maxCoeff()
      << "])";
  throw NumericalError(msg.str());
}

}  // namespace detail

class GPModel {
 public:
  GPModel() = default;

  [[nodiscard]] bool fitted() const { return inputs_.rows() > 0; }
  [[nodiscard]] const CompositeKernel& kernel() const { return hyper_.kernel; }
  [[nodiscard]] const Hyperparameters& hyperparameters() const { return hyper_; }
  [[nodiscard]] double noise_variance() const { return hyper_.noise_variance; }
  [[nodiscard]] const Matrix& inputs() const { return inputs_; }
  [[nodiscard]] const Vector& normalized_targets() const { return targets_; }
  [[nodiscard]] const TargetNormalization& normalization() const { return norm_; }
  [[nodiscard]] const Eigen::LLT<Matrix>& cholesky() const { return llt_; }
  [[nodiscard]] Matrix cholesky_factor() const { return llt_.matrixL(); }
  [[nodiscard]] const Vector& alpha() const { return alpha_; }
  [[nodiscard]] double jitter() const { return jitter_; }
  [[nodiscard]] Eigen::Index size() const { return inputs_.rows(); }
  [[nodiscard]] Eigen::Index input_dim() const { return inputs_.cols(); }

  friend GPModel fit(const Matrix& inputs, const Vector& targets, const Hyperparameters& hyper,
                     const GPFitOptions& opt);

 private:
  Hyperparameters hyper_;
  Matrix inputs_;
  Vector targets_;
  TargetNormalization norm_;
  Eigen::LLT<Matrix> llt_;
  Vector alpha_;
  double jitter_ = 0.0;
};

/// Fits the posterior. Observations are put in canonical (lexicographic) order
/// first, so the fitted model does not depend on the order they were given in.
inline GPModel fit(const Matrix& inputs, const Vector& targets, const Hyperparameters& hyper,
                   const GPFitOptions& opt = {}) {
  if (inputs.rows() == 0) throw InputError("gp fit: at least one observation required");
  require_same_size(inputs.rows(), targets.size(), "gp fit targets");
  if (!inputs.allFinite() || !targets.allFinite()) throw InputError("gp fit: non-finite observation");
  hyper.kernel.validate();
  if (!(hyper.noise_variance >= kNoiseFloor * (1 - 1e-12))) throw InputError("gp fit: noise variance below floor");

  GPModel m;
  m.hyper_ = hyper;
  const auto order = detail::canonical_order(inputs, targets);
  m.inputs_.resize(inputs.rows(), inputs.cols());
  Vector y(targets.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    m.inputs_.row(static_cast<Eigen::Index>(i)) = inputs.row(order[i]);
    y[static_cast<Eigen::Index>(i)] = targets[order[i]];
  }
  m.norm_ = opt.normalize_targets ? target_normalization(y) : TargetNormalization{};
  m.targets_ = (y.array() - m.norm_.mean) / m.norm_.std;

  const Matrix K = gram_matrix(m.inputs_, hyper.kernel);
  m.jitter_ = detail::robust_cholesky(K, hyper.noise_variance, opt, m.llt_);
  m.alpha_ = m.llt_.solve(m.targets_);
  return m;
}

inline GPModel fit(const Matrix& inputs, const Vector& targets, const CompositeKernel& kernel, double noise_variance,
                   const GPFitOptions& opt = {}) {
  return fit(inputs, targets, Hyperparameters{kernel, noise_variance}, opt);
}

/// Posterior over the latent function (no observation noise) at each row of `queries`.
inline BatchPosterior predict_batch(const GPModel& model, const Matrix& queries) {
  if (!model.fitted()) throw StateError("predict: model not fitted");
  require_same_size(queries.cols(), model.input_dim(), "predict query");
  const Matrix Ks = cross_covariance(model.inputs(), queries, model.kernel());  // N x Q
  BatchPosterior out;
  const Vector mean_n = Ks.transpose() * model.alpha();
  const Matrix v = model.cholesky().matrixL().solve(Ks);
  const Vector explained = v.colwise().squaredNorm().transpose();
  const double s = model.normalization().std;
  out.mean = (mean_n.array() * s + model.normalization().mean).matrix();
  out.variance.resize(queries.rows());
  for (Eigen::Index q = 0; q < queries.rows(); ++q) {
    const double prior = composite_joint(queries.row(q), queries.row(q), model.kernel());
    out.variance[q] = std::max(0.0, prior - explained[q]) * s * s;
  }
  return out;
}

inline Posterior predict(const GPModel& model, const Vector& query) {
  if (!model.fitted()) throw StateError("predict: model not fitted");
  require_same_size(query.size(), model.input_dim(), "predict query");
  const auto b = predict_batch(model, query.transpose());
  return {b.mean[0], b.variance[0]};
}

/// Prior variance at `query`, in target units.
inline double prior_variance(const GPModel& model, const Vector& query) {
  const double s = model.normalization().std;
  return composite_joint(query, query, model.kernel()) * s * s;
}

/// log p(y | X) on the normalized targets.
inline double log_marginal_likelihood(const GPModel& model) {
  if (!model.fitted()) throw StateError("log_marginal_likelihood: model not fitted");
  const double n = static_cast<double>(model.size());
  const double quad = model.normalized_targets().dot(model.alpha());
  const double logdet_half = model.cholesky().matrixLLT().diagonal().array().log().sum();
  return -0.5 * quad - logdet_half - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

// Unconstrained parameter vector layout: [u_lengthscale, u_task_0..u_task_{V-1}, u_scale, u_noise].

inline Vector to_unconstrained(const Hyperparameters& h) {
  const Eigen::Index V = h.kernel.task_dim();
  Vector u(V + 3);
  u[0] = bounded_lengthscale_inverse(h.kernel.decision.lengthscale);
  for (Eigen::Index v = 0; v < V; ++v) u[1 + v] = softplus_inverse(h.kernel.task.lengthscales[v]);
  u[V + 1] = softplus_inverse(h.kernel.output_scale);
  u[V + 2] = softplus_inverse(std::max(h.noise_variance - kNoiseFloor, 1e-12));
  return u;
}

inline Hyperparameters from_unconstrained(const Vector& u) {
  if (u.size() < 3) throw ShapeError("from_unconstrained: vector too short");
  const Eigen::Index V = u.size() - 3;
  Hyperparameters h;
  h.kernel.decision.lengthscale = bounded_lengthscale(u[0]);
  h.kernel.task.lengthscales.resize(V);
  for (Eigen::Index v = 0; v < V; ++v) h.kernel.task.lengthscales[v] = std::max(softplus(u[1 + v]), 1e-12);
  h.kernel.output_scale = std::max(softplus(u[V + 1]), 1e-12);
  h.noise_variance = kNoiseFloor + softplus(u[V + 2]);
  return h;
}

struct MllGradient {
  double value = 0.0;
  Vector grad;  // d value / d u
};

/// Marginal log-likelihood and its gradient w.r.t. the unconstrained parameters.
/// `targets` are used as given (callers normalize first).
inline MllGradient mll_with_gradient(const Matrix& inputs, const Vector& targets, const Vector& u,
                                     const GPFitOptions& opt = {}) {
  const Hyperparameters h = from_unconstrained(u);
  const Eigen::Index n = inputs.rows();
  const Eigen::Index V = h.kernel.task_dim();
  const Eigen::Index D = inputs.cols() - V;
  const double l = h.kernel.decision.lengthscale;

  Matrix Kf = gram_matrix(inputs, h.kernel);
  Eigen::LLT<Matrix> llt;
  detail::robust_cholesky(Kf, h.noise_variance, opt, llt);
  const Vector alpha = llt.solve(targets);

  MllGradient out;
  out.value = -0.5 * targets.dot(alpha) - llt.matrixLLT().diagonal().array().log().sum() -
              0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);

  Matrix W = -llt.solve(Matrix::Identity(n, n));
  W.noalias() += alpha * alpha.transpose();  // W = a a^T - K^-1

  double g_dec = 0.0;
  Vector g_task = Vector::Zero(V);
  double g_scale = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double wk = W(i, j) * Kf(i, j);
      g_dec += wk * squared_distance(inputs.row(i).head(D), inputs.row(j).head(D));
      for (Eigen::Index v = 0; v < V; ++v) {
        const double d = inputs(i, D + v) - inputs(j, D + v);
        g_task[v] += wk * d * d;
      }
      g_scale += wk;
    }
  }
  out.grad.resize(V + 3);
  const double span = kLengthscaleMax - kLengthscaleMin;
  const double sig = sigmoid(u[0]);
  out.grad[0] = 0.5 * g_dec / (l * l * l) * span * sig * (1.0 - sig);
  for (Eigen::Index v = 0; v < V; ++v) {
    const double lv = h.kernel.task.lengthscales[v];
    out.grad[1 + v] = 0.5 * g_task[v] / (lv * lv * lv) * sigmoid(u[1 + v]);
  }
  out.grad[V + 1] = 0.5 * g_scale / h.kernel.output_scale * sigmoid(u[V + 1]);
  out.grad[V + 2] = 0.5 * W.trace() * sigmoid(u[V + 2]);
  return out;
}

struct TrainResult {
  Hyperparameters hyper;
  double initial_mll = 0.0;
  double best_mll = 0.0;
  int steps_taken = 0;
  bool numerical_failure = false;
};

/// Adam ascent on the exact marginal log-likelihood. Returns the best parameters seen
/// (never worse than the initial ones); a numerical failure stops training early.
inline TrainResult train_hyperparameters(const Matrix& inputs, const Vector& targets, const Hyperparameters& init,
                                         int steps, double learning_rate, const GPFitOptions& opt = {}) {
  if (steps < 1) throw InputError("train_hyperparameters: steps must be >= 1");
  if (inputs.rows() == 0) throw InputError("train_hyperparameters: no observations");
  init.kernel.validate();
  const TargetNormalization norm = opt.normalize_targets ? target_normalization(targets) : TargetNormalization{};
  const Vector y = (targets.array() - norm.mean) / norm.std;

  Vector u = to_unconstrained(init);
  nnet::VectorAdam adam(u.size(), learning_rate);
  TrainResult res;
  res.hyper = from_unconstrained(u);
  Vector best_u = u;
  bool have_best = false;
  bool best_is_init = true;

  auto evaluate = [&](const Vector& params) -> std::optional<MllGradient> {
    try {
      auto r = mll_with_gradient(inputs, y, params, opt);
      if (!std::isfinite(r.value) || !r.grad.allFinite()) return std::nullopt;
      return r;
    } catch (const NumericalError&) {
      return std::nullopt;
    }
  };

  for (int s = 0; s <= steps; ++s) {
    auto r = evaluate(u);
    if (!r) {
      if (!have_best) throw NumericalError("train_hyperparameters: initial parameters are numerically invalid");
      res.numerical_failure = true;
      break;
    }
    if (!have_best) {
      res.initial_mll = r->value;
      res.best_mll = r->value;
      have_best = true;
    } else if (r->value > res.best_mll) {
      res.best_mll = r->value;
      best_u = u;
      best_is_init = false;
    }
    if (s == steps) break;
    Vector neg = -r->grad;
    adam.step(u, neg);
    res.steps_taken = s + 1;
  }
  res.hyper = best_is_init ? init : from_unconstrained(best_u);
  return res;
}

}  // namespace pmtmobo
