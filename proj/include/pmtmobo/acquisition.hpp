#pragma once

// Scalarized UCB acquisition over X = [0,1]^D for one task.

#include "pmtmobo/gp.hpp"
#include "pmtmobo/scalarize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <numbers>
#include <span>
#include <vector>

namespace pmtmobo {

struct AcquisitionConfig {
  int pool_size = 512;
  int local_refinement_steps = 20;
  double refinement_step_size = 0.02;
  double beta_delta = 0.1;
  int refine_top = 5;  // how many of the best pool members get hill-climbed

  void validate() const {
    if (pool_size < 1) throw InputError("acquisition: pool_size must be positive");
    if (local_refinement_steps < 0) throw InputError("acquisition: local_refinement_steps must be >= 0");
    if (!(refinement_step_size > 0.0)) throw InputError("acquisition: refinement_step_size must be positive");
    if (!(beta_delta > 0.0 && beta_delta < 1.0)) throw InputError("acquisition: beta_delta out of range");
    if (refine_top < 0) throw InputError("acquisition: refine_top must be >= 0");
  }
};

/// beta_t = 2 log(D t^2 pi^2 / (6 delta)), clamped at zero.
inline double beta(int t, int D, double delta) {
  if (t < 1) throw InputError("beta: t must be >= 1");
  if (D < 1 || !(delta > 0.0)) throw InputError("beta: need D >= 1 and delta > 0");
  const double v = 2.0 * std::log(static_cast<double>(D) * t * t * std::numbers::pi * std::numbers::pi / (6.0 * delta));
  return std::max(0.0, v);
}

inline double beta(int t, int D, const AcquisitionConfig& cfg) { return beta(t, D, cfg.beta_delta); }

/// The M per-objective surrogates for one task. For task-aware models `theta`
/// holds the task parameters appended to every query; single-task models use an
/// empty theta.
struct TaskSurrogate {
  std::span<const GPModel> models;
  Vector theta;

  [[nodiscard]] Eigen::Index objectives() const { return static_cast<Eigen::Index>(models.size()); }
};

inline Matrix joint_queries(const Matrix& X, const Vector& theta) {
  Matrix Q(X.rows(), X.cols() + theta.size());
  Q.leftCols(X.cols()) = X;
  for (Eigen::Index i = 0; i < X.rows(); ++i) Q.row(i).tail(theta.size()) = theta.transpose();
  return Q;
}

/// Rows of X -> rows of UCB vectors -mu + sqrt(beta) sigma (maximization convention).
inline Matrix ucb_batch(const TaskSurrogate& s, const Matrix& X, double beta_t) {
  if (s.models.empty()) throw InputError("ucb: no surrogate models");
  if (beta_t < 0.0) throw InputError("ucb: beta must be nonnegative");
  const Matrix Q = joint_queries(X, s.theta);
  Matrix out(X.rows(), s.objectives());
  const double sb = std::sqrt(beta_t);
  for (Eigen::Index m = 0; m < s.objectives(); ++m) {
    const auto post = predict_batch(s.models[static_cast<std::size_t>(m)], Q);
    out.col(m) = -post.mean + sb * post.variance.cwiseSqrt();
  }
  return out;
}

inline Vector ucb_vector(const TaskSurrogate& s, const Vector& x, double beta_t) {
  return ucb_batch(s, x.transpose(), beta_t).row(0).transpose();
}

inline Vector scalarized_scores(const TaskSurrogate& s, const Matrix& X, const Preference& lambda, double beta_t,
                                const Vector& z) {
  const Matrix U = ucb_batch(s, X, beta_t);
  Vector scores(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) scores[i] = scalarize_ucb(lambda, U.row(i).transpose(), z);
  return scores;
}

struct AcquisitionResult {
  Vector x;
  double score = 0.0;
  Eigen::Index index = 0;  // position in the candidate pool
};

/// Argmax of the scalarized UCB over exactly the rows of `pool`; ties go to the lowest index.
inline AcquisitionResult select_from_pool(const TaskSurrogate& s, const Preference& lambda, double beta_t,
                                          const Vector& z, const Matrix& pool) {
  if (pool.rows() == 0) throw InputError("select_from_pool: empty pool");
  const Vector scores = scalarized_scores(s, pool, lambda, beta_t, z);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return {pool.row(best).transpose(), scores[best], best};
}

/// Uniform pool (plus `seeds`, the task's previously evaluated points) scored in
/// one batch; the best few are then refined by single-coordinate Gaussian
/// hill climbing.
inline AcquisitionResult maximize_acquisition(const TaskSurrogate& s, const Preference& lambda, double beta_t,
                                              const Vector& z, const AcquisitionConfig& cfg, Rng& rng,
                                              const Matrix& seeds, Eigen::Index D) {
  cfg.validate();
  if (seeds.rows() > 0) require_same_size(seeds.cols(), D, "maximize_acquisition seeds");
  Matrix pool(cfg.pool_size + seeds.rows(), D);
  for (int i = 0; i < cfg.pool_size; ++i) pool.row(i) = uniform_vector(D, rng).transpose();
  if (seeds.rows() > 0) pool.bottomRows(seeds.rows()) = seeds;

  Vector scores = scalarized_scores(s, pool, lambda, beta_t, z);

  const Eigen::Index n_refine = std::min<Eigen::Index>(cfg.refine_top, pool.rows());
  if (n_refine > 0 && cfg.local_refinement_steps > 0) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(pool.rows()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return scores[a] > scores[b]; });
    order.resize(static_cast<std::size_t>(n_refine));

    std::normal_distribution<double> step(0.0, cfg.refinement_step_size);
    std::uniform_int_distribution<Eigen::Index> coord(0, D - 1);
    Matrix proposals(n_refine, D);
    for (int it = 0; it < cfg.local_refinement_steps; ++it) {
      for (Eigen::Index r = 0; r < n_refine; ++r) {
        Vector x = pool.row(order[static_cast<std::size_t>(r)]).transpose();
        const Eigen::Index j = coord(rng);
        x[j] = std::clamp(x[j] + step(rng), 0.0, 1.0);
        proposals.row(r) = x.transpose();
      }
      const Vector ps = scalarized_scores(s, proposals, lambda, beta_t, z);
      for (Eigen::Index r = 0; r < n_refine; ++r) {
        const Eigen::Index i = order[static_cast<std::size_t>(r)];
        if (ps[r] > scores[i]) {
          scores[i] = ps[r];
          pool.row(i) = proposals.row(r);
        }
      }
    }
  }

  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return {clamp_unit(pool.row(best).transpose()), scores[best], best};
}

}  // namespace pmtmobo
