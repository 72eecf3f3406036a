#pragma once

// Hypervolume, scalarized regrets, information gains and the multi-task
// information-gain inequality checker.

#include "pmtmobo/benchmarks.hpp"
#include "pmtmobo/io.hpp"
#include "pmtmobo/kernels.hpp"
#include "pmtmobo/scalarize.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

namespace pmtmobo {

inline constexpr Eigen::Index kMaxHv3Points = 2000;

namespace detail {

/// 2-D hypervolume of (a, b) pairs that already strictly dominate (za, zb).
inline double hv2d_sweep(std::vector<std::pair<double, double>> pts, double za, double zb) {
  std::sort(pts.begin(), pts.end());
  double hv = 0.0;
  double floor_b = zb;
  for (const auto& [a, b] : pts) {
    if (b < floor_b) {
      hv += (za - a) * (floor_b - b);
      floor_b = b;
    }
  }
  return hv;
}

}  // namespace detail

/// Points are rows (minimization). Only points strictly dominating z contribute.
inline double hypervolume(const Matrix& points, const Vector& z) {
  const Eigen::Index M = z.size();
  if (M != 2 && M != 3) throw InputError("hypervolume: only M in {2, 3} supported");
  if (points.rows() == 0) return 0.0;
  require_same_size(points.cols(), M, "hypervolume");
  std::vector<Eigen::Index> inside;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    if ((points.row(i).transpose().array() < z.array()).all()) inside.push_back(i);
  }
  if (inside.empty()) return 0.0;
  if (M == 2) {
    std::vector<std::pair<double, double>> pts;
    for (auto i : inside) pts.emplace_back(points(i, 0), points(i, 1));
    return detail::hv2d_sweep(std::move(pts), z[0], z[1]);
  }
  // M == 3: slice along the third objective.
  std::vector<Eigen::Index> nd;
  for (auto i : inside) {
    bool dominated = false;
    for (auto j : inside) {
      if (i == j) continue;
      const bool weak = (points.row(j).array() <= points.row(i).array()).all();
      const bool strict = (points.row(j).array() < points.row(i).array()).any();
      if (weak && (strict || j < i)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) nd.push_back(i);
  }
  if (static_cast<Eigen::Index>(nd.size()) > kMaxHv3Points) {
    throw InputError("hypervolume: 3-D computation limited to 2000 nondominated points");
  }
  std::sort(nd.begin(), nd.end(), [&](Eigen::Index a, Eigen::Index b) { return points(a, 2) < points(b, 2); });
  double hv = 0.0;
  std::vector<std::pair<double, double>> slice;
  for (std::size_t s = 0; s < nd.size(); ++s) {
    slice.emplace_back(points(nd[s], 0), points(nd[s], 1));
    const double top = (s + 1 < nd.size()) ? points(nd[s + 1], 2) : z[2];
    const double depth = top - points(nd[s], 2);
    if (depth > 0.0) hv += depth * detail::hv2d_sweep(slice, z[0], z[1]);
  }
  return hv;
}

inline double hypervolume(const std::vector<Vector>& points, const Vector& z) {
  Matrix P(static_cast<Eigen::Index>(points.size()), z.size());
  for (std::size_t i = 0; i < points.size(); ++i) P.row(static_cast<Eigen::Index>(i)) = points[i].transpose();
  return hypervolume(P, z);
}

// Regrets use the scalarized objective s_lambda(F; z), larger is better; a
// round's regret is the best attainable value on the true front minus the
// value achieved.

inline constexpr int kFrontResolution = 10000;

inline double best_front_score(const Matrix& front, const Preference& lambda, const Vector& z) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < front.rows(); ++i) {
    best = std::max(best, hv_scalarize(lambda, front.row(i).transpose(), z));
  }
  return best;
}

struct RegretRound {
  Preference lambda;
  Vector objectives;
};

struct CumulativeRegret {
  double total = 0.0;
  std::vector<double> per_round;
};

inline CumulativeRegret cumulative_regret(const std::vector<RegretRound>& trajectory, const BenchmarkDef& bench,
                                          const Vector& theta, const Vector& z, int front_points = kFrontResolution) {
  const Matrix front = analytic_front(bench, theta, front_points);
  CumulativeRegret r;
  for (const auto& round : trajectory) {
    const double gap = best_front_score(front, round.lambda, z) - hv_scalarize(round.lambda, round.objectives, z);
    r.per_round.push_back(gap);
    r.total += gap;
  }
  return r;
}

/// Average regret of a solution set (rows = objective vectors) over the given preferences.
inline double bayes_regret(const Matrix& solutions, const BenchmarkDef& bench, const Vector& theta, const Vector& z,
                           const std::vector<Preference>& prefs, int front_points = kFrontResolution) {
  if (prefs.empty()) throw InputError("bayes_regret: at least one preference required");
  if (solutions.rows() == 0) throw InputError("bayes_regret: empty solution set");
  const Matrix front = analytic_front(bench, theta, front_points);
  double sum = 0.0;
  for (const auto& lambda : prefs) {
    double attained = 0.0;
    for (Eigen::Index i = 0; i < solutions.rows(); ++i) {
      attained = std::max(attained, hv_scalarize(lambda, solutions.row(i).transpose(), z));
    }
    sum += best_front_score(front, lambda, z) - attained;
  }
  return sum / static_cast<double>(prefs.size());
}

inline double bayes_regret(const Matrix& solutions, const BenchmarkDef& bench, const Vector& theta, const Vector& z,
                           int n_pref, Rng& rng, int front_points = kFrontResolution) {
  if (n_pref < 1) throw InputError("bayes_regret: n_pref must be >= 1");
  std::vector<Preference> prefs;
  for (int i = 0; i < n_pref; ++i) prefs.push_back(sample_preference(bench.M, rng));
  return bayes_regret(solutions, bench, theta, z, prefs, front_points);
}

/// 0.5 * log det(I + K / noise) over the rows of `design`.
inline double information_gain(const Matrix& design, const CompositeKernel& kernel, double noise_variance) {
  if (design.rows() == 0) throw InputError("information_gain: empty design");
  if (!(noise_variance > 0.0)) throw InputError("information_gain: noise variance must be positive");
  Matrix A = gram_matrix(design, kernel) / noise_variance;
  A.diagonal().array() += 1.0;
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success) throw NumericalError("information_gain: I + K/noise not positive definite");
  return llt.matrixLLT().diagonal().array().log().sum();
}

/// Regularizer added to the conditioning block before inversion.
enum class SchurRegularizer { noise_variance, inverse_noise_variance };

inline std::string to_string(SchurRegularizer r) {
  return r == SchurRegularizer::noise_variance ? "sigma2" : "inv_sigma2";
}

/// Covariance of the target block given noisy observations of the conditioning block.
inline Matrix conditional_covariance(const Matrix& target, const Matrix& conditioning, const CompositeKernel& kernel,
                                     double noise_variance, SchurRegularizer reg) {
  Matrix Ktt = gram_matrix(target, kernel);
  if (conditioning.rows() == 0) return Ktt;
  const double r = reg == SchurRegularizer::noise_variance ? noise_variance : 1.0 / noise_variance;
  Matrix Kcc = gram_matrix(conditioning, kernel);
  Kcc.diagonal().array() += r;
  const Matrix B = cross_covariance(conditioning, target, kernel);
  Eigen::LLT<Matrix> llt(Kcc);
  if (llt.info() != Eigen::Success) throw NumericalError("conditional_covariance: conditioning block not invertible");
  const Matrix W = llt.matrixL().solve(B);
  Matrix C = Ktt - W.transpose() * W;
  return 0.5 * (C + C.transpose());
}

inline double conditional_information_gain(const Matrix& target, const Matrix& conditioning,
                                           const CompositeKernel& kernel, double noise_variance,
                                           SchurRegularizer reg = SchurRegularizer::noise_variance) {
  if (target.rows() == 0) throw InputError("conditional_information_gain: empty target design");
  if (conditioning.rows() == 0) return information_gain(target, kernel, noise_variance);
  require_same_size(target.cols(), conditioning.cols(), "conditional_information_gain");
  Matrix A = conditional_covariance(target, conditioning, kernel, noise_variance, reg) / noise_variance;
  A.diagonal().array() += 1.0;
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success) throw NumericalError("conditional_information_gain: not positive definite");
  return llt.matrixLLT().diagonal().array().log().sum();
}

struct Theorem2Config {
  std::vector<int> task_counts{2, 4, 8};
  std::vector<int> design_sizes{5, 15};
  std::vector<int> objective_counts{2, 3};
  std::vector<SchurRegularizer> regularizers{SchurRegularizer::noise_variance,
                                             SchurRegularizer::inverse_noise_variance};
  int decision_dim = 3;
  double tolerance = 1e-9;
};

struct Theorem2Row {
  int trial = 0;
  int m = 0;
  int k = 0;
  int K = 0;
  int T = 0;
  int M = 0;
  SchurRegularizer regularizer = SchurRegularizer::noise_variance;
  double gamma_single = 0.0;
  double gamma_joint = 0.0;
  [[nodiscard]] double gap() const { return gamma_single - gamma_joint; }
};

struct Theorem2Report {
  std::vector<Theorem2Row> rows;
  double max_violation = 0.0;  // max(0, gamma_joint - gamma_single)
  int violations = 0;          // rows with violation above tolerance
  double min_gap = 0.0;
  double mean_gap = 0.0;
  double max_gap = 0.0;
};

/// Trial i uses the i-th configuration in mixed-radix order over
/// (K, T, M, regularizer), so any run of trials cycles through every combination.
inline Theorem2Report theorem2_check(int trials, Rng& rng, const Theorem2Config& cfg = {}) {
  if (trials < 1) throw InputError("theorem2_check: trials must be >= 1");
  if (cfg.task_counts.empty() || cfg.design_sizes.empty() || cfg.objective_counts.empty() ||
      cfg.regularizers.empty()) {
    throw InputError("theorem2_check: empty configuration list");
  }
  Theorem2Report rep;
  std::uniform_real_distribution<double> ls_dist(kLengthscaleMin, kLengthscaleMax);
  auto log_uniform = [&](double lo, double hi) { return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * uniform01(rng)); };
  const int D = cfg.decision_dim;

  for (int trial = 0; trial < trials; ++trial) {
    std::size_t idx = static_cast<std::size_t>(trial);
    const int K = cfg.task_counts[idx % cfg.task_counts.size()];
    idx /= cfg.task_counts.size();
    const int T = cfg.design_sizes[idx % cfg.design_sizes.size()];
    idx /= cfg.design_sizes.size();
    const int M = cfg.objective_counts[idx % cfg.objective_counts.size()];
    idx /= cfg.objective_counts.size();
    const SchurRegularizer reg = cfg.regularizers[idx % cfg.regularizers.size()];

    std::vector<double> thetas(static_cast<std::size_t>(K));
    for (auto& t : thetas) t = 0.8 + 0.2 * uniform01(rng);
    std::vector<Matrix> designs;
    for (int k = 0; k < K; ++k) {
      Matrix X(T, D + 1);
      for (int i = 0; i < T; ++i) {
        for (int d = 0; d < D; ++d) X(i, d) = uniform01(rng);
        X(i, D) = thetas[static_cast<std::size_t>(k)];
      }
      designs.push_back(std::move(X));
    }

    for (int m = 0; m < M; ++m) {
      CompositeKernel kernel;
      kernel.decision.lengthscale = ls_dist(rng);
      kernel.task.lengthscales = Vector::Constant(1, log_uniform(0.02, 2.0));
      kernel.output_scale = log_uniform(0.25, 1.0);
      const double noise = log_uniform(1e-3, 1.0);
      const CompositeKernel single{kernel.decision, {Vector(0)}, kernel.output_scale};

      for (int k = 0; k < K; ++k) {
        const Matrix& target = designs[static_cast<std::size_t>(k)];
        Matrix cond((K - 1) * T, D + 1);
        Eigen::Index r = 0;
        for (int j = 0; j < K; ++j) {
          if (j == k) continue;
          cond.middleRows(r, T) = designs[static_cast<std::size_t>(j)];
          r += T;
        }
        Theorem2Row row{trial, m, k, K, T, M, reg, 0.0, 0.0};
        row.gamma_single = information_gain(target.leftCols(D), single, noise);
        row.gamma_joint = conditional_information_gain(target, cond, kernel, noise, reg);
        rep.rows.push_back(row);
      }
    }
  }

  double sum = 0.0;
  rep.min_gap = std::numeric_limits<double>::infinity();
  rep.max_gap = -std::numeric_limits<double>::infinity();
  for (const auto& r : rep.rows) {
    const double g = r.gap();
    sum += g;
    rep.min_gap = std::min(rep.min_gap, g);
    rep.max_gap = std::max(rep.max_gap, g);
    rep.max_violation = std::max(rep.max_violation, -g);
    if (-g > cfg.tolerance) ++rep.violations;
  }
  rep.mean_gap = sum / static_cast<double>(rep.rows.size());
  return rep;
}

inline void write_theorem2_csv(const Theorem2Report& rep, const std::filesystem::path& path) {
  io::CsvWriter w(path);
  w.header({"trial", "m", "k", "K", "T", "M", "regularizer", "gamma_single", "gamma_joint", "gap"});
  for (const auto& r : rep.rows) {
    w.row({std::to_string(r.trial), std::to_string(r.m), std::to_string(r.k), std::to_string(r.K),
           std::to_string(r.T), std::to_string(r.M), to_string(r.regularizer), io::format_double(r.gamma_single),
           io::format_double(r.gamma_joint), io::format_double(r.gap())});
  }
}

}  // namespace pmtmobo
