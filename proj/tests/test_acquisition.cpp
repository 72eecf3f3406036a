#include "pmtmobo/acquisition.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace pmtmobo;

namespace {

struct Fixture {
  std::vector<GPModel> models;
  Matrix X;
};

// M objectives on [0,1]^D, fit with fixed hyperparameters.
Fixture make_models(int D, int n, Rng& rng, const std::function<Vector(const Vector&)>& f) {
  Fixture fx;
  fx.X.resize(n, D);
  for (int i = 0; i < n; ++i) fx.X.row(i) = uniform_vector(D, rng).transpose();
  const Eigen::Index M = f(fx.X.row(0).transpose()).size();
  Matrix Y(n, M);
  for (int i = 0; i < n; ++i) Y.row(i) = f(fx.X.row(i).transpose()).transpose();
  Hyperparameters h{CompositeKernel::with_task_dim(0), 1e-4};
  h.kernel.decision.lengthscale = 0.3;
  for (Eigen::Index m = 0; m < M; ++m) fx.models.push_back(fit(fx.X, Y.col(m), h));
  return fx;
}

Vector bowl2(const Vector& x) {
  return vec({(x - vec({0.2, 0.3})).squaredNorm(), (x - vec({0.8, 0.6})).squaredNorm()});
}

}  // namespace

TEST(Beta, ConstructedZero) { EXPECT_NEAR(beta(1, 1, std::numbers::pi * std::numbers::pi / 6), 0.0, 1e-14); }

TEST(Beta, StrictlyIncreasingInT) {
  for (int t = 1; t < 200; ++t) EXPECT_GT(beta(t + 1, 8, 0.1), beta(t, 8, 0.1));
}

TEST(Beta, ClosedForm) {
  EXPECT_NEAR(beta(50, 8, 0.1), 2 * std::log(8.0 * 2500 * std::numbers::pi * std::numbers::pi / 0.6), 1e-12);
}

TEST(Beta, RejectsBadArguments) {
  EXPECT_THROW(beta(0, 1, 0.1), InputError);
  EXPECT_THROW(beta(1, 0, 0.1), InputError);
  AcquisitionConfig c;
  c.beta_delta = 1.0;
  EXPECT_THROW(c.validate(), InputError);
}

TEST(Ucb, ZeroBetaIsNegatedMean) {
  Rng rng = make_rng(1);
  auto fx = make_models(2, 15, rng, bowl2);
  const TaskSurrogate s{fx.models, Vector(0)};
  const Vector x = vec({0.4, 0.4});
  const Vector u = ucb_vector(s, x, 0.0);
  for (int m = 0; m < 2; ++m) EXPECT_EQ(u[m], -predict(fx.models[static_cast<std::size_t>(m)], x).mean);
}

TEST(Ucb, AtHeavilyObservedPointNearNegatedMean) {
  Rng rng = make_rng(2);
  auto fx = make_models(2, 25, rng, bowl2);
  const TaskSurrogate s{fx.models, Vector(0)};
  const Vector x = fx.X.row(4).transpose();
  const Vector u = ucb_vector(s, x, 4.0);
  const Vector truth = bowl2(x);
  for (int m = 0; m < 2; ++m) EXPECT_NEAR(u[m], -truth[m], 1e-2);
}

TEST(Ucb, NondecreasingInBeta) {
  Rng rng = make_rng(3);
  auto fx = make_models(2, 10, rng, bowl2);
  const TaskSurrogate s{fx.models, Vector(0)};
  for (int i = 0; i < 50; ++i) {
    const Vector x = uniform_vector(2, rng);
    const Vector lo = ucb_vector(s, x, 0.5), hi = ucb_vector(s, x, 2.0);
    EXPECT_TRUE((hi.array() >= lo.array()).all());
  }
}

TEST(Ucb, TaskAwareAppendsTheta) {
  Rng rng = make_rng(4);
  Matrix X(12, 3);
  for (int i = 0; i < 12; ++i) X.row(i) = uniform_vector(3, rng).transpose();
  Hyperparameters h{CompositeKernel::with_task_dim(1), 1e-3};
  std::vector<GPModel> models{fit(X, X.col(0), h)};
  const Vector theta = vec({0.9});
  const TaskSurrogate s{models, theta};
  const Vector x = vec({0.3, 0.1});
  EXPECT_EQ(ucb_vector(s, x, 0.0)[0], -predict(models[0], concat(x, theta)).mean);
}

TEST(SelectFromPool, Singleton) {
  Rng rng = make_rng(5);
  auto fx = make_models(2, 10, rng, bowl2);
  const Matrix pool = vec({0.42, 0.17}).transpose();
  const auto r = select_from_pool({fx.models, Vector(0)}, Preference(vec({1.0, 1.0})), 1.0, vec({1.0, 1.0}), pool);
  EXPECT_EQ(r.x, vec({0.42, 0.17}));
  EXPECT_EQ(r.index, 0);
}

TEST(SelectFromPool, MatchesExhaustiveScoring) {
  Rng rng = make_rng(6);
  auto fx = make_models(2, 12, rng, bowl2);
  const TaskSurrogate s{fx.models, Vector(0)};
  for (int trial = 0; trial < 20; ++trial) {
    Matrix pool(64, 2);
    for (int i = 0; i < 64; ++i) pool.row(i) = uniform_vector(2, rng).transpose();
    const auto l = sample_preference(2, rng);
    const Vector z = vec({1.2, 1.2});
    const double b = 0.5 + uniform01(rng);
    Eigen::Index best = 0;
    double best_score = -1.0;
    for (Eigen::Index i = 0; i < 64; ++i) {
      const double sc = scalarize_ucb(l, ucb_vector(s, pool.row(i).transpose(), b), z);
      if (sc > best_score) {
        best_score = sc;
        best = i;
      }
    }
    const auto r = select_from_pool(s, l, b, z, pool);
    EXPECT_EQ(r.index, best);
    EXPECT_EQ(r.x, Vector(pool.row(best).transpose()));
  }
}

TEST(SelectFromPool, WinnerAmongDominatedCandidates) {
  Rng rng = make_rng(7);
  auto fx = make_models(2, 15, rng, bowl2);
  const TaskSurrogate s{fx.models, Vector(0)};
  const Preference l(vec({1.0, 1.0}));
  const Vector z = vec({1.2, 1.2});
  AcquisitionConfig cfg;
  const auto win = maximize_acquisition(s, l, 1.0, z, cfg, rng, fx.X, 2);
  Matrix pool(21, 2);
  for (int i = 0; i < 20; ++i) pool.row(i) = uniform_vector(2, rng).transpose();
  pool.row(20) = win.x.transpose();
  const auto r = select_from_pool(s, l, 1.0, z, pool);
  EXPECT_EQ(r.x, win.x);
}

TEST(Maximize, SinglePointPool) {
  Rng rng = make_rng(8);
  auto fx = make_models(2, 10, rng, bowl2);
  AcquisitionConfig cfg;
  cfg.pool_size = 1;
  cfg.local_refinement_steps = 0;
  Rng a = make_rng(99);
  const auto r = maximize_acquisition({fx.models, Vector(0)}, Preference(vec({1.0, 1.0})), 1.0, vec({1.0, 1.0}), cfg,
                                      a, Matrix(0, 2), 2);
  Rng b = make_rng(99);
  EXPECT_EQ(r.x, uniform_vector(2, b));
}

TEST(Maximize, OneDimensionalQuadratic) {
  Rng rng = make_rng(9);
  auto fx = make_models(1, 12, rng, [](const Vector& x) { return vec({(x[0] - 0.7) * (x[0] - 0.7)}); });
  AcquisitionConfig cfg;
  const auto r = maximize_acquisition({fx.models, Vector(0)}, Preference(vec({1.0})), 0.0, vec({100.0}), cfg, rng,
                                      fx.X, 1);
  EXPECT_NEAR(r.x[0], 0.7, 0.05);
}

TEST(Maximize, BeatsDenseGrid) {
  for (int trial = 0; trial < 5; ++trial) {
    Rng rng = make_rng(10, {static_cast<std::uint64_t>(trial)});
    auto fx = make_models(2, 12, rng, bowl2);
    const TaskSurrogate s{fx.models, Vector(0)};
    const auto l = sample_preference(2, rng);
    const Vector z = vec({1.2, 1.2});
    AcquisitionConfig cfg;
    const auto r = maximize_acquisition(s, l, 1.0, z, cfg, rng, fx.X, 2);
    Matrix grid(10000, 2);
    for (int i = 0; i < 100; ++i)
      for (int j = 0; j < 100; ++j) grid.row(i * 100 + j) << (i + 0.5) / 100, (j + 0.5) / 100;
    const double grid_best = scalarized_scores(s, grid, l, 1.0, z).maxCoeff();
    EXPECT_GE(r.score, grid_best - 1e-2);
    EXPECT_NEAR(r.score, scalarize_ucb(l, ucb_vector(s, r.x, 1.0), z), 1e-12);
  }
}

TEST(Maximize, NeverWorseThanSeeds) {
  Rng rng = make_rng(11);
  auto fx = make_models(3, 20, rng, [](const Vector& x) { return vec({x.squaredNorm(), (x - Vector::Ones(3)).squaredNorm()}); });
  const TaskSurrogate s{fx.models, Vector(0)};
  for (int trial = 0; trial < 10; ++trial) {
    const auto l = sample_preference(2, rng);
    const Vector z = vec({3.5, 3.5});
    const auto r = maximize_acquisition(s, l, 2.0, z, AcquisitionConfig{}, rng, fx.X, 3);
    EXPECT_GE(r.score, scalarized_scores(s, fx.X, l, 2.0, z).maxCoeff());
    EXPECT_TRUE((r.x.array() >= 0.0).all() && (r.x.array() <= 1.0).all());
  }
}

TEST(Maximize, DeterministicPerSeed) {
  Rng rng = make_rng(12);
  auto fx = make_models(2, 10, rng, bowl2);
  const TaskSurrogate s{fx.models, Vector(0)};
  Rng a = make_rng(5), b = make_rng(5);
  const auto ra = maximize_acquisition(s, Preference(vec({1.0, 2.0})), 1.0, vec({1.0, 1.0}), {}, a, fx.X, 2);
  const auto rb = maximize_acquisition(s, Preference(vec({1.0, 2.0})), 1.0, vec({1.0, 1.0}), {}, b, fx.X, 2);
  EXPECT_EQ(ra.x, rb.x);
}
