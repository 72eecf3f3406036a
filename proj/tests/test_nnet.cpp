#include "pmtmobo/nnet.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace pmtmobo;
using namespace pmtmobo::nnet;

namespace {

DenseNet<double> random_net(Rng& rng, Activation act = Activation::relu) {
  std::uniform_int_distribution<int> width(1, 5);
  std::uniform_int_distribution<int> depth(1, 3);
  std::vector<int> widths{width(rng)};
  const int d = depth(rng);
  for (int i = 0; i < d; ++i) widths.push_back(width(rng));
  auto net = DenseNet<double>::glorot(std::span<const int>(widths), rng, act);
  for (auto& l : net.layers()) l.b = normal_vector(l.b.size(), rng) * 0.3;
  return net;
}

// Smallest |pre-activation| over hidden units; relu is not differentiable at 0.
double kink_distance(const DenseNet<double>& net, const Matrix& x) {
  Matrix h = x;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    Matrix z = net.layers()[i].W * h;
    z.colwise() += net.layers()[i].b;
    if (i + 1 < net.layers().size()) {
      best = std::min(best, z.cwiseAbs().minCoeff());
      z = z.cwiseMax(0.0);
    }
    h = z;
  }
  return best;
}

double probe_loss(const DenseNet<double>& net, const Matrix& x, const Matrix& up) {
  return (forward_batch(net, x).array() * up.array()).sum();
}

}  // namespace

TEST(Forward, ZeroWeightsReturnBias) {
  DenseNet<double> net({{Matrix::Zero(2, 3), vec({0.3, -0.1})}});
  Rng rng = make_rng(1);
  const Vector y = forward(net, normal_vector(3, rng));
  EXPECT_DOUBLE_EQ(y[0], 0.3);
  EXPECT_DOUBLE_EQ(y[1], -0.1);
}

TEST(Forward, IdentityLayer) {
  DenseNet<double> net({{Matrix::Identity(2, 2), Vector::Zero(2)}}, Activation::identity);
  const Vector y = forward(net, vec({1.0, 2.0}));
  EXPECT_EQ(y, vec({1.0, 2.0}));
}

TEST(Forward, TwoLayerHandChain) {
  Matrix W1(2, 2);
  W1 << 1.0, -2.0, 0.5, 1.0;
  Matrix W2(2, 2);
  W2 << 2.0, 1.0, -1.0, 3.0;
  DenseNet<double> net({{W1, vec({0.1, -0.2})}, {W2, vec({0.0, 0.5})}});
  // h = relu(W1 (1, 1) + b1) = relu(-0.9, 1.3) = (0, 1.3); y = W2 h + b2 = (1.3, 4.4)
  const Vector y = forward(net, vec({1.0, 1.0}));
  EXPECT_NEAR(y[0], 1.3, 1e-15);
  EXPECT_NEAR(y[1], 4.4, 1e-15);
}

TEST(Forward, InputSizeMismatchThrows) {
  Rng rng = make_rng(2);
  auto net = DenseNet<double>::glorot({3, 4, 2}, rng);
  EXPECT_THROW(forward(net, Vector(Vector::Zero(2))), ShapeError);
}

TEST(Backward, ZeroUpstreamGivesZeroGradients) {
  Rng rng = make_rng(3);
  auto net = DenseNet<double>::glorot({3, 5, 2}, rng);
  const Matrix x = Matrix::Random(3, 4);
  const auto bp = backward(net, forward_cached(net, x), Matrix(Matrix::Zero(2, 4)));
  EXPECT_EQ(bp.grads.squared_norm(), 0.0);
}

TEST(Backward, WithoutForwardIsStateError) {
  Rng rng = make_rng(4);
  auto net = DenseNet<double>::glorot({2, 2}, rng);
  EXPECT_THROW(backward(net, ForwardCache<double>{}, Matrix(Matrix::Zero(2, 1))), StateError);
}

TEST(Backward, LinearLeastSquaresClosedForm) {
  Rng rng = make_rng(5);
  auto net = DenseNet<double>::glorot({3, 2}, rng);
  net.layers()[0].b = vec({0.2, -0.4});
  const Vector x = vec({0.5, -1.0, 2.0});
  const Vector target = vec({1.0, 0.0});
  const Vector r = forward(net, x) - target;
  const auto bp = backward(net, forward_cached<double>(net, x), Matrix(2.0 * r));
  const Matrix expect_W = 2.0 * r * x.transpose();
  EXPECT_LT((bp.grads.layers[0].W - expect_W).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((bp.grads.layers[0].b - 2.0 * r).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Backward, MatchesCentralDifferences) {
  Rng rng = make_rng(6);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    auto net = random_net(rng, trial % 5 == 0 ? Activation::identity : Activation::relu);
    Matrix x = Matrix::Random(net.in_dim(), 3);
    while (kink_distance(net, x) < 1e-3) x = Matrix::Random(net.in_dim(), 3);
    const Matrix up = Matrix::Random(net.out_dim(), 3);
    const auto bp = backward(net, forward_cached(net, x), up);
    const double h = 1e-5;
    for (std::size_t li = 0; li < net.layers().size(); ++li) {
      auto check = [&](double& param, double analytic) {
        const double keep = param;
        param = keep + h;
        const double lp = probe_loss(net, x, up);
        param = keep - h;
        const double lm = probe_loss(net, x, up);
        param = keep;
        const double fd = (lp - lm) / (2 * h);
        worst = std::max(worst, std::abs(fd - analytic) / std::max({std::abs(fd), std::abs(analytic), 1e-6}));
      };
      auto& L = net.layers()[li];
      for (Eigen::Index i = 0; i < L.W.size(); ++i) check(L.W.data()[i], bp.grads.layers[li].W.data()[i]);
      for (Eigen::Index i = 0; i < L.b.size(); ++i) check(L.b[i], bp.grads.layers[li].b[i]);
    }
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(Backward, FloatNetworkAgreesWithDouble) {
  Rng rng = make_rng(7);
  auto net = DenseNet<double>::glorot({3, 6, 2}, rng);
  std::vector<DenseLayer<float>> fl;
  for (const auto& l : net.layers()) fl.push_back({l.W.cast<float>(), l.b.cast<float>()});
  DenseNet<float> netf(fl);
  const Matrix x = Matrix::Random(3, 5);
  const Matrix yd = forward_batch(net, x);
  const Eigen::MatrixXf yf = forward_batch<float>(netf, x.cast<float>());
  EXPECT_LT((yd - yf.cast<double>()).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(Clip, BelowThresholdUnchanged) {
  GradientSet<double> g;
  g.layers.push_back({Matrix::Constant(1, 1, 0.3), vec({0.4})});
  const auto c = clip_gradient_norm(g, 1.0);
  EXPECT_EQ(c.layers[0].W(0, 0), 0.3);
  EXPECT_EQ(c.layers[0].b[0], 0.4);
}

TEST(Clip, ThreeFourFive) {
  GradientSet<double> g;
  g.layers.push_back({Matrix::Constant(1, 1, 3.0), vec({4.0})});
  const auto c = clip_gradient_norm(g, 1.0);
  EXPECT_NEAR(c.layers[0].W(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(c.layers[0].b[0], 0.8, 1e-15);
}

TEST(Clip, NormIsMinOfInputAndBound) {
  Rng rng = make_rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    auto net = random_net(rng);
    auto g = net.zero_gradients();
    const double scale = std::exp(3.0 * standard_normal(rng));
    for (auto& l : g.layers) {
      l.W = Matrix::Random(l.W.rows(), l.W.cols()) * scale;
      l.b = Vector::Random(l.b.size()) * scale;
    }
    const double max_norm = 0.5 + uniform01(rng);
    EXPECT_NEAR(clip_gradient_norm(g, max_norm).norm(), std::min(g.norm(), max_norm), 1e-12);
  }
}

TEST(Clip, NonPositiveBoundRejected) {
  GradientSet<double> g;
  EXPECT_THROW(clip_gradient_norm(g, 0.0), InputError);
}

TEST(Adam, ZeroGradientLeavesParameters) {
  Rng rng = make_rng(9);
  auto net = DenseNet<double>::glorot({2, 3, 1}, rng);
  const auto before = net.layers();
  AdamState<double> st(net, 0.1);
  adam_step(net, st, net.zero_gradients());
  EXPECT_EQ(st.t, 1);
  for (std::size_t i = 0; i < before.size(); ++i) {
    EXPECT_EQ(net.layers()[i].W, before[i].W);
    EXPECT_EQ(net.layers()[i].b, before[i].b);
  }
}

TEST(Adam, FirstStepIsSignTimesRate) {
  for (double g : {1e-3, -0.5, 7.0}) {
    DenseNet<double> net({{Matrix::Zero(1, 1), Vector::Zero(1)}}, Activation::identity);
    AdamState<double> st(net, 0.01);
    auto grads = net.zero_gradients();
    grads.layers[0].W(0, 0) = g;
    adam_step(net, st, grads);
    const double delta = net.layers()[0].W(0, 0);
    EXPECT_LT(std::abs(delta + 0.01 * (g > 0 ? 1.0 : -1.0)), 1e-6) << g;
  }
}

TEST(Adam, ScalarQuadraticConverges) {
  Vector theta = Vector::Zero(1);
  VectorAdam opt(1, 0.1);
  std::vector<double> dist;
  for (int s = 0; s < 100; ++s) {
    opt.step(theta, Vector::Constant(1, 2.0 * (theta[0] - 2.0)));
    dist.push_back(std::abs(theta[0] - 2.0));
  }
  EXPECT_LT(dist.back(), 0.5);
  // Adam overshoots once near the optimum; monotone decrease over the approach
  for (int s = 5; s < 20; ++s) EXPECT_LT(dist[static_cast<std::size_t>(s)], dist[static_cast<std::size_t>(s - 1)]) << s;
}

TEST(Json, RoundTripIsExact) {
  Rng rng = make_rng(10);
  auto net = DenseNet<double>::glorot({4, 7, 3}, rng);
  for (auto& l : net.layers()) l.b = normal_vector(l.b.size(), rng);
  const auto back = from_json<double>(nlohmann::json::parse(to_json(net).dump()));
  ASSERT_EQ(back.depth(), net.depth());
  for (std::size_t i = 0; i < net.depth(); ++i) {
    EXPECT_EQ(back.layers()[i].W, net.layers()[i].W);
    EXPECT_EQ(back.layers()[i].b, net.layers()[i].b);
  }
}

TEST(Construct, BrokenChainRejected) {
  EXPECT_THROW(DenseNet<double>({{Matrix::Zero(3, 2), Vector::Zero(3)}, {Matrix::Zero(1, 4), Vector::Zero(1)}}),
               ShapeError);
}
