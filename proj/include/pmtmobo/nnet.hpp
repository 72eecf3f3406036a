#pragma once

// Dense feed-forward networks with hand-written reverse mode, gradient
// clipping and Adam. Samples are stored column-wise: an input batch is an
// (in_dim x batch) matrix.

#include "pmtmobo/core.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace pmtmobo::nnet {

enum class Activation { relu, identity };

inline std::string to_string(Activation a) { return a == Activation::relu ? "relu" : "identity"; }

inline Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::relu;
  if (s == "identity") return Activation::identity;
  throw InputError("unknown activation: " + s);
}

template <typename Scalar>
struct DenseLayer {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> W;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> b;
};

/// Per-parameter gradients; same layout as the network they belong to.
template <typename Scalar>
struct GradientSet {
  std::vector<DenseLayer<Scalar>> layers;

  [[nodiscard]] double squared_norm() const {
    double s = 0.0;
    for (const auto& l : layers) {
      s += static_cast<double>(l.W.squaredNorm()) + static_cast<double>(l.b.squaredNorm());
    }
    return s;
  }
  [[nodiscard]] double norm() const { return std::sqrt(squared_norm()); }

  [[nodiscard]] bool all_finite() const {
    for (const auto& l : layers) {
      if (!l.W.allFinite() || !l.b.allFinite()) return false;
    }
    return true;
  }

  GradientSet& operator+=(const GradientSet& other) {
    require_same_size(static_cast<Eigen::Index>(layers.size()),
                      static_cast<Eigen::Index>(other.layers.size()), "GradientSet +=");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      layers[i].W += other.layers[i].W;
      layers[i].b += other.layers[i].b;
    }
    return *this;
  }
};

template <typename Scalar = double>
class DenseNet {
 public:
  using MatrixT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using VectorT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Layer = DenseLayer<Scalar>;

  DenseNet() = default;

  DenseNet(std::vector<Layer> layers, Activation hidden = Activation::relu)
      : layers_(std::move(layers)), hidden_(hidden) {
    if (layers_.empty()) throw ShapeError("DenseNet: at least one layer required");
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      require_same_size(layers_[i].W.rows(), layers_[i].b.size(), "DenseNet bias");
      if (i > 0) require_same_size(layers_[i].W.cols(), layers_[i - 1].W.rows(), "DenseNet chain");
    }
  }

  /// Glorot-uniform weights, zero biases. widths = {in, hidden..., out}.
  static DenseNet glorot(std::span<const int> widths, Rng& rng, Activation hidden = Activation::relu) {
    if (widths.size() < 2) throw ShapeError("DenseNet::glorot: need at least input and output width");
    std::vector<Layer> layers;
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
      const int fan_in = widths[i];
      const int fan_out = widths[i + 1];
      if (fan_in <= 0 || fan_out <= 0) throw ShapeError("DenseNet::glorot: widths must be positive");
      const double limit = std::sqrt(6.0 / (fan_in + fan_out));
      std::uniform_real_distribution<double> dist(-limit, limit);
      Layer l{MatrixT(fan_out, fan_in), VectorT::Zero(fan_out)};
      for (int c = 0; c < fan_in; ++c) {
        for (int r = 0; r < fan_out; ++r) l.W(r, c) = static_cast<Scalar>(dist(rng));
      }
      layers.push_back(std::move(l));
    }
    return DenseNet(std::move(layers), hidden);
  }

  static DenseNet glorot(std::initializer_list<int> widths, Rng& rng, Activation hidden = Activation::relu) {
    std::vector<int> w(widths);
    return glorot(std::span<const int>(w), rng, hidden);
  }

  [[nodiscard]] Eigen::Index in_dim() const { return layers_.front().W.cols(); }
  [[nodiscard]] Eigen::Index out_dim() const { return layers_.back().W.rows(); }
  [[nodiscard]] std::size_t depth() const { return layers_.size(); }
  [[nodiscard]] Activation hidden_activation() const { return hidden_; }
  [[nodiscard]] const std::vector<Layer>& layers() const { return layers_; }
  [[nodiscard]] std::vector<Layer>& layers() { return layers_; }
  [[nodiscard]] bool empty() const { return layers_.empty(); }

  [[nodiscard]] bool all_finite() const {
    for (const auto& l : layers_) {
      if (!l.W.allFinite() || !l.b.allFinite()) return false;
    }
    return true;
  }

  [[nodiscard]] GradientSet<Scalar> zero_gradients() const {
    GradientSet<Scalar> g;
    for (const auto& l : layers_) g.layers.push_back({MatrixT::Zero(l.W.rows(), l.W.cols()), VectorT::Zero(l.b.size())});
    return g;
  }

 private:
  std::vector<Layer> layers_;
  Activation hidden_ = Activation::relu;
};

template <typename Scalar>
void apply_activation(Activation a, Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m) {
  if (a == Activation::relu) m = m.cwiseMax(Scalar(0));
}

/// Batched forward pass. Columns are samples.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> forward_batch(
    const DenseNet<Scalar>& net, const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& input) {
  if (net.empty()) throw StateError("forward: empty network");
  require_same_size(input.rows(), net.in_dim(), "forward input");
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> h = input;
  const auto& layers = net.layers();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> z = layers[i].W * h;
    z.colwise() += layers[i].b;
    if (i + 1 < layers.size()) apply_activation<Scalar>(net.hidden_activation(), z);
    h = std::move(z);
  }
  return h;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> forward(const DenseNet<Scalar>& net,
                                                 const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& input) {
  return forward_batch<Scalar>(net, input);
}

/// Activations recorded by forward_cached; required by backward.
template <typename Scalar>
struct ForwardCache {
  // inputs[i] is the input to layer i; inputs.back() is the network output.
  std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> inputs;

  [[nodiscard]] bool valid() const { return !inputs.empty(); }
  [[nodiscard]] const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& output() const {
    if (!valid()) throw StateError("ForwardCache: no forward pass recorded");
    return inputs.back();
  }
};

template <typename Scalar>
ForwardCache<Scalar> forward_cached(const DenseNet<Scalar>& net,
                                    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& input) {
  if (net.empty()) throw StateError("forward: empty network");
  require_same_size(input.rows(), net.in_dim(), "forward input");
  ForwardCache<Scalar> cache;
  cache.inputs.reserve(net.depth() + 1);
  cache.inputs.push_back(input);
  const auto& layers = net.layers();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> z = layers[i].W * cache.inputs.back();
    z.colwise() += layers[i].b;
    if (i + 1 < layers.size()) apply_activation<Scalar>(net.hidden_activation(), z);
    cache.inputs.push_back(std::move(z));
  }
  return cache;
}

template <typename Scalar>
struct Backprop {
  GradientSet<Scalar> grads;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> input_grad;
};

/// Reverse pass for a scalar loss whose gradient w.r.t. the network output is `upstream`
/// (out_dim x batch). Parameter gradients are summed over the batch.
template <typename Scalar>
Backprop<Scalar> backward(const DenseNet<Scalar>& net, const ForwardCache<Scalar>& cache,
                          const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& upstream) {
  if (!cache.valid()) throw StateError("backward called before forward");
  if (cache.inputs.size() != net.depth() + 1) throw StateError("backward: cache does not match network");
  require_same_size(upstream.rows(), net.out_dim(), "backward upstream rows");
  require_same_size(upstream.cols(), cache.inputs.front().cols(), "backward upstream batch");

  const auto& layers = net.layers();
  Backprop<Scalar> out;
  out.grads.layers.resize(layers.size());
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> delta = upstream;
  for (std::size_t li = layers.size(); li-- > 0;) {
    if (li + 1 < layers.size() && net.hidden_activation() == Activation::relu) {
      // relu'(z) = 1 where the cached post-activation is positive
      delta = delta.cwiseProduct(
          (cache.inputs[li + 1].array() > Scalar(0)).template cast<Scalar>().matrix());
    }
    out.grads.layers[li].W = delta * cache.inputs[li].transpose();
    out.grads.layers[li].b = delta.rowwise().sum();
    delta = layers[li].W.transpose() * delta;
  }
  out.input_grad = std::move(delta);
  return out;
}

/// Rescale so that the global L2 norm is at most max_norm. Direction is preserved.
template <typename Scalar>
GradientSet<Scalar> clip_gradient_norm(GradientSet<Scalar> grads, double max_norm) {
  if (!(max_norm > 0.0)) throw InputError("clip_gradient_norm: max_norm must be positive");
  const double n = grads.norm();
  if (n <= max_norm) return grads;
  const auto scale = static_cast<Scalar>(max_norm / n);
  for (auto& l : grads.layers) {
    l.W *= scale;
    l.b *= scale;
  }
  return grads;
}

struct AdamHyper {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected Adam update applied in place to one parameter block.
template <typename Params, typename Grads, typename Moments>
void adam_update_block(Params& p, const Grads& g, Moments& m, Moments& v, const AdamHyper& h, long t) {
  using S = typename Params::Scalar;
  m = S(h.beta1) * m + S(1.0 - h.beta1) * g;
  v = S(h.beta2) * v + S(1.0 - h.beta2) * g.cwiseProduct(g);
  const double c1 = 1.0 - std::pow(h.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(h.beta2, static_cast<double>(t));
  p.array() -= S(h.learning_rate) * (m.array() / S(c1)) / ((v.array() / S(c2)).sqrt() + S(h.epsilon));
}

template <typename Scalar = double>
struct AdamState {
  GradientSet<Scalar> m;
  GradientSet<Scalar> v;
  long t = 0;
  AdamHyper hyper;

  AdamState() = default;
  AdamState(const DenseNet<Scalar>& net, double learning_rate)
      : m(net.zero_gradients()), v(net.zero_gradients()), hyper{learning_rate} {
    if (!(learning_rate > 0.0)) throw InputError("AdamState: learning rate must be positive");
  }
};

template <typename Scalar>
void adam_step(DenseNet<Scalar>& net, AdamState<Scalar>& state, const GradientSet<Scalar>& grads) {
  auto& layers = net.layers();
  if (grads.layers.size() != layers.size() || state.m.layers.size() != layers.size()) {
    throw ShapeError("adam_step: gradient/state layout does not match network");
  }
  ++state.t;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    require_same_size(grads.layers[i].W.size(), layers[i].W.size(), "adam_step W");
    adam_update_block(layers[i].W, grads.layers[i].W, state.m.layers[i].W, state.v.layers[i].W, state.hyper, state.t);
    adam_update_block(layers[i].b, grads.layers[i].b, state.m.layers[i].b, state.v.layers[i].b, state.hyper, state.t);
  }
}

/// Adam over a flat parameter vector (used for GP hyperparameters).
class VectorAdam {
 public:
  VectorAdam(Eigen::Index n, double learning_rate)
      : m_(Vector::Zero(n)), v_(Vector::Zero(n)), hyper_{learning_rate} {}

  void step(Vector& params, const Vector& grad) {
    require_same_size(params.size(), m_.size(), "VectorAdam params");
    require_same_size(grad.size(), m_.size(), "VectorAdam grad");
    ++t_;
    adam_update_block(params, grad, m_, v_, hyper_, t_);
  }
  [[nodiscard]] long steps() const { return t_; }

 private:
  Vector m_, v_;
  AdamHyper hyper_;
  long t_ = 0;
};

// Checkpoint format: {"hidden_activation": "...", "layers": [{"index": i,
// "W": {"shape": [rows, cols], "values": [row-major]}, "b": {"shape": [n], "values": [...]}}]}

template <typename Scalar>
nlohmann::json to_json(const DenseNet<Scalar>& net) {
  nlohmann::json j;
  j["hidden_activation"] = to_string(net.hidden_activation());
  j["layers"] = nlohmann::json::array();
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    const auto& l = net.layers()[i];
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(l.W.size()));
    for (Eigen::Index r = 0; r < l.W.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.W.cols(); ++c) w.push_back(static_cast<double>(l.W(r, c)));
    }
    std::vector<double> b(l.b.data(), l.b.data() + l.b.size());
    j["layers"].push_back({{"index", i},
                           {"W", {{"shape", {l.W.rows(), l.W.cols()}}, {"values", w}}},
                           {"b", {{"shape", {l.b.size()}}, {"values", b}}}});
  }
  return j;
}

template <typename Scalar = double>
DenseNet<Scalar> from_json(const nlohmann::json& j) {
  using MatrixT = typename DenseNet<Scalar>::MatrixT;
  using VectorT = typename DenseNet<Scalar>::VectorT;
  std::vector<DenseLayer<Scalar>> layers;
  const auto& arr = j.at("layers");
  layers.resize(arr.size());
  for (const auto& lj : arr) {
    const auto idx = lj.at("index").get<std::size_t>();
    if (idx >= layers.size()) throw InputError("checkpoint: layer index out of range");
    const auto rows = lj.at("W").at("shape").at(0).get<Eigen::Index>();
    const auto cols = lj.at("W").at("shape").at(1).get<Eigen::Index>();
    const auto& wv = lj.at("W").at("values");
    const auto& bv = lj.at("b").at("values");
    if (static_cast<Eigen::Index>(wv.size()) != rows * cols || static_cast<Eigen::Index>(bv.size()) != rows) {
      throw ShapeError("checkpoint: value count does not match shape");
    }
    MatrixT W(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) W(r, c) = static_cast<Scalar>(wv[static_cast<std::size_t>(r * cols + c)].get<double>());
    }
    VectorT b(rows);
    for (Eigen::Index r = 0; r < rows; ++r) b[r] = static_cast<Scalar>(bv[static_cast<std::size_t>(r)].get<double>());
    layers[idx] = {std::move(W), std::move(b)};
  }
  return DenseNet<Scalar>(std::move(layers), activation_from_string(j.at("hidden_activation").get<std::string>()));
}

}  // namespace pmtmobo::nnet
