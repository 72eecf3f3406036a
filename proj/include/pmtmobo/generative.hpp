#pragma once

// Conditional generators over elite solutions: a conditional VAE and a
// conditional DDPM, both conditioned on c = (lambda, theta). Networks work on
// column-major batches (features x samples); public sampling APIs return rows.

#include "pmtmobo/nnet.hpp"
#include "pmtmobo/scalarize.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <sstream>
#include <variant>
#include <vector>

namespace pmtmobo {

// ---------------------------------------------------------------- elites

/// Everything evaluated for one task, plus the task's scalarization reference point.
struct EliteSource {
  Vector theta;
  Matrix X;  // N_k x D
  Matrix F;  // N_k x M
  Vector z;
};

struct EliteDataset {
  Matrix X;  // n x D
  Matrix C;  // n x (M + V), rows are (lambda, theta)

  [[nodiscard]] Eigen::Index size() const { return X.rows(); }
};

inline Vector conditioning(const Preference& lambda, const Vector& theta) { return concat(lambda.values(), theta); }

/// Number of records kept from n candidates at Q percent (at least one).
inline Eigen::Index elite_count(Eigen::Index n, double Q) {
  const double exact = Q * static_cast<double>(n) / 100.0;
  return std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::ceil(exact - 1e-9)), 1, n);
}

/// For every (grid preference, task) pair keep the top Q% of that task's
/// evaluated solutions by s_lambda(F; z_k), labelled with c = (lambda, theta_k).
inline EliteDataset build_elite_dataset(std::span<const EliteSource> sources, int P, double Q) {
  if (sources.empty()) throw InputError("build_elite_dataset: empty archive");
  if (!(Q > 0.0 && Q <= 100.0)) throw InputError("build_elite_dataset: Q must lie in (0, 100]");
  const Eigen::Index M = sources.front().F.cols();
  const Eigen::Index D = sources.front().X.cols();
  const Eigen::Index V = sources.front().theta.size();
  const auto grid = preference_grid(M, P);

  std::vector<std::pair<Vector, Vector>> records;
  for (const auto& lambda : grid) {
    for (const auto& src : sources) {
      const Eigen::Index n = src.X.rows();
      if (n == 0) continue;
      require_same_size(src.F.rows(), n, "elite source");
      std::vector<double> score(static_cast<std::size_t>(n));
      for (Eigen::Index i = 0; i < n; ++i) score[static_cast<std::size_t>(i)] = hv_scalarize(lambda, src.F.row(i).transpose(), src.z);
      std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
      std::iota(order.begin(), order.end(), Eigen::Index{0});
      std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return score[static_cast<std::size_t>(a)] > score[static_cast<std::size_t>(b)];
      });
      const Eigen::Index keep = elite_count(n, Q);
      const Vector c = conditioning(lambda, src.theta);
      for (Eigen::Index r = 0; r < keep; ++r) records.emplace_back(src.X.row(order[static_cast<std::size_t>(r)]).transpose(), c);
    }
  }
  if (records.empty()) throw InputError("build_elite_dataset: archive contains no evaluations");
  EliteDataset ds{Matrix(static_cast<Eigen::Index>(records.size()), D),
                  Matrix(static_cast<Eigen::Index>(records.size()), M + V)};
  for (std::size_t i = 0; i < records.size(); ++i) {
    ds.X.row(static_cast<Eigen::Index>(i)) = records[i].first.transpose();
    ds.C.row(static_cast<Eigen::Index>(i)) = records[i].second.transpose();
  }
  return ds;
}

struct TrainLog {
  std::vector<double> losses;
  std::size_t best_step = 0;
};

// ---------------------------------------------------------------- CVAE

struct CVAEModel {
  int D = 0;
  int M = 0;
  int V = 0;
  int d_lat = 0;
  int d_man = 2;
  double kl_weight = 1e-3;
  // encoder: [x, c] -> d_lat (relu) -> [mean; logvar] (two linear heads stacked)
  nnet::DenseNet<double> encoder;
  // decoder: [z, c] -> d_lat (relu) -> x
  nnet::DenseNet<double> decoder;

  [[nodiscard]] int cond_dim() const { return M + V; }
};

inline CVAEModel make_cvae(int D, int M, int V, Rng& rng, int d_man = 2) {
  CVAEModel m{D, M, V, D, d_man, 1e-3, {}, {}};
  m.encoder = nnet::DenseNet<double>::glorot({D + M + V, m.d_lat, 2 * d_man}, rng);
  m.decoder = nnet::DenseNet<double>::glorot({d_man + M + V, m.d_lat, D}, rng);
  return m;
}

struct CVAEOptions {
  int epochs = 500;
  double learning_rate = 0.1;
  double clip_norm = 1.0;
  double logvar_limit = 10.0;
};

struct CVAELoss {
  double total = 0.0;
  double reconstruction = 0.0;
  double kl = 0.0;
};

namespace detail {

inline Matrix stack_rows(const Matrix& top, const Matrix& bottom) {
  Matrix out(top.rows() + bottom.rows(), top.cols());
  out.topRows(top.rows()) = top;
  out.bottomRows(bottom.rows()) = bottom;
  return out;
}

struct CVAEPass {
  CVAELoss loss;
  nnet::GradientSet<double> enc_grads;
  nnet::GradientSet<double> dec_grads;
};

/// One full forward/backward pass. X and C are column-major batches; eps is d_man x B.
inline CVAEPass cvae_pass(const CVAEModel& model, const Matrix& X, const Matrix& C, const Matrix& eps,
                          double logvar_limit, bool want_grads) {
  const Eigen::Index B = X.cols();
  const int dm = model.d_man;
  const auto enc = nnet::forward_cached(model.encoder, stack_rows(X, C));
  const Matrix mean = enc.output().topRows(dm);
  const Matrix logvar = enc.output().bottomRows(dm).cwiseMax(-logvar_limit).cwiseMin(logvar_limit);
  const Matrix half_std = (0.5 * logvar.array()).exp().matrix();
  const Matrix zlat = mean + half_std.cwiseProduct(eps);
  const auto dec = nnet::forward_cached(model.decoder, stack_rows(zlat, C));
  const Matrix diff = dec.output() - X;

  CVAEPass p;
  const double inv_b = 1.0 / static_cast<double>(B);
  p.loss.reconstruction = diff.squaredNorm() * inv_b;
  p.loss.kl = 0.5 * (mean.array().square() + logvar.array().exp() - 1.0 - logvar.array()).sum() * inv_b;
  p.loss.total = p.loss.reconstruction + model.kl_weight * p.loss.kl;
  if (!want_grads) return p;

  const auto dec_bp = nnet::backward(model.decoder, dec, Matrix(2.0 * inv_b * diff));
  p.dec_grads = dec_bp.grads;
  const Matrix dz = dec_bp.input_grad.topRows(dm);
  Matrix upstream(2 * dm, B);
  upstream.topRows(dm) = dz + model.kl_weight * inv_b * mean;
  Matrix dlogvar = dz.cwiseProduct(eps).cwiseProduct(0.5 * half_std) +
                   (model.kl_weight * inv_b * 0.5) * (logvar.array().exp() - 1.0).matrix();
  // gradient is zero where the clamp is active
  const Matrix raw = enc.output().bottomRows(dm);
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    if (raw(i) < -logvar_limit || raw(i) > logvar_limit) dlogvar(i) = 0.0;
  }
  upstream.bottomRows(dm) = dlogvar;
  p.enc_grads = nnet::backward(model.encoder, enc, upstream).grads;
  return p;
}

}  // namespace detail

/// Loss on a given batch (rows = samples) with fixed reparameterization noise (d_man x B).
inline CVAELoss cvae_loss(const CVAEModel& model, const Matrix& X_rows, const Matrix& C_rows, const Matrix& eps) {
  return detail::cvae_pass(model, X_rows.transpose(), C_rows.transpose(), eps, CVAEOptions{}.logvar_limit, false).loss;
}

/// Full-batch training: each epoch is one Adam step on the whole elite set.
/// Returns the parameters with the lowest epoch loss observed.
inline CVAEModel cvae_train(const EliteDataset& elites, const CVAEOptions& opt, Rng& rng, TrainLog* log = nullptr,
                            const CVAEModel* init = nullptr) {
  if (elites.size() < 2) throw InputError("cvae_train: at least 2 records required");
  if (opt.epochs < 1) throw InputError("cvae_train: epochs must be >= 1");
  const int D = static_cast<int>(elites.X.cols());
  const int cdim = static_cast<int>(elites.C.cols());
  CVAEModel model = init ? *init : make_cvae(D, 0, cdim, rng);
  if (!init) {
    // the split of c into (lambda, theta) does not affect the network shapes
    model.M = 0;
    model.V = cdim;
  }
  const Matrix X = elites.X.transpose();
  const Matrix C = elites.C.transpose();
  nnet::AdamState<double> enc_state(model.encoder, opt.learning_rate);
  nnet::AdamState<double> dec_state(model.decoder, opt.learning_rate);
  CVAEModel best = model;
  double best_loss = std::numeric_limits<double>::infinity();
  TrainLog local;
  TrainLog& lg = log ? *log : local;
  lg.losses.clear();

  for (int e = 0; e < opt.epochs; ++e) {
    Matrix eps(model.d_man, X.cols());
    for (Eigen::Index i = 0; i < eps.size(); ++i) eps(i) = standard_normal(rng);
    auto pass = detail::cvae_pass(model, X, C, eps, opt.logvar_limit, true);
    if (!std::isfinite(pass.loss.total)) {
      std::ostringstream msg;
      msg << "cvae_train: non-finite loss at epoch " << e << " (reconstruction=" << pass.loss.reconstruction
          << ", kl=" << pass.loss.kl << ")";
      throw NumericalError(msg.str());
    }
    lg.losses.push_back(pass.loss.total);
    if (pass.loss.total < best_loss) {
      best_loss = pass.loss.total;
      best = model;
      lg.best_step = static_cast<std::size_t>(e);
    }
    const double norm = std::sqrt(pass.enc_grads.squared_norm() + pass.dec_grads.squared_norm());
    if (norm > opt.clip_norm) {
      const double s = opt.clip_norm / norm;
      for (auto* g : {&pass.enc_grads, &pass.dec_grads}) {
        for (auto& l : g->layers) {
          l.W *= s;
          l.b *= s;
        }
      }
    }
    nnet::adam_step(model.encoder, enc_state, pass.enc_grads);
    nnet::adam_step(model.decoder, dec_state, pass.dec_grads);
  }
  return best;
}

/// Decodes latent codes (d_man x n) under conditionings (cond_dim x n); unclamped.
inline Matrix cvae_decode(const CVAEModel& model, const Matrix& latent, const Matrix& cond) {
  return nnet::forward_batch(model.decoder, detail::stack_rows(latent, cond));
}

/// One sample per conditioning row; z ~ N(0, I), output clamped to [0,1]^D. Rows out.
inline Matrix cvae_sample(const CVAEModel& model, const Matrix& cond_rows, Rng& rng) {
  if (model.decoder.empty()) throw StateError("cvae_sample: model not trained");
  Matrix z(model.d_man, cond_rows.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = standard_normal(rng);
  Matrix x = cvae_decode(model, z, cond_rows.transpose()).transpose();
  return x.cwiseMax(0.0).cwiseMin(1.0);
}

inline Matrix cvae_sample(const CVAEModel& model, const Vector& c, int n, Rng& rng) {
  return cvae_sample(model, c.transpose().replicate(n, 1), rng);
}

// ---------------------------------------------------------------- DDPM

/// Linear noise schedule; index t runs 1..steps.
struct DiffusionSchedule {
  int steps = 1000;
  double beta_start = 1e-4;
  double beta_end = 0.02;
  std::vector<double> betas;       // betas[t-1]
  std::vector<double> alpha_bars;  // alpha_bars[t-1] = prod_{s<=t} (1 - beta_s)

  static DiffusionSchedule linear(int steps = 1000, double beta_start = 1e-4, double beta_end = 0.02) {
    if (steps < 2 || !(beta_start > 0.0) || !(beta_end > beta_start) || !(beta_end < 1.0)) {
      throw InputError("DiffusionSchedule: need steps >= 2 and 0 < beta_start < beta_end < 1");
    }
    DiffusionSchedule s{steps, beta_start, beta_end, {}, {}};
    double prod = 1.0;
    for (int t = 1; t <= steps; ++t) {
      const double b = beta_start + (beta_end - beta_start) * static_cast<double>(t - 1) / (steps - 1);
      prod *= 1.0 - b;
      s.betas.push_back(b);
      s.alpha_bars.push_back(prod);
    }
    return s;
  }

  [[nodiscard]] double beta(int t) const { return betas.at(static_cast<std::size_t>(t - 1)); }
  [[nodiscard]] double alpha_bar(int t) const { return alpha_bars.at(static_cast<std::size_t>(t - 1)); }
};

using DdpmScalar = float;
using DdpmNet = nnet::DenseNet<DdpmScalar>;
using DdpmMatrix = DdpmNet::MatrixT;

struct CDDPMModel {
  int D = 0;
  int cond_dim = 0;  // M + V
  DiffusionSchedule schedule;
  // eps-net: [x_t, t / steps, c] -> 128 -> 128 -> 128 -> D
  DdpmNet eps_net;
};

inline CDDPMModel make_cddpm(int D, int cond_dim, Rng& rng, int hidden = 128,
                             DiffusionSchedule schedule = DiffusionSchedule::linear()) {
  CDDPMModel m{D, cond_dim, std::move(schedule), {}};
  m.eps_net = DdpmNet::glorot({D + 1 + cond_dim, hidden, hidden, hidden, D}, rng);
  return m;
}

struct NoisedSample {
  Vector x_t;
  Vector eps;
};

/// x_t = sqrt(abar_t) x0 + sqrt(1 - abar_t) eps, eps ~ N(0, I).
inline NoisedSample ddpm_forward_noise(const Vector& x0, int t, const CDDPMModel& model, Rng& rng) {
  if (t < 1 || t > model.schedule.steps) throw InputError("ddpm_forward_noise: t out of range");
  const double ab = model.schedule.alpha_bar(t);
  NoisedSample s;
  s.eps = normal_vector(x0.size(), rng);
  s.x_t = std::sqrt(ab) * x0 + std::sqrt(1.0 - ab) * s.eps;
  return s;
}

struct DDPMOptions {
  int steps = 1000;
  int batch_size = 128;
  double learning_rate = 1e-3;
  double clip_norm = 1.0;
};

namespace detail {

inline DdpmMatrix ddpm_net_input(const DdpmMatrix& x_t, const std::vector<int>& t, const DdpmMatrix& cond, int steps) {
  DdpmMatrix in(x_t.rows() + 1 + cond.rows(), x_t.cols());
  in.topRows(x_t.rows()) = x_t;
  for (Eigen::Index j = 0; j < x_t.cols(); ++j) {
    in(x_t.rows(), j) = static_cast<DdpmScalar>(static_cast<double>(t[static_cast<std::size_t>(j)]) / steps);
  }
  in.bottomRows(cond.rows()) = cond;
  return in;
}

}  // namespace detail

/// Mini-batch noise-prediction training (MSE per coordinate). Batches are drawn
/// with replacement; t ~ Uniform{1..steps}.
inline CDDPMModel ddpm_train(const EliteDataset& elites, const DDPMOptions& opt, Rng& rng, TrainLog* log = nullptr,
                             const CDDPMModel* init = nullptr) {
  if (elites.size() < 2) throw InputError("ddpm_train: at least 2 records required");
  if (opt.steps < 1 || opt.batch_size < 1) throw InputError("ddpm_train: steps and batch_size must be positive");
  const int D = static_cast<int>(elites.X.cols());
  const int cdim = static_cast<int>(elites.C.cols());
  CDDPMModel model = init ? *init : make_cddpm(D, cdim, rng);
  require_same_size(model.D, D, "ddpm_train decision dim");
  require_same_size(model.cond_dim, cdim, "ddpm_train conditioning dim");
  nnet::AdamState<DdpmScalar> state(model.eps_net, opt.learning_rate);
  const Eigen::Index n = elites.size();
  const int B = static_cast<int>(std::min<Eigen::Index>(opt.batch_size, n));
  const int T = model.schedule.steps;
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  std::uniform_int_distribution<int> pick_t(1, T);
  TrainLog local;
  TrainLog& lg = log ? *log : local;
  lg.losses.clear();

  DdpmMatrix x_t(D, B), eps(D, B), cond(cdim, B);
  std::vector<int> ts(static_cast<std::size_t>(B));
  for (int step = 0; step < opt.steps; ++step) {
    for (int j = 0; j < B; ++j) {
      const Eigen::Index r = B == n ? j : pick(rng);
      const int t = pick_t(rng);
      ts[static_cast<std::size_t>(j)] = t;
      const double ab = model.schedule.alpha_bar(t);
      const double sa = std::sqrt(ab);
      const double sb = std::sqrt(1.0 - ab);
      for (int d = 0; d < D; ++d) {
        const double e = standard_normal(rng);
        eps(d, j) = static_cast<DdpmScalar>(e);
        x_t(d, j) = static_cast<DdpmScalar>(sa * elites.X(r, d) + sb * e);
      }
      for (int c = 0; c < cdim; ++c) cond(c, j) = static_cast<DdpmScalar>(elites.C(r, c));
    }
    const auto cache = nnet::forward_cached(model.eps_net, detail::ddpm_net_input(x_t, ts, cond, T));
    const DdpmMatrix diff = cache.output() - eps;
    const double scale = 1.0 / (static_cast<double>(B) * D);
    const double loss = static_cast<double>(diff.squaredNorm()) * scale;
    if (!std::isfinite(loss)) {
      std::ostringstream msg;
      msg << "ddpm_train: non-finite loss at step " << step;
      throw NumericalError(msg.str());
    }
    lg.losses.push_back(loss);
    auto bp = nnet::backward(model.eps_net, cache, DdpmMatrix(static_cast<DdpmScalar>(2.0 * scale) * diff));
    auto grads = nnet::clip_gradient_norm(std::move(bp.grads), opt.clip_norm);
    nnet::adam_step(model.eps_net, state, grads);
  }
  lg.best_step = lg.losses.size() - 1;
  return model;
}

/// Noise-free part of one reverse update. x is D x n, cond is cond_dim x n.
inline Matrix ddpm_reverse_mean(const CDDPMModel& model, const Matrix& x, int t, const DdpmMatrix& cond) {
  if (t < 1 || t > model.schedule.steps) throw InputError("ddpm_reverse_mean: t out of range");
  const std::vector<int> ts(static_cast<std::size_t>(x.cols()), t);
  const DdpmMatrix eps_hat =
      nnet::forward_batch(model.eps_net, detail::ddpm_net_input(x.cast<DdpmScalar>(), ts, cond, model.schedule.steps));
  const double b = model.schedule.beta(t);
  const double coef = b / std::sqrt(1.0 - model.schedule.alpha_bar(t));
  return (x - coef * eps_hat.cast<double>()) / std::sqrt(1.0 - b);
}

/// Ancestral sampling, one chain per conditioning row (batched). Rows out, clamped to [0,1]^D.
inline Matrix ddpm_sample(const CDDPMModel& model, const Matrix& cond_rows, Rng& rng) {
  if (model.eps_net.empty()) throw StateError("ddpm_sample: model not trained");
  require_same_size(cond_rows.cols(), model.cond_dim, "ddpm_sample conditioning");
  const Eigen::Index n = cond_rows.rows();
  const int D = model.D;
  const DdpmMatrix cond = cond_rows.transpose().cast<DdpmScalar>();
  Matrix x(D, n);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = standard_normal(rng);
  for (int t = model.schedule.steps; t >= 1; --t) {
    const double b = model.schedule.beta(t);
    x = ddpm_reverse_mean(model, x, t, cond);
    if (t > 1) {
      const double sb = std::sqrt(b);
      for (Eigen::Index i = 0; i < x.size(); ++i) x(i) += sb * standard_normal(rng);
    }
  }
  return x.transpose().cwiseMax(0.0).cwiseMin(1.0);
}

inline Matrix ddpm_sample(const CDDPMModel& model, const Vector& c, int n, Rng& rng) {
  return ddpm_sample(model, Matrix(c.transpose().replicate(n, 1)), rng);
}

// ---------------------------------------------------------------- generator facade

enum class GeneratorKind { vae, ddpm };

inline std::string to_string(GeneratorKind k) { return k == GeneratorKind::vae ? "vae" : "ddpm"; }

inline GeneratorKind generator_kind_from_string(const std::string& s) {
  if (s == "vae") return GeneratorKind::vae;
  if (s == "ddpm") return GeneratorKind::ddpm;
  throw InputError("unknown generator kind: " + s);
}

struct GeneratorOptions {
  CVAEOptions vae;
  DDPMOptions ddpm;
};

/// The inverse model p(x | lambda, theta).
class ConditionalGenerator {
 public:
  ConditionalGenerator() = default;
  explicit ConditionalGenerator(CVAEModel m) : model_(std::move(m)) {}
  explicit ConditionalGenerator(CDDPMModel m) : model_(std::move(m)) {}

  [[nodiscard]] GeneratorKind kind() const {
    return std::holds_alternative<CVAEModel>(model_) ? GeneratorKind::vae : GeneratorKind::ddpm;
  }
  [[nodiscard]] const std::variant<CVAEModel, CDDPMModel>& model() const { return model_; }

  /// One sample per conditioning row.
  [[nodiscard]] Matrix sample(const Matrix& cond_rows, Rng& rng) const {
    return std::visit(
        [&](const auto& m) -> Matrix {
          if constexpr (std::is_same_v<std::decay_t<decltype(m)>, CVAEModel>) {
            return cvae_sample(m, cond_rows, rng);
          } else {
            return ddpm_sample(m, cond_rows, rng);
          }
        },
        model_);
  }

  [[nodiscard]] Matrix sample(const Vector& c, int n, Rng& rng) const {
    return sample(Matrix(c.transpose().replicate(n, 1)), rng);
  }

 private:
  std::variant<CVAEModel, CDDPMModel> model_;
};

/// Fresh, untrained generator with the production architecture.
inline ConditionalGenerator untrained_generator(GeneratorKind kind, int D, int M, int V, Rng& rng) {
  if (kind == GeneratorKind::vae) return ConditionalGenerator(make_cvae(D, M, V, rng));
  return ConditionalGenerator(make_cddpm(D, M + V, rng));
}

/// Trains from scratch on the elite set.
inline ConditionalGenerator train_generator(GeneratorKind kind, const EliteDataset& elites, int M, int V,
                                            const GeneratorOptions& opt, Rng& rng, TrainLog* log = nullptr) {
  const int D = static_cast<int>(elites.X.cols());
  if (kind == GeneratorKind::vae) {
    const CVAEModel init = make_cvae(D, M, V, rng);
    return ConditionalGenerator(cvae_train(elites, opt.vae, rng, log, &init));
  }
  const CDDPMModel init = make_cddpm(D, M + V, rng);
  return ConditionalGenerator(ddpm_train(elites, opt.ddpm, rng, log, &init));
}

// Checkpoint: header fields plus the network parameters in the nnet JSON format.

inline nlohmann::json to_json(const ConditionalGenerator& g) {
  nlohmann::json j;
  j["kind"] = to_string(g.kind());
  if (g.kind() == GeneratorKind::vae) {
    const auto& m = std::get<CVAEModel>(g.model());
    j["D"] = m.D;
    j["M"] = m.M;
    j["V"] = m.V;
    j["d_lat"] = m.d_lat;
    j["d_man"] = m.d_man;
    j["kl_weight"] = m.kl_weight;
    j["nets"] = {{"encoder", nnet::to_json(m.encoder)}, {"decoder", nnet::to_json(m.decoder)}};
  } else {
    const auto& m = std::get<CDDPMModel>(g.model());
    j["D"] = m.D;
    j["cond_dim"] = m.cond_dim;
    j["T_hat"] = m.schedule.steps;
    j["beta_start"] = m.schedule.beta_start;
    j["beta_end"] = m.schedule.beta_end;
    j["nets"] = {{"eps_net", nnet::to_json(m.eps_net)}};
  }
  return j;
}

inline ConditionalGenerator generator_from_json(const nlohmann::json& j) {
  const auto kind = generator_kind_from_string(j.at("kind").get<std::string>());
  if (kind == GeneratorKind::vae) {
    CVAEModel m;
    m.D = j.at("D").get<int>();
    m.M = j.at("M").get<int>();
    m.V = j.at("V").get<int>();
    m.d_lat = j.at("d_lat").get<int>();
    m.d_man = j.at("d_man").get<int>();
    m.kl_weight = j.at("kl_weight").get<double>();
    m.encoder = nnet::from_json<double>(j.at("nets").at("encoder"));
    m.decoder = nnet::from_json<double>(j.at("nets").at("decoder"));
    return ConditionalGenerator(std::move(m));
  }
  CDDPMModel m;
  m.D = j.at("D").get<int>();
  m.cond_dim = j.at("cond_dim").get<int>();
  m.schedule = DiffusionSchedule::linear(j.at("T_hat").get<int>(), j.at("beta_start").get<double>(),
                                         j.at("beta_end").get<double>());
  m.eps_net = nnet::from_json<DdpmScalar>(j.at("nets").at("eps_net"));
  return ConditionalGenerator(std::move(m));
}

}  // namespace pmtmobo
