#pragma once

// Run orchestration: single-task and task-aware MOBO loops, the alternating
// acquisition/generative loop, and inverse-model evaluation on unseen tasks.

#include "pmtmobo/acquisition.hpp"
#include "pmtmobo/benchmarks.hpp"
#include "pmtmobo/generative.hpp"
#include "pmtmobo/gp.hpp"
#include "pmtmobo/io.hpp"
#include "pmtmobo/metrics.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace pmtmobo {

enum class Method { st_mobo, pmt_mobo, pmt_mobo_vae, pmt_mobo_ddpm };
enum class Mode { initial, acquisition, generative };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::st_mobo: return "st-mobo";
    case Method::pmt_mobo: return "pmt-mobo";
    case Method::pmt_mobo_vae: return "pmt-mobo-vae";
    case Method::pmt_mobo_ddpm: return "pmt-mobo-ddpm";
  }
  return "?";
}

inline Method method_from_string(const std::string& s) {
  if (s == "st-mobo") return Method::st_mobo;
  if (s == "pmt-mobo") return Method::pmt_mobo;
  if (s == "pmt-mobo-vae") return Method::pmt_mobo_vae;
  if (s == "pmt-mobo-ddpm") return Method::pmt_mobo_ddpm;
  throw InputError("unknown method: " + s);
}

inline std::string to_string(Mode m) {
  switch (m) {
    case Mode::initial: return "initial";
    case Mode::acquisition: return "acquisition";
    case Mode::generative: return "generative";
  }
  return "?";
}

inline bool is_generative(Method m) { return m == Method::pmt_mobo_vae || m == Method::pmt_mobo_ddpm; }
inline bool is_task_aware(Method m) { return m != Method::st_mobo; }

inline GeneratorKind generator_kind(Method m) {
  if (m == Method::pmt_mobo_vae) return GeneratorKind::vae;
  if (m == Method::pmt_mobo_ddpm) return GeneratorKind::ddpm;
  throw CapabilityError(to_string(m) + " has no generator");
}

struct EngineConfig {
  Method method = Method::pmt_mobo;
  int K = 8;
  int n_init = 20;
  int T = 50;
  double Q = 10.0;
  int preference_grid = 16;
  int n_gen = 64;
  AcquisitionConfig acquisition;
  bool train_hyperparameters = true;
  int hyper_steps = 50;
  double hyper_learning_rate = 0.1;
  int retune_every = 5;
  double initial_noise = 1e-3;
  GeneratorOptions generator;
  std::uint64_t seed = 0;
  std::optional<Vector> reference_point;  // hypervolume reporting; defaults to the benchmark's

  void validate() const {
    if (K < 1 || n_init < 1 || T < 0) throw InputError("config: K and n_init must be positive, T nonnegative");
    if (!(Q > 0.0 && Q <= 100.0)) throw InputError("config: Q must lie in (0, 100]");
    if (preference_grid < 1 || n_gen < 1) throw InputError("config: preference_grid and n_gen must be positive");
    if (hyper_steps < 1 || retune_every < 1) throw InputError("config: hyper_steps and retune_every must be positive");
    if (!(initial_noise >= kNoiseFloor)) throw InputError("config: initial_noise below noise floor");
    acquisition.validate();
  }
};

// rng stream tags
namespace stream {
inline constexpr std::uint64_t tasks = 1, init = 2, preference = 3, acquisition = 4, gen_sample = 5, gen_train = 6,
                               inverse = 7;
}

struct EvaluationRecord {
  Vector x;
  Vector theta;
  Vector F;
  int round = 0;
  std::optional<Preference> lambda;
  Mode mode = Mode::initial;
};

struct TaskState {
  Vector theta;
  std::vector<EvaluationRecord> records;
  Vector z;  // scalarization reference point: running nadir plus margin

  [[nodiscard]] Eigen::Index size() const { return static_cast<Eigen::Index>(records.size()); }

  [[nodiscard]] Matrix X() const {
    Matrix out(size(), records.empty() ? 0 : records.front().x.size());
    for (Eigen::Index i = 0; i < size(); ++i) out.row(i) = records[static_cast<std::size_t>(i)].x.transpose();
    return out;
  }
  [[nodiscard]] Matrix F() const {
    Matrix out(size(), records.empty() ? 0 : records.front().F.size());
    for (Eigen::Index i = 0; i < size(); ++i) out.row(i) = records[static_cast<std::size_t>(i)].F.transpose();
    return out;
  }
};

struct RunState {
  EngineConfig cfg;
  BenchmarkDef bench;
  std::vector<TaskState> tasks;
  int round = 0;

  // task-aware surrogates: one per objective over (x, theta)
  std::vector<Hyperparameters> joint_hyper;
  std::vector<GPModel> joint_models;
  // single-task surrogates: [task][objective] over x
  std::vector<std::vector<Hyperparameters>> task_hyper;
  std::vector<std::vector<GPModel>> task_models;

  std::optional<ConditionalGenerator> generator;
  int generator_trainings = 0;
  int gp_fits_last_round = 0;
  long evaluations = 0;
  std::vector<std::string> log;
  std::vector<Mode> round_modes;           // index t-1
  std::vector<std::vector<double>> hv;     // [round][task], round 0 = after initialization

  [[nodiscard]] int K() const { return static_cast<int>(tasks.size()); }
  [[nodiscard]] Vector hv_reference() const { return cfg.reference_point ? *cfg.reference_point : bench.reference_point; }
};

namespace detail {

inline Vector reference_from(const Matrix& F) {
  const Vector nadir = F.colwise().maxCoeff().transpose();
  const Vector ideal = F.colwise().minCoeff().transpose();
  Vector margin = 0.1 * (nadir - ideal);
  for (Eigen::Index m = 0; m < margin.size(); ++m) {
    if (!(margin[m] > 0.0)) margin[m] = 0.1 * std::max(std::abs(nadir[m]), 1.0);
  }
  return nadir + margin;
}

/// Expands z when an observation reaches it; never shrinks.
inline void update_reference(TaskState& task) {
  const Matrix F = task.F();
  if (task.z.size() == 0) {
    task.z = reference_from(F);
    return;
  }
  const Vector nadir = F.colwise().maxCoeff().transpose();
  if ((nadir.array() >= task.z.array()).any()) task.z = task.z.cwiseMax(reference_from(F));
}

inline void record_evaluation(RunState& s, int k, const Vector& x, int round, std::optional<Preference> lambda,
                              Mode mode) {
  auto& task = s.tasks[static_cast<std::size_t>(k)];
  Vector F = evaluate(s.bench, x, task.theta);
  ++s.evaluations;
  task.records.push_back({x, task.theta, std::move(F), round, std::move(lambda), mode});
  update_reference(task);
}

inline Hyperparameters default_hyper(Eigen::Index V, double noise) {
  return Hyperparameters{CompositeKernel::with_task_dim(V), noise};
}

inline GPModel fit_or_tune(const Matrix& X, const Vector& y, Hyperparameters& hyper, bool tune,
                           const EngineConfig& cfg) {
  if (tune) hyper = train_hyperparameters(X, y, hyper, cfg.hyper_steps, cfg.hyper_learning_rate).hyper;
  return fit(X, y, hyper);
}

}  // namespace detail

/// Fits (and optionally re-tunes) the surrogates the method needs on the current data.
inline void refit_surrogates(RunState& s, bool tune) {
  const int M = s.bench.M;
  const bool do_tune = tune && s.cfg.train_hyperparameters;
  s.gp_fits_last_round = 0;
  if (is_task_aware(s.cfg.method)) {
    Eigen::Index n = 0;
    for (const auto& t : s.tasks) n += t.size();
    Matrix X(n, s.bench.D + s.bench.V);
    Matrix F(n, M);
    Eigen::Index r = 0;
    for (const auto& t : s.tasks) {
      const Eigen::Index nk = t.size();
      X.block(r, 0, nk, s.bench.D) = t.X();
      X.block(r, s.bench.D, nk, s.bench.V) = t.theta.transpose().replicate(nk, 1);
      F.middleRows(r, nk) = t.F();
      r += nk;
    }
    if (s.joint_hyper.empty()) s.joint_hyper.assign(static_cast<std::size_t>(M), detail::default_hyper(s.bench.V, s.cfg.initial_noise));
    s.joint_models.resize(static_cast<std::size_t>(M));
    for (int m = 0; m < M; ++m) {
      s.joint_models[static_cast<std::size_t>(m)] =
          detail::fit_or_tune(X, F.col(m), s.joint_hyper[static_cast<std::size_t>(m)], do_tune, s.cfg);
      ++s.gp_fits_last_round;
    }
    return;
  }
  const auto K = static_cast<std::size_t>(s.K());
  if (s.task_hyper.empty()) {
    s.task_hyper.assign(K, std::vector<Hyperparameters>(static_cast<std::size_t>(M), detail::default_hyper(0, s.cfg.initial_noise)));
  }
  s.task_models.assign(K, std::vector<GPModel>(static_cast<std::size_t>(M)));
  for (std::size_t k = 0; k < K; ++k) {
    const Matrix X = s.tasks[k].X();
    const Matrix F = s.tasks[k].F();
    for (int m = 0; m < M; ++m) {
      s.task_models[k][static_cast<std::size_t>(m)] =
          detail::fit_or_tune(X, F.col(m), s.task_hyper[k][static_cast<std::size_t>(m)], do_tune, s.cfg);
      ++s.gp_fits_last_round;
    }
  }
}

inline TaskSurrogate surrogate_for(const RunState& s, int k) {
  if (is_task_aware(s.cfg.method)) return {s.joint_models, s.tasks[static_cast<std::size_t>(k)].theta};
  return {s.task_models[static_cast<std::size_t>(k)], Vector(0)};
}

inline void record_hv(RunState& s) {
  const Vector ref = s.hv_reference();
  std::vector<double> row;
  for (const auto& t : s.tasks) row.push_back(hypervolume(t.F(), ref));
  s.hv.push_back(std::move(row));
}

inline RunState initialize(const EngineConfig& cfg, const BenchmarkDef& bench, std::vector<Vector> thetas) {
  cfg.validate();
  if (thetas.empty()) throw InputError("initialize: no tasks");
  RunState s;
  s.cfg = cfg;
  s.cfg.K = static_cast<int>(thetas.size());
  s.bench = bench;
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    s.tasks.push_back(TaskState{thetas[k], {}, Vector(0)});
    Rng rng = make_rng(cfg.seed, {stream::init, k});
    for (int i = 0; i < cfg.n_init; ++i) {
      detail::record_evaluation(s, static_cast<int>(k), uniform_vector(bench.D, rng), 0, std::nullopt, Mode::initial);
    }
    s.tasks.back().z = detail::reference_from(s.tasks.back().F());
  }
  refit_surrogates(s, true);
  record_hv(s);
  return s;
}

inline Preference round_preference(const RunState& s, int t) {
  Rng rng = make_rng(s.cfg.seed, {stream::preference, static_cast<std::uint64_t>(t)});
  return sample_preference(s.bench.M, rng);
}

namespace detail {

inline void finish_round(RunState& s, int t, Mode mode) {
  s.round = t;
  s.round_modes.push_back(mode);
  refit_surrogates(s, t % s.cfg.retune_every == 0);
  record_hv(s);
}

/// One acquisition-driven round with whichever surrogates the method uses.
inline void acquisition_round(RunState& s) {
  const int t = s.round + 1;
  const Preference lambda = round_preference(s, t);
  const double b = beta(t, s.bench.D, s.cfg.acquisition);
  for (int k = 0; k < s.K(); ++k) {
    Rng rng = make_rng(s.cfg.seed, {stream::acquisition, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(k)});
    const auto& task = s.tasks[static_cast<std::size_t>(k)];
    const auto res = maximize_acquisition(surrogate_for(s, k), lambda, b, task.z, s.cfg.acquisition, rng, task.X(),
                                          s.bench.D);
    record_evaluation(s, k, res.x, t, lambda, Mode::acquisition);
  }
  finish_round(s, t, Mode::acquisition);
}

inline std::vector<EliteSource> elite_sources(const RunState& s) {
  std::vector<EliteSource> out;
  for (const auto& t : s.tasks) out.push_back({t.theta, t.X(), t.F(), t.z});
  return out;
}

/// Returns false when the elite set is too small to train on.
inline bool retrain_generator(RunState& s, int t) {
  const auto sources = elite_sources(s);
  const EliteDataset elites = build_elite_dataset(sources, s.cfg.preference_grid, s.cfg.Q);
  if (elites.size() < 2) return false;
  Rng rng = make_rng(s.cfg.seed, {stream::gen_train, static_cast<std::uint64_t>(t)});
  s.generator = train_generator(generator_kind(s.cfg.method), elites, s.bench.M, s.bench.V, s.cfg.generator, rng);
  ++s.generator_trainings;
  return true;
}

}  // namespace detail

inline void step_st_mobo(RunState& s) {
  if (s.cfg.method != Method::st_mobo) throw StateError("step_st_mobo: run is not configured for st-mobo");
  detail::acquisition_round(s);
}

inline void step_pmt_mobo(RunState& s) {
  if (!is_task_aware(s.cfg.method)) throw StateError("step_pmt_mobo: run is not configured for a task-aware method");
  detail::acquisition_round(s);
}

/// Generator-proposed candidates, picked by the task-aware acquisition; then the
/// generator is retrained on a fresh elite extraction.
inline void step_generative(RunState& s) {
  if (!is_generative(s.cfg.method)) throw StateError("step_generative: method has no generator");
  const int t = s.round + 1;
  if (!s.generator && !detail::retrain_generator(s, t)) {
    s.log.push_back("round " + std::to_string(t) + ": elite set too small, acquisition fallback");
    detail::acquisition_round(s);
    return;
  }
  const Preference lambda = round_preference(s, t);
  const double b = beta(t, s.bench.D, s.cfg.acquisition);
  const int M = s.bench.M;
  const int V = s.bench.V;
  const int n = s.cfg.n_gen;
  Matrix cond(static_cast<Eigen::Index>(s.K()) * n, M + V);
  for (int k = 0; k < s.K(); ++k) {
    const Vector c = conditioning(lambda, s.tasks[static_cast<std::size_t>(k)].theta);
    cond.middleRows(static_cast<Eigen::Index>(k) * n, n) = c.transpose().replicate(n, 1);
  }
  Rng rng = make_rng(s.cfg.seed, {stream::gen_sample, static_cast<std::uint64_t>(t)});
  const Matrix candidates = s.generator->sample(cond, rng);
  for (int k = 0; k < s.K(); ++k) {
    const Matrix pool = candidates.middleRows(static_cast<Eigen::Index>(k) * n, n);
    const auto res = select_from_pool(surrogate_for(s, k), lambda, b, s.tasks[static_cast<std::size_t>(k)].z, pool);
    detail::record_evaluation(s, k, res.x, t, lambda, Mode::generative);
  }
  detail::finish_round(s, t, Mode::generative);
  if (!detail::retrain_generator(s, t)) s.log.push_back("round " + std::to_string(t) + ": generator retraining skipped");
}

/// Mode for round t of a generative run: odd rounds acquire, even rounds generate.
inline Mode scheduled_mode(Method m, int t) {
  if (!is_generative(m)) return Mode::acquisition;
  return t % 2 == 1 ? Mode::acquisition : Mode::generative;
}

inline void step(RunState& s) {
  const int t = s.round + 1;
  switch (s.cfg.method) {
    case Method::st_mobo: step_st_mobo(s); break;
    case Method::pmt_mobo: step_pmt_mobo(s); break;
    default:
      if (scheduled_mode(s.cfg.method, t) == Mode::generative) {
        step_generative(s);
      } else {
        step_pmt_mobo(s);
      }
  }
}

inline std::vector<Vector> run_tasks(const EngineConfig& cfg, const BenchmarkDef& bench) {
  Rng rng = make_rng(cfg.seed, {stream::tasks});
  return sample_tasks(bench, cfg.K, rng);
}

/// initialize + T rounds. Deterministic in (cfg, seed).
inline RunState run(const EngineConfig& cfg, const BenchmarkDef& bench) {
  RunState s = initialize(cfg, bench, run_tasks(cfg, bench));
  for (int t = 1; t <= cfg.T; ++t) step(s);
  return s;
}

// ---------------------------------------------------------------- inverse model

struct InverseModel {
  ConditionalGenerator generator;
  int D = 0;
  int M = 0;
  int V = 0;
};

/// One conditional sample for (theta, lambda); never evaluates the benchmark.
inline Vector inverse_query(const InverseModel& model, const Vector& theta, const Preference& lambda, Rng& rng) {
  require_same_size(theta.size(), model.V, "inverse_query theta");
  require_same_size(lambda.size(), model.M, "inverse_query lambda");
  return model.generator.sample(conditioning(lambda, theta), 1, rng).row(0).transpose();
}

/// Batched solver interface: rows of (lambda, theta) conditionings -> rows of solutions.
using SolutionSampler = std::function<Matrix(const Matrix& cond_rows, Rng& rng)>;

inline SolutionSampler sampler_for(const InverseModel& model) {
  return [&model](const Matrix& cond, Rng& rng) { return model.generator.sample(cond, rng); };
}

inline SolutionSampler uniform_sampler(int D) {
  return [D](const Matrix& cond, Rng& rng) {
    Matrix X(cond.rows(), D);
    for (Eigen::Index i = 0; i < X.rows(); ++i) X.row(i) = uniform_vector(D, rng).transpose();
    return X;
  };
}

struct InverseTaskResult {
  Vector theta;
  double hv = 0.0;
  std::vector<Preference> prefs;
  Matrix X;  // S x D
  Matrix F;  // S x M
};

struct InverseEvaluation {
  std::vector<InverseTaskResult> tasks;
  double mean = 0.0;
  double std = 0.0;
  long evaluations = 0;
};

inline void summarize_inverse(InverseEvaluation& ev) {
  const double n = static_cast<double>(ev.tasks.size());
  double sum = 0.0;
  for (const auto& t : ev.tasks) sum += t.hv;
  ev.mean = sum / n;
  double ss = 0.0;
  for (const auto& t : ev.tasks) ss += (t.hv - ev.mean) * (t.hv - ev.mean);
  ev.std = std::sqrt(ss / n);
}

/// Unseen tasks drawn uniformly from the task box, rejecting any within 1e-6 of a training task.
inline std::vector<Vector> unseen_tasks(const BenchmarkDef& bench, int W, const std::vector<Vector>& training,
                                        Rng& rng) {
  std::vector<Vector> out;
  while (static_cast<int>(out.size()) < W) {
    auto cand = sample_tasks(bench, 1, rng).front();
    bool clash = false;
    for (const auto& t : training) clash = clash || (cand - t).cwiseAbs().maxCoeff() < 1e-6;
    if (!clash) out.push_back(std::move(cand));
  }
  return out;
}

/// W unseen tasks x S sampled preferences -> S solutions per task, scored by the
/// hypervolume of their images against `reference`. Streams depend only on seed,
/// so different samplers see identical tasks and preferences.
inline InverseEvaluation evaluate_inverse(const SolutionSampler& sampler, const BenchmarkDef& bench, int W, int S,
                                          const std::vector<Vector>& training_tasks, const Vector& reference,
                                          std::uint64_t seed) {
  if (W < 1 || S < 1) throw InputError("evaluate_inverse: W and S must be positive");
  Rng task_rng = make_rng(seed, {stream::inverse, 0});
  const auto thetas = unseen_tasks(bench, W, training_tasks, task_rng);
  InverseEvaluation ev;
  for (int w = 0; w < W; ++w) {
    InverseTaskResult r;
    r.theta = thetas[static_cast<std::size_t>(w)];
    Rng pref_rng = make_rng(seed, {stream::inverse, 1, static_cast<std::uint64_t>(w)});
    Matrix cond(S, bench.M + bench.V);
    for (int i = 0; i < S; ++i) {
      r.prefs.push_back(sample_preference(bench.M, pref_rng));
      cond.row(i) = conditioning(r.prefs.back(), r.theta).transpose();
    }
    Rng sample_rng = make_rng(seed, {stream::inverse, 2, static_cast<std::uint64_t>(w)});
    r.X = sampler(cond, sample_rng);
    r.F.resize(S, bench.M);
    for (int i = 0; i < S; ++i) {
      r.F.row(i) = evaluate(bench, r.X.row(i).transpose(), r.theta).transpose();
      ++ev.evaluations;
    }
    r.hv = hypervolume(r.F, reference);
    ev.tasks.push_back(std::move(r));
  }
  summarize_inverse(ev);
  return ev;
}

inline InverseEvaluation evaluate_inverse(const InverseModel& model, const BenchmarkDef& bench, int W, int S,
                                          const std::vector<Vector>& training_tasks, const Vector& reference,
                                          std::uint64_t seed) {
  return evaluate_inverse(sampler_for(model), bench, W, S, training_tasks, reference, seed);
}

inline std::optional<InverseModel> inverse_model(const RunState& s) {
  if (!s.generator) return std::nullopt;
  return InverseModel{*s.generator, s.bench.D, s.bench.M, s.bench.V};
}

// ---------------------------------------------------------------- artifacts

inline std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

inline Vector vector_from_json(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline nlohmann::json to_json(const EngineConfig& c) {
  nlohmann::json j;
  j["method"] = to_string(c.method);
  j["K"] = c.K;
  j["n_init"] = c.n_init;
  j["T"] = c.T;
  j["Q"] = c.Q;
  j["preference_grid"] = c.preference_grid;
  j["n_gen"] = c.n_gen;
  j["acquisition"] = {{"pool_size", c.acquisition.pool_size},
                      {"local_refinement_steps", c.acquisition.local_refinement_steps},
                      {"refinement_step_size", c.acquisition.refinement_step_size},
                      {"beta_delta", c.acquisition.beta_delta},
                      {"refine_top", c.acquisition.refine_top}};
  j["gp"] = {{"train_hyperparameters", c.train_hyperparameters},
             {"hyper_steps", c.hyper_steps},
             {"hyper_learning_rate", c.hyper_learning_rate},
             {"retune_every", c.retune_every},
             {"initial_noise", c.initial_noise}};
  j["generative"] = {{"vae_epochs", c.generator.vae.epochs},
                     {"vae_learning_rate", c.generator.vae.learning_rate},
                     {"ddpm_steps", c.generator.ddpm.steps},
                     {"ddpm_batch_size", c.generator.ddpm.batch_size},
                     {"ddpm_learning_rate", c.generator.ddpm.learning_rate},
                     {"clip_norm", c.generator.vae.clip_norm}};
  j["seed"] = c.seed;
  j["reference_point"] = c.reference_point ? nlohmann::json(to_std(*c.reference_point)) : nlohmann::json(nullptr);
  return j;
}

/// Reads an engine config; absent keys keep their defaults.
inline EngineConfig engine_config_from_json(const nlohmann::json& j) {
  EngineConfig c;
  if (j.contains("method")) c.method = method_from_string(j.at("method").get<std::string>());
  c.K = j.value("K", c.K);
  c.n_init = j.value("n_init", c.n_init);
  c.T = j.value("T", c.T);
  c.Q = j.value("Q", c.Q);
  c.preference_grid = j.value("preference_grid", c.preference_grid);
  c.n_gen = j.value("n_gen", c.n_gen);
  if (j.contains("acquisition")) {
    const auto& a = j.at("acquisition");
    c.acquisition.pool_size = a.value("pool_size", c.acquisition.pool_size);
    c.acquisition.local_refinement_steps = a.value("local_refinement_steps", c.acquisition.local_refinement_steps);
    c.acquisition.refinement_step_size = a.value("refinement_step_size", c.acquisition.refinement_step_size);
    c.acquisition.beta_delta = a.value("beta_delta", c.acquisition.beta_delta);
    c.acquisition.refine_top = a.value("refine_top", c.acquisition.refine_top);
  }
  if (j.contains("gp")) {
    const auto& g = j.at("gp");
    c.train_hyperparameters = g.value("train_hyperparameters", c.train_hyperparameters);
    c.hyper_steps = g.value("hyper_steps", c.hyper_steps);
    c.hyper_learning_rate = g.value("hyper_learning_rate", c.hyper_learning_rate);
    c.retune_every = g.value("retune_every", c.retune_every);
    c.initial_noise = g.value("initial_noise", c.initial_noise);
  }
  if (j.contains("generative")) {
    const auto& g = j.at("generative");
    c.generator.vae.epochs = g.value("vae_epochs", c.generator.vae.epochs);
    c.generator.vae.learning_rate = g.value("vae_learning_rate", c.generator.vae.learning_rate);
    c.generator.ddpm.steps = g.value("ddpm_steps", c.generator.ddpm.steps);
    c.generator.ddpm.batch_size = g.value("ddpm_batch_size", c.generator.ddpm.batch_size);
    c.generator.ddpm.learning_rate = g.value("ddpm_learning_rate", c.generator.ddpm.learning_rate);
    c.generator.vae.clip_norm = g.value("clip_norm", c.generator.vae.clip_norm);
    c.generator.ddpm.clip_norm = c.generator.vae.clip_norm;
  }
  c.seed = j.value("seed", c.seed);
  if (j.contains("reference_point") && !j.at("reference_point").is_null()) {
    c.reference_point = vector_from_json(j.at("reference_point"));
  }
  return c;
}

inline nlohmann::json gp_checkpoint(const GPModel& m) {
  const auto& h = m.hyperparameters();
  return {{"decision_lengthscale", h.kernel.decision.lengthscale},
          {"task_lengthscales", to_std(h.kernel.task.lengthscales)},
          {"output_scale", h.kernel.output_scale},
          {"noise_variance", h.noise_variance},
          {"target_mean", m.normalization().mean},
          {"target_std", m.normalization().std},
          {"training_points", m.size()},
          {"training_data", "archive_k*.csv"}};
}

inline std::string archive_filename(int k) { return "archive_k" + std::to_string(k) + ".csv"; }

/// archive_k{k}.csv, hv_curve.csv, gp_models.json and (if any) generator.json.
inline void write_run_artifacts(const RunState& s, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const int D = s.bench.D;
  const int M = s.bench.M;
  for (int k = 0; k < s.K(); ++k) {
    io::CsvWriter w(dir / archive_filename(k));
    std::vector<std::string> head{"t", "mode"};
    for (int m = 0; m < M; ++m) head.push_back("lambda_" + std::to_string(m));
    for (int d = 0; d < D; ++d) head.push_back("x_" + std::to_string(d));
    for (int m = 0; m < M; ++m) head.push_back("F_" + std::to_string(m));
    w.header(head);
    for (const auto& r : s.tasks[static_cast<std::size_t>(k)].records) {
      std::vector<std::string> row{std::to_string(r.round), to_string(r.mode)};
      for (int m = 0; m < M; ++m) row.push_back(r.lambda ? io::format_double((*r.lambda)[m]) : "nan");
      for (int d = 0; d < D; ++d) row.push_back(io::format_double(r.x[d]));
      for (int m = 0; m < M; ++m) row.push_back(io::format_double(r.F[m]));
      w.row(row);
    }
  }
  {
    io::CsvWriter w(dir / "hv_curve.csv");
    w.header({"method", "task", "round", "hv"});
    for (std::size_t t = 0; t < s.hv.size(); ++t) {
      for (std::size_t k = 0; k < s.hv[t].size(); ++k) {
        w.row({to_string(s.cfg.method), std::to_string(k), std::to_string(t), io::format_double(s.hv[t][k])});
      }
    }
  }
  nlohmann::json gps;
  if (is_task_aware(s.cfg.method)) {
    gps["kind"] = "task-aware";
    for (const auto& m : s.joint_models) gps["models"].push_back(gp_checkpoint(m));
  } else {
    gps["kind"] = "single-task";
    for (const auto& per_task : s.task_models) {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& m : per_task) arr.push_back(gp_checkpoint(m));
      gps["models"].push_back(arr);
    }
  }
  io::write_file(dir / "gp_models.json", gps.dump(2) + "\n");
  if (s.generator) {
    nlohmann::json g = to_json(*s.generator);
    g["benchmark"] = s.bench.name;
    g["M"] = M;
    g["V"] = s.bench.V;
    io::write_file(dir / "generator.json", g.dump() + "\n");
  }
}

}  // namespace pmtmobo
