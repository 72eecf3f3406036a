#pragma once

// Command implementations behind the pmtmobo executable. Each returns a process
// exit code: 0 success, 1 runtime failure, 2 usage or configuration error.

#include "pmtmobo/engine.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace pmtmobo::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct ConfigError : InputError {
  using InputError::InputError;
};

struct ExperimentConfig {
  std::string benchmark;
  int decision_dim = 8;
  int objectives = 2;
  int U = 20;
  std::string output_dir = "runs";
  EngineConfig engine;

  void validate() const {
    if (benchmark.empty()) throw ConfigError("config: missing benchmark name");
    if (U < 1) throw ConfigError("config: U must be positive");
    try {
      engine.validate();
    } catch (const InputError& e) {
      throw ConfigError(e.what());
    }
  }
};

inline BenchmarkDef make_benchmark(const ExperimentConfig& c) {
  if (c.benchmark == "dtlz1" || c.benchmark == "dtlz2" || c.benchmark == "dtlz3") {
    if (c.objectives < 2 || c.objectives > 3) throw ConfigError("config: dtlz objectives must be 2 or 3");
    if (c.decision_dim < c.objectives) throw ConfigError("config: decision_dim must be >= objectives");
    return make_dtlz(c.benchmark.back() - '0', c.decision_dim, c.objectives);
  }
  try {
    return find_benchmark(c.benchmark);
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
}

inline const std::vector<std::string>& experiment_keys() {
  static const std::vector<std::string> keys{"benchmark", "decision_dim", "objectives", "U", "output_dir",
                                             "method", "K", "n_init", "T", "Q", "preference_grid", "n_gen",
                                             "acquisition", "gp", "generative", "seed", "reference_point"};
  return keys;
}

inline ExperimentConfig experiment_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(experiment_keys().begin(), experiment_keys().end(), key) == experiment_keys().end()) {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  ExperimentConfig c;
  try {
    c.benchmark = j.value("benchmark", std::string{});
    c.decision_dim = j.value("decision_dim", c.decision_dim);
    c.objectives = j.value("objectives", c.objectives);
    c.U = j.value("U", c.U);
    c.output_dir = j.value("output_dir", c.output_dir);
    c.engine = engine_config_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
  return c;
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j = pmtmobo::to_json(c.engine);
  j["benchmark"] = c.benchmark;
  j["decision_dim"] = c.decision_dim;
  j["objectives"] = c.objectives;
  j["U"] = c.U;
  j["output_dir"] = c.output_dir;
  return j;
}

inline ExperimentConfig load_experiment(const fs::path& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return experiment_from_json(j);
}

inline fs::path run_dir(const fs::path& root, int u) { return root / ("run_" + std::to_string(u)); }

/// Per-run config.json: the resolved experiment plus this run's seed and tasks.
inline nlohmann::json run_config_json(const ExperimentConfig& exp, const RunState& s) {
  nlohmann::json j = to_json(exp);
  j["seed"] = s.cfg.seed;
  j["K"] = s.K();
  nlohmann::json tasks = nlohmann::json::array();
  for (const auto& t : s.tasks) tasks.push_back(to_std(t.theta));
  j["tasks"] = tasks;
  return j;
}

inline void write_run_log(const RunState& s, const fs::path& dir, const std::string& extra = {}) {
  std::ostringstream ss;
  for (const auto& l : s.log) ss << l << '\n';
  if (!extra.empty()) ss << extra << '\n';
  io::write_file(dir / "run_log.txt", ss.str());
}

struct Stat {
  double mean = 0.0;
  double std = 0.0;
};

/// Mean and population standard deviation.
inline Stat mean_std(const std::vector<double>& v) {
  Stat s;
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(v.size()));
  return s;
}

inline std::string mean_std_cell(const Stat& s) {
  std::ostringstream ss;
  ss << std::setprecision(4) << std::fixed << s.mean << " (" << s.std << ")";
  return ss.str();
}

/// Final-round HV per task for one run directory.
inline std::vector<double> final_hv(const fs::path& dir) {
  const auto t = io::read_csv(dir / "hv_curve.csv");
  const auto c_task = t.column("task");
  const auto c_round = t.column("round");
  const auto c_hv = t.column("hv");
  long last = -1;
  for (const auto& r : t.rows) last = std::max(last, std::stol(r[c_round]));
  std::map<long, double> by_task;
  for (const auto& r : t.rows) {
    if (std::stol(r[c_round]) == last) by_task[std::stol(r[c_task])] = io::parse_double(r[c_hv]);
  }
  std::vector<double> out;
  for (const auto& [_, v] : by_task) out.push_back(v);
  return out;
}

/// summary.csv: per-task and pooled mean (std) of final HV across runs.
inline void write_summary(const fs::path& root, int U, const std::string& method) {
  std::vector<std::vector<double>> per_run;
  for (int u = 0; u < U; ++u) per_run.push_back(final_hv(run_dir(root, u)));
  const std::size_t K = per_run.front().size();
  io::CsvWriter w(root / "summary.csv");
  w.header({"method", "task", "runs", "mean", "std", "mean_std"});
  std::vector<double> pooled;
  for (std::size_t k = 0; k < K; ++k) {
    std::vector<double> v;
    for (const auto& r : per_run) v.push_back(r.at(k));
    pooled.insert(pooled.end(), v.begin(), v.end());
    const Stat s = mean_std(v);
    w.row({method, std::to_string(k), std::to_string(U), io::format_double(s.mean), io::format_double(s.std),
           mean_std_cell(s)});
  }
  const Stat s = mean_std(pooled);
  w.row({method, "pooled", std::to_string(U), io::format_double(s.mean), io::format_double(s.std),
         mean_std_cell(s)});
}

struct RunOverrides {
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
};

/// U seeded runs (seed = base + u) into out/run_u, then summary.csv.
inline int cmd_run(const fs::path& config_path, const RunOverrides& ov, std::ostream& out, std::ostream& err) {
  ExperimentConfig exp;
  BenchmarkDef bench;
  try {
    exp = load_experiment(config_path);
    if (ov.out) exp.output_dir = *ov.out;
    if (ov.seed) exp.engine.seed = *ov.seed;
    exp.validate();
    bench = make_benchmark(exp);
    if (exp.engine.reference_point && exp.engine.reference_point->size() != bench.M) {
      throw ConfigError("config: reference_point must have one entry per objective");
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  const fs::path root = exp.output_dir;
  try {
    fs::create_directories(root);
    io::write_file(root / "config.json", to_json(exp).dump(2) + "\n");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  const std::uint64_t base = exp.engine.seed;
  for (int u = 0; u < exp.U; ++u) {
    EngineConfig cfg = exp.engine;
    cfg.seed = base + static_cast<std::uint64_t>(u);
    const fs::path dir = run_dir(root, u);
    RunState s;
    bool started = false;
    try {
      s = initialize(cfg, bench, run_tasks(cfg, bench));
      started = true;
      for (int t = 1; t <= cfg.T; ++t) step(s);
      write_run_artifacts(s, dir);
      io::write_file(dir / "config.json", run_config_json(exp, s).dump(2) + "\n");
      write_run_log(s, dir);
    } catch (const std::exception& e) {
      fs::create_directories(dir);
      if (started) {
        try {
          write_run_artifacts(s, dir);
        } catch (const std::exception&) {
        }
        write_run_log(s, dir, std::string("aborted: ") + e.what());
      } else {
        io::write_file(dir / "run_log.txt", std::string("aborted: ") + e.what() + "\n");
      }
      err << "error: run " << u << " failed: " << e.what() << '\n';
      return kExitFailure;
    }
    out << "run " << u << " (seed " << cfg.seed << "): final mean HV ";
    double sum = 0.0;
    for (double h : s.hv.back()) sum += h;
    out << io::format_double(sum / s.K()) << '\n';
  }
  write_summary(root, exp.U, to_string(exp.engine.method));
  out << "wrote " << (root / "summary.csv").string() << '\n';
  return kExitOk;
}

struct LoadedRun {
  ExperimentConfig exp;
  BenchmarkDef bench;
  std::vector<Vector> tasks;
};

inline LoadedRun load_run(const fs::path& dir) {
  LoadedRun r;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(io::read_file(dir / "config.json"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("run config: ") + e.what());
  }
  if (!j.contains("tasks")) throw ConfigError(dir.string() + " is not a run directory (no tasks in config.json)");
  for (const auto& t : j.at("tasks")) r.tasks.push_back(vector_from_json(t));
  j.erase("tasks");
  r.exp = experiment_from_json(j);
  r.bench = make_benchmark(r.exp);
  return r;
}

enum class InverseBaseline { uniform, untrained };

/// Baseline samplers scored with the same tasks, preferences and budget as the trained model.
inline SolutionSampler baseline_sampler(InverseBaseline b, const ConditionalGenerator& trained, const BenchmarkDef& bench,
                                        std::uint64_t seed, std::shared_ptr<ConditionalGenerator>& keep) {
  if (b == InverseBaseline::uniform) return uniform_sampler(bench.D);
  Rng rng = make_rng(seed, {stream::inverse, 3});
  keep = std::make_shared<ConditionalGenerator>(untrained_generator(trained.kind(), bench.D, bench.M, bench.V, rng));
  auto g = keep;
  return [g](const Matrix& cond, Rng& r) { return g->sample(cond, r); };
}

struct EvalInverseOptions {
  int W = 100;
  int S = 100;
  std::uint64_t seed = 0;
  bool baselines = false;
};

/// inverse_eval.csv (task, theta..., hv), inverse_solutions.csv and, with
/// baselines, inverse_baselines.csv.
inline int cmd_eval_inverse(const fs::path& dir, const EvalInverseOptions& opt, std::ostream& out, std::ostream& err) {
  LoadedRun run;
  std::optional<ConditionalGenerator> gen;
  try {
    if (opt.W < 1 || opt.S < 1) throw ConfigError("--w and --s must be positive");
    run = load_run(dir);
    if (!fs::exists(dir / "generator.json")) throw ConfigError(dir.string() + " has no inverse model (generator.json)");
    gen = generator_from_json(nlohmann::json::parse(io::read_file(dir / "generator.json")));
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "error: generator.json: " << e.what() << '\n';
    return kExitUsage;
  }
  try {
    const auto& b = run.bench;
    const InverseModel model{*gen, b.D, b.M, b.V};
    const Vector ref = run.exp.engine.reference_point ? *run.exp.engine.reference_point : b.reference_point;
    const auto ev = evaluate_inverse(model, b, opt.W, opt.S, run.tasks, ref, opt.seed);
    {
      io::CsvWriter w(dir / "inverse_eval.csv");
      std::vector<std::string> head{"task"};
      for (int v = 0; v < b.V; ++v) head.push_back("theta_" + std::to_string(v));
      head.push_back("hv");
      w.header(head);
      for (std::size_t k = 0; k < ev.tasks.size(); ++k) {
        std::vector<std::string> row{std::to_string(k)};
        for (int v = 0; v < b.V; ++v) row.push_back(io::format_double(ev.tasks[k].theta[v]));
        row.push_back(io::format_double(ev.tasks[k].hv));
        w.row(row);
      }
    }
    {
      io::CsvWriter w(dir / "inverse_solutions.csv");
      std::vector<std::string> head{"task", "query"};
      for (int m = 0; m < b.M; ++m) head.push_back("lambda_" + std::to_string(m));
      for (int d = 0; d < b.D; ++d) head.push_back("x_" + std::to_string(d));
      for (int m = 0; m < b.M; ++m) head.push_back("F_" + std::to_string(m));
      w.header(head);
      for (std::size_t k = 0; k < ev.tasks.size(); ++k) {
        const auto& t = ev.tasks[k];
        for (int i = 0; i < opt.S; ++i) {
          std::vector<std::string> row{std::to_string(k), std::to_string(i)};
          for (int m = 0; m < b.M; ++m) row.push_back(io::format_double(t.prefs[static_cast<std::size_t>(i)][m]));
          for (int d = 0; d < b.D; ++d) row.push_back(io::format_double(t.X(i, d)));
          for (int m = 0; m < b.M; ++m) row.push_back(io::format_double(t.F(i, m)));
          w.row(row);
        }
      }
    }
    out << "inverse model: " << mean_std_cell({ev.mean, ev.std}) << '\n';
    if (opt.baselines) {
      io::CsvWriter w(dir / "inverse_baselines.csv");
      w.header({"task", "hv_model", "hv_uniform", "hv_untrained"});
      std::vector<InverseEvaluation> evs;
      for (auto kind : {InverseBaseline::uniform, InverseBaseline::untrained}) {
        std::shared_ptr<ConditionalGenerator> keep;
        evs.push_back(evaluate_inverse(baseline_sampler(kind, *gen, b, opt.seed, keep), b, opt.W, opt.S, run.tasks,
                                       ref, opt.seed));
      }
      for (std::size_t k = 0; k < ev.tasks.size(); ++k) {
        w.row({std::to_string(k), io::format_double(ev.tasks[k].hv), io::format_double(evs[0].tasks[k].hv),
               io::format_double(evs[1].tasks[k].hv)});
      }
      w.row({"mean", io::format_double(ev.mean), io::format_double(evs[0].mean), io::format_double(evs[1].mean)});
      out << "uniform baseline: " << mean_std_cell({evs[0].mean, evs[0].std}) << '\n';
      out << "untrained generator: " << mean_std_cell({evs[1].mean, evs[1].std}) << '\n';
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

struct Theorem2Options {
  int trials = 100;
  std::uint64_t seed = 0;
  std::optional<fs::path> out;  // csv path
  std::vector<int> task_counts;
  std::vector<int> design_sizes;
  std::vector<int> objective_counts;
  std::optional<SchurRegularizer> regularizer;
};

inline SchurRegularizer regularizer_from_string(const std::string& s) {
  if (s == "sigma2") return SchurRegularizer::noise_variance;
  if (s == "inv_sigma2") return SchurRegularizer::inverse_noise_variance;
  throw ConfigError("unknown regularizer: " + s + " (expected sigma2 or inv_sigma2)");
}

inline int cmd_verify_theorem2(const Theorem2Options& opt, std::ostream& out, std::ostream& err) {
  Theorem2Config cfg;
  if (opt.trials < 1) {
    err << "error: --trials must be >= 1\n";
    return kExitUsage;
  }
  if (!opt.task_counts.empty()) cfg.task_counts = opt.task_counts;
  if (!opt.design_sizes.empty()) cfg.design_sizes = opt.design_sizes;
  if (!opt.objective_counts.empty()) cfg.objective_counts = opt.objective_counts;
  if (opt.regularizer) cfg.regularizers = {*opt.regularizer};
  for (int k : cfg.task_counts) {
    if (k < 1) {
      err << "error: task counts must be positive\n";
      return kExitUsage;
    }
  }
  try {
    Rng rng = make_rng(opt.seed);
    const auto rep = theorem2_check(opt.trials, rng, cfg);
    if (opt.out) {
      if (opt.out->has_parent_path()) fs::create_directories(opt.out->parent_path());
      write_theorem2_csv(rep, *opt.out);
    }
    out << "trials: " << opt.trials << ", rows: " << rep.rows.size() << '\n';
    out << "gap min/mean/max: " << io::format_double(rep.min_gap) << " / " << io::format_double(rep.mean_gap) << " / "
        << io::format_double(rep.max_gap) << '\n';
    out << "violations: " << rep.violations << '\n';
    out << "max violation: " << io::format_double(rep.max_violation) << '\n';
    return rep.max_violation <= cfg.tolerance ? kExitOk : kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

// ---------------------------------------------------------------- plot

struct CurveSeries {
  std::string method;
  std::vector<double> mean;
  std::vector<double> std;
};

/// Expands an experiment root (run_*/hv_curve.csv) into its run directories.
inline std::vector<fs::path> expand_run_dirs(const std::vector<fs::path>& dirs) {
  std::vector<fs::path> out;
  for (const auto& d : dirs) {
    if (fs::exists(d / "hv_curve.csv")) {
      out.push_back(d);
      continue;
    }
    std::vector<fs::path> runs;
    if (fs::is_directory(d)) {
      for (const auto& e : fs::directory_iterator(d)) {
        if (e.is_directory() && fs::exists(e.path() / "hv_curve.csv")) runs.push_back(e.path());
      }
    }
    if (runs.empty()) throw ConfigError(d.string() + ": no hv_curve.csv");
    std::sort(runs.begin(), runs.end());
    out.insert(out.end(), runs.begin(), runs.end());
  }
  return out;
}

/// Per method and round: mean and population std over every (run, task) HV value.
inline std::vector<CurveSeries> curve_series(const std::vector<fs::path>& dirs) {
  std::map<std::string, std::map<long, std::vector<double>>> values;
  for (const auto& d : expand_run_dirs(dirs)) {
    const auto t = io::read_csv(d / "hv_curve.csv");
    const auto cm = t.column("method");
    const auto cr = t.column("round");
    const auto ch = t.column("hv");
    static_cast<void>(t.column("task"));
    for (const auto& r : t.rows) {
      long round = 0;
      try {
        round = std::stol(r[cr]);
      } catch (const std::exception&) {
        throw ConfigError(d.string() + ": malformed round '" + r[cr] + "'");
      }
      values[r[cm]][round].push_back(io::parse_double(r[ch]));
    }
  }
  std::vector<CurveSeries> out;
  for (const auto& [method, rounds] : values) {
    CurveSeries c{method, {}, {}};
    long expect = 0;
    for (const auto& [round, v] : rounds) {
      if (round != expect++) throw ConfigError("hv_curve: rounds for " + method + " are not contiguous from 0");
      const Stat s = mean_std(v);
      c.mean.push_back(s.mean);
      c.std.push_back(s.std);
    }
    out.push_back(std::move(c));
  }
  return out;
}

inline std::string render_svg(const std::vector<CurveSeries>& curves) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  const double W = 640, H = 420, left = 60, right = 170, top = 20, bottom = 50;
  const double pw = W - left - right;
  const double ph = H - top - bottom;
  std::size_t rounds = 1;
  double lo = 1e300, hi = -1e300;
  for (const auto& c : curves) {
    rounds = std::max(rounds, c.mean.size());
    for (std::size_t i = 0; i < c.mean.size(); ++i) {
      lo = std::min(lo, c.mean[i] - c.std[i]);
      hi = std::max(hi, c.mean[i] + c.std[i]);
    }
  }
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  const auto px = [&](std::size_t r) {
    return left + (rounds > 1 ? pw * static_cast<double>(r) / static_cast<double>(rounds - 1) : 0.0);
  };
  const auto py = [&](double v) { return top + ph * (hi - v) / (hi - lo); };
  const auto f = [](double v) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(2) << v;
    return ss.str();
  };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\">\n";
  s << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = lo + (hi - lo) * i / 4.0;
    s << "<text x=\"" << left - 6 << "\" y=\"" << f(py(v) + 4) << "\" font-size=\"11\" text-anchor=\"end\">"
      << f(v) << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const auto r = static_cast<std::size_t>(std::lround((rounds - 1) * i / 4.0));
    s << "<text x=\"" << f(px(r)) << "\" y=\"" << H - bottom + 16 << "\" font-size=\"11\" text-anchor=\"middle\">"
      << r << "</text>\n";
  }
  s << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 12 << "\" font-size=\"12\" text-anchor=\"middle\">round</text>\n";
  s << "<text x=\"16\" y=\"" << top + ph / 2 << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << top + ph / 2 << ")\">hypervolume</text>\n";
  for (std::size_t ci = 0; ci < curves.size(); ++ci) {
    const auto& c = curves[ci];
    const char* color = palette[ci % std::size(palette)];
    s << "<path class=\"band\" fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" d=\"";
    for (std::size_t r = 0; r < c.mean.size(); ++r) s << (r ? " L" : "M") << f(px(r)) << ',' << f(py(c.mean[r] + c.std[r]));
    for (std::size_t r = c.mean.size(); r-- > 0;) s << " L" << f(px(r)) << ',' << f(py(c.mean[r] - c.std[r]));
    s << " Z\"/>\n";
    s << "<path class=\"curve\" data-method=\"" << c.method << "\" data-values=\"";
    for (std::size_t r = 0; r < c.mean.size(); ++r) s << (r ? " " : "") << io::format_double(c.mean[r]);
    s << "\" data-std=\"";
    for (std::size_t r = 0; r < c.std.size(); ++r) s << (r ? " " : "") << io::format_double(c.std[r]);
    s << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" d=\"";
    for (std::size_t r = 0; r < c.mean.size(); ++r) s << (r ? " L" : "M") << f(px(r)) << ',' << f(py(c.mean[r]));
    s << "\"/>\n";
    const double ly = top + 14 + 18.0 * static_cast<double>(ci);
    s << "<line x1=\"" << W - right + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - right + 30 << "\" y2=\"" << ly
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << W - right + 36 << "\" y=\"" << ly + 4 << "\" font-size=\"11\">" << c.method << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

inline int cmd_plot(const std::vector<fs::path>& dirs, const fs::path& out_path, std::ostream& out, std::ostream& err) {
  if (dirs.empty()) {
    err << "error: plot needs at least one run directory\n";
    return kExitUsage;
  }
  std::vector<CurveSeries> curves;
  try {
    curves = curve_series(dirs);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::logic_error& e) {
    err << "error: malformed csv: " << e.what() << '\n';
    return kExitUsage;
  }
  try {
    if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
    io::write_file(out_path, render_svg(curves));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  out << "wrote " << out_path.string() << " (" << curves.size() << " curves)\n";
  return kExitOk;
}

}  // namespace pmtmobo::cli
