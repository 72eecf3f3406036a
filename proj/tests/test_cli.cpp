#include "pmtmobo/cli.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <regex>
#include <sstream>

using namespace pmtmobo;
using namespace pmtmobo::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "pmtmobo_cli_tests";

int run_binary(const std::string& args) {
  const std::string cmd = std::string(PMTMOBO_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

nlohmann::json smoke_json(const std::string& method, const fs::path& out) {
  return {{"benchmark", "dtlz2"},
          {"decision_dim", 4},
          {"U", 2},
          {"method", method},
          {"K", 2},
          {"n_init", 6},
          {"T", 4},
          {"preference_grid", 4},
          {"n_gen", 16},
          {"seed", 3},
          {"output_dir", out.string()},
          {"acquisition", {{"pool_size", 64}, {"local_refinement_steps", 3}}},
          {"gp", {{"hyper_steps", 5}}},
          {"generative", {{"vae_epochs", 50}, {"ddpm_steps", 50}}}};
}

fs::path write_config(const nlohmann::json& j, const std::string& name) {
  fs::create_directories(kRoot);
  const fs::path p = kRoot / name;
  io::write_file(p, j.dump(2));
  return p;
}

int run_config(const nlohmann::json& j, const std::string& name) {
  std::ostringstream out, err;
  return cmd_run(write_config(j, name), {}, out, err);
}

// 2-D dominated area by a sweep over points sorted on the first objective.
double area_2d(std::vector<std::pair<double, double>> pts, double r0, double r1) {
  std::sort(pts.begin(), pts.end());
  double area = 0.0;
  double best1 = r1;
  for (const auto& [a, b] : pts) {
    if (a >= r0 || b >= best1) continue;
    area += (r0 - a) * (best1 - b);
    best1 = b;
  }
  return area;
}

std::vector<double> split_doubles(const std::string& s) {
  std::vector<double> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(io::parse_double(tok));
  return out;
}

class CliRuns : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    fs::remove_all(kRoot);
    ASSERT_EQ(run_config(smoke_json("pmt-mobo-vae", kRoot / "vae"), "vae.json"), kExitOk);
    ASSERT_EQ(run_config(smoke_json("st-mobo", kRoot / "st"), "st.json"), kExitOk);
  }
};

}  // namespace

TEST(Config, DefaultsMatchStandardSetting) {
  const auto c = experiment_from_json({{"benchmark", "dtlz2"}});
  EXPECT_EQ(c.engine.K, 8);
  EXPECT_EQ(c.engine.n_init, 20);
  EXPECT_EQ(c.engine.T, 50);
  EXPECT_EQ(c.U, 20);
  EXPECT_EQ(c.engine.Q, 10.0);
  EXPECT_EQ(c.engine.method, Method::pmt_mobo);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(experiment_from_json({{"benchmark", "dtlz2"}, {"bogus", 1}}), ConfigError);
  EXPECT_THROW(experiment_from_json({{"benchmark", "dtlz2"}, {"method", "nope"}}), ConfigError);
  EXPECT_THROW(experiment_from_json({{"benchmark", "dtlz2"}, {"K", "eight"}}), ConfigError);
  auto c = experiment_from_json({{"benchmark", "dtlz2"}, {"U", 0}});
  EXPECT_THROW(c.validate(), ConfigError);
  c = experiment_from_json({{"benchmark", "nosuch"}});
  EXPECT_THROW(make_benchmark(c), ConfigError);
}

TEST(Config, JsonRoundTrip) {
  const auto c = experiment_from_json(smoke_json("pmt-mobo-ddpm", "x"));
  EXPECT_EQ(to_json(experiment_from_json(to_json(c))), to_json(c));
}

TEST(Stats, PopulationStdAndCell) {
  const Stat s = mean_std({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.std, std::sqrt(1.25));
  EXPECT_EQ(mean_std_cell({0.123456, 0.01}), "0.1235 (0.0100)");
}

TEST(RunCommand, MissingBenchmarkIsUsageError) {
  auto j = smoke_json("pmt-mobo", kRoot / "nobench");
  j.erase("benchmark");
  EXPECT_EQ(run_config(j, "nobench.json"), kExitUsage);
  EXPECT_EQ(run_binary("run --config " + write_config(j, "nobench.json").string()), kExitUsage);
  EXPECT_EQ(run_binary("run --config " + (kRoot / "absent.json").string()), kExitUsage);
}

TEST(RunCommand, ReferencePointArityChecked) {
  auto j = smoke_json("pmt-mobo", kRoot / "badref");
  j["reference_point"] = {1.0, 1.0, 1.0};
  EXPECT_EQ(run_config(j, "badref.json"), kExitUsage);
}

TEST_F(CliRuns, SummaryHasTaskRowsAndPooled) {
  const auto t = io::read_csv(kRoot / "vae" / "summary.csv");
  ASSERT_EQ(t.rows.size(), 3u);
  const auto ct = t.column("task");
  EXPECT_EQ(t.rows[0][ct], "0");
  EXPECT_EQ(t.rows[1][ct], "1");
  EXPECT_EQ(t.rows[2][ct], "pooled");
  EXPECT_EQ(t.rows[0][t.column("method")], "pmt-mobo-vae");
  EXPECT_EQ(t.rows[0][t.column("runs")], "2");
}

TEST_F(CliRuns, SummaryMatchesRecomputation) {
  // final-round HV per (run, task) read straight from the curves
  std::map<int, std::vector<double>> per_task;
  for (int u = 0; u < 2; ++u) {
    const auto c = io::read_csv(kRoot / "vae" / ("run_" + std::to_string(u)) / "hv_curve.csv");
    for (const auto& r : c.rows) {
      if (r[c.column("round")] == "4") per_task[std::stoi(r[c.column("task")])].push_back(io::parse_double(r[c.column("hv")]));
    }
  }
  ASSERT_EQ(per_task.size(), 2u);
  const auto t = io::read_csv(kRoot / "vae" / "summary.csv");
  std::vector<double> pooled;
  for (std::size_t row = 0; row < 3; ++row) {
    std::vector<double> v;
    if (row < 2) {
      v = per_task[static_cast<int>(row)];
      pooled.insert(pooled.end(), v.begin(), v.end());
    } else {
      v = pooled;
    }
    ASSERT_EQ(v.size(), row < 2 ? 2u : 4u);
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / static_cast<double>(v.size()));
    EXPECT_NEAR(io::parse_double(t.rows[row][t.column("mean")]), mean, 1e-12);
    EXPECT_NEAR(io::parse_double(t.rows[row][t.column("std")]), sd, 1e-12);
  }
}

TEST_F(CliRuns, RunDirectoriesHoldArtifacts) {
  for (int u = 0; u < 2; ++u) {
    const fs::path d = kRoot / "vae" / ("run_" + std::to_string(u));
    for (const char* f : {"archive_k0.csv", "archive_k1.csv", "hv_curve.csv", "gp_models.json", "generator.json",
                          "config.json", "run_log.txt"}) {
      EXPECT_TRUE(fs::exists(d / f)) << d / f;
    }
    const auto j = nlohmann::json::parse(io::read_file(d / "config.json"));
    EXPECT_EQ(j.at("seed").get<int>(), 3 + u);
    EXPECT_EQ(j.at("tasks").size(), 2u);
    const auto a = io::read_csv(d / "archive_k0.csv");
    EXPECT_EQ(a.rows.size(), 10u);
    EXPECT_EQ(a.rows.front()[a.column("mode")], "initial");
  }
  EXPECT_FALSE(fs::exists(kRoot / "st" / "run_0" / "generator.json"));
}

TEST_F(CliRuns, RerunIsByteIdentical) {
  ASSERT_EQ(run_config(smoke_json("pmt-mobo-vae", kRoot / "vae_again"), "vae_again.json"), kExitOk);
  for (const char* f : {"archive_k0.csv", "archive_k1.csv", "hv_curve.csv", "generator.json", "gp_models.json"}) {
    EXPECT_EQ(io::read_file(kRoot / "vae" / "run_1" / f), io::read_file(kRoot / "vae_again" / "run_1" / f)) << f;
  }
  EXPECT_EQ(io::read_file(kRoot / "vae" / "summary.csv"), io::read_file(kRoot / "vae_again" / "summary.csv"));
}

TEST_F(CliRuns, SeedOverrideChangesRuns) {
  std::ostringstream out, err;
  RunOverrides ov;
  ov.out = (kRoot / "vae_seed").string();
  ov.seed = 100;
  ASSERT_EQ(cmd_run(kRoot / "vae.json", ov, out, err), kExitOk);
  EXPECT_NE(io::read_file(kRoot / "vae" / "run_0" / "archive_k0.csv"),
            io::read_file(kRoot / "vae_seed" / "run_0" / "archive_k0.csv"));
  const auto j = nlohmann::json::parse(io::read_file(kRoot / "vae_seed" / "run_1" / "config.json"));
  EXPECT_EQ(j.at("seed").get<int>(), 101);
}

TEST_F(CliRuns, EvalInverseOnSingleTaskRunIsUsageError) {
  std::ostringstream out, err;
  EXPECT_EQ(cmd_eval_inverse(kRoot / "st" / "run_0", {2, 4, 0, false}, out, err), kExitUsage);
  EXPECT_EQ(run_binary("eval-inverse " + (kRoot / "st" / "run_0").string()), kExitUsage);
  EXPECT_EQ(run_binary("eval-inverse " + (kRoot / "nowhere").string()), kExitUsage);
}

TEST_F(CliRuns, EvalInverseRowsAndRecomputedVolumes) {
  const fs::path d = kRoot / "vae" / "run_0";
  std::ostringstream out, err;
  ASSERT_EQ(cmd_eval_inverse(d, {2, 4, 0, false}, out, err), kExitOk);
  EXPECT_NE(out.str().find("inverse model: "), std::string::npos);
  const auto ev = io::read_csv(d / "inverse_eval.csv");
  ASSERT_EQ(ev.rows.size(), 2u);
  const auto sol = io::read_csv(d / "inverse_solutions.csv");
  ASSERT_EQ(sol.rows.size(), 8u);
  const auto bench = make_dtlz(2, 4, 2);
  std::map<std::string, std::vector<std::pair<double, double>>> pts;
  for (const auto& r : sol.rows) {
    pts[r[sol.column("task")]].emplace_back(io::parse_double(r[sol.column("F_0")]), io::parse_double(r[sol.column("F_1")]));
  }
  for (const auto& r : ev.rows) {
    const double hv = area_2d(pts[r[ev.column("task")]], bench.reference_point[0], bench.reference_point[1]);
    EXPECT_NEAR(io::parse_double(r[ev.column("hv")]), hv, 1e-9);
  }
  const auto training = nlohmann::json::parse(io::read_file(d / "config.json")).at("tasks");
  for (const auto& r : ev.rows) {
    for (const auto& t : training) EXPECT_NE(io::parse_double(r[ev.column("theta_0")]), t[0].get<double>());
  }
}

TEST_F(CliRuns, EvalInverseBaselinesShareProtocol) {
  const fs::path d = kRoot / "vae" / "run_1";
  std::ostringstream out, err;
  ASSERT_EQ(cmd_eval_inverse(d, {3, 5, 1, true}, out, err), kExitOk);
  const auto b = io::read_csv(d / "inverse_baselines.csv");
  ASSERT_EQ(b.rows.size(), 4u);
  EXPECT_EQ(b.rows.back()[0], "mean");
  const auto ev = io::read_csv(d / "inverse_eval.csv");
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(b.rows[k][b.column("hv_model")], ev.rows[k][ev.column("hv")]);
  }
  EXPECT_NE(out.str().find("uniform baseline: "), std::string::npos);
  EXPECT_NE(out.str().find("untrained generator: "), std::string::npos);
}

TEST_F(CliRuns, EvalInverseIsDeterministic) {
  const fs::path d = kRoot / "vae" / "run_0";
  std::ostringstream o1, o2, err;
  ASSERT_EQ(cmd_eval_inverse(d, {2, 6, 7, false}, o1, err), kExitOk);
  const std::string first = io::read_file(d / "inverse_solutions.csv");
  ASSERT_EQ(cmd_eval_inverse(d, {2, 6, 7, false}, o2, err), kExitOk);
  EXPECT_EQ(io::read_file(d / "inverse_solutions.csv"), first);
  EXPECT_EQ(o1.str(), o2.str());
}

TEST_F(CliRuns, PlotSingleRunHasOneCurve) {
  const fs::path svg = kRoot / "one.svg";
  std::ostringstream out, err;
  ASSERT_EQ(cmd_plot({kRoot / "vae" / "run_0"}, svg, out, err), kExitOk);
  const std::string text = io::read_file(svg);
  std::size_t curves = 0;
  for (std::size_t p = text.find("class=\"curve\""); p != std::string::npos; p = text.find("class=\"curve\"", p + 1)) ++curves;
  EXPECT_EQ(curves, 1u);
  EXPECT_EQ(text.rfind("<svg", 0), 0u);
}

TEST_F(CliRuns, PlotIsByteIdenticalAndParsesBack) {
  const fs::path a = kRoot / "a.svg";
  const fs::path b = kRoot / "b.svg";
  std::ostringstream out, err;
  ASSERT_EQ(cmd_plot({kRoot / "vae", kRoot / "st"}, a, out, err), kExitOk);
  ASSERT_EQ(cmd_plot({kRoot / "vae", kRoot / "st"}, b, out, err), kExitOk);
  const std::string text = io::read_file(a);
  EXPECT_EQ(text, io::read_file(b));

  // means over every (run, task) value per round, from the CSVs
  std::map<std::string, std::map<int, std::vector<double>>> vals;
  for (const char* m : {"vae", "st"}) {
    for (int u = 0; u < 2; ++u) {
      const auto c = io::read_csv(kRoot / m / ("run_" + std::to_string(u)) / "hv_curve.csv");
      for (const auto& r : c.rows) {
        vals[r[c.column("method")]][std::stoi(r[c.column("round")])].push_back(io::parse_double(r[c.column("hv")]));
      }
    }
  }
  const std::regex re("data-method=\"([^\"]+)\" data-values=\"([^\"]+)\"");
  int found = 0;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator(); ++it) {
    ++found;
    const auto ys = split_doubles((*it)[2]);
    const auto& rounds = vals.at((*it)[1]);
    ASSERT_EQ(ys.size(), rounds.size());
    for (const auto& [r, v] : rounds) {
      double mean = 0.0;
      for (double x : v) mean += x;
      EXPECT_NEAR(ys[static_cast<std::size_t>(r)], mean / static_cast<double>(v.size()), 1e-12);
    }
  }
  EXPECT_EQ(found, 2);
}

TEST(PlotCommand, MalformedOrMissingCsvIsUsageError) {
  const fs::path bad = kRoot / "malformed";
  fs::create_directories(bad);
  io::write_file(bad / "hv_curve.csv", "method,task,round,hv\npmt-mobo,0,zero,1.0\n");
  std::ostringstream out, err;
  EXPECT_EQ(cmd_plot({bad}, kRoot / "bad.svg", out, err), kExitUsage);
  io::write_file(bad / "hv_curve.csv", "method,round\npmt-mobo,0\n");
  EXPECT_EQ(cmd_plot({bad}, kRoot / "bad.svg", out, err), kExitUsage);
  EXPECT_EQ(cmd_plot({kRoot / "missing_dir"}, kRoot / "bad.svg", out, err), kExitUsage);
  EXPECT_EQ(run_binary("plot " + (kRoot / "missing_dir").string()), kExitUsage);
}

TEST(Theorem2Command, SingleTaskHasZeroGap) {
  const fs::path csv = kRoot / "t2_single.csv";
  EXPECT_EQ(run_binary("verify-theorem2 --trials 1 --k 1 --out " + csv.string()), kExitOk);
  const auto t = io::read_csv(csv);
  ASSERT_FALSE(t.rows.empty());
  for (const auto& r : t.rows) EXPECT_LE(std::abs(io::parse_double(r[t.column("gap")])), 1e-12);
}

TEST(Theorem2Command, DefaultTrialsPass) {
  Theorem2Options opt;
  std::ostringstream out, err;
  EXPECT_EQ(cmd_verify_theorem2(opt, out, err), kExitOk);
  EXPECT_NE(out.str().find("violations: 0"), std::string::npos);
}

TEST(Theorem2Command, RowCountIsTrialsTimesObjectivesTimesTasks) {
  Theorem2Options opt;
  opt.trials = 3;
  opt.task_counts = {4};
  opt.objective_counts = {3};
  opt.out = kRoot / "t2_rows.csv";
  std::ostringstream out, err;
  ASSERT_EQ(cmd_verify_theorem2(opt, out, err), kExitOk);
  EXPECT_EQ(io::read_csv(*opt.out).rows.size(), 3u * 3u * 4u);
}

TEST(Theorem2Command, UsageErrors) {
  EXPECT_EQ(run_binary("verify-theorem2 --trials 0"), kExitUsage);
  EXPECT_EQ(run_binary("verify-theorem2 --regularizer sigma3"), kExitUsage);
  EXPECT_EQ(run_binary(""), kExitUsage);
  EXPECT_EQ(run_binary("frobnicate"), kExitUsage);
  EXPECT_EQ(regularizer_from_string("inv_sigma2"), SchurRegularizer::inverse_noise_variance);
}
