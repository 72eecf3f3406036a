#include "pmtmobo/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace cli = pmtmobo::cli;

int main(int argc, char** argv) {
  CLI::App app{"Parametric multi-task multi-objective Bayesian optimization"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out;
  std::uint64_t seed = 0;
  auto* run = app.add_subcommand("run", "Run U seeded optimizations from a JSON config");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--out", out, "Output directory (overrides output_dir)");
  run->add_option("--seed", seed, "Base seed (overrides seed)");

  std::string run_dir;
  cli::EvalInverseOptions inv;
  auto* evi = app.add_subcommand("eval-inverse", "Score a run's inverse model on unseen tasks");
  evi->add_option("run_dir", run_dir, "Run directory containing generator.json")->required();
  evi->add_option("--w", inv.W, "Number of unseen tasks")->capture_default_str();
  evi->add_option("--s", inv.S, "Preference queries per task")->capture_default_str();
  evi->add_option("--seed", inv.seed, "Seed for tasks, preferences and sampling")->capture_default_str();
  evi->add_flag("--baselines", inv.baselines, "Also score uniform and untrained-generator baselines");

  cli::Theorem2Options t2;
  std::string t2_out;
  std::string regularizer;
  auto* thm = app.add_subcommand("verify-theorem2", "Check joint vs single-task information gain on random designs");
  thm->add_option("--trials", t2.trials, "Number of random trials")->capture_default_str();
  thm->add_option("--seed", t2.seed, "Seed")->capture_default_str();
  thm->add_option("--out", t2_out, "CSV report path");
  thm->add_option("--k", t2.task_counts, "Restrict task counts");
  thm->add_option("--t", t2.design_sizes, "Restrict per-task design sizes");
  thm->add_option("--m", t2.objective_counts, "Restrict objective counts");
  thm->add_option("--regularizer", regularizer, "sigma2 or inv_sigma2");

  std::vector<std::string> plot_dirs;
  std::string plot_out = "hv_curve.svg";
  auto* plot = app.add_subcommand("plot", "Render mean HV vs round with +-1 std bands as SVG");
  plot->add_option("run_dirs", plot_dirs, "Run or experiment directories")->required();
  plot->add_option("--out", plot_out, "SVG path")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitUsage;
  }

  if (*run) {
    cli::RunOverrides ov;
    if (run->count("--out")) ov.out = out;
    if (run->count("--seed")) ov.seed = seed;
    return cli::cmd_run(config_path, ov, std::cout, std::cerr);
  }
  if (*evi) return cli::cmd_eval_inverse(run_dir, inv, std::cout, std::cerr);
  if (*thm) {
    if (!t2_out.empty()) t2.out = t2_out;
    if (!regularizer.empty()) {
      try {
        t2.regularizer = cli::regularizer_from_string(regularizer);
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kExitUsage;
      }
    }
    return cli::cmd_verify_theorem2(t2, std::cout, std::cerr);
  }
  std::vector<std::filesystem::path> dirs(plot_dirs.begin(), plot_dirs.end());
  return cli::cmd_plot(dirs, plot_out, std::cout, std::cerr);
}
