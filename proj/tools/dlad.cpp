// Command-line front end: validate configs, run experiments, summarize
// metrics files.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dlad/config.hpp"
#include "dlad/error.hpp"
#include "dlad/harness.hpp"
#include "dlad/metrics.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitTraining = 2;
constexpr int kExitIo = 3;

int classify_failure(const std::exception& e) {
  if (dynamic_cast<const dlad::ConfigError*>(&e)) return kExitConfig;
  if (dynamic_cast<const dlad::TrainingDiverged*>(&e)) return kExitTraining;
  if (dynamic_cast<const dlad::IoError*>(&e) ||
      dynamic_cast<const dlad::FormatError*>(&e)) {
    return kExitIo;
  }
  return kExitTraining;
}

void print_summary(const std::vector<dlad::SummaryRow>& rows) {
  std::printf("%-32s %-14s %12s %12s %s\n", "run", "entity", "accuracy",
              "final_loss", "flag");
  for (const auto& r : rows) {
    std::printf("%-32s %-14s %12.4f %12.4f %s\n", r.run_id.c_str(),
                r.entity.c_str(), r.median_accuracy, r.final_loss,
                r.insufficient_epochs ? "short" : "");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decentralized learning via adaptive distillation"};
  app.require_subcommand(1);

  std::string config_path, out_override, modes_override, metrics_path;
  std::uint64_t seed_override = 0;
  bool seed_set = false;

  CLI::App* run = app.add_subcommand("run", "run an experiment end to end");
  run->add_option("--config", config_path, "config file")->required();
  run->add_option("--seed", seed_override, "master seed override")
      ->each([&](const std::string&) { seed_set = true; });
  run->add_option("--out", out_override, "output directory override");
  run->add_option("--modes", modes_override,
                  "comma-separated subset of dlad,average,oracle");

  CLI::App* validate =
      app.add_subcommand("validate", "parse and validate a config file");
  validate->add_option("--config", config_path, "config file")->required();

  CLI::App* summarize_cmd =
      app.add_subcommand("summarize", "recompute the summary from a metrics CSV");
  summarize_cmd->add_option("--metrics", metrics_path, "metrics.csv path")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) {
      dlad::ExperimentConfig cfg = dlad::parse_config(config_path);
      std::printf("ok: %s (run id %s, %d clients, scheme %s)\n",
                  config_path.c_str(), cfg.effective_run_id().c_str(),
                  cfg.n_clients, dlad::to_string(cfg.scheme).c_str());
      return kExitOk;
    }
    if (summarize_cmd->parsed()) {
      auto records = dlad::read_metrics_csv(metrics_path);
      auto rows = dlad::summarize(records);
      print_summary(rows);
      return kExitOk;
    }
    // run
    dlad::ExperimentConfig cfg = dlad::parse_config(config_path);
    if (seed_set) cfg.master_seed = seed_override;
    if (!out_override.empty()) cfg.output_dir = out_override;
    if (!modes_override.empty()) {
      cfg.modes.clear();
      std::string token;
      std::stringstream ss(modes_override);
      while (std::getline(ss, token, ',')) {
        cfg.modes.push_back(dlad::aggregation_mode_from_string(token));
      }
      cfg.validate();
    }
    dlad::ExperimentResult result = dlad::run_experiment(cfg);
    print_summary(result.summary);
    std::printf("artifacts in %s\n", result.output_dir.string().c_str());
    return kExitOk;
  } catch (const dlad::ValueError& e) {
    // Bad CLI values (e.g. unknown mode) count as config problems.
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return classify_failure(e);
  }
}
