#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "dlad/config.hpp"
#include "dlad/metrics.hpp"

namespace dlad {

struct ExperimentResult {
  std::vector<MetricsRecord> records;
  std::vector<SummaryRow> summary;
  std::filesystem::path output_dir;
  // Total audited hidden-label reads across the run; stays 0 unless the
  // oracle arm ran.
  std::uint64_t hidden_label_reads = 0;
  // Client model hashes identical before and after stage 3.
  bool client_params_frozen = false;
};

// Executes split -> partition plan -> stage 1 (clients, parallel) ->
// stage 2 (classifiers, parallel) -> soft targets + stage 3 per mode, and
// writes metrics.csv, summary.csv, manifest.json and checkpoints under
// config.output_dir. Everything is a pure function of (config, master_seed);
// reruns produce byte-identical CSV files.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace dlad
