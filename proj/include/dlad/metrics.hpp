#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace dlad {

// One per-epoch observation. stage is client|classifier|global; entity is
// "client_<id>" for the first two stages and the aggregation mode for the
// global stage; split is train|test.
struct MetricsRecord {
  std::string run_id;
  std::string stage;
  std::string entity;
  int epoch = 0;
  std::string split;
  double loss = 0.0;
  double accuracy = 0.0;
};

// metrics CSV, schema v1: header row mandatory, columns exactly
// run_id,stage,entity,epoch,split,loss,accuracy; floats at 9 significant
// digits.
void write_metrics_csv(const std::filesystem::path& path,
                       const std::vector<MetricsRecord>& records);
std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path& path);

struct SummaryRow {
  std::string run_id;
  std::string entity;
  double median_accuracy = 0.0;  // median of the last (up to) 10 test epochs
  double final_loss = 0.0;       // last train-split loss
  bool insufficient_epochs = false;  // fewer than 10 test epochs available
};

// One row per entity that has test-split records, in first-appearance
// order. Entities with fewer than 10 test epochs use all available epochs
// and set the flag.
std::vector<SummaryRow> summarize(const std::vector<MetricsRecord>& records);

void write_summary_csv(const std::filesystem::path& path,
                       const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> read_summary_csv(const std::filesystem::path& path);

}  // namespace dlad
