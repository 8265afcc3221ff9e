#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "dlad/aggregate.hpp"
#include "dlad/client.hpp"

namespace dlad {

// Server-side model covering all L classes.
struct GlobalModel {
  ModelSpec spec;
  ModelParams params;
};

struct EpochMetric {
  int epoch = 0;
  double train_loss = 0.0;
  double train_agreement = 0.0;  // argmax match with the soft targets
  double test_accuracy = 0.0;
  double test_loss = 0.0;
};

// One stage-3 training run; exactly one metric record per epoch.
struct DistillationRun {
  AggregationMode mode = AggregationMode::Average;
  TrainingHyper hyper;
  std::vector<EpochMetric> epochs;
};

// Minimizes soft cross-entropy between the precomputed targets and the
// global model over pool minibatches; test accuracy is logged per epoch.
std::pair<GlobalModel, DistillationRun> train_global(
    const UnlabeledPool& pool, const SoftTargetSet& targets,
    const ModelSpec& spec, const TrainingHyper& hyper,
    const LabeledDataset& test, std::uint64_t seed);

// Classical supervised distillation: soft cross-entropy against the teacher
// plus lambda times one-hot cross-entropy against the labels. With
// lambda == 0 this reproduces train_global on the teacher's outputs
// bit-exactly under the same seed.
GlobalModel supervised_distill(const LabeledDataset& data,
                               const GlobalModel& teacher,
                               const ModelSpec& spec, double lambda,
                               const TrainingHyper& hyper, std::uint64_t seed);

struct GlobalRunResult {
  GlobalModel model;
  DistillationRun run;
};

// Runs the requested aggregation modes with identical pool, spec, hyper and
// seed, so the soft-target construction is the only varying factor. Oracle
// mode derives its class frequencies from the pool's hidden labels.
std::map<AggregationMode, GlobalRunResult> run_comparison(
    const UnlabeledPool& pool, const std::vector<ClientBundle>& bundles,
    const PartitionPlan& plan, const std::vector<AggregationMode>& modes,
    const ModelSpec& spec, const TrainingHyper& hyper, Temperature t,
    const LabeledDataset& test, std::uint64_t seed);

}  // namespace dlad
