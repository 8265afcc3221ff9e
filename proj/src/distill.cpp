#include "dlad/distill.hpp"

#include <string>
#include <utility>

#include "dlad/error.hpp"
#include "train_loop.hpp"

namespace dlad {

std::pair<GlobalModel, DistillationRun> train_global(
    const UnlabeledPool& pool, const SoftTargetSet& targets,
    const ModelSpec& spec, const TrainingHyper& hyper,
    const LabeledDataset& test, std::uint64_t seed) {
  spec.validate();
  if (targets.targets.rows() != pool.size()) {
    throw ShapeError("train_global: " +
                     std::to_string(targets.targets.rows()) +
                     " target rows for pool of " + std::to_string(pool.size()));
  }
  if (targets.targets.cols() != spec.output_dim) {
    throw ShapeError("train_global: target width mismatch");
  }
  check_row_stochastic(targets.targets, 1e-6, "train_global targets");

  DistillationRun run;
  run.mode = targets.mode;
  run.hyper = hyper;
  run.epochs.reserve(hyper.epochs);

  GlobalModel model;
  model.spec = spec;

  Rng rng(seed);
  ModelParams params = init_params(spec, rng);
  // The hook only observes the post-epoch parameters; it consumes no
  // randomness, so runs with and without it evolve identically.
  auto on_epoch = [&](int epoch, double loss, double agreement,
                      const ModelParams& current) {
    Evaluation ev = evaluate(spec, current, test);
    run.epochs.push_back({epoch, loss, agreement, ev.accuracy, ev.loss});
  };
  params = internal::fit_soft_targets(spec, std::move(params),
                                      pool.features(), targets.targets,
                                      nullptr, 0.0, hyper, rng, on_epoch);
  model.params = std::move(params);
  return {std::move(model), std::move(run)};
}

GlobalModel supervised_distill(const LabeledDataset& data,
                               const GlobalModel& teacher,
                               const ModelSpec& spec, double lambda,
                               const TrainingHyper& hyper,
                               std::uint64_t seed) {
  spec.validate();
  data.validate();
  if (!(lambda >= 0.0)) {
    throw ValueError("supervised_distill: lambda must be >= 0");
  }
  if (teacher.spec.output_dim != spec.output_dim) {
    throw ShapeError("supervised_distill: teacher and student disagree on "
                     "output_dim");
  }
  Tensor teacher_targets =
      batched_forward(teacher.spec, teacher.params, data.features);

  Rng rng(seed);
  ModelParams params = init_params(spec, rng);
  params = internal::fit_soft_targets(
      spec, std::move(params), data.features, teacher_targets,
      lambda > 0.0 ? &data.labels : nullptr, lambda, hyper, rng, nullptr);

  GlobalModel model;
  model.spec = spec;
  model.params = std::move(params);
  return model;
}

std::map<AggregationMode, GlobalRunResult> run_comparison(
    const UnlabeledPool& pool, const std::vector<ClientBundle>& bundles,
    const PartitionPlan& plan, const std::vector<AggregationMode>& modes,
    const ModelSpec& spec, const TrainingHyper& hyper, Temperature t,
    const LabeledDataset& test, std::uint64_t seed) {
  std::map<AggregationMode, GlobalRunResult> results;

  // Hidden labels are consulted only when the oracle arm is requested.
  bool want_oracle = false;
  for (AggregationMode m : modes) want_oracle |= (m == AggregationMode::Oracle);
  ClassFrequencies pool_freq;
  if (want_oracle) pool_freq = class_frequencies(pool);

  for (AggregationMode mode : modes) {
    SoftTargetSet targets =
        build_soft_targets(pool, bundles, mode, t, &plan,
                           want_oracle ? &pool_freq : nullptr);
    auto [model, run] = train_global(pool, targets, spec, hyper, test, seed);
    results.emplace(mode, GlobalRunResult{std::move(model), std::move(run)});
  }
  return results;
}

}  // namespace dlad
