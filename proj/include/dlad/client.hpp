#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "dlad/adam.hpp"
#include "dlad/dataset.hpp"
#include "dlad/model.hpp"
#include "dlad/partition.hpp"

namespace dlad {

struct TrainingHyper {
  int epochs = 1;
  int batch_size = 64;
  double lr = 1e-3;
  void validate() const;
};

// Per-epoch progress callback: (epoch index, mean train loss, train
// accuracy, parameters after the epoch's updates). Observation only; the
// trained result does not depend on the hook.
using EpochFn =
    std::function<void(int, double, double, const ModelParams&)>;

// One client's frozen model plus its confidence classifier. Model params are
// written once by train_client and never touched again; the classifier slot
// is filled by train_confidence_classifier.
struct ClientBundle {
  int client_id = 0;
  ModelSpec model_spec;
  ModelParams model_params;
  std::optional<ModelSpec> classifier_spec;
  std::optional<ModelParams> classifier_params;
  ClassProbability class_probability;
  double final_train_accuracy = 0.0;
};

// Stage 1: one-hot cross-entropy over the client's own data.
ClientBundle train_client(const LabeledDataset& client_data,
                          const ModelSpec& spec, const TrainingHyper& hyper,
                          std::uint64_t seed, int client_id = 0,
                          const EpochFn& on_epoch = nullptr);

// Stage 2: binary discriminator between the client's data (label 1, sample
// weight 1.5) and the distillation pool (label 0, weight 1). The classifier
// reuses the client model's hidden stack and trained body weights; the
// replaced head is a fresh 1-unit sigmoid. Returns the bundle with the
// classifier slot filled; the client model itself is untouched.
ClientBundle train_confidence_classifier(ClientBundle bundle,
                                         const Tensor& client_features,
                                         const UnlabeledPool& pool,
                                         const TrainingHyper& hyper,
                                         std::uint64_t seed,
                                         const EpochFn& on_epoch = nullptr);

// Fraction of test samples whose argmax matches the label; ties break
// toward the lowest class index.
double evaluate_accuracy(const ModelSpec& spec, const ModelParams& params,
                         const LabeledDataset& test);

struct Evaluation {
  double accuracy = 0.0;
  double loss = 0.0;  // mean one-hot cross-entropy
};
Evaluation evaluate(const ModelSpec& spec, const ModelParams& params,
                    const LabeledDataset& test);

// Model outputs over a full matrix, computed in fixed-size row chunks.
Tensor batched_forward(const ModelSpec& spec, const ModelParams& params,
                       const Tensor& features);

}  // namespace dlad
