#pragma once

// Internal minibatch Adam loops shared by the client, classifier and global
// training stages. Not part of the installed API.

#include <cstdint>
#include <vector>

#include "dlad/client.hpp"
#include "dlad/model.hpp"
#include "dlad/rng.hpp"

namespace dlad::internal {

// Soft-target objective with an optional supervised cross-entropy term
// weighted by lambda. When lambda == 0 the supervised inputs are ignored
// entirely, so a lambda-0 call is operation-for-operation identical to one
// without labels.
ModelParams fit_soft_targets(const ModelSpec& spec, ModelParams params,
                             const Tensor& features, const Tensor& targets,
                             const std::vector<int>* sup_labels, double lambda,
                             const TrainingHyper& hyper, Rng& rng,
                             const EpochFn& on_epoch);

// Weighted binary cross-entropy objective for the confidence classifiers.
ModelParams fit_weighted_binary(const ModelSpec& spec, ModelParams params,
                                const Tensor& features, const Tensor& labels,
                                const Tensor& weights,
                                const TrainingHyper& hyper, Rng& rng,
                                const EpochFn& on_epoch);

}  // namespace dlad::internal
