#pragma once

#include "dlad/tensor.hpp"

namespace dlad {

// Mean over the batch of -sum_j target[i][j] * log(pred[i][j]), with
// predictions clamped to [1e-12, 1] before the log. Both arguments must be
// row-stochastic within 1e-6.
double soft_cross_entropy(const Tensor& target, const Tensor& pred);

// Weighted mean of -[y log p + (1-y) log(1-p)], normalized by the weight
// sum. pred is [B x 1] or [B]; labels in {0,1}; weights strictly positive.
// Predictions are clamped to [1e-12, 1 - 1e-12].
double weighted_binary_cross_entropy(const Tensor& pred, const Tensor& labels,
                                     const Tensor& weights);

// One-hot rows for integer labels; the supervised loss reduces to
// soft_cross_entropy against these.
Tensor one_hot(const std::vector<int>& labels, std::size_t num_classes);

}  // namespace dlad
