#include "train_loop.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "dlad/adam.hpp"
#include "dlad/dataset.hpp"
#include "dlad/error.hpp"
#include "dlad/losses.hpp"

namespace dlad::internal {

namespace {

constexpr double kDivergenceCap = 1e6;

void check_loss(double loss, int epoch) {
  if (!std::isfinite(loss) || loss > kDivergenceCap) {
    throw TrainingDiverged(
        "training diverged at epoch " + std::to_string(epoch) + " (loss " +
            std::to_string(loss) + ")",
        epoch);
  }
}

std::vector<std::size_t> index_range(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

double argmax_agreement(const Tensor& pred, const Tensor& target) {
  std::size_t b = pred.rows(), n = pred.cols();
  std::size_t hits = 0;
  for (std::size_t i = 0; i < b; ++i) {
    std::size_t ap = 0, at = 0;
    for (std::size_t j = 1; j < n; ++j) {
      if (pred.at(i, j) > pred.at(i, ap)) ap = j;
      if (target.at(i, j) > target.at(i, at)) at = j;
    }
    hits += (ap == at);
  }
  return static_cast<double>(hits) / static_cast<double>(b);
}

}  // namespace

ModelParams fit_soft_targets(const ModelSpec& spec, ModelParams params,
                             const Tensor& features, const Tensor& targets,
                             const std::vector<int>* sup_labels, double lambda,
                             const TrainingHyper& hyper, Rng& rng,
                             const EpochFn& on_epoch) {
  hyper.validate();
  std::size_t n = features.rows();
  if (targets.rows() != n) {
    throw ShapeError("fit_soft_targets: " + std::to_string(targets.rows()) +
                     " target rows for " + std::to_string(n) + " samples");
  }
  const bool supervised = sup_labels != nullptr && lambda > 0.0;

  AdamState adam = adam_init(spec, AdamHyper{.lr = hyper.lr});
  std::vector<std::size_t> order = index_range(n);
  std::size_t bs = static_cast<std::size_t>(hyper.batch_size);

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    double acc_sum = 0.0;
    for (std::size_t start = 0; start < n; start += bs) {
      std::size_t stop = std::min(start + bs, n);
      std::vector<std::size_t> batch_idx(order.begin() + start,
                                         order.begin() + stop);
      Tensor x = gather_rows(features, batch_idx);
      Tensor t = gather_rows(targets, batch_idx);

      ForwardTrace trace = forward_trace(spec, params, x);
      double loss = soft_cross_entropy(t, trace.output);
      Tensor dlogits = loss_dlogits(trace.output, SoftTargetLoss{&t});
      if (supervised) {
        std::vector<int> batch_labels(batch_idx.size());
        for (std::size_t i = 0; i < batch_idx.size(); ++i) {
          batch_labels[i] = (*sup_labels)[batch_idx[i]];
        }
        Tensor onehot = one_hot(batch_labels, spec.output_dim);
        loss += lambda * soft_cross_entropy(onehot, trace.output);
        double inv_b = 1.0 / static_cast<double>(x.rows());
        for (std::size_t i = 0; i < dlogits.size(); ++i) {
          dlogits[i] += lambda * (trace.output[i] - onehot[i]) * inv_b;
        }
      }
      check_loss(loss, epoch);
      Gradients grads = backprop(spec, params, trace, dlogits);
      adam_step(params, grads, adam);

      double b = static_cast<double>(x.rows());
      loss_sum += loss * b;
      acc_sum += argmax_agreement(trace.output, t) * b;
    }
    if (on_epoch) {
      on_epoch(epoch, loss_sum / static_cast<double>(n),
               acc_sum / static_cast<double>(n), params);
    }
  }
  return params;
}

ModelParams fit_weighted_binary(const ModelSpec& spec, ModelParams params,
                                const Tensor& features, const Tensor& labels,
                                const Tensor& weights,
                                const TrainingHyper& hyper, Rng& rng,
                                const EpochFn& on_epoch) {
  hyper.validate();
  std::size_t n = features.rows();
  if (labels.size() != n || weights.size() != n) {
    throw ShapeError("fit_weighted_binary: label/weight length mismatch");
  }

  AdamState adam = adam_init(spec, AdamHyper{.lr = hyper.lr});
  std::vector<std::size_t> order = index_range(n);
  std::size_t bs = static_cast<std::size_t>(hyper.batch_size);

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    double acc_sum = 0.0;
    for (std::size_t start = 0; start < n; start += bs) {
      std::size_t stop = std::min(start + bs, n);
      std::vector<std::size_t> batch_idx(order.begin() + start,
                                         order.begin() + stop);
      Tensor x = gather_rows(features, batch_idx);
      Tensor y = Tensor::vec(batch_idx.size());
      Tensor w = Tensor::vec(batch_idx.size());
      for (std::size_t i = 0; i < batch_idx.size(); ++i) {
        y[i] = labels[batch_idx[i]];
        w[i] = weights[batch_idx[i]];
      }

      ForwardTrace trace = forward_trace(spec, params, x);
      WeightedBceLoss lspec{&y, &w};
      double loss = loss_value(trace.output, lspec);
      check_loss(loss, epoch);
      Tensor dlogits = loss_dlogits(trace.output, lspec);
      Gradients grads = backprop(spec, params, trace, dlogits);
      adam_step(params, grads, adam);

      std::size_t hits = 0;
      for (std::size_t i = 0; i < batch_idx.size(); ++i) {
        hits += (trace.output[i] >= 0.5) == (y[i] == 1.0);
      }
      double b = static_cast<double>(x.rows());
      loss_sum += loss * b;
      acc_sum += static_cast<double>(hits);
    }
    if (on_epoch) {
      on_epoch(epoch, loss_sum / static_cast<double>(n),
               acc_sum / static_cast<double>(n), params);
    }
  }
  return params;
}

}  // namespace dlad::internal
