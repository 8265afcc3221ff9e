#include "dlad/client.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dlad/error.hpp"
#include "dlad/losses.hpp"
#include "train_loop.hpp"

namespace dlad {

void TrainingHyper::validate() const {
  if (epochs < 1) throw ValueError("TrainingHyper: epochs must be >= 1");
  if (batch_size < 1) throw ValueError("TrainingHyper: batch_size must be >= 1");
  if (!(lr > 0.0)) throw ValueError("TrainingHyper: lr must be > 0");
}

ClientBundle train_client(const LabeledDataset& client_data,
                          const ModelSpec& spec, const TrainingHyper& hyper,
                          std::uint64_t seed, int client_id,
                          const EpochFn& on_epoch) {
  client_data.validate();
  spec.validate();
  if (client_data.size() == 0) {
    throw ValueError("train_client: empty client dataset");
  }
  if (spec.head != Head::Softmax ||
      spec.output_dim != static_cast<std::size_t>(client_data.num_classes)) {
    throw ShapeError("train_client: spec must be a softmax model over " +
                     std::to_string(client_data.num_classes) + " classes");
  }

  Rng rng(seed);
  ModelParams params = init_params(spec, rng);
  Tensor targets = one_hot(client_data.labels, spec.output_dim);
  params = internal::fit_soft_targets(spec, std::move(params),
                                      client_data.features, targets, nullptr,
                                      0.0, hyper, rng, on_epoch);

  ClientBundle bundle;
  bundle.client_id = client_id;
  bundle.model_spec = spec;
  bundle.model_params = std::move(params);
  bundle.final_train_accuracy =
      evaluate_accuracy(spec, bundle.model_params, client_data);
  return bundle;
}

ClientBundle train_confidence_classifier(ClientBundle bundle,
                                         const Tensor& client_features,
                                         const UnlabeledPool& pool,
                                         const TrainingHyper& hyper,
                                         std::uint64_t seed,
                                         const EpochFn& on_epoch) {
  if (bundle.model_params.weights.empty()) {
    throw ValueError("train_confidence_classifier: client model not trained");
  }
  if (pool.size() == 0) {
    throw ValueError("train_confidence_classifier: empty pool");
  }
  if (client_features.cols() != bundle.model_spec.input_dim) {
    throw ShapeError("train_confidence_classifier: feature width mismatch");
  }

  // Same hidden stack, 1-unit sigmoid head.
  ModelSpec cls_spec;
  cls_spec.input_dim = bundle.model_spec.input_dim;
  cls_spec.hidden = bundle.model_spec.hidden;
  cls_spec.output_dim = 1;
  cls_spec.head = Head::Sigmoid;

  // Body weights start from the trained client model; the replaced head is
  // re-initialized (the original L-way head has no 1-unit counterpart).
  Rng rng(seed);
  ModelParams cls_params;
  std::size_t body_layers = cls_spec.hidden.size();
  for (std::size_t l = 0; l < body_layers; ++l) {
    cls_params.weights.push_back(bundle.model_params.weights[l]);
    cls_params.biases.push_back(bundle.model_params.biases[l]);
  }
  std::size_t head_in =
      body_layers == 0 ? cls_spec.input_dim : cls_spec.hidden.back().width;
  Tensor head_w = Tensor::matrix(head_in, 1);
  double scale = std::sqrt(1.0 / static_cast<double>(head_in));
  for (double& v : head_w.values) v = scale * rng.next_normal();
  cls_params.weights.push_back(std::move(head_w));
  cls_params.biases.push_back(Tensor::vec(1));

  // Positives: the client's own samples at weight 1.5. Negatives: the whole
  // pool at weight 1.
  std::size_t n_pos = client_features.rows();
  std::size_t n_neg = pool.size();
  std::size_t d = cls_spec.input_dim;
  Tensor features = Tensor::matrix(n_pos + n_neg, d);
  std::copy(client_features.data(), client_features.data() + n_pos * d,
            features.data());
  std::copy(pool.features().data(), pool.features().data() + n_neg * d,
            features.data() + n_pos * d);
  Tensor labels = Tensor::vec(n_pos + n_neg);
  Tensor weights = Tensor::vec(n_pos + n_neg);
  for (std::size_t i = 0; i < n_pos; ++i) {
    labels[i] = 1.0;
    weights[i] = 1.5;
  }
  for (std::size_t i = n_pos; i < n_pos + n_neg; ++i) {
    labels[i] = 0.0;
    weights[i] = 1.0;
  }

  cls_params = internal::fit_weighted_binary(cls_spec, std::move(cls_params),
                                             features, labels, weights, hyper,
                                             rng, on_epoch);
  bundle.classifier_spec = std::move(cls_spec);
  bundle.classifier_params = std::move(cls_params);
  return bundle;
}

Tensor batched_forward(const ModelSpec& spec, const ModelParams& params,
                       const Tensor& features) {
  constexpr std::size_t kChunk = 512;
  std::size_t n = features.rows(), d = features.cols();
  Tensor out = Tensor::matrix(n, spec.output_dim);
  for (std::size_t start = 0; start < n; start += kChunk) {
    std::size_t stop = std::min(start + kChunk, n);
    Tensor chunk = Tensor::matrix(stop - start, d);
    std::copy(features.data() + start * d, features.data() + stop * d,
              chunk.data());
    Tensor pred = forward(spec, params, chunk);
    std::copy(pred.data(), pred.data() + pred.size(),
              out.data() + start * spec.output_dim);
  }
  return out;
}

Evaluation evaluate(const ModelSpec& spec, const ModelParams& params,
                    const LabeledDataset& test) {
  test.validate();
  if (test.size() == 0) throw ValueError("evaluate: empty test set");
  Tensor pred = batched_forward(spec, params, test.features);
  std::size_t n = test.size(), L = spec.output_dim;
  std::size_t hits = 0;
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = pred.data() + i * L;
    std::size_t best = 0;
    for (std::size_t j = 1; j < L; ++j) {
      if (row[j] > row[best]) best = j;
    }
    hits += best == static_cast<std::size_t>(test.labels[i]);
    loss -= std::log(std::max(row[test.labels[i]], 1e-12));
  }
  return {static_cast<double>(hits) / static_cast<double>(n),
          loss / static_cast<double>(n)};
}

double evaluate_accuracy(const ModelSpec& spec, const ModelParams& params,
                         const LabeledDataset& test) {
  return evaluate(spec, params, test).accuracy;
}

}  // namespace dlad
