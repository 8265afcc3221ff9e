#pragma once

#include <cstddef>
#include <utility>
#include <variant>
#include <vector>

#include "dlad/rng.hpp"
#include "dlad/tensor.hpp"

namespace dlad {

enum class Activation { Relu, Tanh };
enum class Head { Softmax, Sigmoid };

struct LayerSpec {
  std::size_t width = 0;
  Activation act = Activation::Relu;
  bool operator==(const LayerSpec&) const = default;
};

// Feed-forward topology: input -> hidden stack -> linear output -> head.
// hidden may be empty (plain linear model). Sigmoid heads are single-unit.
struct ModelSpec {
  std::size_t input_dim = 0;
  std::vector<LayerSpec> hidden;
  std::size_t output_dim = 0;
  Head head = Head::Softmax;

  std::size_t layer_count() const { return hidden.size() + 1; }
  void validate() const;
  bool operator==(const ModelSpec&) const = default;
};

// Per-layer weight matrices [fan_in x fan_out] and bias vectors [fan_out].
struct ModelParams {
  std::vector<Tensor> weights;
  std::vector<Tensor> biases;

  bool matches(const ModelSpec& spec) const;
  bool operator==(const ModelParams&) const = default;
};

// Gradients share the parameter layout exactly.
using Gradients = ModelParams;

// W ~ N(0, 1/fan_in), biases zero. Weight draws are row-major in layer order.
ModelParams init_params(const ModelSpec& spec, Rng& rng);
ModelParams zeros_like(const ModelSpec& spec);

// Head-applied batch output [B x output_dim]. Softmax rows sum to 1 within
// 1e-9; sigmoid outputs lie in (0,1). Rejects batch width != input_dim.
Tensor forward(const ModelSpec& spec, const ModelParams& params,
               const Tensor& batch);

// Everything backprop needs: per-layer inputs and pre-activations.
// post[l] is the input of layer l (post[0] = batch); pre[l] its linear
// output; output is pre.back() with the head applied.
struct ForwardTrace {
  std::vector<Tensor> post;
  std::vector<Tensor> pre;
  Tensor output;
};

ForwardTrace forward_trace(const ModelSpec& spec, const ModelParams& params,
                           const Tensor& batch);

// Propagates a loss gradient w.r.t. the output-layer logits down to all
// parameters.
Gradients backprop(const ModelSpec& spec, const ModelParams& params,
                   const ForwardTrace& trace, const Tensor& dlogits);

// --- loss-kind plumbing for the public backward() entry point -------------

// Mean soft cross-entropy against row-stochastic targets (softmax head).
struct SoftTargetLoss {
  const Tensor* targets;
};

// Weighted mean binary cross-entropy (sigmoid head); labels in {0,1},
// weights positive, normalization by the weight sum.
struct WeightedBceLoss {
  const Tensor* labels;
  const Tensor* weights;
};

using LossSpec = std::variant<SoftTargetLoss, WeightedBceLoss>;

double loss_value(const Tensor& pred, const LossSpec& loss);
Tensor loss_dlogits(const Tensor& pred, const LossSpec& loss);

// Analytic gradients of the stated loss at (params, batch).
Gradients backward(const ModelSpec& spec, const ModelParams& params,
                   const Tensor& batch, const LossSpec& loss);

std::pair<double, Gradients> loss_and_gradients(const ModelSpec& spec,
                                                const ModelParams& params,
                                                const Tensor& batch,
                                                const LossSpec& loss);

}  // namespace dlad
