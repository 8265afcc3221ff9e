#include "dlad/model.hpp"

#include <cmath>
#include <string>

#include "dlad/error.hpp"
#include "dlad/kernels.hpp"
#include "dlad/losses.hpp"

namespace dlad {

void ModelSpec::validate() const {
  if (input_dim == 0) throw ValueError("ModelSpec: input_dim must be positive");
  if (output_dim == 0) {
    throw ValueError("ModelSpec: output_dim must be positive");
  }
  for (const LayerSpec& l : hidden) {
    if (l.width == 0) throw ValueError("ModelSpec: zero-width hidden layer");
  }
  if (head == Head::Sigmoid && output_dim != 1) {
    throw ValueError("ModelSpec: sigmoid head requires output_dim == 1");
  }
}

bool ModelParams::matches(const ModelSpec& spec) const {
  if (weights.size() != spec.layer_count() ||
      biases.size() != spec.layer_count()) {
    return false;
  }
  std::size_t in = spec.input_dim;
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    std::size_t out =
        l < spec.hidden.size() ? spec.hidden[l].width : spec.output_dim;
    if (weights[l].shape != std::vector<std::size_t>{in, out}) return false;
    if (biases[l].shape != std::vector<std::size_t>{out}) return false;
    in = out;
  }
  return true;
}

ModelParams init_params(const ModelSpec& spec, Rng& rng) {
  spec.validate();
  ModelParams p;
  std::size_t in = spec.input_dim;
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    std::size_t out =
        l < spec.hidden.size() ? spec.hidden[l].width : spec.output_dim;
    Tensor w = Tensor::matrix(in, out);
    double scale = std::sqrt(1.0 / static_cast<double>(in));
    for (double& v : w.values) v = scale * rng.next_normal();
    p.weights.push_back(std::move(w));
    p.biases.push_back(Tensor::vec(out));
    in = out;
  }
  return p;
}

ModelParams zeros_like(const ModelSpec& spec) {
  spec.validate();
  ModelParams p;
  std::size_t in = spec.input_dim;
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    std::size_t out =
        l < spec.hidden.size() ? spec.hidden[l].width : spec.output_dim;
    p.weights.push_back(Tensor::matrix(in, out));
    p.biases.push_back(Tensor::vec(out));
    in = out;
  }
  return p;
}

namespace {

void check_batch(const ModelSpec& spec, const ModelParams& params,
                 const Tensor& batch) {
  if (batch.ndim() != 2 || batch.cols() != spec.input_dim) {
    throw ShapeError(
        "forward: batch is " +
        (batch.ndim() == 2 ? std::to_string(batch.rows()) + "x" +
                                 std::to_string(batch.cols())
                           : std::to_string(batch.ndim()) + "-d") +
        ", model expects input_dim " + std::to_string(spec.input_dim));
  }
  if (!params.matches(spec)) {
    throw ShapeError("forward: params do not match spec");
  }
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  std::size_t m = x.rows(), k = x.cols(), n = w.cols();
  Tensor z = Tensor::matrix(m, n);
  kernels::matmul(x.data(), w.data(), z.data(), m, k, n);
  kernels::add_row_vector(z.data(), b.data(), m, n);
  return z;
}

Tensor apply_activation(const Tensor& z, Activation act) {
  Tensor out = Tensor::zeros(z.shape);
  if (act == Activation::Relu) {
    kernels::relu(z.data(), out.data(), z.size());
  } else {
    kernels::tanh_act(z.data(), out.data(), z.size());
  }
  return out;
}

Tensor apply_head(const Tensor& logits, Head head) {
  Tensor out = Tensor::zeros(logits.shape);
  if (head == Head::Softmax) {
    kernels::softmax_rows(logits.data(), out.data(), logits.rows(),
                          logits.cols());
  } else {
    kernels::sigmoid(logits.data(), out.data(), logits.size());
  }
  return out;
}

}  // namespace

ForwardTrace forward_trace(const ModelSpec& spec, const ModelParams& params,
                           const Tensor& batch) {
  spec.validate();
  check_batch(spec, params, batch);
  ForwardTrace trace;
  trace.post.push_back(batch);
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    Tensor z = linear(trace.post.back(), params.weights[l], params.biases[l]);
    if (l < spec.hidden.size()) {
      trace.post.push_back(apply_activation(z, spec.hidden[l].act));
    }
    trace.pre.push_back(std::move(z));
  }
  trace.output = apply_head(trace.pre.back(), spec.head);
  check_finite(trace.output, "forward output");
  return trace;
}

Tensor forward(const ModelSpec& spec, const ModelParams& params,
               const Tensor& batch) {
  return forward_trace(spec, params, batch).output;
}

Gradients backprop(const ModelSpec& spec, const ModelParams& params,
                   const ForwardTrace& trace, const Tensor& dlogits) {
  Gradients grads = zeros_like(spec);
  Tensor g = dlogits;
  for (std::size_t l = spec.layer_count(); l-- > 0;) {
    const Tensor& input = trace.post[l];
    std::size_t b = g.rows(), in = input.cols(), out = g.cols();
    kernels::matmul_at(input.data(), g.data(), grads.weights[l].data(), in, b,
                       out);
    kernels::col_sum(g.data(), grads.biases[l].data(), b, out);
    if (l > 0) {
      const Tensor& w = params.weights[l];
      Tensor dpost = Tensor::matrix(b, in);
      kernels::matmul_bt(g.data(), w.data(), dpost.data(), b, out, in);
      const Tensor& z = trace.pre[l - 1];
      Tensor dz = Tensor::matrix(b, in);
      if (spec.hidden[l - 1].act == Activation::Relu) {
        kernels::relu_grad(z.data(), dpost.data(), dz.data(), dz.size());
      } else {
        kernels::tanh_grad(z.data(), dpost.data(), dz.data(), dz.size());
      }
      g = std::move(dz);
    }
  }
  for (const Tensor& w : grads.weights) check_finite(w, "weight gradient");
  return grads;
}

double loss_value(const Tensor& pred, const LossSpec& loss) {
  if (const auto* soft = std::get_if<SoftTargetLoss>(&loss)) {
    return soft_cross_entropy(*soft->targets, pred);
  }
  const auto& bce = std::get<WeightedBceLoss>(loss);
  return weighted_binary_cross_entropy(pred, *bce.labels, *bce.weights);
}

Tensor loss_dlogits(const Tensor& pred, const LossSpec& loss) {
  if (const auto* soft = std::get_if<SoftTargetLoss>(&loss)) {
    // Softmax + cross-entropy: d/dz = (p - t) / B.
    const Tensor& t = *soft->targets;
    if (t.shape != pred.shape) {
      throw ShapeError("loss_dlogits: target shape mismatch");
    }
    Tensor d = Tensor::zeros(pred.shape);
    double inv_b = 1.0 / static_cast<double>(pred.rows());
    for (std::size_t i = 0; i < pred.size(); ++i) {
      d[i] = (pred[i] - t[i]) * inv_b;
    }
    return d;
  }
  // Sigmoid + weighted BCE: d/dz_i = w_i (p_i - y_i) / sum(w).
  const auto& bce = std::get<WeightedBceLoss>(loss);
  const Tensor& y = *bce.labels;
  const Tensor& w = *bce.weights;
  if (y.size() != pred.size() || w.size() != pred.size()) {
    throw ShapeError("loss_dlogits: label/weight length mismatch");
  }
  double weight_sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) weight_sum += w[i];
  Tensor d = Tensor::zeros(pred.shape);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    d[i] = w[i] * (pred[i] - y[i]) / weight_sum;
  }
  return d;
}

std::pair<double, Gradients> loss_and_gradients(const ModelSpec& spec,
                                                const ModelParams& params,
                                                const Tensor& batch,
                                                const LossSpec& loss) {
  ForwardTrace trace = forward_trace(spec, params, batch);
  double value = loss_value(trace.output, loss);
  Tensor dlogits = loss_dlogits(trace.output, loss);
  return {value, backprop(spec, params, trace, dlogits)};
}

Gradients backward(const ModelSpec& spec, const ModelParams& params,
                   const Tensor& batch, const LossSpec& loss) {
  return loss_and_gradients(spec, params, batch, loss).second;
}

}  // namespace dlad
