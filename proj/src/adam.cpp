#include "dlad/adam.hpp"

#include <cmath>

#include "dlad/error.hpp"

namespace dlad {

AdamState adam_init(const ModelSpec& spec, AdamHyper hyper) {
  AdamState s;
  s.m = zeros_like(spec);
  s.v = zeros_like(spec);
  s.hyper = hyper;
  return s;
}

namespace {

void update_tensor(Tensor& p, const Tensor& g, Tensor& m, Tensor& v,
                   const AdamHyper& h, double bc1, double bc2) {
  if (p.shape != g.shape) throw ShapeError("adam_step: gradient shape mismatch");
  for (std::size_t i = 0; i < p.size(); ++i) {
    m[i] = h.beta1 * m[i] + (1.0 - h.beta1) * g[i];
    v[i] = h.beta2 * v[i] + (1.0 - h.beta2) * g[i] * g[i];
    double mhat = m[i] / bc1;
    double vhat = v[i] / bc2;
    p[i] -= h.lr * mhat / (std::sqrt(vhat) + h.epsilon);
  }
}

}  // namespace

void adam_step(ModelParams& params, const Gradients& grads, AdamState& state) {
  if (params.weights.size() != grads.weights.size() ||
      params.biases.size() != grads.biases.size()) {
    throw ShapeError("adam_step: layer count mismatch");
  }
  state.step += 1;
  double t = static_cast<double>(state.step);
  double bc1 = 1.0 - std::pow(state.hyper.beta1, t);
  double bc2 = 1.0 - std::pow(state.hyper.beta2, t);
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    update_tensor(params.weights[l], grads.weights[l], state.m.weights[l],
                  state.v.weights[l], state.hyper, bc1, bc2);
    update_tensor(params.biases[l], grads.biases[l], state.m.biases[l],
                  state.v.biases[l], state.hyper, bc1, bc2);
  }
}

}  // namespace dlad
