#pragma once

#include <cstdint>

#include "dlad/model.hpp"

namespace dlad {

struct AdamHyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First/second moment accumulators shaped like the parameters they drive.
struct AdamState {
  std::uint64_t step = 0;
  ModelParams m;
  ModelParams v;
  AdamHyper hyper;
};

AdamState adam_init(const ModelSpec& spec, AdamHyper hyper = {});

// In-place update with bias correction:
//   m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2;  t <- t+1
//   p <- p - lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
void adam_step(ModelParams& params, const Gradients& grads, AdamState& state);

}  // namespace dlad
