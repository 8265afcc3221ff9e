#include "dlad/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dlad/error.hpp"
#include "dlad/kernels.hpp"

namespace dlad {

double soft_cross_entropy(const Tensor& target, const Tensor& pred) {
  if (target.ndim() != 2 || pred.ndim() != 2 ||
      target.shape != pred.shape) {
    throw ShapeError("soft_cross_entropy: target/pred shape mismatch");
  }
  check_row_stochastic(target, 1e-6, "soft_cross_entropy target");
  check_row_stochastic(pred, 1e-6, "soft_cross_entropy pred");

  std::size_t m = pred.rows(), n = pred.cols();
  std::vector<double> per_row(m);
  kernels::soft_ce_rows(target.data(), pred.data(), per_row.data(), m, n);
  double total = 0.0;
  for (double v : per_row) total += v;
  return total / static_cast<double>(m);
}

double weighted_binary_cross_entropy(const Tensor& pred, const Tensor& labels,
                                     const Tensor& weights) {
  std::size_t b = pred.size();
  if (labels.size() != b || weights.size() != b) {
    throw ShapeError("weighted_binary_cross_entropy: length mismatch");
  }
  double weight_sum = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    double w = weights[i];
    if (!(w > 0.0)) {
      throw ValueError("weighted_binary_cross_entropy: nonpositive weight at " +
                       std::to_string(i));
    }
    double y = labels[i];
    if (y != 0.0 && y != 1.0) {
      throw ValueError("weighted_binary_cross_entropy: label not in {0,1} at " +
                       std::to_string(i));
    }
    double p = std::clamp(pred[i], 1e-12, 1.0 - 1e-12);
    total += w * -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
    weight_sum += w;
  }
  return total / weight_sum;
}

Tensor one_hot(const std::vector<int>& labels, std::size_t num_classes) {
  Tensor t = Tensor::matrix(labels.size(), num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    int y = labels[i];
    if (y < 0 || static_cast<std::size_t>(y) >= num_classes) {
      throw DataError("one_hot: label " + std::to_string(y) +
                      " outside 0.." + std::to_string(num_classes - 1));
    }
    t.at(i, static_cast<std::size_t>(y)) = 1.0;
  }
  return t;
}

}  // namespace dlad
