#pragma once

#include <cstddef>
#include <vector>

namespace dlad {

// Dense row-major 64-bit float array. The 2-d accessors assume a matrix
// shape; 1-d tensors are used for labels, biases and per-sample vectors.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> values;

  Tensor() = default;
  Tensor(std::vector<std::size_t> s, std::vector<double> v);

  static Tensor zeros(std::vector<std::size_t> shape);
  static Tensor matrix(std::size_t rows, std::size_t cols);
  static Tensor vec(std::size_t n);

  std::size_t size() const { return values.size(); }
  std::size_t ndim() const { return shape.size(); }
  std::size_t rows() const;
  std::size_t cols() const;

  double& at(std::size_t i, std::size_t j);
  double at(std::size_t i, std::size_t j) const;
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  double* data() { return values.data(); }
  const double* data() const { return values.data(); }

  bool all_finite() const;
  bool operator==(const Tensor&) const = default;
};

// Throws ValueError naming `what` if any entry is NaN or infinite.
void check_finite(const Tensor& t, const char* what);

// Throws ValueError unless every row sums to 1 within `tol` with entries >= 0.
void check_row_stochastic(const Tensor& t, double tol, const char* what);

}  // namespace dlad
