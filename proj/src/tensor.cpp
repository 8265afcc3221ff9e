#include "dlad/tensor.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "dlad/error.hpp"

namespace dlad {

namespace {
std::size_t shape_product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}
}  // namespace

Tensor::Tensor(std::vector<std::size_t> s, std::vector<double> v)
    : shape(std::move(s)), values(std::move(v)) {
  if (shape_product(shape) != values.size()) {
    throw ShapeError("tensor value count " + std::to_string(values.size()) +
                     " does not match shape product " +
                     std::to_string(shape_product(shape)));
  }
}

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
  std::size_t n = shape_product(shape);
  return Tensor(std::move(shape), std::vector<double>(n, 0.0));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols) {
  return zeros({rows, cols});
}

Tensor Tensor::vec(std::size_t n) { return zeros({n}); }

std::size_t Tensor::rows() const {
  if (shape.size() != 2) throw ShapeError("rows() on non-matrix tensor");
  return shape[0];
}

std::size_t Tensor::cols() const {
  if (shape.size() != 2) throw ShapeError("cols() on non-matrix tensor");
  return shape[1];
}

double& Tensor::at(std::size_t i, std::size_t j) {
  return values[i * shape[1] + j];
}

double Tensor::at(std::size_t i, std::size_t j) const {
  return values[i * shape[1] + j];
}

bool Tensor::all_finite() const {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void check_finite(const Tensor& t, const char* what) {
  if (!t.all_finite()) {
    throw ValueError(std::string(what) + ": non-finite value");
  }
}

void check_row_stochastic(const Tensor& t, double tol, const char* what) {
  std::size_t m = t.rows(), n = t.cols();
  for (std::size_t i = 0; i < m; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double v = t.at(i, j);
      if (!(v >= 0.0)) {
        throw ValueError(std::string(what) + ": negative entry in row " +
                         std::to_string(i));
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol) {
      throw ValueError(std::string(what) + ": row " + std::to_string(i) +
                       " sums to " + std::to_string(sum) + ", not 1");
    }
  }
}

}  // namespace dlad
