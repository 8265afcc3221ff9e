#pragma once

#include <cstddef>

// Hot inner loops of the network engine. Every kernel exists twice: the
// OpenMP version used by the library, and a plain serial version under
// kernels::ref that the tests and the benchmark compare against. Both
// accumulate each output element over the same operands in the same order,
// so with contraction disabled the results are bit-identical.

namespace dlad::kernels {

// c[m x n] = a[m x k] * b[k x n], ascending-k accumulation per element.
void matmul(const double* a, const double* b, double* c, std::size_t m,
            std::size_t k, std::size_t n);

// c[m x n] = a^T * b with a[k x m], b[k x n].
void matmul_at(const double* a, const double* b, double* c, std::size_t m,
               std::size_t k, std::size_t n);

// c[m x n] = a * b^T with a[m x k], b[n x k].
void matmul_bt(const double* a, const double* b, double* c, std::size_t m,
               std::size_t k, std::size_t n);

// c[i][j] += bias[j]
void add_row_vector(double* c, const double* bias, std::size_t m,
                    std::size_t n);

// out[j] = sum_i a[i][j], ascending-i.
void col_sum(const double* a, double* out, std::size_t m, std::size_t n);

void relu(const double* z, double* out, std::size_t count);
void tanh_act(const double* z, double* out, std::size_t count);
// dz[i] = dpost[i] * act'(z[i])
void relu_grad(const double* z, const double* dpost, double* dz,
               std::size_t count);
void tanh_grad(const double* z, const double* dpost, double* dz,
               std::size_t count);

// Row-wise softmax with max subtraction; rows normalized by their own sum.
void softmax_rows(const double* z, double* p, std::size_t m, std::size_t n);
void sigmoid(const double* z, double* p, std::size_t count);

// out[i] = -sum_j t[i][j] * log(max(p[i][j], 1e-12)); one value per row.
void soft_ce_rows(const double* target, const double* pred, double* out,
                  std::size_t m, std::size_t n);

namespace ref {
void matmul(const double* a, const double* b, double* c, std::size_t m,
            std::size_t k, std::size_t n);
void matmul_at(const double* a, const double* b, double* c, std::size_t m,
               std::size_t k, std::size_t n);
void matmul_bt(const double* a, const double* b, double* c, std::size_t m,
               std::size_t k, std::size_t n);
void add_row_vector(double* c, const double* bias, std::size_t m,
                    std::size_t n);
void col_sum(const double* a, double* out, std::size_t m, std::size_t n);
void relu(const double* z, double* out, std::size_t count);
void tanh_act(const double* z, double* out, std::size_t count);
void relu_grad(const double* z, const double* dpost, double* dz,
               std::size_t count);
void tanh_grad(const double* z, const double* dpost, double* dz,
               std::size_t count);
void softmax_rows(const double* z, double* p, std::size_t m, std::size_t n);
void sigmoid(const double* z, double* p, std::size_t count);
void soft_ce_rows(const double* target, const double* pred, double* out,
                  std::size_t m, std::size_t n);
}  // namespace ref

}  // namespace dlad::kernels
