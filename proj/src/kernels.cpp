#include "dlad/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

// Parallel-for thresholds; below them the OpenMP versions run single
// threaded to avoid fork overhead on tiny batches.
namespace {
constexpr std::size_t kMatmulFlopCutoff = 1u << 15;
constexpr std::size_t kElemCutoff = 1u << 14;
}  // namespace

namespace dlad::kernels {

// ---------------------------------------------------------------------------
// serial reference

namespace ref {

void matmul(const double* a, const double* b, double* c, std::size_t m,
            std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t t = 0; t < k; ++t) {
        acc += a[i * k + t] * b[t * n + j];
      }
      c[i * n + j] = acc;
    }
  }
}

void matmul_at(const double* a, const double* b, double* c, std::size_t m,
               std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t t = 0; t < k; ++t) {
        acc += a[t * m + i] * b[t * n + j];
      }
      c[i * n + j] = acc;
    }
  }
}

void matmul_bt(const double* a, const double* b, double* c, std::size_t m,
               std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t t = 0; t < k; ++t) {
        acc += a[i * k + t] * b[j * k + t];
      }
      c[i * n + j] = acc;
    }
  }
}

void add_row_vector(double* c, const double* bias, std::size_t m,
                    std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) c[i * n + j] += bias[j];
  }
}

void col_sum(const double* a, double* out, std::size_t m, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += a[i * n + j];
    out[j] = acc;
  }
}

void relu(const double* z, double* out, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) out[i] = z[i] > 0.0 ? z[i] : 0.0;
}

void tanh_act(const double* z, double* out, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) out[i] = std::tanh(z[i]);
}

void relu_grad(const double* z, const double* dpost, double* dz,
               std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) {
    dz[i] = z[i] > 0.0 ? dpost[i] : 0.0;
  }
}

void tanh_grad(const double* z, const double* dpost, double* dz,
               std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) {
    double t = std::tanh(z[i]);
    dz[i] = dpost[i] * (1.0 - t * t);
  }
}

void softmax_rows(const double* z, double* p, std::size_t m, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* zi = z + i * n;
    double* pi = p + i * n;
    double mx = zi[0];
    for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, zi[j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      pi[j] = std::exp(zi[j] - mx);
      sum += pi[j];
    }
    for (std::size_t j = 0; j < n; ++j) pi[j] /= sum;
  }
}

void sigmoid(const double* z, double* p, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) p[i] = 1.0 / (1.0 + std::exp(-z[i]));
}

void soft_ce_rows(const double* target, const double* pred, double* out,
                  std::size_t m, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double p = std::max(pred[i * n + j], 1e-12);
      acc -= target[i * n + j] * std::log(p);
    }
    out[i] = acc;
  }
}

}  // namespace ref

// ---------------------------------------------------------------------------
// OpenMP versions. Each output element is owned by exactly one iteration of
// the parallel loop and accumulated in the same ascending order as the
// reference, so the results do not depend on the thread count.

void matmul(const double* a, const double* b, double* c, std::size_t m,
            std::size_t k, std::size_t n) {
  const bool par = m * n * k >= kMatmulFlopCutoff;
#pragma omp parallel for schedule(static) if (par)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(m); ++i) {
    double* ci = c + i * n;
    for (std::size_t j = 0; j < n; ++j) ci[j] = 0.0;
    for (std::size_t t = 0; t < k; ++t) {
      const double ait = a[i * k + t];
      const double* bt = b + t * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += ait * bt[j];
    }
  }
}

void matmul_at(const double* a, const double* b, double* c, std::size_t m,
               std::size_t k, std::size_t n) {
  const bool par = m * n * k >= kMatmulFlopCutoff;
#pragma omp parallel for schedule(static) if (par)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(m); ++i) {
    double* ci = c + i * n;
    for (std::size_t j = 0; j < n; ++j) ci[j] = 0.0;
    for (std::size_t t = 0; t < k; ++t) {
      const double ati = a[t * m + i];
      const double* bt = b + t * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += ati * bt[j];
    }
  }
}

void matmul_bt(const double* a, const double* b, double* c, std::size_t m,
               std::size_t k, std::size_t n) {
  const bool par = m * n * k >= kMatmulFlopCutoff;
#pragma omp parallel for schedule(static) if (par)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(m); ++i) {
    const double* ai = a + i * k;
    double* ci = c + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double* bj = b + j * k;
      double acc = 0.0;
      for (std::size_t t = 0; t < k; ++t) acc += ai[t] * bj[t];
      ci[j] = acc;
    }
  }
}

void add_row_vector(double* c, const double* bias, std::size_t m,
                    std::size_t n) {
  const bool par = m * n >= kElemCutoff;
#pragma omp parallel for schedule(static) if (par)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(m); ++i) {
    double* ci = c + i * n;
    for (std::size_t j = 0; j < n; ++j) ci[j] += bias[j];
  }
}

void col_sum(const double* a, double* out, std::size_t m, std::size_t n) {
  const bool par = m * n >= kElemCutoff;
#pragma omp parallel for schedule(static) if (par)
  for (std::int64_t j = 0; j < static_cast<std::int64_t>(n); ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += a[i * n + j];
    out[j] = acc;
  }
}

void relu(const double* z, double* out, std::size_t count) {
  const bool par = count >= kElemCutoff;
#pragma omp parallel for schedule(static) if (par)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) {
    out[i] = z[i] > 0.0 ? z[i] : 0.0;
  }
}

void tanh_act(const double* z, double* out, std::size_t count) {
  const bool par = count >= kElemCutoff;
#pragma omp parallel for schedule(static) if (par)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) {
    out[i] = std::tanh(z[i]);
  }
}

void relu_grad(const double* z, const double* dpost, double* dz,
               std::size_t count) {
  const bool par = count >= kElemCutoff;
#pragma omp parallel for schedule(static) if (par)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) {
    dz[i] = z[i] > 0.0 ? dpost[i] : 0.0;
  }
}

void tanh_grad(const double* z, const double* dpost, double* dz,
               std::size_t count) {
  const bool par = count >= kElemCutoff;
#pragma omp parallel for schedule(static) if (par)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) {
    double t = std::tanh(z[i]);
    dz[i] = dpost[i] * (1.0 - t * t);
  }
}

void softmax_rows(const double* z, double* p, std::size_t m, std::size_t n) {
  const bool par = m * n >= kElemCutoff;
#pragma omp parallel for schedule(static) if (par)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(m); ++i) {
    const double* zi = z + i * n;
    double* pi = p + i * n;
    double mx = zi[0];
    for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, zi[j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      pi[j] = std::exp(zi[j] - mx);
      sum += pi[j];
    }
    for (std::size_t j = 0; j < n; ++j) pi[j] /= sum;
  }
}

void sigmoid(const double* z, double* p, std::size_t count) {
  const bool par = count >= kElemCutoff;
#pragma omp parallel for schedule(static) if (par)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) {
    p[i] = 1.0 / (1.0 + std::exp(-z[i]));
  }
}

void soft_ce_rows(const double* target, const double* pred, double* out,
                  std::size_t m, std::size_t n) {
  const bool par = m * n >= kElemCutoff;
#pragma omp parallel for schedule(static) if (par)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(m); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double p = std::max(pred[i * n + j], 1e-12);
      acc -= target[i * n + j] * std::log(p);
    }
    out[i] = acc;
  }
}

}  // namespace dlad::kernels
