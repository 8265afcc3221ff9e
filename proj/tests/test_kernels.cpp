#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "dlad/kernels.hpp"
#include "dlad/rng.hpp"

namespace k = dlad::kernels;

namespace {

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  dlad::Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = 2.0 * rng.next_double() - 1.0;
  return v;
}

bool bit_identical(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("matmul matches a hand example") {
  std::vector<double> a{1, 2, 3, 4};  // [[1,2],[3,4]]
  std::vector<double> b{5, 6, 7, 8};  // [[5,6],[7,8]]
  std::vector<double> c(4);
  k::matmul(a.data(), b.data(), c.data(), 2, 2, 2);
  CHECK(c == std::vector<double>{19, 22, 43, 50});
}

TEST_CASE("OpenMP kernels are bit-identical to the serial reference") {
  // Shapes straddle the parallelization cutoffs in both directions.
  struct Shape {
    std::size_t m, k, n;
  };
  for (Shape s : {Shape{3, 4, 5}, Shape{64, 64, 10}, Shape{128, 784, 64},
                  Shape{257, 129, 33}}) {
    auto a = random_values(s.m * s.k, 1000 + s.m);
    auto b = random_values(s.k * s.n, 2000 + s.n);
    std::vector<double> c_ref(s.m * s.n), c_omp(s.m * s.n);

    k::ref::matmul(a.data(), b.data(), c_ref.data(), s.m, s.k, s.n);
    k::matmul(a.data(), b.data(), c_omp.data(), s.m, s.k, s.n);
    CHECK(bit_identical(c_ref, c_omp));

    auto at = random_values(s.k * s.m, 3000 + s.m);
    k::ref::matmul_at(at.data(), b.data(), c_ref.data(), s.m, s.k, s.n);
    k::matmul_at(at.data(), b.data(), c_omp.data(), s.m, s.k, s.n);
    CHECK(bit_identical(c_ref, c_omp));

    auto bt = random_values(s.n * s.k, 4000 + s.n);
    k::ref::matmul_bt(a.data(), bt.data(), c_ref.data(), s.m, s.k, s.n);
    k::matmul_bt(a.data(), bt.data(), c_omp.data(), s.m, s.k, s.n);
    CHECK(bit_identical(c_ref, c_omp));
  }
}

TEST_CASE("transposed matmuls agree with explicit transposition") {
  const std::size_t m = 7, kk = 5, n = 6;
  auto a = random_values(kk * m, 11);   // [k x m]
  auto b = random_values(kk * n, 12);   // [k x n]
  std::vector<double> at(m * kk);
  for (std::size_t i = 0; i < kk; ++i) {
    for (std::size_t j = 0; j < m; ++j) at[j * kk + i] = a[i * m + j];
  }
  std::vector<double> via_at(m * n), via_plain(m * n);
  k::matmul_at(a.data(), b.data(), via_at.data(), m, kk, n);
  k::matmul(at.data(), b.data(), via_plain.data(), m, kk, n);
  for (std::size_t i = 0; i < m * n; ++i) {
    CHECK(via_at[i] == doctest::Approx(via_plain[i]).epsilon(1e-12));
  }
}

TEST_CASE("elementwise kernels match the reference bit for bit") {
  for (std::size_t count : {100u, 20000u}) {
    auto z = random_values(count, 50 + count);
    auto dpost = random_values(count, 60 + count);
    std::vector<double> r1(count), r2(count);

    k::ref::relu(z.data(), r1.data(), count);
    k::relu(z.data(), r2.data(), count);
    CHECK(bit_identical(r1, r2));

    k::ref::tanh_act(z.data(), r1.data(), count);
    k::tanh_act(z.data(), r2.data(), count);
    CHECK(bit_identical(r1, r2));

    k::ref::relu_grad(z.data(), dpost.data(), r1.data(), count);
    k::relu_grad(z.data(), dpost.data(), r2.data(), count);
    CHECK(bit_identical(r1, r2));

    k::ref::tanh_grad(z.data(), dpost.data(), r1.data(), count);
    k::tanh_grad(z.data(), dpost.data(), r2.data(), count);
    CHECK(bit_identical(r1, r2));

    k::ref::sigmoid(z.data(), r1.data(), count);
    k::sigmoid(z.data(), r2.data(), count);
    CHECK(bit_identical(r1, r2));
  }
}

TEST_CASE("softmax and loss kernels match the reference") {
  for (std::size_t m : {5u, 4000u}) {
    const std::size_t n = 10;
    auto z = random_values(m * n, 70 + m);
    std::vector<double> p1(m * n), p2(m * n);
    k::ref::softmax_rows(z.data(), p1.data(), m, n);
    k::softmax_rows(z.data(), p2.data(), m, n);
    CHECK(bit_identical(p1, p2));

    std::vector<double> t(m * n, 1.0 / n);
    std::vector<double> l1(m), l2(m);
    k::ref::soft_ce_rows(t.data(), p1.data(), l1.data(), m, n);
    k::soft_ce_rows(t.data(), p1.data(), l2.data(), m, n);
    CHECK(bit_identical(l1, l2));
  }
}

TEST_CASE("softmax handles extreme logits without overflow") {
  std::vector<double> z{1000.0, 0.0, -1000.0, 999.5};
  std::vector<double> p(4);
  k::softmax_rows(z.data(), p.data(), 1, 4);
  double sum = 0.0;
  for (double v : p) {
    CHECK(std::isfinite(v));
    CHECK(v >= 0.0);
    sum += v;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(p[0] > p[3]);
  CHECK(p[3] > p[1]);
}

TEST_CASE("col_sum matches reference and a hand case") {
  std::vector<double> a{1, 2, 3, 4, 5, 6};  // [[1,2,3],[4,5,6]]
  std::vector<double> out(3);
  k::col_sum(a.data(), out.data(), 2, 3);
  CHECK(out == std::vector<double>{5, 7, 9});

  auto big = random_values(300 * 40, 99);
  std::vector<double> o1(40), o2(40);
  k::ref::col_sum(big.data(), o1.data(), 300, 40);
  k::col_sum(big.data(), o2.data(), 300, 40);
  CHECK(bit_identical(o1, o2));
}
