// Times the serial reference kernels against the OpenMP versions and
// verifies they agree bit for bit on the benchmarked shapes.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include <omp.h>

#include "dlad/kernels.hpp"
#include "dlad/rng.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double time_ms(const std::function<void()>& fn, int reps) {
  fn();  // warm up
  auto start = Clock::now();
  for (int r = 0; r < reps; ++r) fn();
  auto stop = Clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count() / reps;
}

std::vector<double> random_matrix(std::size_t n, dlad::Rng& rng) {
  std::vector<double> m(n);
  for (double& v : m) v = rng.next_double() - 0.5;
  return m;
}

void report(const std::string& name, double serial_ms, double parallel_ms,
            bool identical) {
  std::printf("%-28s serial %9.3f ms   omp %9.3f ms   speedup %5.2fx   %s\n",
              name.c_str(), serial_ms, parallel_ms, serial_ms / parallel_ms,
              identical ? "bit-identical" : "MISMATCH");
}

void bench_matmul(std::size_t m, std::size_t k, std::size_t n, int reps,
                  dlad::Rng& rng) {
  std::vector<double> a = random_matrix(m * k, rng);
  std::vector<double> b = random_matrix(k * n, rng);
  std::vector<double> c_ref(m * n), c_omp(m * n);
  double serial = time_ms(
      [&] { dlad::kernels::ref::matmul(a.data(), b.data(), c_ref.data(), m, k, n); },
      reps);
  double parallel = time_ms(
      [&] { dlad::kernels::matmul(a.data(), b.data(), c_omp.data(), m, k, n); },
      reps);
  bool same =
      std::memcmp(c_ref.data(), c_omp.data(), m * n * sizeof(double)) == 0;
  char label[64];
  std::snprintf(label, sizeof(label), "matmul %zux%zux%zu", m, k, n);
  report(label, serial, parallel, same);
}

void bench_softmax(std::size_t m, std::size_t n, int reps, dlad::Rng& rng) {
  std::vector<double> z = random_matrix(m * n, rng);
  std::vector<double> p_ref(m * n), p_omp(m * n);
  double serial = time_ms(
      [&] { dlad::kernels::ref::softmax_rows(z.data(), p_ref.data(), m, n); },
      reps);
  double parallel = time_ms(
      [&] { dlad::kernels::softmax_rows(z.data(), p_omp.data(), m, n); }, reps);
  bool same =
      std::memcmp(p_ref.data(), p_omp.data(), m * n * sizeof(double)) == 0;
  char label[64];
  std::snprintf(label, sizeof(label), "softmax_rows %zux%zu", m, n);
  report(label, serial, parallel, same);
}

void bench_tanh(std::size_t count, int reps, dlad::Rng& rng) {
  std::vector<double> z = random_matrix(count, rng);
  std::vector<double> out_ref(count), out_omp(count);
  double serial = time_ms(
      [&] { dlad::kernels::ref::tanh_act(z.data(), out_ref.data(), count); },
      reps);
  double parallel = time_ms(
      [&] { dlad::kernels::tanh_act(z.data(), out_omp.data(), count); }, reps);
  bool same =
      std::memcmp(out_ref.data(), out_omp.data(), count * sizeof(double)) == 0;
  char label[64];
  std::snprintf(label, sizeof(label), "tanh %zu", count);
  report(label, serial, parallel, same);
}

}  // namespace

int main(int argc, char** argv) {
  int reps = argc > 1 ? std::atoi(argv[1]) : 5;
  std::printf("threads: %d, reps per timing: %d\n", omp_get_max_threads(),
              reps);
  dlad::Rng rng(12345);
  bench_matmul(256, 784, 128, reps, rng);
  bench_matmul(512, 512, 512, reps, rng);
  bench_matmul(64, 64, 10, reps * 20, rng);
  bench_softmax(20000, 10, reps, rng);
  bench_tanh(1u << 20, reps, rng);
  return 0;
}
