#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <vector>

#include "dlad/rng.hpp"

using dlad::Rng;
using dlad::derive_seed;
using dlad::mix64;

TEST_CASE("streams are pure functions of (seed, counter)") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  // Draw k is the documented closed form.
  Rng c(977);
  for (std::uint64_t k = 1; k <= 50; ++k) {
    CHECK(c.next_u64() == mix64(977 + k * Rng::kGamma));
  }
}

TEST_CASE("next_double lands in [0,1)") {
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    double v = rng.next_double();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("next_below stays under the bound and covers it") {
  Rng rng(11);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 5000; ++i) {
    std::uint64_t v = rng.next_below(7);
    CHECK(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
}

TEST_CASE("normal draws have sane moments") {
  Rng rng(1234);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double v = rng.next_normal();
    sum += v;
    sq += v * v;
  }
  double mean = sum / n;
  double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("shuffle is deterministic per seed") {
  std::vector<int> v1{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<int> v2 = v1;
  Rng a(5), b(5);
  a.shuffle(v1);
  b.shuffle(v2);
  CHECK(v1 == v2);
  std::vector<int> sorted = v1;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
}

TEST_CASE("derive_seed separates purposes and entities") {
  CHECK(derive_seed(42, "client", 0) == derive_seed(42, "client", 0));
  CHECK(derive_seed(42, "client", 1) != derive_seed(42, "client", 2));
  CHECK(derive_seed(42, "client", 0) != derive_seed(42, "classifier", 0));
  CHECK(derive_seed(42, "client", 0) != derive_seed(43, "client", 0));
}

TEST_CASE("derive_seed regression vector") {
  // Frozen from the documented hash; guards against accidental change of
  // the derivation, which would silently re-randomize every experiment.
  CHECK(derive_seed(42, "client", 0) == UINT64_C(0x6ACC4A819BD5507E));
}
