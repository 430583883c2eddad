#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "nasbo/rng.hpp"

using namespace nasbo;

TEST_CASE("derived seeds differ per stream and are stable") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 1000; ++s) seen.insert(derive_seed(42, s));
  CHECK(seen.size() == 1000);
  CHECK(derive_seed(42, "model") == derive_seed(42, "model"));
  CHECK(derive_seed(42, "model") != derive_seed(42, "optimizer"));
  CHECK(derive_seed(42, "model") != derive_seed(43, "model"));
}

TEST_CASE("fnv1a matches the published test vectors") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("identical seeds give identical streams") {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform_index covers its range evenly") {
  Rng rng(1);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto k = rng.uniform_index(7);
    REQUIRE(k < 7);
    ++counts[k];
  }
  for (int c : counts) CHECK(std::abs(c - n / 7) < 400);  // ~4 sd
}

TEST_CASE("uniform01 and normal moments") {
  Rng rng(2);
  const int n = 200000;
  double s = 0, s2 = 0, u_min = 1, u_max = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    u_min = std::min(u_min, u);
    u_max = std::max(u_max, u);
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(u_min >= 0.0);
  CHECK(u_max < 1.0);
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.015);
}

TEST_CASE("shuffle produces a permutation") {
  Rng rng(3);
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  shuffle(v, rng);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) CHECK(sorted[static_cast<std::size_t>(i)] == i);
  CHECK_FALSE(std::is_sorted(v.begin(), v.end()));
}
