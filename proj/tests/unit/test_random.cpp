#include <doctest.h>

#include <atomic>
#include <cmath>
#include <set>
#include <vector>

#include "bni/parallel.hpp"
#include "bni/random.hpp"

TEST_SUITE("random") {

TEST_CASE("same seed yields the same stream") {
  bni::Rng a(42), b(42);
  for (int k = 0; k < 100; ++k) CHECK(a.next() == b.next());
}

TEST_CASE("derived seeds depend on every path element") {
  const auto s = bni::derive_seed(7, {bni::stream::bootstrap, 3});
  CHECK(s == bni::derive_seed(7, {bni::stream::bootstrap, 3}));
  CHECK(s != bni::derive_seed(7, {bni::stream::bootstrap, 4}));
  CHECK(s != bni::derive_seed(8, {bni::stream::bootstrap, 3}));
  CHECK(s != bni::derive_seed(7, {bni::stream::outcomes, 3}));
  CHECK(bni::derive_seed(7, {1, 2}) != bni::derive_seed(7, {2, 1}));
}

TEST_CASE("uniform stays inside the open unit interval and has mean one half") {
  bni::Rng rng(1);
  double sum = 0.0;
  const int N = 200000;
  for (int k = 0; k < N; ++k) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / N - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / N));
}

TEST_CASE("normal draws have zero mean and unit variance") {
  bni::Rng rng(2);
  const int N = 200000;
  double s = 0.0, ss = 0.0;
  for (int k = 0; k < N; ++k) {
    const double x = rng.normal();
    s += x;
    ss += x * x;
  }
  const double mean = s / N;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(N));
  CHECK(std::abs(ss / N - mean * mean - 1.0) < 0.02);
}

TEST_CASE("index covers the range uniformly") {
  bni::Rng rng(3);
  std::vector<int> counts(7, 0);
  for (int k = 0; k < 70000; ++k) {
    const auto i = rng.index(7);
    REQUIRE(i < 7);
    ++counts[i];
  }
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
}

TEST_CASE("parallel_for visits every index once and rethrows worker errors") {
  std::vector<std::atomic<int>> hits(100);
  bni::parallel_for(100, 4, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(bni::parallel_for(50, 3,
                                    [](std::size_t i) {
                                      if (i == 17) throw std::runtime_error("boom");
                                    }),
                  std::runtime_error);
}

}
