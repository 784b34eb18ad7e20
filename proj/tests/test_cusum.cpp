#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "cptkit/core.hpp"
#include "cptkit/cusum.hpp"
#include "oracles.hpp"

using namespace cptkit;
using Catch::Approx;

TEST_CASE("cusum_stat on constant series is zero", "[cusum]") {
  const TimeSeries x(std::vector<double>(12, 0.1));
  for (std::size_t s = 1; s < 12; ++s) {
    for (std::size_t e = s + 1; e <= 12; ++e) {
      for (std::size_t b = s; b < e; ++b) REQUIRE(cusum_stat(x, s, e, b) == 0.0);
    }
  }
}

TEST_CASE("cusum_stat hand values", "[cusum]") {
  CHECK(cusum_stat(TimeSeries({0, 0, 1, 1}), 1, 4, 2) == Approx(-1.0).epsilon(1e-12));
  CHECK(cusum_stat(TimeSeries({1, 1, 0, 0}), 1, 4, 2) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cusum_stat rejects bad intervals", "[cusum][error]") {
  const TimeSeries x({1, 2, 3, 4});
  try {
    cusum_stat(x, 2, 4, 4);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidInterval);
  }
  CHECK_THROWS_AS(cusum_stat(x, 0, 3, 1), Error);
  CHECK_THROWS_AS(cusum_stat(x, 1, 5, 2), Error);
  CHECK_THROWS_AS(cusum_stat(x, 3, 4, 2), Error);
}

TEST_CASE("max_cusum on a balanced noiseless step", "[cusum]") {
  std::vector<double> x(20, 0.0);
  for (std::size_t t = 10; t < 20; ++t) x[t] = 1.0;
  const auto best = max_cusum(TimeSeries(x), 1, 20);
  CHECK(best.split == 10);
  CHECK(best.magnitude == Approx(std::sqrt(5.0)).epsilon(1e-12));
}

TEST_CASE("max_cusum ties and the two-point interval", "[cusum]") {
  const TimeSeries flat(std::vector<double>(10, 4.0));
  const auto best = max_cusum(flat, 3, 9);
  CHECK(best.split == 3);
  CHECK(best.magnitude == 0.0);

  const TimeSeries x({0.3, -1.2, 2.0, 0.5});
  CHECK(max_cusum(x, 2, 3).split == 2);
  try {
    max_cusum(x, 3, 3);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateInterval);
  }
}

TEST_CASE("noiseless single step: argmax is the last index of the first segment",
          "[cusum][property]") {
  for (std::size_t n = 2; n <= 50; ++n) {
    for (std::size_t last_left = 1; last_left < n; ++last_left) {
      std::vector<double> x(n, -0.5);
      for (std::size_t t = last_left; t < n; ++t) x[t] = 1.75;
      const CusumEvaluator cusum{std::span<const double>(x)};
      REQUIRE(cusum.max(1, n).split == last_left);
    }
  }
}

TEST_CASE("cusum shift invariance and linear scaling", "[cusum][property]") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto x = gen_null(30, RngSeed{seed});
    std::vector<double> shifted(x.values().begin(), x.values().end());
    std::vector<double> scaled = shifted;
    for (auto& v : shifted) v += 17.0;
    for (auto& v : scaled) v *= 3.5;
    const CusumEvaluator base(x), sh{std::span<const double>(shifted)},
        sc{std::span<const double>(scaled)};
    for (std::size_t s = 1; s <= 30; s += 3) {
      for (std::size_t e = s + 1; e <= 30; e += 2) {
        for (std::size_t b = s; b < e; ++b) {
          const double v = base.stat(s, e, b);
          REQUIRE(std::abs(sh.stat(s, e, b)) == Approx(std::abs(v)).margin(1e-9));
          REQUIRE(sc.stat(s, e, b) == Approx(3.5 * v).margin(1e-9));
        }
        REQUIRE(sc.max(s, e).split == base.max(s, e).split);
      }
    }
  }
}

TEST_CASE("prefix sums agree with direct summation", "[cusum][oracle]") {
  const auto x = gen_null(10000, RngSeed{123});
  const std::vector<double> raw(x.values().begin(), x.values().end());
  const CusumEvaluator cusum(x);
  Rng rng(RngSeed{4});
  for (int k = 0; k < 2000; ++k) {
    auto s = static_cast<std::size_t>(rng.uniform_int(1, 9999));
    auto e = static_cast<std::size_t>(rng.uniform_int(s + 1, 10000));
    auto b = static_cast<std::size_t>(rng.uniform_int(s, e - 1));
    const double direct = oracle::cusum_direct(raw, s, e, b);
    const double fast = cusum.stat(s, e, b);
    REQUIRE(std::abs(fast - direct) <= 1e-9 * std::max(1.0, std::abs(direct)));
  }
}
