#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "cptkit/core.hpp"
#include "cptkit/penlik.hpp"
#include "oracles.hpp"

using namespace cptkit;
using Catch::Approx;

namespace {

std::vector<double> raw(const TimeSeries& x) { return {x.values().begin(), x.values().end()}; }

std::vector<double> steps(std::initializer_list<std::pair<double, std::size_t>> parts) {
  std::vector<double> x;
  for (auto [level, count] : parts) x.insert(x.end(), count, level);
  return x;
}

}  // namespace

TEST_CASE("rss table m=0 row is the total sum of squares", "[penlik][rss]") {
  const auto x = gen_null(30, RngSeed{3});
  const auto table = segment_rss_table(x, 4);
  const auto values = raw(x);
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / 30.0;
  double tss = 0.0;
  for (double v : values) tss += (v - mean) * (v - mean);
  CHECK(table.rows[0].config.is_empty());
  CHECK(table.rows[0].rss == Approx(tss).epsilon(1e-12));
}

TEST_CASE("rss table matches exhaustive enumeration", "[penlik][rss][oracle]") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto x = gen_null(12, RngSeed{seed});
    const auto values = raw(x);
    const auto table = segment_rss_table(x, 3, 2);
    std::vector<double> best(4, INFINITY);
    oracle::for_each_configuration(12, 2, [&](const std::vector<std::size_t>& times) {
      if (times.size() <= 3) {
        best[times.size()] = std::min(best[times.size()], oracle::rss_direct(values, times));
      }
    });
    for (std::size_t m = 0; m <= 3; ++m) {
      REQUIRE(table.rows[m].config.count() == m);
      REQUIRE(table.rows[m].rss == Approx(best[m]).epsilon(1e-10));
      REQUIRE(oracle::rss_direct(values, table.rows[m].config.times()) ==
              Approx(best[m]).epsilon(1e-10));
    }
  }
}

TEST_CASE("rss table perfect split", "[penlik][rss]") {
  const TimeSeries x(steps({{0.0, 6}, {4.0, 6}}));
  const auto table = segment_rss_table(x, 1);
  CHECK(table.rows[1].config.times() == std::vector<std::size_t>{7});
  CHECK(table.rows[1].rss == 0.0);
}

TEST_CASE("rss table rows are non-increasing and respect min_seg", "[penlik][rss][property]") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto x = gen_teeth({80, 8, 1.0, 1.0}, RngSeed{seed}).series;
    const std::size_t min_seg = 2 + seed % 3;
    const auto table = segment_rss_table(x, 80 / min_seg - 1 > 20 ? 20 : 80 / min_seg - 1, min_seg);
    for (std::size_t m = 0; m < table.rows.size(); ++m) {
      // one more split can only help while some segment is long enough to cut
      if (m > 0) {
        const auto lengths = table.rows[m - 1].config.segment_lengths();
        if (*std::max_element(lengths.begin(), lengths.end()) >= 2 * min_seg) {
          REQUIRE(table.rows[m].rss <= table.rows[m - 1].rss + 1e-9);
        }
      }
      for (auto l : table.rows[m].config.segment_lengths()) REQUIRE(l >= min_seg);
    }
  }
}

TEST_CASE("rss table rejects infeasible sizes", "[penlik][rss][error]") {
  const auto x = gen_null(10, RngSeed{1});
  CHECK_THROWS_AS(segment_rss_table(x, 5, 2), Error);
  CHECK_THROWS_AS(segment_rss_table(x, 1, 1), Error);
  CHECK_NOTHROW(segment_rss_table(x, 4, 2));
}

TEST_CASE("select_bic on a clear step", "[penlik][bic]") {
  auto values = steps({{0.0, 20}, {5.0, 20}});
  Rng rng(RngSeed{2});
  for (auto& v : values) v += 0.1 * rng.normal();  // N(0, 0.01)
  const TimeSeries x(values);
  const auto table = segment_rss_table(x, 1);
  CHECK(table.rows[1].config.times() == std::vector<std::size_t>{21});
  CHECK(oracle::bic_direct(values, {21}) < oracle::bic_direct(values, {}));
  const auto fit = select_bic(x);
  const auto& times = fit.config.times();
  CHECK(std::find(times.begin(), times.end(), 21) != times.end());
  CHECK(fit.penalty == Penalty::Bic);
  CHECK_FALSE(fit.degenerate);
}

TEST_CASE("constant series selects m=0 (degenerate rule)", "[penlik]") {
  const TimeSeries x(std::vector<double>(20, 2.0));
  for (const auto& fit : {select_bic(x), select_mbic(x)}) {
    CHECK(fit.config.is_empty());
    CHECK(fit.degenerate);
    CHECK(fit.rss == 0.0);
  }
}

TEST_CASE("noiseless step picks the smallest exact fit", "[penlik]") {
  const TimeSeries x(steps({{0.0, 20}, {5.0, 20}}));
  const auto fit = select_bic(x);
  CHECK(fit.config.times() == std::vector<std::size_t>{21});
  CHECK(fit.degenerate);
}

TEST_CASE("select_bic / select_mbic need T >= 6", "[penlik][error]") {
  CHECK_THROWS_AS(select_bic(TimeSeries({1, 2, 3, 4, 5})), Error);
  CHECK_THROWS_AS(select_mbic(TimeSeries({1, 2, 3, 4, 5})), Error);
}

TEST_CASE("BIC selection is globally optimal on short series", "[penlik][bic][oracle]") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const std::size_t n = 6 + seed % 9;  // 6..14
    auto x = gen_teeth({n < 8 ? 8 : n, 4, seed % 2 ? 1.5 : 0.0, 1.0}, RngSeed{seed}).series;
    if (x.length() != n) x = gen_null(n, RngSeed{seed});
    const auto values = raw(x);
    const auto fit = select_bic(x);
    const auto brute = oracle::bic_bruteforce(values, 2);
    REQUIRE(fit.config.times() == brute);
  }
}

TEST_CASE("stored objective matches re-evaluation", "[penlik][property]") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto s = gen_teeth({100, 25, 2.0, 1.0}, RngSeed{seed});
    const auto values = raw(s.series);
    const auto bic = select_bic(s.series);
    const auto mbic = select_mbic(s.series);
    REQUIRE(bic.objective == Approx(oracle::bic_direct(values, bic.config.times())).epsilon(1e-9));
    REQUIRE(mbic.objective ==
            Approx(oracle::mbic_direct(values, mbic.config.times())).epsilon(1e-9));
    REQUIRE(bic.rss == Approx(oracle::rss_direct(values, bic.config.times())).epsilon(1e-12));
  }
}

TEST_CASE("mBIC objective includes the spacing term", "[penlik][mbic]") {
  const auto x = gen_null(40, RngSeed{8});
  const ChangepointConfig c(40, {11, 31});
  const double rss = segment_rss(x, c);
  const double expected = 20.0 * std::log(rss / 40.0) + 3.0 * std::log(40.0) +
                          0.5 * (std::log(10.0 / 40) + std::log(20.0 / 40) + std::log(10.0 / 40));
  CHECK(penalized_objective(x, c, Penalty::Mbic) == Approx(expected).epsilon(1e-12));
}

TEST_CASE("GA never beats the DP optimum and usually matches it", "[penlik][ga]") {
  std::size_t equal = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto x = gen_null(60, RngSeed{seed});
    const auto dp = select_bic(x);
    const auto ga = ga_optimize(x, Penalty::Bic, GaParams{}, RngSeed{seed + 500});
    REQUIRE(ga.objective >= dp.objective - 1e-9);
    if (ga.config == dp.config) ++equal;
  }
  CHECK(equal >= 90);
}

TEST_CASE("GA lands next to structured optima", "[penlik][ga]") {
  // bit-flip search can stall one position away from the optimum
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = gen_teeth({60, 15, 2.0, 1.0}, RngSeed{seed});
    const auto dp = select_bic(s.series);
    const auto ga = ga_optimize(s.series, Penalty::Bic, GaParams{}, RngSeed{seed});
    REQUIRE(ga.objective >= dp.objective - 1e-9);
    REQUIRE(ga.config.count() == dp.config.count());
    for (std::size_t i = 0; i < dp.config.count(); ++i) {
      const auto a = ga.config.times()[i], b = dp.config.times()[i];
      REQUIRE((a > b ? a - b : b - a) <= 2);
    }
  }
}

TEST_CASE("GA degenerate settings", "[penlik][ga]") {
  GaParams params;
  params.population = 1;
  params.generations = 0;
  const auto fit = ga_optimize(gen_null(40, RngSeed{1}), Penalty::Mbic, params, RngSeed{1});
  CHECK(fit.config.is_empty());
  CHECK(ga_optimize(TimeSeries(std::vector<double>(30, 1.0)), Penalty::Bic, GaParams{}, RngSeed{2})
            .config.is_empty());
}

TEST_CASE("GA results respect the minimum segment length", "[penlik][ga]") {
  GaParams params;
  params.init_density = 0.4;
  params.generations = 20;
  const auto fit = ga_optimize(gen_null(80, RngSeed{4}), Penalty::Bic, params, RngSeed{4});
  for (auto l : fit.config.segment_lengths()) CHECK(l >= 2);
}

TEST_CASE("hybrid refine with no candidates", "[penlik][hybrid]") {
  const auto x = gen_null(50, RngSeed{1});
  const SortedCandidateList empty{{}, 50};
  const auto fit = hybrid_refine(x, empty, Penalty::Bic);
  CHECK(fit.config.is_empty());
}

namespace {

SortedCandidateList as_candidates(const std::vector<std::size_t>& times, std::size_t n) {
  SortedCandidateList list;
  list.series_length = n;
  double m = 100.0;
  for (auto t : times) list.entries.push_back({{1, n}, t - 1, m--});
  return list;
}

}  // namespace

TEST_CASE("hybrid refine keeps true changepoints of a clean signal", "[penlik][hybrid][oracle]") {
  const auto s = gen_teeth({200, 20, 1.0, 0.1}, RngSeed{6});
  const auto fit = hybrid_refine(s.series, as_candidates(s.truth.times(), 200), Penalty::Bic);
  CHECK(fit.config == s.truth);
  // reference: best subset by direct evaluation
  const auto values = raw(s.series);
  const auto& truth = s.truth.times();
  double best = INFINITY;
  std::vector<std::size_t> best_subset;
  for (std::uint32_t mask = 0; mask < (1U << truth.size()); ++mask) {
    std::vector<std::size_t> subset;
    for (std::size_t b = 0; b < truth.size(); ++b) {
      if (mask >> b & 1U) subset.push_back(truth[b]);
    }
    const double v = oracle::bic_direct(values, subset);
    if (v < best) {
      best = v;
      best_subset = subset;
    }
  }
  CHECK(best_subset == truth);
}

TEST_CASE("hybrid refine drops spurious candidates under mBIC", "[penlik][hybrid]") {
  std::size_t clean = 0;
  Rng rng(RngSeed{77});
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto s = gen_teeth({120, 30, 3.0, 1.0}, RngSeed{seed});
    auto times = s.truth.times();
    while (times.size() < s.truth.count() + 4) {
      const auto t = static_cast<std::size_t>(rng.uniform_int(2, 120));
      bool near = false;
      for (auto u : times) near = near || (t + 3 > u && u + 3 > t);
      if (!near) times.push_back(t);
    }
    std::sort(times.begin(), times.end());
    const auto fit = hybrid_refine(s.series, as_candidates(times, 120), Penalty::Mbic);
    if (fit.config == s.truth) ++clean;
  }
  CHECK(clean >= 90);
}

TEST_CASE("hybrid refine uses the GA beyond twenty candidates", "[penlik][hybrid]") {
  const auto s = gen_teeth({200, 20, 2.0, 0.5}, RngSeed{3});
  std::vector<std::size_t> times = s.truth.times();
  for (std::size_t t = 5; t < 200; t += 13) {
    if (std::find(times.begin(), times.end(), t) == times.end()) times.push_back(t);
  }
  std::sort(times.begin(), times.end());
  REQUIRE(times.size() > 20);
  const auto fit = hybrid_refine(s.series, as_candidates(times, 200), Penalty::Bic, RngSeed{5});
  for (auto t : fit.config.times()) {
    CHECK(std::find(times.begin(), times.end(), t) != times.end());
  }
  CHECK(fit.config == s.truth);
}
