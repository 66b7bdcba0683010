#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "strata/error.hpp"
#include "strata/metrics_bench.hpp"
#include "sim.hpp"

using namespace strata;

namespace {

// Brute-force rank: 1 + (#strictly better) + (#ties excluding self) / 2.
double brute_rank(const std::vector<double>& row, std::size_t m) {
  double r = 1.0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (j == m) continue;
    if (row[j] < row[m]) r += 1.0;
    else if (row[j] == row[m]) r += 0.5;
  }
  return r;
}

}  // namespace

TEST_CASE("hand-computed error metrics") {
  const std::vector<double> a{10, 20}, f{12, 16}, train{1, 2, 3, 4};
  const auto r = compute_metrics(a, f, train, 1);
  CHECK(r.mae == doctest::Approx(3.0));
  CHECK(r.rmse == doctest::Approx(std::sqrt(10.0)));
  CHECK(r.mape == doctest::Approx(20.0));
  CHECK(r.smape == doctest::Approx(100.0 * (2.0 / 22.0 + 4.0 / 36.0)));
  CHECK(r.smape == doctest::Approx(20.202).epsilon(1e-4));
  CHECK(r.mase == doctest::Approx(3.0));
}

TEST_CASE("perfect forecasts score zero") {
  const std::vector<double> a{3, -1, 7, 0}, train{1, 5, 2, 8, 3};
  const auto r = compute_metrics(a, a, train, 2);
  CHECK(r.mae == 0.0);
  CHECK(r.rmse == 0.0);
  CHECK(r.mape == 0.0);
  CHECK(r.smape == 0.0);
  CHECK(r.mase == 0.0);
  CHECK(r.mape_skipped == 1);
}

TEST_CASE("MAPE skips zero actuals and MASE can be undefined") {
  const std::vector<double> a{0, 0}, f{1, 2}, flat{4, 4, 4};
  const auto r = compute_metrics(a, f, flat, 1);
  CHECK(std::isnan(r.mape));
  CHECK(r.mape_skipped == 2);
  CHECK(std::isnan(r.mase));
  CHECK_FALSE(r.mase_defined);
  CHECK(r.smape == doctest::Approx(200.0));
  CHECK_THROWS_AS(compute_metrics(a, std::vector<double>{1}, flat, 1), Error);
  CHECK_THROWS_AS(compute_metrics(a, f, flat, 3), Error);
}

TEST_CASE("MASE and MAPE are scale invariant, MAE scales") {
  const auto train = sim::noise(50, 1), a = sim::noise(10, 2), f = sim::noise(10, 3);
  const auto r = compute_metrics(a, f, train, 7);
  for (double c : {0.01, 3.0, 1e6}) {
    std::vector<double> t2 = train, a2 = a, f2 = f;
    for (auto* v : {&t2, &a2, &f2})
      for (auto& x : *v) x *= c;
    const auto s = compute_metrics(a2, f2, t2, 7);
    CHECK(s.mase == doctest::Approx(r.mase));
    CHECK(s.mape == doctest::Approx(r.mape));
    CHECK(s.smape == doctest::Approx(r.smape));
    CHECK(s.mae == doctest::Approx(c * r.mae));
  }
}

TEST_CASE("seasonal naive has MASE near one on a seasonal random walk") {
  // Y_t = Y_{t-7} + e_t: the in-sample scale and the one-season-ahead naive error agree in mean.
  std::vector<double> ratios;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto e = sim::noise(707, seed);
    std::vector<double> y(707);
    for (std::size_t t = 0; t < y.size(); ++t) y[t] = e[t] + (t >= 7 ? y[t - 7] : 0.0);
    const std::vector<double> train(y.begin(), y.begin() + 700), actual(y.begin() + 700, y.end());
    const std::vector<double> naive(train.end() - 7, train.end());
    ratios.push_back(compute_metrics(actual, naive, train, 7).mase);
  }
  const double mean = std::accumulate(ratios.begin(), ratios.end(), 0.0) / static_cast<double>(ratios.size());
  CHECK(mean == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("MASE periods") {
  CHECK(mase_period(Frequency::of(FrequencyKind::Daily)) == 7);
  CHECK(mase_period(Frequency::of(FrequencyKind::Hourly)) == 24);
  CHECK(mase_period(Frequency::of(FrequencyKind::Monthly)) == 12);
  CHECK(mase_period(Frequency::of(FrequencyKind::Quarterly)) == 4);
  CHECK(mase_period(Frequency::of(FrequencyKind::Weekly)) == 1);
  CHECK(mase_period(Frequency::of(FrequencyKind::Yearly)) == 1);
}

TEST_CASE("geometric mean") {
  CHECK(geometric_mean_mase(std::vector<double>{1, 1, 1}) == doctest::Approx(1.0));
  CHECK(geometric_mean_mase(std::vector<double>{2, 8}) == doctest::Approx(4.0));
  CHECK(geometric_mean_mase(std::vector<double>{0.5, 2}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(geometric_mean_mase(std::vector<double>{1, 0}), Error);
  CHECK_THROWS_AS(geometric_mean_mase(std::vector<double>{}), Error);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> x(7), y(7);
    for (auto& v : x) v = u(rng);
    for (auto& v : y) v = u(rng);
    const double gx = geometric_mean_mase(x);
    // pow-based oracle
    double prod = 1.0;
    for (double v : x) prod *= std::pow(v, 1.0 / 7.0);
    CHECK(gx == doctest::Approx(prod));
    auto p = x;
    std::shuffle(p.begin(), p.end(), rng);
    CHECK(geometric_mean_mase(p) == doctest::Approx(gx));
    std::vector<double> xy(7);
    for (std::size_t i = 0; i < 7; ++i) xy[i] = x[i] * y[i];
    CHECK(geometric_mean_mase(xy) == doctest::Approx(gx * geometric_mean_mase(y)));
  }
}

TEST_CASE("average ranks") {
  const std::vector<std::string> m{"A", "B"};
  auto r = average_rank(m, {{0.8, 1.1}, {0.9, 1.0}});
  CHECK(r["A"] == 1.0);
  CHECK(r["B"] == 2.0);
  r = average_rank(m, {{1.0, 1.0}});
  CHECK(r["A"] == 1.5);
  CHECK(r["B"] == 1.5);
  r = average_rank(m, {{0.5, 2.0}, {2.0, 0.5}});
  CHECK(r["A"] == 1.5);
  CHECK(r["B"] == 1.5);
  r = average_rank({"A", "B", "C"}, {{1.0, std::nullopt, 2.0}, {3.0, 1.0, 2.0}});
  CHECK(r["A"] == doctest::Approx(2.0));
  CHECK(r["B"] == doctest::Approx(1.0));
  CHECK(r["C"] == doctest::Approx(2.0));
  CHECK_THROWS_AS(average_rank(m, {{1.0}}), Error);
}

TEST_CASE("average ranks match a brute-force count") {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> pick(0, 4);
  const std::vector<std::string> models{"a", "b", "c", "d", "e"};
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<std::vector<std::optional<double>>> scores;
    std::vector<double> oracle(5, 0.0);
    for (int d = 0; d < 6; ++d) {
      std::vector<double> row(5);
      for (auto& v : row) v = pick(rng);  // small integers force ties
      for (std::size_t k = 0; k < 5; ++k) oracle[k] += brute_rank(row, k) / 6.0;
      scores.emplace_back(row.begin(), row.end());
    }
    const auto r = average_rank(models, scores);
    double total = 0.0;
    for (std::size_t k = 0; k < 5; ++k) {
      CHECK(r.at(models[k]) == doctest::Approx(oracle[k]));
      total += r.at(models[k]);
    }
    CHECK(total == doctest::Approx(15.0));
  }
}

TEST_CASE("summaries") {
  MetricReport a, b;
  a.mae = 1;
  a.mase = 2;
  b.mae = 3;
  b.mase = 8;
  b.mape = std::nan("");
  const std::vector<MetricReport> rs{a, b};
  const auto m = mean_report(rs);
  CHECK(m.mae == 2.0);
  CHECK(m.mase == 5.0);
  CHECK(m.mape == 0.0);
  DatasetResult d1{"x", 1, 1, 0, a, 0.0}, d2{"y", 1, 1, 0, b, 0.0};
  CHECK(summarize({d1, d2}).geometric_mean_mase == doctest::Approx(4.0));
  d2.metrics.mase_defined = false;
  d2.metrics.mase = std::nan("");
  CHECK(std::isnan(summarize({d1, d2}).geometric_mean_mase));
}
