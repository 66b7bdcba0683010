#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "strata/break_finder.hpp"
#include "strata/error.hpp"
#include "sim.hpp"

using namespace strata;

namespace {

BreakParams with_m(std::size_t m) {
  BreakParams p;
  p.m = m;
  return p;
}

bool covers(const std::vector<ChangePeriod>& ps, std::size_t i) {
  return std::any_of(ps.begin(), ps.end(), [&](const ChangePeriod& p) { return p.contains(i); });
}

}  // namespace

TEST_CASE("default window") {
  CHECK(default_window(0) == 5);
  CHECK(default_window(7) == 5);
  CHECK(default_window(24) == 12);
}

TEST_CASE("exact line gives small scores") {
  std::vector<double> line(120);
  for (std::size_t i = 0; i < line.size(); ++i) line[i] = 1.0 + 0.25 * static_cast<double>(i);
  for (double z : rolling_residual_scores(line, with_m(10))) CHECK(std::abs(z) < 2.0);
  CHECK_THROWS_AS(rolling_residual_scores(std::vector<double>(20, 0.0), with_m(10)), Error);
}

TEST_CASE("level shift peaks just before the shift") {
  auto y = sim::noise(300, 5);
  for (std::size_t i = 100; i < y.size(); ++i) y[i] += 10.0;
  const auto z = rolling_residual_scores(y, with_m(10));
  std::size_t arg = 0;
  for (std::size_t i = 0; i < z.size(); ++i)
    if (std::abs(z[i]) > std::abs(z[arg])) arg = i;
  CHECK(arg >= 90);
  CHECK(arg <= 100);

  auto scaled = y;
  for (auto& v : scaled) v *= 7.5;
  const auto z2 = rolling_residual_scores(scaled, with_m(10));
  for (std::size_t i = 0; i < z.size(); ++i) CHECK(z2[i] == doctest::Approx(z[i]).epsilon(1e-9));
}

TEST_CASE("change periods") {
  auto one = sim::noise(300, 6);
  for (std::size_t i = 100; i < one.size(); ++i) one[i] += 10.0;
  const auto p1 = detect_change_periods(one, with_m(10));
  CHECK(covers(p1, 100));

  auto two = sim::noise(300, 7);
  for (std::size_t i = 100; i < two.size(); ++i) two[i] += 10.0;
  for (std::size_t i = 150; i < two.size(); ++i) two[i] -= 10.0;
  const auto p2 = detect_change_periods(two, with_m(10));
  REQUIRE(p2.size() >= 2);
  CHECK(covers(p2, 100));
  CHECK(covers(p2, 150));
  for (std::size_t k = 1; k < p2.size(); ++k) CHECK(p2[k - 1].end <= p2[k].start);
}

TEST_CASE("stationary noise seldom shows change periods") {
  int ar_hits = 0, white_hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    ar_hits += !detect_change_periods(sim::ar1(300, 0.3, 900 + seed), with_m(10)).empty();
    white_hits += !detect_change_periods(sim::noise(300, 1900 + seed), with_m(10)).empty();
  }
  CHECK(ar_hits <= 10);
  CHECK(white_hits < 10);
}

TEST_CASE("affine transforms keep the index sets") {
  auto y = sim::noise(300, 8);
  for (std::size_t i = 120; i < y.size(); ++i) y[i] += 8.0;
  const auto base = detect_change_periods(y, with_m(10));
  auto t = y;
  for (auto& v : t) v = 3.0 * v - 40.0;
  CHECK(detect_change_periods(t, with_m(10)) == base);
}

TEST_CASE("step from 0 to 5 is realigned") {
  std::vector<double> y(200, 0.0);
  for (std::size_t i = 100; i < y.size(); ++i) y[i] = 5.0;
  const auto p = with_m(10);
  const auto periods = detect_change_periods(y, p);
  REQUIRE(covers(periods, 100));
  const auto r = adjust_step_changes(y, periods, p);
  for (std::size_t i = 0; i < 100; ++i)
    if (!covers(r.periods, i)) CHECK(r.adjustment[i] == doctest::Approx(-5.0).epsilon(1e-6));
  for (std::size_t i = 100; i < y.size(); ++i)
    if (!covers(r.periods, i)) CHECK(r.adjustment[i] == 0.0);
  for (double v : r.cleaned) CHECK(v == doctest::Approx(5.0).epsilon(1e-6));
  for (std::size_t i = 0; i < y.size(); ++i) CHECK(r.cleaned[i] + r.adjustment[i] + r.window_delta[i] == doctest::Approx(y[i]).epsilon(1e-12));
}

TEST_CASE("insignificant boundary leaves the series alone") {
  const auto y = sim::noise(200, 9);
  const std::vector<ChangePeriod> fake{{95, 105}};
  const auto r = adjust_step_changes(y, fake, with_m(10));
  for (double a : r.adjustment) CHECK(a == 0.0);
  for (std::size_t i = 0; i < y.size(); ++i)
    if (!covers(r.periods, i)) CHECK(r.cleaned[i] == y[i]);
}

TEST_CASE("slope change is straightened to the final slope") {
  std::vector<double> y(240);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double t = static_cast<double>(i);
    y[i] = i < 120 ? 0.5 * t : 60.0 + 2.0 * (t - 120.0);
  }
  const auto e = sim::noise(y.size(), 10, 0.1);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += e[i];
  const auto p = with_m(10);
  const auto r = adjust_step_changes(y, detect_change_periods(y, p), p);
  std::vector<double> x, c;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (!covers(r.periods, i)) x.push_back(static_cast<double>(i)), c.push_back(r.cleaned[i]);
  REQUIRE(x.size() > 100);
  double mx = 0, mc = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], mc += c[i];
  mx /= static_cast<double>(x.size()), mc /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (c[i] - mc), sxx += (x[i] - mx) * (x[i] - mx);
  CHECK(sxy / sxx == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("final stable period is never adjusted") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto y = sim::noise(300, 40 + seed);
    for (std::size_t i = 80; i < y.size(); ++i) y[i] += 6.0;
    for (std::size_t i = 200; i < y.size(); ++i) y[i] -= 9.0;
    const auto p = with_m(10);
    const auto r = adjust_step_changes(y, detect_change_periods(y, p), p);
    const std::size_t tail = r.periods.empty() ? 0 : r.periods.back().end;
    for (std::size_t i = tail; i < y.size(); ++i) CHECK(r.adjustment[i] == 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(r.cleaned[i] + r.adjustment[i] + r.window_delta[i] == doctest::Approx(y[i]).epsilon(1e-12));
  }
}
