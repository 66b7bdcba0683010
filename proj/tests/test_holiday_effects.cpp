#include "doctest.h"

#include <cmath>
#include <vector>

#include "strata/error.hpp"
#include "strata/holiday_effects.hpp"
#include "sim.hpp"

using namespace strata;

namespace {

HolidaySpec yearly(const std::string& name, unsigned month, unsigned day, int from, int to, int pre = 1, int post = 1) {
  HolidaySpec h;
  h.name = name;
  h.region = "TEST";
  for (int y = from; y <= to; ++y) h.occurrences.push_back({make_date(y, month, day), pre, post});
  return h;
}

RegularSeries hourly(std::size_t n, Date start) {
  RegularSeries s;
  s.start = day_start(start);
  s.freq = Frequency::of(FrequencyKind::Hourly);
  s.values.assign(n, 0.0);
  return s;
}

}  // namespace

TEST_CASE("three-day window on an hourly grid has 72 slots per year") {
  const auto grid = hourly(24 * 365 * 2, make_date(2020, 1, 1));
  std::vector<HolidaySpec> specs{yearly("midyear", 7, 4, 2020, 2021)};
  const auto w = expand_windows(specs, grid, 0, static_cast<std::int64_t>(grid.size()));
  REQUIRE(w.size() == 1);
  REQUIRE(w[0].slots.size() == 2);
  for (const auto& [year, slots] : w[0].slots) CHECK(slots.size() == 72);
}

TEST_CASE("weekly grid takes one slot per year") {
  RegularSeries grid;
  grid.start = day_start(make_date(2019, 1, 6));
  grid.freq = Frequency::of(FrequencyKind::Weekly);
  grid.values.assign(52 * 3, 0.0);
  std::vector<HolidaySpec> specs{yearly("midyear", 7, 4, 2019, 2021)};
  const auto w = expand_windows(specs, grid, 0, static_cast<std::int64_t>(grid.size()));
  REQUIRE(w.size() == 1);
  for (const auto& [year, slots] : w[0].slots) {
    CHECK(slots.size() == 1);
    CHECK(grid.slot_wall(slots[0]) <= day_start(make_date(year, 7, 4)));
    CHECK(grid.slot_wall(slots[0] + 1) > day_start(make_date(year, 7, 4)));
  }
}

TEST_CASE("holiday before the series has no window") {
  const auto grid = sim::daily(std::vector<double>(100, 0.0), make_date(2021, 1, 1));
  std::vector<HolidaySpec> specs{yearly("old", 7, 4, 2018, 2019)};
  CHECK(expand_windows(specs, grid, 0, 100).empty());
}

TEST_CASE("sub-holiday slot count is constant across years") {
  const auto grid = sim::daily(std::vector<double>(365 * 4, 0.0), make_date(2018, 1, 1));
  std::vector<HolidaySpec> specs{yearly("h", 3, 1, 2018, 2021, 2, 3)};
  const auto w = expand_windows(specs, grid, 0, static_cast<std::int64_t>(grid.size()));
  for (const auto& [year, slots] : w[0].slots) CHECK(slots.size() == 6);
}

TEST_CASE("flat series with a lifted holiday slot") {
  const auto grid = sim::daily(std::vector<double>(365 * 3, 10.0), make_date(2019, 1, 1));
  std::vector<HolidaySpec> specs{yearly("h", 5, 10, 2019, 2021, 0, 0)};
  const auto w = expand_windows(specs, grid, 0, static_cast<std::int64_t>(grid.size()));
  auto v = grid.values;
  for (const auto& [y, slots] : w[0].slots) v[static_cast<std::size_t>(slots[0])] = 15.0;
  const auto est = estimate_effects(v, w);
  REQUIRE(est.effects.size() == 1);
  CHECK(est.effects[0].effect == doctest::Approx(5.0));
  CHECK_THROWS_AS(estimate_effects(v, std::vector<HolidayWindows>{}), Error);
}

TEST_CASE("injected lifts are recovered") {
  const std::size_t n = 365 * 4 + 1;
  auto v = sim::noise(n, 17, 0.5);
  for (auto& x : v) x += 10.0;
  const auto grid = sim::daily(v, make_date(2018, 1, 1));
  std::vector<HolidaySpec> specs{yearly("h", 7, 4, 2018, 2021)};
  const auto w = expand_windows(specs, grid, 0, static_cast<std::int64_t>(n));
  for (const auto& [y, slots] : w[0].slots) {
    v[static_cast<std::size_t>(slots[0])] += 2.0;
    v[static_cast<std::size_t>(slots[1])] += 8.0;
    v[static_cast<std::size_t>(slots[2])] += 2.0;
  }
  const auto est = estimate_effects(v, w);
  REQUIRE(est.effects.size() == 3);
  CHECK(std::abs(est.effects[0].effect - 2.0) < 1.0);
  CHECK(std::abs(est.effects[1].effect - 8.0) < 1.0);
  CHECK(std::abs(est.effects[2].effect - 2.0) < 1.0);

  // Removing the effects leaves each window near the surrounding level.
  const auto applied = apply_effects(est.effects, w, 0, n);
  for (const auto& [y, slots] : w[0].slots) {
    double m = 0;
    for (auto s : slots) m += v[static_cast<std::size_t>(s)] - applied.total[static_cast<std::size_t>(s)];
    CHECK(std::abs(m / 3.0 - 10.0) < 2 * 0.5);
  }
}

TEST_CASE("zero-effect holiday on noise stays small") {
  const double sd = 1.0;
  int ok = 0;
  const int seeds = 100;
  for (int seed = 0; seed < seeds; ++seed) {
    const auto v = sim::noise(365 * 5, 100 + static_cast<std::uint64_t>(seed), sd);
    const auto grid = sim::daily(v, make_date(2016, 1, 1));
    std::vector<HolidaySpec> specs{yearly("h", 6, 1, 2016, 2020, 0, 0)};
    const auto est = estimate_effects(v, expand_windows(specs, grid, 0, static_cast<std::int64_t>(v.size())));
    ok += std::abs(est.effects[0].effect) < 2 * sd / std::sqrt(5.0);
  }
  // Median of five noisy differences: the bound holds for most seeds.
  CHECK(ok >= 75);
}

TEST_CASE("cross-year smoothing: median with four years, mean with fewer") {
  const auto grid = sim::daily(std::vector<double>(365 * 4, 0.0), make_date(2018, 1, 1));
  std::vector<HolidaySpec> specs{yearly("h", 5, 10, 2018, 2021, 0, 0)};
  const auto w = expand_windows(specs, grid, 0, static_cast<std::int64_t>(grid.size()));
  auto v = grid.values;
  const double lifts[] = {1, 2, 3, 100};
  int k = 0;
  for (const auto& [y, slots] : w[0].slots) v[static_cast<std::size_t>(slots[0])] = lifts[k++];
  CHECK(estimate_effects(v, w).effects[0].effect == doctest::Approx(2.5));

  auto three = w;
  three[0].slots.erase(2021);
  CHECK(estimate_effects(v, three).effects[0].effect == doctest::Approx(2.0));
}

TEST_CASE("reconcile") {
  CHECK(reconcile(std::vector<double>{3, 5, -2}) == 3);
  CHECK(reconcile(std::vector<double>{4}) == 4);
  CHECK(reconcile(std::vector<double>{-1, -6}) == -6);
  for (double x : {-3.0, 0.0, 2.5}) CHECK(reconcile(std::vector<double>{x}) == x);
  CHECK(reconcile(std::vector<double>{1, 2, -1}) <= reconcile(std::vector<double>{1, 3, -1}));
  CHECK(reconcile(std::vector<double>{1, 2, -3}) <= reconcile(std::vector<double>{1, 2, -1}));
}

TEST_CASE("extrapolation carries the last level, skips cancelled years, reconciles collisions") {
  const auto grid = sim::daily(std::vector<double>(365 * 3, 0.0), make_date(2018, 1, 1));
  SubHolidayEffect a{"a", 0, {}, {}, 4.0};
  SubHolidayEffect b{"b", 0, {}, {}, -1.5};
  SubHolidayEffect c{"c", 0, {}, {}, 6.0};
  std::vector<HolidaySpec> specs{yearly("a", 3, 1, 2018, 2022, 0, 0), yearly("b", 3, 1, 2018, 2022, 0, 0),
                                 yearly("c", 6, 1, 2018, 2021, 0, 0)};
  specs[2].occurrences.erase(specs[2].occurrences.begin() + 3);  // 2021 cancelled
  std::vector<SubHolidayEffect> effects{a, b, c};
  const std::size_t h = 365 * 2;
  const auto out = extrapolate_effects(effects, specs, grid, h);
  REQUIRE(out.total.size() == h);
  const auto at = [&](Date d) { return static_cast<std::size_t>(grid.slot_of_wall(day_start(d))) - grid.size(); };
  CHECK(out.total[at(make_date(2021, 3, 1))] == doctest::Approx(4.0 - 1.5));
  CHECK(out.by_holiday.at("a")[at(make_date(2022, 3, 1))] == 4.0);
  CHECK(out.total[at(make_date(2021, 6, 1))] == 0.0);
  CHECK(out.total[at(make_date(2021, 6, 2))] == 0.0);
}

TEST_CASE("holiday files and built-in calendars") {
  const auto specs = parse_holiday_csv("region,holiday,date,pre_days,post_days\n"
                                       "X,fest,2020-05-01,,2\nX,fest,2021-05-01,0,\nX,other,2020-01-01,1,1\n");
  REQUIRE(specs.size() == 2);
  const auto& fest = specs[0].name == "fest" ? specs[0] : specs[1];
  REQUIRE(fest.occurrences.size() == 2);
  CHECK(fest.occurrences[0].pre_days == 1);
  CHECK(fest.occurrences[0].post_days == 2);
  CHECK(fest.occurrences[1].pre_days == 0);
  CHECK_FALSE(builtin_holidays("us").empty());
  CHECK_FALSE(builtin_holidays("GLOBAL").empty());
  CHECK(builtin_holidays("NOWHERE").empty());
}
