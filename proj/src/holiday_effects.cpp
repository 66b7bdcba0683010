#include "strata/holiday_effects.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "strata/csv.hpp"
#include "strata/error.hpp"
#include "strata/gapfill.hpp"
#include "strata/stats.hpp"

namespace strata {

extern const char* const kBuiltinHolidaysCsv;

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

int parse_days(const std::string& s, int fallback) {
  if (s.empty()) return fallback;
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || v < 0)
    throw Error(ErrorCode::InvalidArgument, "bad pre/post day count '" + s + "'");
  return v;
}

}  // namespace

std::vector<HolidaySpec> parse_holiday_csv(std::string_view text) {
  const auto table = csv::read_string(text);
  const auto c_region = table.require("region");
  const auto c_name = table.require("holiday");
  const auto c_date = table.require("date");
  const auto c_pre = table.column("pre_days");
  const auto c_post = table.column("post_days");
  std::vector<HolidaySpec> specs;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  for (const auto& row : table.rows) {
    auto cell = [&](std::optional<std::size_t> c) { return c && *c < row.size() ? row[*c] : std::string(); };
    const auto ts = parse_timestamp(cell(c_date));
    if (!ts) throw Error(ErrorCode::InvalidArgument, "bad holiday date '" + cell(c_date) + "'");
    const auto key = std::make_pair(upper(cell(c_region)), cell(c_name));
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, specs.size()).first;
      specs.push_back({key.second, key.first, {}});
    }
    specs[it->second].occurrences.push_back({date_of(*ts), parse_days(cell(c_pre), 1), parse_days(cell(c_post), 1)});
  }
  for (auto& s : specs)
    std::sort(s.occurrences.begin(), s.occurrences.end(),
              [](const auto& a, const auto& b) { return a.date < b.date; });
  return specs;
}

std::vector<HolidaySpec> load_holiday_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open holiday file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_holiday_csv(ss.str());
}

std::vector<HolidaySpec> builtin_holidays(std::string_view region) {
  static const std::vector<HolidaySpec> all = parse_holiday_csv(kBuiltinHolidaysCsv);
  const std::string want = upper(region);
  std::vector<HolidaySpec> out;
  for (const auto& s : all)
    if (s.region == want) out.push_back(s);
  return out;
}

std::vector<std::string> builtin_regions() { return {"GLOBAL", "US"}; }

std::vector<HolidayWindows> expand_windows(std::span<const HolidaySpec> specs, const RegularSeries& grid,
                                           std::int64_t first, std::int64_t last) {
  std::vector<HolidayWindows> out;
  const bool fine = grid.freq.sub_daily_or_daily();
  for (const auto& spec : specs) {
    HolidayWindows w;
    w.holiday = spec.name;
    for (const auto& occ : spec.occurrences) {
      std::vector<std::int64_t> slots;
      if (fine) {
        const Micros begin = day_start(occ.date) - occ.pre_days * kMicrosPerDay;
        const Micros end = day_start(occ.date) + (occ.post_days + 1) * kMicrosPerDay;
        std::int64_t s = grid.slot_of_wall(begin);
        if (grid.slot_wall(s) < begin) ++s;
        for (; grid.slot_wall(s) < end; ++s) slots.push_back(s);
      } else {
        slots.push_back(grid.slot_of_wall(day_start(occ.date)));
      }
      if (slots.empty() || slots.back() < first || slots.front() >= last) continue;
      w.slots[static_cast<int>(occ.date.year())] = std::move(slots);
    }
    if (!w.slots.empty()) out.push_back(std::move(w));
  }
  return out;
}

HolidayEstimate estimate_effects(std::span<const double> values, std::span<const HolidayWindows> windows,
                                 std::span<const double> seasonal_profile) {
  const std::size_t n = values.size();
  const auto in_range = [&](std::int64_t s) { return s >= 0 && s < static_cast<std::int64_t>(n); };
  MissingMask mask;
  for (const auto& w : windows)
    for (const auto& [year, slots] : w.slots)
      for (auto s : slots)
        if (in_range(s)) mask.add(static_cast<std::size_t>(s), MissingSource::UserMarkedOutlier);
  if (mask.empty()) throw Error(ErrorCode::NoOccurrences, "no holiday falls inside the series");

  HolidayEstimate est;
  SmoothParams params;
  params.seasonal_profile.assign(seasonal_profile.begin(), seasonal_profile.end());
  est.counterfactual = interpolate(values, mask, params);
  est.raw.assign(n, 0.0);
  for (std::size_t i : mask.indices()) est.raw[i] = values[i] - est.counterfactual[i];

  for (const auto& w : windows) {
    std::size_t width = 0;
    for (const auto& [year, slots] : w.slots) width = std::max(width, slots.size());
    for (std::size_t j = 0; j < width; ++j) {
      SubHolidayEffect sub;
      sub.holiday = w.holiday;
      sub.offset = static_cast<int>(j);
      std::vector<double> obs;
      for (const auto& [year, slots] : w.slots) {
        if (j >= slots.size() || !in_range(slots[j])) continue;
        const double e = est.raw[static_cast<std::size_t>(slots[j])];
        sub.yearly_raw[year] = e;
        obs.push_back(e);
      }
      if (obs.empty()) continue;
      sub.effect = obs.size() >= 4 ? stats::median(obs) : stats::mean(obs);
      for (const auto& [year, e] : sub.yearly_raw) sub.yearly_smoothed[year] = sub.effect;
      est.effects.push_back(std::move(sub));
    }
  }
  return est;
}

double reconcile(std::span<const double> effects) {
  double pos = 0.0, neg = 0.0;
  for (double e : effects) {
    if (e > 0.0) pos = std::max(pos, e);
    if (e < 0.0) neg = std::min(neg, e);
  }
  return pos + neg;
}

HolidayEffectSeries apply_effects(std::span<const SubHolidayEffect> effects, std::span<const HolidayWindows> windows,
                                  std::int64_t first, std::size_t count) {
  HolidayEffectSeries out;
  out.total.assign(count, 0.0);
  std::map<std::pair<std::string, int>, double> level;
  for (const auto& e : effects) level[{e.holiday, e.offset}] = e.effect;
  std::vector<std::vector<double>> hits(count);
  for (const auto& w : windows) {
    auto& series = out.by_holiday[w.holiday];
    series.assign(count, 0.0);
    std::vector<bool> touched(count, false);
    for (const auto& [year, slots] : w.slots) {
      for (std::size_t j = 0; j < slots.size(); ++j) {
        const std::int64_t k = slots[j] - first;
        if (k < 0 || k >= static_cast<std::int64_t>(count)) continue;
        auto it = level.find({w.holiday, static_cast<int>(j)});
        if (it == level.end()) continue;
        series[static_cast<std::size_t>(k)] = it->second;
        touched[static_cast<std::size_t>(k)] = true;
      }
    }
    for (std::size_t k = 0; k < count; ++k)
      if (touched[k]) hits[k].push_back(series[k]);
  }
  for (std::size_t k = 0; k < count; ++k)
    if (!hits[k].empty()) out.total[k] = reconcile(hits[k]);
  return out;
}

HolidayEffectSeries extrapolate_effects(std::span<const SubHolidayEffect> effects,
                                        std::span<const HolidaySpec> specs, const RegularSeries& grid,
                                        std::size_t horizon) {
  const auto n = static_cast<std::int64_t>(grid.size());
  const auto windows = expand_windows(specs, grid, n, n + static_cast<std::int64_t>(horizon));
  return apply_effects(effects, windows, n, horizon);
}

}  // namespace strata
