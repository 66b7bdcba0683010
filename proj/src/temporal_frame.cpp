#include "strata/temporal_frame.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>

#include "strata/error.hpp"
#include "strata/timezone.hpp"

namespace strata {

namespace {

constexpr double kMeanMonthDays = 365.2425 / 12.0;
constexpr double kCalendarSnapTolerance = 0.05;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::string_view to_string(FrequencyKind kind) {
  switch (kind) {
    case FrequencyKind::PerMinute: return "PER_MINUTE";
    case FrequencyKind::Hourly: return "HOURLY";
    case FrequencyKind::Daily: return "DAILY";
    case FrequencyKind::Weekly: return "WEEKLY";
    case FrequencyKind::Monthly: return "MONTHLY";
    case FrequencyKind::Quarterly: return "QUARTERLY";
    case FrequencyKind::Yearly: return "YEARLY";
    case FrequencyKind::CustomInterval: return "CUSTOM_INTERVAL";
  }
  return "DAILY";
}

std::optional<FrequencyKind> parse_frequency_kind(std::string_view text) {
  const std::string u = upper(text);
  for (auto k : {FrequencyKind::PerMinute, FrequencyKind::Hourly, FrequencyKind::Daily, FrequencyKind::Weekly,
                 FrequencyKind::Monthly, FrequencyKind::Quarterly, FrequencyKind::Yearly,
                 FrequencyKind::CustomInterval})
    if (u == to_string(k)) return k;
  return std::nullopt;
}

std::string_view to_string(IndexBasis basis) {
  switch (basis) {
    case IndexBasis::UtcMicros: return "utc_micros";
    case IndexBasis::MonthsSinceStart: return "months_since_start";
    case IndexBasis::LocalMicrosSince1960: return "local_micros_since_1960";
  }
  return "utc_micros";
}

std::optional<IndexBasis> parse_index_basis(std::string_view text) {
  for (auto b : {IndexBasis::UtcMicros, IndexBasis::MonthsSinceStart, IndexBasis::LocalMicrosSince1960})
    if (text == to_string(b)) return b;
  return std::nullopt;
}

Frequency Frequency::of(FrequencyKind kind) {
  switch (kind) {
    case FrequencyKind::PerMinute: return {kind, kMicrosPerMinute};
    case FrequencyKind::Hourly: return {kind, kMicrosPerHour};
    case FrequencyKind::Daily: return {kind, kMicrosPerDay};
    case FrequencyKind::Weekly: return {kind, kMicrosPerWeek};
    case FrequencyKind::Monthly: return {kind, 1};
    case FrequencyKind::Quarterly: return {kind, 3};
    case FrequencyKind::Yearly: return {kind, 12};
    case FrequencyKind::CustomInterval: return {kind, kMicrosPerDay};
  }
  return {};
}

double Frequency::approx_micros() const {
  if (is_calendar()) return static_cast<double>(interval) * kMeanMonthDays * static_cast<double>(kMicrosPerDay);
  return static_cast<double>(interval);
}

int Frequency::slots_per_day() const {
  if (is_calendar() || interval <= 0 || interval > kMicrosPerDay) return 0;
  if (kMicrosPerDay % interval != 0) return 0;
  return static_cast<int>(kMicrosPerDay / interval);
}

Micros RegularSeries::slot_wall(std::int64_t i) const {
  switch (basis) {
    case IndexBasis::UtcMicros: return start + i * freq.interval;
    case IndexBasis::LocalMicrosSince1960: return start - kEpoch1960Offset + i * freq.interval;
    case IndexBasis::MonthsSinceStart: {
      const Date d = add_months(date_of(start), static_cast<int>(i * freq.interval));
      return day_start(d) + micros_of_day(start);
    }
  }
  return start;
}

std::int64_t RegularSeries::slot_of_wall(Micros wall) const {
  switch (basis) {
    case IndexBasis::UtcMicros: return floor_div(wall - start, freq.interval);
    case IndexBasis::LocalMicrosSince1960: return floor_div(wall - (start - kEpoch1960Offset), freq.interval);
    case IndexBasis::MonthsSinceStart:
      return floor_div(to_month_index(date_of(wall), date_of(start)), freq.interval);
  }
  return 0;
}

std::int64_t RegularSeries::slot_of_instant(Micros utc) const {
  if (timezone && !timezone->empty() && *timezone != "UTC") return slot_of_wall(TimeZone::load(*timezone)->to_local(utc));
  return slot_of_wall(utc);
}

std::vector<Micros> RegularSeries::slot_utc(std::int64_t i) const {
  const Micros wall = slot_wall(i);
  if (basis == IndexBasis::UtcMicros || !timezone) return {wall};
  const auto zone = TimeZone::load(*timezone);
  const auto r = zone->to_utc(wall);
  switch (r.kind) {
    case TimeZone::LocalKind::Unique: return {r.earliest};
    case TimeZone::LocalKind::Ambiguous: return {r.earliest, r.latest};
    case TimeZone::LocalKind::Nonexistent: return {};
  }
  return {};
}

Frequency infer_frequency(std::span<const Micros> timestamps) {
  std::vector<Micros> ts(timestamps.begin(), timestamps.end());
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  if (ts.size() < 3) throw Error(ErrorCode::TooFewPoints, "need at least 3 distinct timestamps");

  std::map<Micros, std::size_t> counts;
  for (std::size_t i = 1; i < ts.size(); ++i) ++counts[ts[i] - ts[i - 1]];
  Micros mode = 0;
  std::size_t best = 0;
  for (const auto& [gap, count] : counts) {
    // Ascending keys: strict > keeps the smallest gap on ties.
    if (count > best) {
      best = count;
      mode = gap;
    }
  }

  const double day = static_cast<double>(kMicrosPerDay);
  for (auto kind : {FrequencyKind::Monthly, FrequencyKind::Quarterly, FrequencyKind::Yearly}) {
    const double mean = static_cast<double>(Frequency::of(kind).interval) * kMeanMonthDays * day;
    if (std::abs(static_cast<double>(mode) - mean) <= kCalendarSnapTolerance * mean) return Frequency::of(kind);
  }
  for (auto kind : {FrequencyKind::PerMinute, FrequencyKind::Hourly, FrequencyKind::Daily, FrequencyKind::Weekly})
    if (mode == Frequency::of(kind).interval) return Frequency::of(kind);
  return Frequency::custom(mode);
}

LocalizedPoints localize_timestamps(std::span<const RawPoint> points, const std::string& zone_name) {
  const auto zone = TimeZone::load(zone_name);
  LocalizedPoints out;
  out.points.reserve(points.size());

  std::vector<std::pair<Micros, std::size_t>> order;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!points[i].timestamp) {
      out.points.push_back(points[i]);
      continue;
    }
    const Micros utc = *points[i].timestamp;
    out.points.push_back({zone->to_local(utc) + kEpoch1960Offset, points[i].value});
    order.emplace_back(utc, out.points.size() - 1);
  }
  std::sort(order.begin(), order.end());

  std::vector<Micros> utc_sorted;
  for (auto& [u, _] : order) utc_sorted.push_back(u);
  utc_sorted.erase(std::unique(utc_sorted.begin(), utc_sorted.end()), utc_sorted.end());
  if (utc_sorted.size() < 2) return out;

  std::map<Micros, std::size_t> counts;
  for (std::size_t i = 1; i < utc_sorted.size(); ++i) ++counts[utc_sorted[i] - utc_sorted[i - 1]];
  Micros step = 0;
  std::size_t best = 0;
  for (const auto& [gap, c] : counts)
    if (c > best) {
      best = c;
      step = gap;
    }

  for (std::size_t k = 1; k < order.size(); ++k) {
    const Micros du = order[k].first - order[k - 1].first;
    if (du != step) continue;
    const Micros prev_local = out.points[order[k - 1].second].timestamp.value();
    const Micros cur_local = out.points[order[k].second].timestamp.value();
    const Micros dl = cur_local - prev_local;
    if (dl > du) {
      for (Micros t = prev_local + step; t < cur_local; t += step) out.gaps.push_back(t);
    } else if (dl < du) {
      out.duplicates.push_back(cur_local);
    }
  }
  return out;
}

RegularSeries regularize(const RawSeries& raw, const RegularizeOptions& options) {
  std::vector<RawPoint> pts;
  pts.reserve(raw.points.size());
  for (const auto& p : raw.points)
    if (p.timestamp) pts.push_back(p);
  if (pts.empty()) throw Error(ErrorCode::EmptyAfterCleaning, "no rows with a valid timestamp");

  RegularSeries out;
  out.timezone = options.timezone;
  const bool local = options.timezone && !options.timezone->empty() && *options.timezone != "UTC";
  if (local) {
    auto loc = localize_timestamps(pts, *options.timezone);
    pts = std::move(loc.points);
    for (auto& p : pts) *p.timestamp -= kEpoch1960Offset;
  } else {
    out.timezone.reset();
  }

  std::stable_sort(pts.begin(), pts.end(),
                   [](const RawPoint& a, const RawPoint& b) { return *a.timestamp < *b.timestamp; });
  std::vector<Micros> ts;
  ts.reserve(pts.size());
  for (const auto& p : pts) ts.push_back(*p.timestamp);

  out.freq = options.freq_override ? *options.freq_override : infer_frequency(ts);
  if (options.freq_override) {
    std::vector<Micros> distinct = ts;
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3) throw Error(ErrorCode::TooFewPoints, "need at least 3 distinct timestamps");
  }
  if (out.freq.interval <= 0) throw Error(ErrorCode::InvalidArgument, "frequency interval must be positive");

  const Micros origin = ts.front();
  if (out.freq.is_calendar()) {
    out.basis = IndexBasis::MonthsSinceStart;
    out.start = origin;
  } else if (local) {
    out.basis = IndexBasis::LocalMicrosSince1960;
    out.start = origin + kEpoch1960Offset;
  } else {
    out.basis = IndexBasis::UtcMicros;
    out.start = origin;
  }

  std::vector<double> sum;
  std::vector<std::size_t> count;
  for (const auto& p : pts) {
    const std::int64_t slot = out.slot_of_wall(*p.timestamp);
    if (slot < 0) continue;
    const auto s = static_cast<std::size_t>(slot);
    if (s >= sum.size()) {
      sum.resize(s + 1, 0.0);
      count.resize(s + 1, 0);
    }
    if (!std::isnan(p.value)) {
      sum[s] += p.value;
      ++count[s];
    }
  }
  out.values.assign(sum.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t s = 0; s < sum.size(); ++s) {
    if (count[s] == 0) continue;
    out.values[s] = options.aggregator == Aggregator::Mean ? sum[s] / static_cast<double>(count[s]) : sum[s];
  }
  return out;
}

RegularSeries regularize(const RegularSeries& series) {
  RawSeries raw;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto utcs = series.slot_utc(static_cast<std::int64_t>(i));
    if (utcs.empty()) continue;
    raw.points.push_back({utcs.front(), series.values[i]});
  }
  RegularizeOptions opt;
  opt.freq_override = series.freq;
  opt.timezone = series.timezone;
  return regularize(raw, opt);
}

std::vector<TimedValue> to_absolute(const RegularSeries& grid, std::int64_t first, std::span<const double> values) {
  std::vector<TimedValue> out;
  out.reserve(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    const auto utcs = grid.slot_utc(first + static_cast<std::int64_t>(k));
    if (utcs.empty()) continue;
    out.push_back({utcs[0], values[k]});
    if (utcs.size() > 1) {
      const double next = k + 1 < values.size() ? values[k + 1] : values[k];
      out.push_back({utcs[1], 0.5 * (values[k] + next)});
    }
  }
  return out;
}

SlotCalendar slot_calendar(const RegularSeries& grid) {
  SlotCalendar cal;
  const std::size_t n = grid.size();
  cal.year.resize(n);
  cal.position.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Micros wall = grid.slot_wall(static_cast<std::int64_t>(i));
    const Date d = date_of(wall);
    const int y = static_cast<int>(d.year());
    cal.year[i] = y;
    if (grid.freq.is_calendar()) {
      cal.position[i] = static_cast<int>(static_cast<unsigned>(d.month())) - 1;
    } else {
      const Micros jan1 = day_start(make_date(y, 1, 1));
      cal.position[i] = static_cast<int>((wall - jan1) / grid.freq.interval);
    }
  }
  if (n == 0) return cal;
  const Micros first = grid.slot_wall(0);
  const Micros end = grid.slot_wall(static_cast<std::int64_t>(n));
  for (int y = cal.year.front(); y <= cal.year.back(); ++y) {
    if (first <= day_start(make_date(y, 1, 1)) && end >= day_start(make_date(y + 1, 1, 1)))
      cal.full_years.push_back(y);
  }
  return cal;
}

}  // namespace strata
