#include "strata/seasonal_engine.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "strata/error.hpp"
#include "strata/gapfill.hpp"
#include "strata/loess.hpp"
#include "strata/stats.hpp"

namespace strata {

std::string_view to_string(PeriodName name) {
  switch (name) {
    case PeriodName::Hourly: return "HOURLY";
    case PeriodName::Daily: return "DAILY";
    case PeriodName::Weekly: return "WEEKLY";
    case PeriodName::Monthly: return "MONTHLY";
    case PeriodName::Quarterly: return "QUARTERLY";
    case PeriodName::Yearly: return "YEARLY";
  }
  return "UNKNOWN";
}

std::optional<PeriodName> parse_period_name(std::string_view text) {
  for (auto p : {PeriodName::Hourly, PeriodName::Daily, PeriodName::Weekly, PeriodName::Monthly,
                 PeriodName::Quarterly, PeriodName::Yearly}) {
    const auto s = to_string(p);
    if (s.size() == text.size() &&
        std::equal(s.begin(), s.end(), text.begin(), [](char a, char b) { return a == std::toupper(b); }))
      return p;
  }
  return std::nullopt;
}

namespace {

std::size_t odd_at_least(double x) {
  auto v = static_cast<std::size_t>(std::ceil(x));
  if (v % 2 == 0) ++v;
  return std::max<std::size_t>(v, 3);
}

std::vector<double> moving_average(std::span<const double> x, std::size_t len) {
  std::vector<double> out;
  if (x.size() < len) return out;
  out.resize(x.size() - len + 1);
  double s = std::accumulate(x.begin(), x.begin() + static_cast<long>(len), 0.0);
  out[0] = s / static_cast<double>(len);
  for (std::size_t i = 1; i < out.size(); ++i) {
    s += x[i + len - 1] - x[i - 1];
    out[i] = s / static_cast<double>(len);
  }
  return out;
}

}  // namespace

StlResult stl_decompose(std::span<const double> values, std::size_t period, const StlParams& params) {
  const std::size_t n = values.size();
  const std::size_t K = period;
  if (K < 2) throw Error(ErrorCode::InvalidArgument, "STL period must be at least 2");
  if (n < 2 * K) throw Error(ErrorCode::PeriodTooLongForSeries, "STL needs at least two full cycles");

  const std::size_t ns = odd_at_least(static_cast<double>(std::max<std::size_t>(params.seasonal_window, 3)));
  const std::size_t nt = params.trend_window > 0
                             ? odd_at_least(static_cast<double>(params.trend_window))
                             : odd_at_least(1.5 * static_cast<double>(K) / (1.0 - 1.5 / static_cast<double>(ns)));
  const std::size_t nl = params.low_pass_window > 0 ? odd_at_least(static_cast<double>(params.low_pass_window))
                                                    : odd_at_least(static_cast<double>(K));
  const std::size_t jt = (nt + 9) / 10;
  const std::size_t jl = (nl + 9) / 10;
  const int degree = std::clamp(params.degree, 0, 1);

  std::vector<double> seasonal(n, 0.0), trend(n, 0.0), rw;
  std::vector<double> detrended(n), cycle(n + 2 * K), sub, sub_w, deseason(n);
  const int inner = std::max(1, params.inner_iters);
  for (int outer = 0; outer <= std::max(0, params.robust_iters); ++outer) {
    for (int it = 0; it < inner; ++it) {
      for (std::size_t i = 0; i < n; ++i) detrended[i] = values[i] - trend[i];
      // Cycle-subseries smoothing, extended one cycle each side.
      for (std::size_t p = 0; p < K; ++p) {
        sub.clear();
        sub_w.clear();
        for (std::size_t i = p; i < n; i += K) {
          sub.push_back(detrended[i]);
          if (!rw.empty()) sub_w.push_back(rw[i]);
        }
        const auto m = static_cast<std::int64_t>(sub.size());
        for (std::int64_t k = -1; k <= m; ++k) {
          auto v = loess::fit_at_regular(sub, sub_w, static_cast<double>(k), ns, degree);
          const double val = v ? *v : sub[static_cast<std::size_t>(std::clamp<std::int64_t>(k, 0, m - 1))];
          cycle[static_cast<std::size_t>(static_cast<std::int64_t>(p) + (k + 1) * static_cast<std::int64_t>(K))] = val;
        }
      }
      // Low-pass filter of the cycle series.
      auto lp = moving_average(cycle, K);
      lp = moving_average(lp, K);
      lp = moving_average(lp, 3);
      lp = loess::smooth_regular(lp, nl, 1, jl);
      for (std::size_t i = 0; i < n; ++i) seasonal[i] = cycle[i + K] - lp[i];
      for (std::size_t i = 0; i < n; ++i) deseason[i] = values[i] - seasonal[i];
      trend = loess::smooth_regular(deseason, nt, 1, jt, rw);
    }
    if (outer < params.robust_iters) {
      std::vector<double> r(n);
      for (std::size_t i = 0; i < n; ++i) r[i] = values[i] - seasonal[i] - trend[i];
      rw = loess::bisquare_weights(r);
    }
  }
  StlResult out;
  out.remainder.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.remainder[i] = values[i] - seasonal[i] - trend[i];
  out.seasonal = std::move(seasonal);
  out.trend = std::move(trend);
  return out;
}

std::optional<SeasonalCandidate> candidate_for(PeriodName name, const Frequency& freq) {
  auto fixed = [&](std::size_t k) -> std::optional<SeasonalCandidate> {
    if (k < 2) return std::nullopt;
    return SeasonalCandidate{name, k, Standardization::None};
  };
  if (freq.is_calendar()) {
    const auto months = freq.interval;
    switch (name) {
      case PeriodName::Quarterly:
        return months < 3 && 3 % months == 0 ? fixed(static_cast<std::size_t>(3 / months)) : std::nullopt;
      case PeriodName::Yearly:
        return months < 12 && 12 % months == 0 ? fixed(static_cast<std::size_t>(12 / months)) : std::nullopt;
      default: return std::nullopt;
    }
  }
  const std::int64_t step = freq.interval;
  auto per = [&](Micros span) -> std::optional<SeasonalCandidate> {
    if (step <= 0 || span % step != 0) return std::nullopt;
    return fixed(static_cast<std::size_t>(span / step));
  };
  const int spd = freq.slots_per_day();
  switch (name) {
    case PeriodName::Hourly: return per(kMicrosPerHour);
    case PeriodName::Daily: return per(kMicrosPerDay);
    case PeriodName::Weekly: return per(kMicrosPerWeek);
    case PeriodName::Monthly:
      if (spd <= 0) return std::nullopt;
      return SeasonalCandidate{name, static_cast<std::size_t>(30 * spd), Standardization::Monthly};
    case PeriodName::Quarterly:
      if (spd <= 0) return std::nullopt;
      return SeasonalCandidate{name, static_cast<std::size_t>(91 * spd), Standardization::Quarterly};
    case PeriodName::Yearly:
      if (step == kMicrosPerWeek) return fixed(52);
      if (spd <= 0) return std::nullopt;
      return SeasonalCandidate{name, static_cast<std::size_t>(365 * spd), Standardization::Yearly};
  }
  return std::nullopt;
}

std::vector<SeasonalCandidate> default_candidates(const Frequency& freq) {
  std::vector<PeriodName> names;
  switch (freq.kind) {
    case FrequencyKind::PerMinute: names = {PeriodName::Hourly, PeriodName::Daily}; break;
    case FrequencyKind::Hourly: names = {PeriodName::Daily, PeriodName::Weekly}; break;
    case FrequencyKind::Daily: names = {PeriodName::Weekly, PeriodName::Monthly, PeriodName::Yearly}; break;
    case FrequencyKind::Weekly:
    case FrequencyKind::Monthly:
    case FrequencyKind::Quarterly: names = {PeriodName::Yearly}; break;
    case FrequencyKind::Yearly:
    case FrequencyKind::CustomInterval: break;
  }
  std::vector<SeasonalCandidate> out;
  for (auto name : names)
    if (auto c = candidate_for(name, freq)) out.push_back(*c);
  return out;
}

double StandardGrid::coordinate(const RegularSeries& grid, std::int64_t slot, Standardization kind,
                                std::size_t period) {
  const Micros wall = grid.slot_wall(slot);
  const Date d = date_of(wall);
  const int y = static_cast<int>(d.year());
  const unsigned m = static_cast<unsigned>(d.month());
  double cycle = 0.0;
  Micros begin = 0, end = 0;
  switch (kind) {
    case Standardization::Monthly:
      cycle = 12.0 * y + (m - 1);
      begin = day_start(make_date(y, m, 1));
      end = day_start(add_months(make_date(y, m, 1), 1));
      break;
    case Standardization::Quarterly: {
      const unsigned q0 = (m - 1) / 3 * 3 + 1;
      cycle = 4.0 * y + (m - 1) / 3;
      begin = day_start(make_date(y, q0, 1));
      end = day_start(add_months(make_date(y, q0, 1), 3));
      break;
    }
    case Standardization::Yearly:
      cycle = y;
      begin = day_start(make_date(y, 1, 1));
      end = day_start(make_date(y + 1, 1, 1));
      break;
    case Standardization::None: return static_cast<double>(slot);
  }
  const double frac = static_cast<double>(wall - begin) / static_cast<double>(end - begin);
  return static_cast<double>(period) * (cycle + frac);
}

StandardGrid standardize(const RegularSeries& grid, std::span<const double> values, Standardization kind) {
  const int spd = grid.freq.slots_per_day();
  if (!grid.freq.sub_daily_or_daily() || spd <= 0)
    throw Error(ErrorCode::NotSubMonthlyFrequency, "standardization needs a daily or finer grid");
  StandardGrid sg;
  sg.kind = kind;
  sg.period = static_cast<std::size_t>(spd) *
              (kind == Standardization::Monthly ? 30 : kind == Standardization::Quarterly ? 91 : 365);
  const std::size_t n = values.size();
  sg.u.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    sg.u[i] = StandardGrid::coordinate(grid, static_cast<std::int64_t>(i), kind, sg.period);
  if (n == 0) return sg;
  // A tiny tolerance keeps exact grid hits on the grid despite rounding.
  sg.first = static_cast<std::int64_t>(std::ceil(sg.u.front() - 1e-9));
  const auto last = static_cast<std::int64_t>(std::floor(sg.u.back() + 1e-9));
  if (last < sg.first) return sg;
  sg.values.resize(static_cast<std::size_t>(last - sg.first + 1));
  std::size_t i = 0;
  for (std::int64_t j = sg.first; j <= last; ++j) {
    const double x = static_cast<double>(j);
    while (i + 1 < n && sg.u[i + 1] <= x) ++i;
    double v = values[i];
    if (i + 1 < n && sg.u[i] < x) {
      const double t = (x - sg.u[i]) / (sg.u[i + 1] - sg.u[i]);
      v = values[i] + t * (values[i + 1] - values[i]);
    }
    sg.values[static_cast<std::size_t>(j - sg.first)] = v;
  }
  return sg;
}

std::vector<double> back_map(std::span<const double> standard_values, std::int64_t first, std::size_t period,
                             std::span<const double> u) {
  std::vector<double> out(u.size(), 0.0);
  const auto m = static_cast<std::int64_t>(standard_values.size());
  if (m == 0) return out;
  const auto K = static_cast<std::int64_t>(period);
  auto at = [&](std::int64_t j) {
    std::int64_t k = j - first;
    if (k < 0) k += ((-k + K - 1) / K) * K;
    if (k >= m) k -= ((k - m) / K + 1) * K;
    return standard_values[static_cast<std::size_t>(std::clamp<std::int64_t>(k, 0, m - 1))];
  };
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double f = std::floor(u[i]);
    const auto j = static_cast<std::int64_t>(f);
    const double t = u[i] - f;
    out[i] = t == 0.0 ? at(j) : (1.0 - t) * at(j) + t * at(j + 1);
  }
  return out;
}

std::vector<double> leap_extrapolate(std::span<const double> seasonal, std::size_t period, std::size_t horizon,
                                     double alpha, double beta) {
  const std::size_t n = seasonal.size();
  const std::size_t K = std::max<std::size_t>(period, 1);
  if (n < 2 * K) throw Error(ErrorCode::TooFewCycles, "forecasting by leaping needs two full cycles");
  std::vector<double> out(horizon);
  std::vector<double> level(K), slope(K);
  std::vector<std::size_t> last(K);
  for (std::size_t p = 0; p < K; ++p) {
    std::size_t m = 0, idx = p;
    for (std::size_t i = p; i < n; i += K, ++m) idx = i;
    // Slope starts at the average change over the sub-series.
    double l = seasonal[p];
    double b = m > 1 ? (seasonal[idx] - seasonal[p]) / static_cast<double>(m - 1) : 0.0;
    for (std::size_t i = p + K; i < n; i += K) {
      const double nl = alpha * seasonal[i] + (1.0 - alpha) * (l + b);
      b = beta * (nl - l) + (1.0 - beta) * b;
      l = nl;
    }
    level[p] = l;
    slope[p] = b;
    last[p] = idx;
  }
  for (std::size_t h = 0; h < horizon; ++h) {
    const std::size_t t = n + h;
    const std::size_t p = t % K;
    const double steps = static_cast<double>((t - last[p]) / K);
    out[h] = level[p] + steps * slope[p];
  }
  return out;
}

namespace {

struct TestResult {
  double variance_reduction = 0.0;
  double kw_pvalue = 1.0;
};

// Removes the running one-cycle mean so every stretch of `period` slots sums
// to about zero; whatever leaves the seasonal goes back to the residual.
std::vector<double> center_cycles(const std::vector<double>& seasonal, std::size_t period) {
  const std::size_t n = seasonal.size();
  if (period < 2 || n < period) return seasonal;
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + seasonal[i];
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = std::min(i >= period / 2 ? i - period / 2 : 0, n - period);
    out[i] = seasonal[i] - (prefix[lo + period] - prefix[lo]) / static_cast<double>(period);
  }
  return out;
}

TestResult test_component(const StlResult& stl, std::size_t period) {
  const std::size_t n = stl.seasonal.size();
  std::vector<double> detrended(n);
  for (std::size_t i = 0; i < n; ++i) detrended[i] = stl.seasonal[i] + stl.remainder[i];
  TestResult r;
  const double total = stats::variance(detrended);
  r.variance_reduction = total > 0.0 ? 1.0 - stats::variance(stl.remainder) / total : 0.0;
  std::vector<std::vector<double>> groups(period);
  for (std::size_t i = 0; i < n; ++i) groups[i % period].push_back(detrended[i]);
  r.kw_pvalue = stats::kruskal_wallis_pvalue(groups);
  return r;
}

}  // namespace

SeasonalFit detect_and_extract(std::span<const double> values, std::span<const SeasonalCandidate> candidates,
                               const StlParams& params, const RegularSeries* grid, const SeasonalityTest& test) {
  SeasonalFit fit;
  fit.deseasonalized.assign(values.begin(), values.end());
  const std::size_t n = values.size();
  for (const auto& cand : candidates) {
    SeasonalComponent comp;
    comp.name = cand.name;
    comp.period = cand.period;
    comp.standardization = cand.standardization;
    if (cand.standardization == Standardization::None) {
      if (cand.period < 2 || n < 2 * cand.period) continue;
      const auto stl = stl_decompose(fit.deseasonalized, cand.period, params);
      const auto t = test_component(stl, cand.period);
      comp.variance_reduction = t.variance_reduction;
      comp.kw_pvalue = t.kw_pvalue;
      comp.history = center_cycles(stl.seasonal, cand.period);
    } else {
      if (!grid) continue;
      StandardGrid sg;
      try {
        sg = standardize(*grid, fit.deseasonalized, cand.standardization);
      } catch (const Error&) {
        continue;
      }
      if (sg.period < 2 || sg.values.size() < 2 * sg.period) continue;
      // Cycle-subseries are phase sets, so starting mid-cycle is harmless.
      const auto stl = stl_decompose(sg.values, sg.period, params);
      const auto t = test_component(stl, sg.period);
      comp.variance_reduction = t.variance_reduction;
      comp.kw_pvalue = t.kw_pvalue;
      comp.standard_history = center_cycles(stl.seasonal, sg.period);
      comp.standard_first = sg.first;
      comp.period = sg.period;
      comp.history = back_map(comp.standard_history, sg.first, sg.period, sg.u);
    }
    comp.significant = comp.variance_reduction >= test.min_variance_reduction && comp.kw_pvalue < test.kw_alpha;
    if (!comp.significant) {
      fit.rejected.push_back(std::move(comp));
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) fit.deseasonalized[i] -= comp.history[i];
    fit.components.push_back(std::move(comp));
  }
  return fit;
}

std::vector<double> extrapolate_component(const SeasonalComponent& component, const RegularSeries& grid,
                                          std::size_t horizon) {
  if (horizon == 0) return {};
  if (component.standardization == Standardization::None)
    return leap_extrapolate(component.history, component.period, horizon);
  const std::size_t n = component.history.size();
  std::vector<double> u(horizon);
  for (std::size_t h = 0; h < horizon; ++h)
    u[h] = StandardGrid::coordinate(grid, static_cast<std::int64_t>(n + h), component.standardization,
                                    component.period);
  const auto& hist = component.standard_history;
  const std::int64_t end = component.standard_first + static_cast<std::int64_t>(hist.size());
  const auto need = static_cast<std::int64_t>(std::ceil(u.back())) + 1;
  std::vector<double> extended(hist);
  if (need > end) {
    const auto more = leap_extrapolate(hist, component.period, static_cast<std::size_t>(need - end));
    extended.insert(extended.end(), more.begin(), more.end());
  }
  return back_map(extended, component.standard_first, component.period, u);
}

std::vector<double> preliminary_seasonal_profile(const RegularSeries& series,
                                                 std::span<const SeasonalCandidate> candidates) {
  const std::size_t n = series.size();
  std::vector<double> profile(n, 0.0);
  const auto mask = MissingMask::build(series.values);
  SmoothParams linear;
  linear.method = SmoothMethod::Linear;
  const auto filled = interpolate(series.values, mask, linear);
  const auto fit = detect_and_extract(filled, candidates, {}, &series);
  for (const auto& c : fit.components)
    for (std::size_t i = 0; i < n; ++i) profile[i] += c.history[i];
  return profile;
}

}  // namespace strata
