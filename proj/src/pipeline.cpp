#include "strata/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "strata/error.hpp"
#include "strata/gapfill.hpp"
#include "strata/stats.hpp"

namespace strata {

namespace {

constexpr std::array<std::pair<Stage, std::string_view>, 4> kStageNames{{
    {Stage::Holidays, "HOLIDAYS"},
    {Stage::SpikesAndDips, "SPIKES_AND_DIPS"},
    {Stage::Seasonality, "SEASONALITY"},
    {Stage::StepChanges, "STEP_CHANGES"},
}};

template <class F>
auto in_stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e);
  }
}

std::vector<SeasonalCandidate> candidates(const PipelineConfig& config, const Frequency& freq) {
  if (!config.seasonalities) return default_candidates(freq);
  std::vector<SeasonalCandidate> out;
  for (auto name : *config.seasonalities)
    if (auto c = candidate_for(name, freq)) out.push_back(*c);
  return out;
}

// Shortest plain cycle among the candidates: sets the spike edge length.
std::size_t shortest_period(std::span<const SeasonalCandidate> cands) {
  std::size_t best = 0;
  for (const auto& c : cands)
    if (c.standardization == Standardization::None && (best == 0 || c.period < best)) best = c.period;
  return best;
}

std::vector<std::pair<std::size_t, std::size_t>> outlier_slots(const RegularSeries& grid,
                                                               std::span<const std::pair<Micros, Micros>> periods) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const auto n = static_cast<std::int64_t>(grid.size());
  for (auto [a, b] : periods) {
    if (b < a) std::swap(a, b);
    std::int64_t first = grid.slot_of_wall(a);
    if (grid.slot_wall(first) < a) ++first;
    std::int64_t last = grid.slot_of_wall(b);
    first = std::max<std::int64_t>(first, 0);
    last = std::min<std::int64_t>(last, n - 1);
    if (first <= last) out.emplace_back(static_cast<std::size_t>(first), static_cast<std::size_t>(last));
  }
  return out;
}

std::vector<double> profile_or_empty(const RegularSeries& grid, std::vector<double> values,
                                     std::span<const SeasonalCandidate> cands) {
  if (cands.empty()) return {};
  RegularSeries copy = grid;
  copy.values = std::move(values);
  try {
    return preliminary_seasonal_profile(copy, cands);
  } catch (const Error&) {
    return {};
  }
}

std::vector<double> centered_average(std::span<const double> x, std::size_t window) {
  const std::size_t n = x.size();
  const std::size_t half = window / 2;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n, i + half + 1);
    double s = 0.0;
    for (std::size_t j = lo; j < hi; ++j) s += x[j];
    out[i] = s / static_cast<double>(hi - lo);
  }
  return out;
}

SpikeReport spike_pass(std::vector<double>& cur, const PipelineConfig& config, std::size_t period,
                       const SlotCalendar& cal) {
  SpikeParams params = config.spikes;
  if (params.seasonal_period == 0) params.seasonal_period = period;
  if (cur.size() <= 2 * params.edge_length()) return {};
  SpikeReport rep = detect_spikes(cur, params, &cal);
  if (rep.detected.empty()) return rep;
  cur = clean_spikes(cur, rep);
  return rep;
}

std::map<std::string, std::vector<double>> attributions(const XregPart& x, const DesignMatrix& design) {
  std::map<std::string, std::vector<double>> out;
  const auto rows = design.x.rows();
  for (Eigen::Index c = 2; c < design.x.cols(); ++c) {
    std::string feature = design.column_names[static_cast<std::size_t>(c)];
    if (auto eq = feature.find('='); eq != std::string::npos) {
      // categorical indicators roll up to their feature
      for (const auto& e : x.encodings)
        if (e.categorical && feature.compare(0, eq, e.feature) == 0 && e.feature.size() == eq) feature = e.feature;
    }
    auto& v = out["attribution_" + feature];
    v.resize(static_cast<std::size_t>(rows), 0.0);
    for (Eigen::Index i = 0; i < rows; ++i) v[static_cast<std::size_t>(i)] += design.x(i, c) * x.ridge.beta(c);
  }
  return out;
}

Bundle fit_core(const RegularSeries& series, const PipelineConfig& config, const Covariates* cov) {
  Bundle b;
  b.config = config;
  b.grid = series;
  const std::size_t n = series.size();
  if (n == 0) throw StageError("regularize", Error(ErrorCode::EmptyAfterCleaning, "no observations"));
  const auto cands = candidates(config, series.freq);

  b.filled = in_stage("interpolate", [&] {
    const auto ranges = outlier_slots(series, config.outlier_periods);
    const MissingMask mask = MissingMask::build(series.values, config.missing_value_sentinels, ranges);
    b.missing = mask.indices();
    if (mask.empty()) return series.values;
    if (mask.size() == n) throw Error(ErrorCode::AllMissing, "every slot is missing");
    std::vector<double> masked = series.values;
    for (auto i : b.missing) masked[i] = std::nan("");
    SmoothParams sp;
    sp.seasonal_profile = profile_or_empty(series, masked, cands);
    return interpolate(series.values, mask, sp);
  });

  if (config.limits.active()) {
    in_stage("limits", [&] {
      for (auto& v : b.filled) v = apply_limits(v, config.limits);
      return 0;
    });
  }

  std::vector<double> cur = b.filled;
  if (cov && !cov->empty()) {
    in_stage("xreg", [&] {
      for (const auto& c : cov->columns)
        if (c.raw.size() != n)
          throw Error(ErrorCode::MisalignedCovariates,
                      "covariate '" + c.name + "' has " + std::to_string(c.raw.size()) + " rows for " +
                          std::to_string(n) + " slots");
      const DesignMatrix design = dummy_encode(cov->columns, 0);
      XregPart x;
      x.encodings = design.encodings;
      x.ridge = fit_ridge(design, Eigen::Map<const Eigen::VectorXd>(cur.data(), static_cast<Eigen::Index>(n)),
                          config.l2_reg);
      const Eigen::VectorXd part = covariate_part(x.ridge, design);
      x.history.assign(part.data(), part.data() + part.size());
      x.attribution_history = attributions(x, design);
      for (std::size_t i = 0; i < n; ++i) cur[i] -= x.history[i];
      b.xreg = std::move(x);
      return 0;
    });
  }

  b.holiday_effect.assign(n, 0.0);
  b.spikes_and_dips.assign(n, 0.0);
  b.step_changes.assign(n, 0.0);
  const SlotCalendar cal = slot_calendar(series);
  const std::size_t spike_period = shortest_period(cands);
  std::set<std::size_t> spikes;

  for (Stage stage : config.stages) {
    switch (stage) {
      case Stage::Holidays:
        in_stage("holidays", [&] {
          std::vector<HolidaySpec> specs;
          for (const auto& r : config.holiday_regions) {
            auto h = builtin_holidays(r);
            if (h.empty()) throw Error(ErrorCode::InvalidConfig, "unknown holiday region '" + r + "'");
            specs.insert(specs.end(), h.begin(), h.end());
          }
          specs.insert(specs.end(), config.custom_holidays.begin(), config.custom_holidays.end());
          if (specs.empty()) return 0;
          b.holidays = specs;
          const auto windows = expand_windows(specs, series, 0, static_cast<std::int64_t>(n));
          bool any = false;
          std::vector<double> masked = cur;
          for (const auto& w : windows)
            for (const auto& [year, slots] : w.slots)
              for (auto s : slots)
                if (s >= 0 && s < static_cast<std::int64_t>(n)) {
                  masked[static_cast<std::size_t>(s)] = std::nan("");
                  any = true;
                }
          if (!any) return 0;
          const auto profile = profile_or_empty(series, masked, cands);
          auto est = estimate_effects(cur, windows, profile);
          b.holiday_effects = std::move(est.effects);
          b.holiday_effect = apply_effects(b.holiday_effects, windows, 0, n).total;
          for (std::size_t i = 0; i < n; ++i) cur[i] -= b.holiday_effect[i];
          return 0;
        });
        break;
      case Stage::SpikesAndDips:
        if (!config.clean_spikes_and_dips) break;
        in_stage("spikes_and_dips", [&] {
          const auto rep = spike_pass(cur, config, spike_period, cal);
          for (auto i : rep.detected) {
            b.spikes_and_dips[i] += rep.component[i];
            spikes.insert(i);
          }
          return 0;
        });
        break;
      case Stage::Seasonality:
        in_stage("seasonality", [&] {
          if (cands.empty()) return 0;
          auto sf = detect_and_extract(cur, cands, config.stl, &series, config.seasonality_test);
          b.seasonal = std::move(sf.components);
          cur = std::move(sf.deseasonalized);
          return 0;
        });
        if (config.second_spike_pass && config.clean_spikes_and_dips) {
          in_stage("spikes_and_dips", [&] {
            const auto rep = spike_pass(cur, config, spike_period, cal);
            for (auto i : rep.detected) {
              b.spikes_and_dips[i] += rep.component[i];
              spikes.insert(i);
            }
            return 0;
          });
        }
        break;
      case Stage::StepChanges:
        if (!config.adjust_step_changes) break;
        in_stage("step_changes", [&] {
          std::size_t dominant = 0;
          double best = -1.0;
          for (const auto& c : b.seasonal) {
            const double v = stats::variance(c.history);
            if (v > best) {
              best = v;
              dominant = c.period;
            }
          }
          BreakParams params;
          params.m = default_window(dominant);
          params.z_threshold = config.change_z_threshold;
          params.chow_alpha = config.chow_alpha;
          if (n < 3 * params.m) return 0;
          const auto periods = detect_change_periods(cur, params);
          if (periods.empty()) return 0;
          const auto rep = adjust_step_changes(cur, periods, params);
          b.change_periods = rep.periods;
          for (std::size_t i = 0; i < n; ++i) b.step_changes[i] = cur[i] - rep.cleaned[i];
          cur = rep.cleaned;
          return 0;
        });
        break;
    }
  }
  b.spike_indices.assign(spikes.begin(), spikes.end());

  in_stage("trend", [&] {
    std::size_t len = n;
    if (config.time_series_length_fraction) {
      const double f = *config.time_series_length_fraction;
      if (!(f > 0.0 && f <= 1.0)) throw Error(ErrorCode::InvalidConfig, "time_series_length_fraction must be in (0, 1]");
      len = std::max(config.min_time_series_length, static_cast<std::size_t>(std::ceil(f * static_cast<double>(n))));
    }
    if (config.max_time_series_length > 0) len = std::min(len, config.max_time_series_length);
    len = std::min(len, n);
    b.trend_window_start = n - len;
    std::vector<double> window(cur.begin() + static_cast<std::ptrdiff_t>(b.trend_window_start), cur.end());
    if (config.trend_smoothing_window_size > 1) window = centered_average(window, config.trend_smoothing_window_size);
    if (config.auto_arima) {
      AutoArimaOptions opts = config.arima;
      if (config.non_seasonal_order) {
        b.arima = fit_arima(window, *config.non_seasonal_order);
      } else {
        b.arima = auto_arima(window, opts, config.arima_execution);
      }
    } else {
      if (!config.non_seasonal_order)
        throw Error(ErrorCode::InvalidConfig, "non_seasonal_order is required when auto_arima is off");
      b.arima = fit_arima(window, *config.non_seasonal_order);
    }
    const auto res = one_step_residuals(b.arima, cur);
    b.trend.resize(n);
    for (std::size_t i = 0; i < n; ++i) b.trend[i] = cur[i] - res[i];
    return 0;
  });

  b.residual.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b.trend[i] + b.holiday_effect[i] + b.spikes_and_dips[i] + b.step_changes[i];
    for (const auto& c : b.seasonal) s += c.history[i];
    if (b.xreg) s += b.xreg->history[i];
    b.residual[i] = b.filled[i] - s;
  }
  return b;
}

// Forecast components on the transformed scale.
struct FutureParts {
  std::vector<double> mean, std_err;
  std::map<std::string, std::vector<double>> components;
};

std::string seasonal_key(const SeasonalComponent& c) {
  std::string s(to_string(c.name));
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return "seasonal_period_" + s;
}

FutureParts future_parts(const Bundle& b, std::size_t horizon, const Covariates* future) {
  FutureParts fp;
  const auto tf = forecast_trend(b.arima, horizon);
  fp.mean = tf.mean;
  fp.std_err = tf.std_err;
  fp.components["trend"] = tf.mean;
  for (const auto& c : b.seasonal) {
    const auto s = extrapolate_component(c, b.grid, horizon);
    for (std::size_t h = 0; h < horizon; ++h) fp.mean[h] += s[h];
    fp.components[seasonal_key(c)] = s;
  }
  std::vector<double> hol(horizon, 0.0);
  if (!b.holiday_effects.empty()) hol = extrapolate_effects(b.holiday_effects, b.holidays, b.grid, horizon).total;
  for (std::size_t h = 0; h < horizon; ++h) fp.mean[h] += hol[h];
  fp.components["holiday_effect"] = hol;
  if (b.xreg && b.xreg->ridge.beta.size() > 2) {
    if (!future) throw Error(ErrorCode::MissingFutureCovariates, "model was trained with covariates");
    for (const auto& c : future->columns)
      if (c.raw.size() < horizon)
        throw Error(ErrorCode::MissingFutureCovariates,
                    "covariate '" + c.name + "' has " + std::to_string(c.raw.size()) + " future rows, need " +
                        std::to_string(horizon));
    std::vector<CovariateColumn> cut = future->columns;
    for (auto& c : cut) c.raw.resize(horizon);
    const DesignMatrix design = encode_with(b.xreg->encodings, cut, b.size());
    for (auto& [name, v] : attributions(*b.xreg, design)) {
      for (std::size_t h = 0; h < horizon; ++h) fp.mean[h] += v[h];
      fp.components[name] = std::move(v);
    }
  }
  return fp;
}

void check_threshold(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidThreshold, "threshold must lie in (0, 1)");
}

AnomalyVerdict score(const Bundle& b, std::int64_t slot, double actual_t, double expected_t, double sigma,
                     double threshold) {
  AnomalyVerdict v;
  v.slot = slot;
  v.timestamp = slot_timestamp(b.grid, slot);
  const double q = stats::normal_quantile((1.0 + threshold) / 2.0);
  double lo = expected_t - q * sigma;
  double hi = expected_t + q * sigma;
  if (sigma > 0.0) {
    v.probability = std::abs(1.0 - 2.0 * stats::normal_cdf((actual_t - expected_t) / sigma));
  } else {
    v.probability = actual_t == expected_t ? 0.0 : 1.0;
  }
  v.is_anomaly = v.probability > threshold;
  const auto& lim = b.config.limits;
  if (lim.active()) {
    v.actual = invert_limits(actual_t, lim);
    v.expected = invert_limits(expected_t, lim);
    v.lower = invert_limits(lo, lim);
    v.upper = invert_limits(hi, lim);
  } else {
    v.actual = actual_t;
    v.expected = expected_t;
    v.lower = lo;
    v.upper = hi;
  }
  return v;
}

}  // namespace

std::string_view to_string(Stage stage) {
  for (auto [s, name] : kStageNames)
    if (s == stage) return name;
  return "UNKNOWN";
}

std::optional<Stage> parse_stage(std::string_view text) {
  std::string u(text);
  std::transform(u.begin(), u.end(), u.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (auto [s, name] : kStageNames)
    if (u == name) return s;
  return std::nullopt;
}

double LimitsTransform::epsilon() const {
  if (two_sided()) return 1e-6 * (upper - lower);
  const double bound = std::isfinite(lower) ? lower : upper;
  return 1e-6 * std::max(1.0, std::abs(bound));
}

double apply_limits(double x, const LimitsTransform& lim) {
  if (!lim.active()) return x;
  if (lim.two_sided() && !(lim.lower < lim.upper))
    throw Error(ErrorCode::InvalidConfig, "forecast limits need lower < upper");
  if (!std::isfinite(x)) throw Error(ErrorCode::ValueOutsideLimits, "non-finite value");
  const double eps = lim.epsilon();
  if (x < lim.lower || x > lim.upper)
    throw Error(ErrorCode::ValueOutsideLimits, "value " + std::to_string(x) + " outside forecast limits");
  if (std::isfinite(lim.lower)) x = std::max(x, lim.lower + eps);
  if (std::isfinite(lim.upper)) x = std::min(x, lim.upper - eps);
  if (lim.two_sided()) return std::log((x - lim.lower) / (lim.upper - x));
  if (std::isfinite(lim.lower)) return std::log(x - lim.lower);
  return std::log(lim.upper - x);
}

double invert_limits(double y, const LimitsTransform& lim) {
  if (!lim.active()) return y;
  if (lim.two_sided()) {
    const double w = lim.upper - lim.lower;
    // logistic, written to stay finite for large |y|
    const double s = y >= 0.0 ? 1.0 / (1.0 + std::exp(-y)) : std::exp(y) / (1.0 + std::exp(y));
    return lim.lower + w * s;
  }
  if (std::isfinite(lim.lower)) return lim.lower + std::exp(y);
  return lim.upper - std::exp(y);
}

std::pair<double, double> limit_interval(double x, double k, const LimitsTransform& lim) {
  if (!lim.active()) return {x - k, x + k};
  const double a = lim.lower, b = lim.upper;
  if (lim.two_sided()) {
    // (a(b-x)e^k + b(x-a)) / ((b-x)e^k + (x-a)) and its mirror, scaled by e^-k
    const double e = std::exp(-k);
    const double lo = (a * (b - x) + b * (x - a) * e) / ((b - x) + (x - a) * e);
    const double hi = (a * (b - x) * e + b * (x - a)) / ((b - x) * e + (x - a));
    return {lo, hi};
  }
  if (std::isfinite(a)) return {a + std::exp(std::log(x - a) - k), a + std::exp(std::log(x - a) + k)};
  return {b - std::exp(std::log(b - x) + k), b - std::exp(std::log(b - x) - k)};
}

Micros slot_timestamp(const RegularSeries& grid, std::int64_t slot) {
  for (std::int64_t back = 0; back < 8; ++back) {
    const auto utc = grid.slot_utc(slot - back);
    if (!utc.empty())
      return utc.front() + back * (grid.freq.is_calendar() ? 0 : grid.freq.interval);
  }
  return grid.slot_wall(slot);
}

Bundle fit(const RawSeries& raw, const PipelineConfig& config) {
  RegularizeOptions ro;
  ro.freq_override = config.data_frequency;
  ro.timezone = config.timezone;
  ro.aggregator = config.aggregator;
  const RegularSeries grid = in_stage("regularize", [&] { return regularize(raw, ro); });
  return fit_core(grid, config, nullptr);
}

Bundle fit(const RegularSeries& series, const PipelineConfig& config) { return fit_core(series, config, nullptr); }

Bundle fit_xreg(const RegularSeries& series, const Covariates& covariates, const PipelineConfig& config) {
  return fit_core(series, config, &covariates);
}

ForecastResult forecast(const Bundle& b, std::size_t horizon, double confidence, const Covariates* future) {
  if (!(confidence > 0.0 && confidence < 1.0))
    throw Error(ErrorCode::InvalidConfidence, "confidence level must lie in (0, 1)");
  auto fp = future_parts(b, horizon, future);
  ForecastResult r;
  r.confidence_level = confidence;
  const double z = stats::normal_quantile((1.0 + confidence) / 2.0);
  const auto& lim = b.config.limits;
  const std::int64_t n = static_cast<std::int64_t>(b.size());
  for (std::size_t h = 0; h < horizon; ++h) {
    r.timestamps.push_back(slot_timestamp(b.grid, n + static_cast<std::int64_t>(h)));
    const double m = fp.mean[h], se = fp.std_err[h];
    if (lim.active()) {
      const double x = invert_limits(m, lim);
      const auto [lo, hi] = limit_interval(x, z * se, lim);
      r.mean.push_back(x);
      r.lower.push_back(lo);
      r.upper.push_back(hi);
      r.std_err.push_back((hi - lo) / (2.0 * z));
    } else {
      r.mean.push_back(m);
      r.lower.push_back(m - z * se);
      r.upper.push_back(m + z * se);
      r.std_err.push_back(se);
    }
  }
  r.components = std::move(fp.components);
  return r;
}

ComponentDecomposition decompose(const Bundle& b, std::size_t horizon, const Covariates* future) {
  ComponentDecomposition d;
  const std::size_t n = b.size();
  for (std::size_t i = 0; i < n; ++i) d.history_timestamps.push_back(slot_timestamp(b.grid, static_cast<std::int64_t>(i)));
  d.history["input"] = b.filled;
  d.history["trend"] = b.trend;
  d.history["residual"] = b.residual;
  d.history["holiday_effect"] = b.holiday_effect;
  d.history["spikes_and_dips"] = b.spikes_and_dips;
  d.history["step_changes"] = b.step_changes;
  for (const auto& c : b.seasonal) d.history[seasonal_key(c)] = c.history;
  if (b.xreg)
    for (const auto& [name, v] : b.xreg->attribution_history) d.history[name] = v;
  if (horizon > 0) {
    auto fp = future_parts(b, horizon, future);
    for (std::size_t h = 0; h < horizon; ++h)
      d.future_timestamps.push_back(slot_timestamp(b.grid, static_cast<std::int64_t>(n + h)));
    d.future = std::move(fp.components);
    d.future["forecast"] = std::move(fp.mean);
  }
  return d;
}

std::vector<AnomalyVerdict> detect_anomalies(const Bundle& b, double threshold) {
  check_threshold(threshold);
  const double sigma = std::sqrt(b.arima.sigma2);
  const std::set<std::size_t> missing(b.missing.begin(), b.missing.end());
  std::vector<AnomalyVerdict> out;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (missing.count(i)) continue;
    const double expected = b.filled[i] - b.spikes_and_dips[i] - b.residual[i];
    out.push_back(score(b, static_cast<std::int64_t>(i), b.filled[i], expected, sigma, threshold));
  }
  return out;
}

std::vector<AnomalyVerdict> detect_anomalies(const Bundle& b,
                                             const std::vector<std::pair<std::int64_t, double>>& obs,
                                             double threshold, const Covariates* future) {
  check_threshold(threshold);
  const auto n = static_cast<std::int64_t>(b.size());
  std::int64_t last = -1;
  for (const auto& [slot, v] : obs) {
    if (slot < 0) throw Error(ErrorCode::IndexOutOfRange, "observation before the start of the model grid");
    last = std::max(last, slot);
  }
  FutureParts fp;
  if (last >= n) fp = future_parts(b, static_cast<std::size_t>(last - n + 1), future);
  const double sigma = std::sqrt(b.arima.sigma2);
  std::vector<AnomalyVerdict> out;
  for (const auto& [slot, raw] : obs) {
    if (std::isnan(raw)) continue;
    const double actual = b.config.limits.active() ? apply_limits(raw, b.config.limits) : raw;
    if (slot < n) {
      const auto i = static_cast<std::size_t>(slot);
      const double expected = b.filled[i] - b.spikes_and_dips[i] - b.residual[i];
      out.push_back(score(b, slot, actual, expected, sigma, threshold));
    } else {
      const auto h = static_cast<std::size_t>(slot - n);
      out.push_back(score(b, slot, actual, fp.mean[h], fp.std_err[h], threshold));
    }
  }
  return out;
}

// ---- serialization

namespace {

using nlohmann::json;

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }
double num(const json& j, double fallback = std::nan("")) { return j.is_null() ? fallback : j.get<double>(); }

json vec(std::span<const double> v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}
std::vector<double> doubles(const json& j) {
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& x : j) v.push_back(num(x));
  return v;
}

json order_json(const ArimaOrder& o) { return {{"p", o.p}, {"d", o.d}, {"q", o.q}, {"drift", o.drift}}; }
ArimaOrder order_from(const json& j) {
  return {j.at("p").get<int>(), j.at("d").get<int>(), j.at("q").get<int>(), j.value("drift", false)};
}

json freq_json(const Frequency& f) { return {{"kind", std::string(to_string(f.kind))}, {"interval", f.interval}}; }
Frequency freq_from(const json& j) {
  const auto kind = parse_frequency_kind(j.at("kind").get<std::string>());
  if (!kind) throw Error(ErrorCode::InvalidConfig, "bad frequency in bundle");
  return {*kind, j.at("interval").get<std::int64_t>()};
}

json holidays_json(std::span<const HolidaySpec> specs) {
  json a = json::array();
  for (const auto& s : specs) {
    json occ = json::array();
    for (const auto& o : s.occurrences)
      occ.push_back({format_date(o.date), o.pre_days, o.post_days});
    a.push_back({{"name", s.name}, {"region", s.region}, {"occurrences", occ}});
  }
  return a;
}
std::vector<HolidaySpec> holidays_from(const json& j) {
  std::vector<HolidaySpec> out;
  for (const auto& s : j) {
    HolidaySpec h;
    h.name = s.at("name").get<std::string>();
    h.region = s.at("region").get<std::string>();
    for (const auto& o : s.at("occurrences")) {
      const auto t = parse_timestamp(o.at(0).get<std::string>());
      if (!t) throw Error(ErrorCode::InvalidConfig, "bad holiday date in bundle");
      h.occurrences.push_back({date_of(*t), o.at(1).get<int>(), o.at(2).get<int>()});
    }
    out.push_back(std::move(h));
  }
  return out;
}

json config_json(const PipelineConfig& c) {
  json j;
  j["data_frequency"] = c.data_frequency ? freq_json(*c.data_frequency) : json(nullptr);
  j["timezone"] = c.timezone ? json(*c.timezone) : json(nullptr);
  j["aggregator"] = c.aggregator == Aggregator::Sum ? "SUM" : "MEAN";
  j["missing_value_sentinels"] = c.missing_value_sentinels;
  j["outlier_periods"] = c.outlier_periods;
  json stages = json::array();
  for (auto s : c.stages) stages.push_back(std::string(to_string(s)));
  j["stages"] = stages;
  j["holiday_regions"] = c.holiday_regions;
  j["custom_holidays"] = holidays_json(c.custom_holidays);
  j["clean_spikes_and_dips"] = c.clean_spikes_and_dips;
  j["spikes"] = {{"alpha", c.spikes.alpha}, {"beta", c.spikes.beta}, {"threshold", c.spikes.threshold},
                 {"edge", c.spikes.edge}, {"seasonal_period", c.spikes.seasonal_period}};
  j["second_spike_pass"] = c.second_spike_pass;
  if (c.seasonalities) {
    json a = json::array();
    for (auto p : *c.seasonalities) a.push_back(std::string(to_string(p)));
    j["seasonalities"] = a;
  } else {
    j["seasonalities"] = nullptr;
  }
  j["stl"] = {{"seasonal_window", c.stl.seasonal_window}, {"trend_window", c.stl.trend_window},
              {"low_pass_window", c.stl.low_pass_window}, {"inner_iters", c.stl.inner_iters},
              {"robust_iters", c.stl.robust_iters},       {"degree", c.stl.degree}};
  j["seasonality_test"] = {{"min_variance_reduction", c.seasonality_test.min_variance_reduction},
                           {"kw_alpha", c.seasonality_test.kw_alpha}};
  j["adjust_step_changes"] = c.adjust_step_changes;
  j["change_z_threshold"] = c.change_z_threshold;
  j["chow_alpha"] = c.chow_alpha;
  j["auto_arima"] = c.auto_arima;
  j["arima"] = {{"max_order", c.arima.max_order},
                {"min_order", c.arima.min_order},
                {"max_d", c.arima.max_d},
                {"include_drift", c.arima.include_drift ? json(*c.arima.include_drift) : json(nullptr)}};
  j["non_seasonal_order"] = c.non_seasonal_order ? order_json(*c.non_seasonal_order) : json(nullptr);
  j["max_time_series_length"] = c.max_time_series_length;
  j["min_time_series_length"] = c.min_time_series_length;
  j["time_series_length_fraction"] =
      c.time_series_length_fraction ? json(*c.time_series_length_fraction) : json(nullptr);
  j["trend_smoothing_window_size"] = c.trend_smoothing_window_size;
  j["limits"] = {{"lower", num(c.limits.lower)}, {"upper", num(c.limits.upper)}};
  j["l2_reg"] = c.l2_reg;
  return j;
}

PipelineConfig config_from(const json& j) {
  PipelineConfig c;
  if (!j.at("data_frequency").is_null()) c.data_frequency = freq_from(j.at("data_frequency"));
  if (!j.at("timezone").is_null()) c.timezone = j.at("timezone").get<std::string>();
  c.aggregator = j.at("aggregator") == "SUM" ? Aggregator::Sum : Aggregator::Mean;
  c.missing_value_sentinels = j.at("missing_value_sentinels").get<std::vector<double>>();
  c.outlier_periods = j.at("outlier_periods").get<std::vector<std::pair<Micros, Micros>>>();
  c.stages.clear();
  for (const auto& s : j.at("stages")) c.stages.push_back(*parse_stage(s.get<std::string>()));
  c.holiday_regions = j.at("holiday_regions").get<std::vector<std::string>>();
  c.custom_holidays = holidays_from(j.at("custom_holidays"));
  c.clean_spikes_and_dips = j.at("clean_spikes_and_dips");
  const auto& sp = j.at("spikes");
  c.spikes.alpha = sp.at("alpha");
  c.spikes.beta = sp.at("beta");
  c.spikes.threshold = sp.at("threshold");
  c.spikes.edge = sp.at("edge");
  c.spikes.seasonal_period = sp.at("seasonal_period");
  c.second_spike_pass = j.at("second_spike_pass");
  if (!j.at("seasonalities").is_null()) {
    c.seasonalities.emplace();
    for (const auto& p : j.at("seasonalities")) c.seasonalities->push_back(*parse_period_name(p.get<std::string>()));
  }
  const auto& stl = j.at("stl");
  c.stl.seasonal_window = stl.at("seasonal_window");
  c.stl.trend_window = stl.at("trend_window");
  c.stl.low_pass_window = stl.at("low_pass_window");
  c.stl.inner_iters = stl.at("inner_iters");
  c.stl.robust_iters = stl.at("robust_iters");
  c.stl.degree = stl.at("degree");
  c.seasonality_test.min_variance_reduction = j.at("seasonality_test").at("min_variance_reduction");
  c.seasonality_test.kw_alpha = j.at("seasonality_test").at("kw_alpha");
  c.adjust_step_changes = j.at("adjust_step_changes");
  c.change_z_threshold = j.at("change_z_threshold");
  c.chow_alpha = j.at("chow_alpha");
  c.auto_arima = j.at("auto_arima");
  const auto& ar = j.at("arima");
  c.arima.max_order = ar.at("max_order");
  c.arima.min_order = ar.at("min_order");
  c.arima.max_d = ar.at("max_d");
  if (!ar.at("include_drift").is_null()) c.arima.include_drift = ar.at("include_drift").get<bool>();
  if (!j.at("non_seasonal_order").is_null()) c.non_seasonal_order = order_from(j.at("non_seasonal_order"));
  c.max_time_series_length = j.at("max_time_series_length");
  c.min_time_series_length = j.at("min_time_series_length");
  if (!j.at("time_series_length_fraction").is_null())
    c.time_series_length_fraction = j.at("time_series_length_fraction").get<double>();
  c.trend_smoothing_window_size = j.at("trend_smoothing_window_size");
  c.limits.lower = num(j.at("limits").at("lower"), -std::numeric_limits<double>::infinity());
  c.limits.upper = num(j.at("limits").at("upper"), std::numeric_limits<double>::infinity());
  c.l2_reg = j.at("l2_reg");
  return c;
}

}  // namespace

json to_json(const Bundle& b) {
  json j;
  j["format"] = "strata-bundle";
  j["version"] = 1;
  j["config"] = config_json(b.config);
  j["grid"] = {{"start", b.grid.start},
               {"freq", freq_json(b.grid.freq)},
               {"timezone", b.grid.timezone ? json(*b.grid.timezone) : json(nullptr)},
               {"basis", std::string(to_string(b.grid.basis))},
               {"values", vec(b.grid.values)}};
  j["filled"] = vec(b.filled);
  j["missing"] = b.missing;
  j["holidays"] = holidays_json(b.holidays);
  json effects = json::array();
  for (const auto& e : b.holiday_effects) {
    json raw = json::object(), sm = json::object();
    for (auto [y, v] : e.yearly_raw) raw[std::to_string(y)] = num(v);
    for (auto [y, v] : e.yearly_smoothed) sm[std::to_string(y)] = num(v);
    effects.push_back(
        {{"holiday", e.holiday}, {"offset", e.offset}, {"effect", num(e.effect)}, {"yearly_raw", raw}, {"yearly_smoothed", sm}});
  }
  j["holiday_effects"] = effects;
  j["holiday_effect"] = vec(b.holiday_effect);
  j["spike_indices"] = b.spike_indices;
  j["spikes_and_dips"] = vec(b.spikes_and_dips);
  json seasonal = json::array();
  for (const auto& c : b.seasonal)
    seasonal.push_back({{"name", std::string(to_string(c.name))},
                        {"period", c.period},
                        {"standardization", static_cast<int>(c.standardization)},
                        {"history", vec(c.history)},
                        {"variance_reduction", num(c.variance_reduction)},
                        {"kw_pvalue", num(c.kw_pvalue)},
                        {"standard_history", vec(c.standard_history)},
                        {"standard_first", c.standard_first}});
  j["seasonal"] = seasonal;
  json periods = json::array();
  for (const auto& p : b.change_periods) periods.push_back({p.start, p.end});
  j["change_periods"] = periods;
  j["step_changes"] = vec(b.step_changes);
  j["trend"] = vec(b.trend);
  j["residual"] = vec(b.residual);
  j["trend_window_start"] = b.trend_window_start;
  const auto& a = b.arima;
  j["arima"] = {{"order", order_json(a.order)}, {"ar", vec(a.ar)},         {"ma", vec(a.ma)},
                {"constant", num(a.constant)},   {"sigma2", num(a.sigma2)}, {"loglik", num(a.loglik)},
                {"aic", num(a.aic)},             {"n_train", a.n_train},    {"converged", a.converged},
                {"train", vec(a.train)},         {"residuals", vec(a.residuals)}};
  if (b.xreg) {
    json enc = json::array();
    for (const auto& e : b.xreg->encodings)
      enc.push_back({{"feature", e.feature}, {"categorical", e.categorical}, {"levels", e.levels}});
    const auto& beta = b.xreg->ridge.beta;
    j["xreg"] = {{"beta", vec(std::span<const double>(beta.data(), static_cast<std::size_t>(beta.size())))},
                 {"lambda", b.xreg->ridge.lambda},
                 {"column_names", b.xreg->ridge.column_names},
                 {"encodings", enc},
                 {"history", vec(b.xreg->history)}};
    for (const auto& [name, v] : b.xreg->attribution_history) j["xreg"]["attribution_history"][name] = vec(v);
  } else {
    j["xreg"] = nullptr;
  }
  return j;
}

Bundle bundle_from_json(const json& j) {
  try {
    if (j.value("format", "") != "strata-bundle") throw Error(ErrorCode::InvalidConfig, "not a model bundle");
    Bundle b;
    b.config = config_from(j.at("config"));
    const auto& g = j.at("grid");
    b.grid.start = g.at("start");
    b.grid.freq = freq_from(g.at("freq"));
    if (!g.at("timezone").is_null()) b.grid.timezone = g.at("timezone").get<std::string>();
    b.grid.basis = *parse_index_basis(g.at("basis").get<std::string>());
    b.grid.values = doubles(g.at("values"));
    b.filled = doubles(j.at("filled"));
    b.missing = j.at("missing").get<std::vector<std::size_t>>();
    b.holidays = holidays_from(j.at("holidays"));
    for (const auto& e : j.at("holiday_effects")) {
      SubHolidayEffect s;
      s.holiday = e.at("holiday");
      s.offset = e.at("offset");
      s.effect = num(e.at("effect"));
      for (const auto& [y, v] : e.at("yearly_raw").items()) s.yearly_raw[std::stoi(y)] = num(v);
      for (const auto& [y, v] : e.at("yearly_smoothed").items()) s.yearly_smoothed[std::stoi(y)] = num(v);
      b.holiday_effects.push_back(std::move(s));
    }
    b.holiday_effect = doubles(j.at("holiday_effect"));
    b.spike_indices = j.at("spike_indices").get<std::vector<std::size_t>>();
    b.spikes_and_dips = doubles(j.at("spikes_and_dips"));
    for (const auto& c : j.at("seasonal")) {
      SeasonalComponent s;
      s.name = *parse_period_name(c.at("name").get<std::string>());
      s.period = c.at("period");
      s.standardization = static_cast<Standardization>(c.at("standardization").get<int>());
      s.history = doubles(c.at("history"));
      s.significant = true;
      s.variance_reduction = num(c.at("variance_reduction"));
      s.kw_pvalue = num(c.at("kw_pvalue"));
      s.standard_history = doubles(c.at("standard_history"));
      s.standard_first = c.at("standard_first");
      b.seasonal.push_back(std::move(s));
    }
    for (const auto& p : j.at("change_periods")) b.change_periods.push_back({p.at(0), p.at(1)});
    b.step_changes = doubles(j.at("step_changes"));
    b.trend = doubles(j.at("trend"));
    b.residual = doubles(j.at("residual"));
    b.trend_window_start = j.at("trend_window_start");
    const auto& a = j.at("arima");
    b.arima.order = order_from(a.at("order"));
    b.arima.ar = doubles(a.at("ar"));
    b.arima.ma = doubles(a.at("ma"));
    b.arima.constant = num(a.at("constant"));
    b.arima.sigma2 = num(a.at("sigma2"));
    b.arima.loglik = num(a.at("loglik"));
    b.arima.aic = num(a.at("aic"));
    b.arima.n_train = a.at("n_train");
    b.arima.converged = a.at("converged");
    b.arima.train = doubles(a.at("train"));
    b.arima.residuals = doubles(a.at("residuals"));
    if (!j.at("xreg").is_null()) {
      const auto& x = j.at("xreg");
      XregPart part;
      const auto beta = doubles(x.at("beta"));
      part.ridge.beta = Eigen::Map<const Eigen::VectorXd>(beta.data(), static_cast<Eigen::Index>(beta.size()));
      part.ridge.lambda = x.at("lambda");
      part.ridge.column_names = x.at("column_names").get<std::vector<std::string>>();
      for (const auto& e : x.at("encodings"))
        part.encodings.push_back({e.at("feature"), e.at("categorical"), e.at("levels").get<std::vector<std::string>>()});
      part.history = doubles(x.at("history"));
      if (x.contains("attribution_history"))
        for (const auto& [name, v] : x.at("attribution_history").items()) part.attribution_history[name] = doubles(v);
      b.xreg = std::move(part);
    }
    return b;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("malformed model bundle: ") + e.what());
  }
}

}  // namespace strata
