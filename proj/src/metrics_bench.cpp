#include "strata/metrics_bench.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "strata/error.hpp"

namespace strata {

MetricReport compute_metrics(std::span<const double> actuals, std::span<const double> forecasts,
                             std::span<const double> train, std::size_t k) {
  if (actuals.size() != forecasts.size() || actuals.empty())
    throw Error(ErrorCode::InvalidArgument, "actuals and forecasts must be non-empty and equally long");
  k = std::max<std::size_t>(k, 1);
  if (train.size() <= k) throw Error(ErrorCode::TooShort, "training series not longer than the seasonal period");
  MetricReport r;
  const std::size_t h = actuals.size();
  r.horizon = h;
  double abs_sum = 0.0, sq_sum = 0.0, pct_sum = 0.0, sym_sum = 0.0;
  std::size_t pct_n = 0;
  for (std::size_t i = 0; i < h; ++i) {
    const double y = actuals[i], f = forecasts[i], e = f - y;
    abs_sum += std::abs(e);
    sq_sum += e * e;
    if (y != 0.0) {
      pct_sum += std::abs(e / y);
      ++pct_n;
    } else {
      ++r.mape_skipped;
    }
    const double denom = std::abs(y) + std::abs(f);
    if (denom > 0.0) sym_sum += std::abs(e) / denom;
  }
  const double hn = static_cast<double>(h);
  r.mae = abs_sum / hn;
  r.rmse = std::sqrt(sq_sum / hn);
  r.mape = pct_n ? 100.0 * pct_sum / static_cast<double>(pct_n) : std::nan("");
  r.smape = 200.0 * sym_sum / hn;
  double scale = 0.0;
  for (std::size_t t = k; t < train.size(); ++t) scale += std::abs(train[t] - train[t - k]);
  scale /= static_cast<double>(train.size() - k);
  if (scale > 0.0) {
    r.mase = r.mae / scale;
  } else {
    r.mase = std::nan("");
    r.mase_defined = false;
  }
  return r;
}

std::size_t mase_period(const Frequency& freq) {
  switch (freq.kind) {
    case FrequencyKind::Yearly: return 1;
    case FrequencyKind::Quarterly: return 4;
    case FrequencyKind::Monthly: return 12;
    case FrequencyKind::Weekly: return 1;
    case FrequencyKind::Daily: return 7;
    case FrequencyKind::Hourly: return 24;
    case FrequencyKind::PerMinute: return 1440;
    case FrequencyKind::CustomInterval: return 1;
  }
  return 1;
}

double geometric_mean_mase(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::InvalidArgument, "no values");
  double s = 0.0;
  for (double v : values) {
    if (!(v > 0.0)) throw Error(ErrorCode::NonPositiveValue, "geometric mean needs positive values");
    s += std::log(v);
  }
  return std::exp(s / static_cast<double>(values.size()));
}

std::map<std::string, double> average_rank(const std::vector<std::string>& models,
                                           const std::vector<std::vector<std::optional<double>>>& scores) {
  std::vector<double> total(models.size(), 0.0);
  std::vector<std::size_t> count(models.size(), 0);
  for (const auto& row : scores) {
    if (row.size() != models.size()) throw Error(ErrorCode::InvalidArgument, "score row width differs from models");
    std::vector<std::size_t> present;
    for (std::size_t m = 0; m < row.size(); ++m)
      if (row[m]) present.push_back(m);
    std::sort(present.begin(), present.end(), [&](auto a, auto b) { return *row[a] < *row[b]; });
    for (std::size_t i = 0; i < present.size();) {
      std::size_t j = i;
      while (j + 1 < present.size() && *row[present[j + 1]] == *row[present[i]]) ++j;
      const double rank = (static_cast<double>(i + j) / 2.0) + 1.0;
      for (std::size_t t = i; t <= j; ++t) {
        total[present[t]] += rank;
        ++count[present[t]];
      }
      i = j + 1;
    }
  }
  std::map<std::string, double> out;
  for (std::size_t m = 0; m < models.size(); ++m)
    out[models[m]] = count[m] ? total[m] / static_cast<double>(count[m]) : std::nan("");
  return out;
}

MetricReport mean_report(std::span<const MetricReport> reports) {
  MetricReport r;
  if (reports.empty()) return r;
  std::size_t mape_n = 0, mase_n = 0;
  for (const auto& x : reports) {
    r.mae += x.mae;
    r.rmse += x.rmse;
    r.smape += x.smape;
    r.horizon = std::max(r.horizon, x.horizon);
    r.mape_skipped += x.mape_skipped;
    if (std::isfinite(x.mape)) {
      r.mape += x.mape;
      ++mape_n;
    }
    if (x.mase_defined && std::isfinite(x.mase)) {
      r.mase += x.mase;
      ++mase_n;
    }
  }
  const double n = static_cast<double>(reports.size());
  r.mae /= n;
  r.rmse /= n;
  r.smape /= n;
  r.mape = mape_n ? r.mape / static_cast<double>(mape_n) : std::nan("");
  r.mase_defined = mase_n > 0;
  r.mase = mase_n ? r.mase / static_cast<double>(mase_n) : std::nan("");
  return r;
}

BenchmarkSummary summarize(std::vector<DatasetResult> datasets) {
  BenchmarkSummary s;
  s.datasets = std::move(datasets);
  std::vector<double> mases;
  bool ok = !s.datasets.empty();
  for (const auto& d : s.datasets) {
    if (d.metrics.mase_defined && d.metrics.mase > 0.0)
      mases.push_back(d.metrics.mase);
    else
      ok = false;
  }
  s.geometric_mean_mase = ok ? geometric_mean_mase(mases) : std::nan("");
  return s;
}

}  // namespace strata
