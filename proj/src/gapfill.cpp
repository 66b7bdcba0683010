#include "strata/gapfill.hpp"

#include <algorithm>
#include <cmath>

#include "strata/error.hpp"
#include "strata/loess.hpp"

namespace strata {

namespace {

constexpr std::size_t kLinearMaxGap = 2;
constexpr std::size_t kMinLocalPoints = 7;

}  // namespace

std::vector<std::size_t> MissingMask::indices() const {
  std::vector<std::size_t> out;
  out.reserve(entries.size());
  for (const auto& [i, _] : entries) out.push_back(i);
  return out;
}

std::vector<std::size_t> MissingMask::indices(MissingSource source) const {
  std::vector<std::size_t> out;
  for (const auto& [i, s] : entries)
    if (s == source) out.push_back(i);
  return out;
}

MissingMask MissingMask::build(std::span<const double> values, std::span<const double> sentinels,
                               std::span<const std::pair<std::size_t, std::size_t>> outlier_ranges) {
  MissingMask mask;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::isnan(values[i])) {
      mask.add(i, MissingSource::NativeNa);
    } else if (std::find(sentinels.begin(), sentinels.end(), values[i]) != sentinels.end()) {
      mask.add(i, MissingSource::SentinelValue);
    }
  }
  for (const auto& [first, last] : outlier_ranges)
    for (std::size_t i = first; i <= last && i < values.size(); ++i) mask.add(i, MissingSource::UserMarkedOutlier);
  return mask;
}

std::vector<double> interpolate(std::span<const double> values, const MissingMask& mask, const SmoothParams& params) {
  const std::size_t n = values.size();
  std::vector<double> out(values.begin(), values.end());
  const bool has_profile = !params.seasonal_profile.empty();
  if (has_profile && params.seasonal_profile.size() != n)
    throw Error(ErrorCode::InvalidArgument, "seasonal profile length differs from series length");

  std::vector<bool> missing(n, false);
  for (std::size_t i = 0; i < n; ++i) missing[i] = std::isnan(values[i]) || mask.contains(i);

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < n; ++i) {
    if (missing[i]) continue;
    xs.push_back(static_cast<double>(i));
    ys.push_back(values[i] - (has_profile ? params.seasonal_profile[i] : 0.0));
  }
  if (xs.empty()) {
    if (n == 0) return out;
    throw Error(ErrorCode::AllMissing, "no observed values to interpolate from");
  }

  const std::size_t window = std::max<std::size_t>(
      kMinLocalPoints, static_cast<std::size_t>(std::ceil(params.loess_span * static_cast<double>(xs.size()))));
  auto loess_at = [&](double x) {
    auto v = loess::fit_at(xs, ys, {}, x, window, 1);
    if (v) return *v;
    const auto pos = static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), x) - xs.begin());
    return ys[std::min(pos, ys.size() - 1)];
  };

  const auto first_obs = static_cast<std::size_t>(xs.front());
  const auto last_obs = static_cast<std::size_t>(xs.back());

  std::size_t i = 0;
  while (i < n) {
    if (!missing[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && missing[j]) ++j;  // gap is [i, j)
    const std::size_t len = j - i;
    const bool use_linear = params.method == SmoothMethod::Linear ||
                            (params.method == SmoothMethod::Auto && len <= kLinearMaxGap);
    for (std::size_t k = i; k < j; ++k) {
      double level;
      if (k < first_obs || k > last_obs) {
        // Flat extension from the nearest observed level.
        const double edge_x = k < first_obs ? xs.front() : xs.back();
        level = use_linear ? (k < first_obs ? ys.front() : ys.back()) : loess_at(edge_x);
      } else if (use_linear) {
        const double left = values[i - 1] - (has_profile ? params.seasonal_profile[i - 1] : 0.0);
        const double right = values[j] - (has_profile ? params.seasonal_profile[j] : 0.0);
        const double t = static_cast<double>(k - (i - 1)) / static_cast<double>(j - (i - 1));
        level = left + t * (right - left);
      } else {
        level = loess_at(static_cast<double>(k));
      }
      out[k] = level + (has_profile ? params.seasonal_profile[k] : 0.0);
    }
    i = j;
  }
  return out;
}

RegularSeries interpolate(const RegularSeries& series, const MissingMask& mask, const SmoothParams& params) {
  RegularSeries out = series;
  out.values = interpolate(series.values, mask, params);
  return out;
}

std::vector<double> loess_smooth(std::span<const double> values, double span, int degree, int robust_iterations) {
  const std::size_t n = values.size();
  const double points = span * static_cast<double>(n);
  if (!(span > 0.0) || points < static_cast<double>(degree + 2))
    throw Error(ErrorCode::SpanTooSmall, "span * n must be at least degree + 2");
  const auto window = static_cast<std::size_t>(std::floor(points));
  std::vector<double> fit = loess::smooth_regular(values, window, degree);
  for (int it = 0; it < robust_iterations; ++it) {
    std::vector<double> resid(n);
    for (std::size_t i = 0; i < n; ++i) resid[i] = values[i] - fit[i];
    const auto w = loess::bisquare_weights(resid);
    if (std::all_of(w.begin(), w.end(), [](double x) { return x == 1.0; })) break;
    fit = loess::smooth_regular(values, window, degree, 1, w);
  }
  return fit;
}

std::vector<double> local_smooth(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 3) return {values.begin(), values.end()};
  const double span = std::max(0.1, static_cast<double>(std::min(kMinLocalPoints, n)) / static_cast<double>(n));
  return loess_smooth(values, span, 1, 0);
}

std::vector<double> backfill_noise(std::span<const double> values, std::span<const std::size_t> outliers,
                                   std::span<const double> smooth, std::span<const double> interpolated) {
  std::vector<double> out(values.begin(), values.end());
  for (std::size_t i : outliers) {
    if (i >= values.size() || i >= smooth.size() || i >= interpolated.size())
      throw Error(ErrorCode::IndexOutOfRange, "outlier index " + std::to_string(i) + " outside the series");
    out[i] = values[i] - smooth[i] + interpolated[i];
  }
  return out;
}

}  // namespace strata
