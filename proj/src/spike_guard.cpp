#include "strata/spike_guard.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "strata/error.hpp"
#include "strata/gapfill.hpp"
#include "strata/stats.hpp"

namespace strata {

HoltPath double_exp_smooth(std::span<const double> values, double alpha, double beta, Direction direction) {
  const std::size_t n = values.size();
  if (n < 2) throw Error(ErrorCode::TooShort, "double exponential smoothing needs at least 2 points");
  HoltPath path;
  path.level.resize(n);
  path.slope.resize(n);
  auto at = [&](std::size_t k) { return direction == Direction::Forward ? k : n - 1 - k; };
  const std::size_t i0 = at(0), i1 = at(1);
  path.level[i0] = values[i0];
  path.slope[i0] = values[i1] - values[i0];
  for (std::size_t k = 1; k < n; ++k) {
    const std::size_t i = at(k), prev = at(k - 1);
    const double l = alpha * values[i] + (1.0 - alpha) * (path.level[prev] + path.slope[prev]);
    path.slope[i] = beta * (l - path.level[prev]) + (1.0 - beta) * path.slope[prev];
    path.level[i] = l;
  }
  return path;
}

namespace {

// Y_i minus the smoothed level. Slots whose residual exceeds q * scale are
// kept out of the recursion (the level takes the one-step forecast) for at
// most kMaxCensored consecutive slots, so a spike does not echo into its
// neighbours while a lasting shift is still followed.
constexpr std::size_t kMaxCensored = 3;

std::vector<double> holt_residuals(std::span<const double> values, double alpha, double beta, Direction direction,
                                   double scale, double q) {
  const std::size_t n = values.size();
  auto at = [&](std::size_t k) { return direction == Direction::Forward ? k : n - 1 - k; };
  std::vector<double> d(n, 0.0);
  double l = values[at(0)], b = values[at(1)] - values[at(0)];
  std::size_t run = 0;
  for (std::size_t k = 1; k < n; ++k) {
    const std::size_t i = at(k);
    const double f = l + b;
    const double nl = alpha * values[i] + (1.0 - alpha) * f;
    d[i] = values[i] - nl;
    if (std::abs(d[i]) > q * scale && run < kMaxCensored) {
      ++run;
      l = f;
      continue;
    }
    run = 0;
    b = beta * (nl - l) + (1.0 - beta) * b;
    l = nl;
  }
  return d;
}

}  // namespace

SpikeReport detect_spikes(std::span<const double> values, const SpikeParams& params, const SlotCalendar* calendar) {
  const std::size_t n = values.size();
  const std::size_t L = params.edge_length();
  if (n <= 2 * L) throw Error(ErrorCode::TooShort, "spike detection needs more than 2L points");

  const double q = params.threshold;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> df = holt_residuals(values, params.alpha, params.beta, Direction::Forward, inf, q);
  std::vector<double> db = holt_residuals(values, params.alpha, params.beta, Direction::Backward, inf, q);
  // Second pass with censoring, against the first-pass robust scale.
  df = holt_residuals(values, params.alpha, params.beta, Direction::Forward, stats::robust_scale(df), q);
  db = holt_residuals(values, params.alpha, params.beta, Direction::Backward, stats::robust_scale(db), q);
  SpikeReport report;
  report.z_forward = stats::robust_z(df);
  report.z_backward = stats::robust_z(db);
  report.component.assign(n, 0.0);

  std::vector<std::size_t> detected;
  for (std::size_t i = 0; i < n; ++i) {
    const bool f = std::abs(report.z_forward[i]) > q;
    const bool b = std::abs(report.z_backward[i]) > q;
    const bool both = f && b && df[i] * db[i] >= 0.0;
    const bool tail = f && i >= n - L;
    const bool head = b && i < L;
    if (both || tail || head) detected.push_back(i);
  }

  if (calendar && calendar->full_years.size() >= 2 && calendar->year.size() == n) {
    std::set<std::pair<int, int>> hits;
    for (std::size_t i : detected) hits.emplace(calendar->year[i], calendar->position[i]);
    auto recurring = [&](std::size_t i) {
      const int pos = calendar->position[i];
      for (int y : calendar->full_years) {
        bool found = false;
        for (int d = -1; d <= 1 && !found; ++d) found = hits.count({y, pos + d}) != 0;
        if (!found) return false;
      }
      return true;
    };
    std::vector<std::size_t> kept;
    for (std::size_t i : detected)
      if (!recurring(i)) kept.push_back(i);
    detected.swap(kept);
  }
  report.detected = std::move(detected);
  return report;
}

std::vector<double> clean_spikes(std::span<const double> values, SpikeReport& report) {
  std::vector<double> cleaned(values.begin(), values.end());
  report.component.assign(values.size(), 0.0);
  report.replaced_values.clear();
  if (report.detected.empty()) return cleaned;
  MissingMask mask;
  for (std::size_t i : report.detected) mask.add(i, MissingSource::UserMarkedOutlier);
  const auto filled = interpolate(values, mask);
  for (std::size_t i : report.detected) {
    cleaned[i] = filled[i];
    report.component[i] = values[i] - filled[i];
    report.replaced_values[i] = filled[i];
  }
  return cleaned;
}

}  // namespace strata
