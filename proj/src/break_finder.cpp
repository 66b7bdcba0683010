#include "strata/break_finder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "strata/error.hpp"
#include "strata/gapfill.hpp"
#include "strata/stats.hpp"

namespace strata {

std::size_t default_window(std::size_t dominant_period) { return std::max<std::size_t>(5, dominant_period / 2); }

std::vector<double> rolling_residual_sums(std::span<const double> values, const BreakParams& params) {
  const std::size_t n = values.size();
  const std::size_t m = std::max<std::size_t>(params.m, 2);
  if (n < 3 * m) throw Error(ErrorCode::TooShort, "change detection needs at least 3m points");
  // Holt recursion started from a line fitted to the first m points; a
  // two-point start-up slope is noisy enough to fake breaks at the edges.
  std::vector<double> t(m);
  std::iota(t.begin(), t.end(), 0.0);
  const auto start = stats::fit_line(t, values.first(m));
  double l = start.intercept + start.slope * static_cast<double>(m - 1), b = start.slope;
  std::vector<double> r(n, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = m; i + m < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j <= m; ++j) s += l + static_cast<double>(j + 1) * b - values[i + j];
    r[i] = s;
    const double nl = params.alpha * values[i] + (1.0 - params.alpha) * (l + b);
    b = params.beta * (nl - l) + (1.0 - params.beta) * b;
    l = nl;
  }
  return r;
}

std::vector<double> rolling_residual_scores(std::span<const double> values, const BreakParams& params) {
  const auto r = rolling_residual_sums(values, params);
  std::vector<double> defined;
  std::vector<std::size_t> where;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (std::isnan(r[i])) continue;
    defined.push_back(r[i]);
    where.push_back(i);
  }
  std::vector<double> z(r.size(), 0.0);
  const auto zd = stats::robust_z(defined);
  for (std::size_t k = 0; k < where.size(); ++k) z[where[k]] = zd[k];
  return z;
}

namespace {

std::vector<ChangePeriod> merge(std::vector<ChangePeriod> periods, std::size_t gap) {
  std::sort(periods.begin(), periods.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
  std::vector<ChangePeriod> out;
  for (const auto& p : periods) {
    if (!out.empty() && p.start < out.back().end + gap) {
      out.back().end = std::max(out.back().end, p.end);
    } else {
      out.push_back(p);
    }
  }
  return out;
}

}  // namespace

std::vector<ChangePeriod> detect_change_periods(std::span<const double> values, const BreakParams& params) {
  const std::size_t n = values.size();
  const std::size_t m = std::max<std::size_t>(params.m, 1);
  const auto zf = rolling_residual_scores(values, params);
  std::vector<double> reversed(values.rbegin(), values.rend());
  const auto zb = rolling_residual_scores(reversed, params);

  std::vector<std::size_t> starts, ends;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(zf[i]) > params.z_threshold) starts.push_back(i);
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(zb[i]) > params.z_threshold) ends.push_back(n - 1 - i);
  std::sort(ends.begin(), ends.end());

  // Closed pairs [a, b] kept as half-open [a, b + 1).
  std::vector<ChangePeriod> raw;
  std::vector<bool> end_used(ends.size(), false);
  for (std::size_t i : starts) {
    bool paired = false;
    for (std::size_t k = 0; k < ends.size(); ++k) {
      const std::size_t j = ends[k];
      if (j > i && j - i < m) {
        raw.push_back({i, j + 1});
        end_used[k] = true;
        paired = true;
      }
    }
    if (!paired) raw.push_back({i, std::min(n, i + m + 1)});
  }
  for (std::size_t k = 0; k < ends.size(); ++k) {
    if (end_used[k]) continue;
    const std::size_t j = ends[k];
    bool has_start = false;
    for (std::size_t i : starts) has_start = has_start || (j > i && j - i < m);
    if (!has_start) raw.push_back({j >= m ? j - m : 0, j + 1});
  }
  auto merged = merge(std::move(raw), m);
  for (auto& p : merged) {
    p.start = p.start > 0 ? p.start - 1 : 0;
    p.end = std::min(n, p.end + 1);
  }
  return merge(std::move(merged), 0);
}

namespace {

struct Segment {
  std::size_t begin, end;
};

stats::LineFit fit_segment(std::span<const double> y, Segment s) {
  std::vector<double> t(s.end - s.begin);
  std::iota(t.begin(), t.end(), static_cast<double>(s.begin));
  return stats::fit_line(t, y.subspan(s.begin, s.end - s.begin));
}

double chow_pvalue(std::span<const double> y, Segment a, Segment b) {
  const std::size_t n1 = a.end - a.begin, n2 = b.end - b.begin;
  if (n1 + n2 <= 4 || n1 < 2 || n2 < 2) return 1.0;
  const auto f1 = fit_segment(y, a), f2 = fit_segment(y, b);
  std::vector<double> t, v;
  for (auto s : {a, b})
    for (std::size_t i = s.begin; i < s.end; ++i) {
      t.push_back(static_cast<double>(i));
      v.push_back(y[i]);
    }
  const auto pooled = stats::fit_line(t, v);
  const double split = f1.rss + f2.rss;
  const double gain = std::max(0.0, pooled.rss - split);
  const double df2 = static_cast<double>(n1 + n2 - 4);
  // Tolerance relative to the data scale separates exact fits from real breaks.
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  const double tiny = 1e-20 * (scale * scale + 1.0) * static_cast<double>(v.size());
  if (gain <= tiny) return 1.0;
  if (split <= tiny) return 0.0;
  const double f = (gain / 2.0) / (split / df2);
  return stats::f_pvalue(f, 2.0, df2);
}

// Medians follow a level step exactly, so the noise read off a change window
// carries no ramp from the step itself.
std::vector<double> running_median(std::span<const double> y, std::size_t width) {
  const std::size_t n = y.size();
  std::vector<double> out(n);
  if (n == 0) return out;
  width = std::min(width, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = std::min(i >= width / 2 ? i - width / 2 : 0, n - width);
    out[i] = stats::median(y.subspan(lo, width));
  }
  return out;
}

}  // namespace

BreakReport adjust_step_changes(std::span<const double> values, std::span<const ChangePeriod> periods,
                                const BreakParams& params) {
  const std::size_t n = values.size();
  const std::size_t m = std::max<std::size_t>(params.m, 1);
  BreakReport rep;
  rep.adjustment.assign(n, 0.0);
  rep.window_delta.assign(n, 0.0);
  rep.cleaned.assign(values.begin(), values.end());

  std::vector<ChangePeriod> windows(periods.begin(), periods.end());
  for (auto& w : windows) w.end = std::min(w.end, n);
  windows.erase(std::remove_if(windows.begin(), windows.end(), [](const auto& w) { return w.end <= w.start; }),
                windows.end());
  windows = merge(std::move(windows), 0);
  if (windows.empty()) return rep;

  // Fold stable stretches that are too short to fit a line reliably.
  const std::size_t min_len = 2 * m;
  for (bool changed = true; changed && !windows.empty();) {
    changed = false;
    if (windows.front().start > 0 && windows.front().start < min_len) {
      windows.front().start = 0;
      changed = true;
    }
    for (std::size_t k = 0; k + 1 < windows.size(); ++k) {
      if (windows[k + 1].start - windows[k].end < min_len) {
        windows[k].end = windows[k + 1].end;
        windows.erase(windows.begin() + static_cast<long>(k) + 1);
        changed = true;
        break;
      }
    }
    if (!windows.empty() && windows.back().end < n && n - windows.back().end < 3) {
      windows.back().end = n;
      changed = true;
    }
  }
  rep.periods = windows;

  std::vector<Segment> stable;
  std::size_t cursor = 0;
  for (const auto& w : windows) {
    stable.push_back({cursor, w.start});
    cursor = w.end;
  }
  stable.push_back({cursor, n});

  std::vector<double> work(values.begin(), values.end());
  rep.significant.assign(windows.size(), false);
  for (std::size_t k = windows.size(); k-- > 0;) {
    const Segment a = stable[k], b = stable[k + 1];
    if (a.end <= a.begin || b.end <= b.begin) continue;
    if (chow_pvalue(work, a, b) >= params.chow_alpha) continue;
    rep.significant[k] = true;
    const auto fa = fit_segment(work, a), fb = fit_segment(work, b);
    const double da = fa.intercept - fb.intercept, db = fa.slope - fb.slope;
    for (std::size_t t = 0; t < windows[k].end; ++t) {
      const double d = da + db * static_cast<double>(t);
      rep.adjustment[t] += d;
      work[t] -= d;
    }
  }

  MissingMask mask;
  std::vector<std::size_t> long_window;
  for (const auto& w : windows) {
    for (std::size_t i = w.start; i < w.end; ++i) {
      mask.add(i, MissingSource::UserMarkedOutlier);
      if (w.length() > 3 * m) long_window.push_back(i);
    }
  }
  if (mask.size() < n) {
    auto filled = interpolate(work, mask);
    if (!long_window.empty()) {
      const auto smooth = running_median(work, 7);
      filled = backfill_noise(work, long_window, smooth, filled);
    }
    for (std::size_t i : mask.indices()) {
      rep.cleaned[i] = filled[i];
      rep.window_delta[i] = work[i] - filled[i];
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!mask.contains(i)) rep.cleaned[i] = work[i];
  return rep;
}

}  // namespace strata
