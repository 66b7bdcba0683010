#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "strata/temporal_frame.hpp"

namespace strata {

enum class MissingSource { NativeNa, SentinelValue, UserMarkedOutlier };

// Grid positions to be estimated, each tagged with why it is missing.
struct MissingMask {
  std::map<std::size_t, MissingSource> entries;

  void add(std::size_t index, MissingSource source) { entries.emplace(index, source); }
  bool contains(std::size_t index) const { return entries.count(index) != 0; }
  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
  std::vector<std::size_t> indices() const;
  std::vector<std::size_t> indices(MissingSource source) const;

  // NaNs, values equal to a sentinel, and user-marked [first, last] index ranges.
  static MissingMask build(std::span<const double> values, std::span<const double> sentinels = {},
                           std::span<const std::pair<std::size_t, std::size_t>> outlier_ranges = {});
};

enum class SmoothMethod { Auto, Linear, Loess };

struct SmoothParams {
  SmoothMethod method = SmoothMethod::Auto;
  double loess_span = 0.1;
  // Per-slot additive offsets removed before smoothing and restored after.
  std::vector<double> seasonal_profile;
};

// Fills every masked slot; unmasked values are returned bit-identical.
// Throws Error(AllMissing) when nothing is observed.
std::vector<double> interpolate(std::span<const double> values, const MissingMask& mask,
                                const SmoothParams& params = {});
RegularSeries interpolate(const RegularSeries& series, const MissingMask& mask, const SmoothParams& params = {});

// Local regression at every index (tricube kernel, bisquare robustness passes).
// Throws Error(SpanTooSmall) when span * n < degree + 2.
std::vector<double> loess_smooth(std::span<const double> values, double span, int degree = 1,
                                 int robust_iterations = 2);

// Local smoother used to separate noise from level on outlier stretches:
// loess with span 0.1, at least 7 points.
std::vector<double> local_smooth(std::span<const double> values);

// Y_i - smooth_i + interpolated_i on the outlier indices, untouched elsewhere.
// Throws Error(IndexOutOfRange).
std::vector<double> backfill_noise(std::span<const double> values, std::span<const std::size_t> outliers,
                                   std::span<const double> local_smooth, std::span<const double> interpolated);

}  // namespace strata
