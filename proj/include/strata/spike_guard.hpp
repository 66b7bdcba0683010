#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "strata/temporal_frame.hpp"

namespace strata {

enum class Direction { Forward, Backward };

// Holt level/slope recursion. Forward starts from l_0 = Y_0, b_0 = Y_1 - Y_0;
// backward mirrors it from the last point.
struct HoltPath {
  std::vector<double> level;
  std::vector<double> slope;
};

// Throws Error(TooShort) for fewer than 2 points.
HoltPath double_exp_smooth(std::span<const double> values, double alpha, double beta,
                           Direction direction = Direction::Forward);

struct SpikeParams {
  double alpha = 0.5;
  double beta = 0.05;
  double threshold = 5.0;  // robust z cut-off q
  std::size_t edge = 0;    // one-way edge length L; 0 selects max(10, seasonal_period)
  std::size_t seasonal_period = 0;

  std::size_t edge_length() const { return edge > 0 ? edge : std::max<std::size_t>(10, seasonal_period); }
};

struct SpikeReport {
  std::vector<std::size_t> detected;
  std::vector<double> z_forward;
  std::vector<double> z_backward;
  std::map<std::size_t, double> replaced_values;
  // Per-slot spikes_and_dips component; zero outside `detected`.
  std::vector<double> component;
};

// Indices flagged by both smoothing directions with agreeing signs, plus
// one-way detections on the edges. Residuals come from a second smoothing
// pass that skips first-pass outliers (at most 3 in a row). When a calendar is supplied, spikes that
// recur at the same yearly position in every full year are left in place.
// Throws Error(TooShort) unless n > 2L.
SpikeReport detect_spikes(std::span<const double> values, const SpikeParams& params = {},
                          const SlotCalendar* calendar = nullptr);

// Replaces detected slots by interpolation; fills report.component and
// report.replaced_values. cleaned + component == values exactly.
std::vector<double> clean_spikes(std::span<const double> values, SpikeReport& report);

}  // namespace strata
