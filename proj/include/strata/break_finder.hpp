#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace strata {

// Half-open slot range [start, end).
struct ChangePeriod {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  bool contains(std::size_t i) const { return i >= start && i < end; }
  friend bool operator==(const ChangePeriod&, const ChangePeriod&) = default;
};

struct BreakParams {
  std::size_t m = 5;          // local forecast length
  double z_threshold = 5.0;
  double chow_alpha = 0.01;
  double alpha = 0.5;         // local Holt smoother
  double beta = 0.05;
};

// Default window m = max(5, K/2) for a dominant seasonal period K (0 if none).
std::size_t default_window(std::size_t dominant_period);

// Total residual R^i = sum_{j=0..m} (F_j^i - Y_{i+j}) of the Holt forecast
// made from Y_0..Y_{i-1}, the recursion starting from a line fitted to the
// first m points. Entries before m or without a full forecast are NaN.
// Throws Error(TooShort) when n < 3m.
std::vector<double> rolling_residual_sums(std::span<const double> values, const BreakParams& params);

// Robust z-scores of the residual sums (0 where undefined).
std::vector<double> rolling_residual_scores(std::span<const double> values, const BreakParams& params);

// Forward starts paired with backward ends; overlapping or near (< m apart)
// periods merged, then widened by one slot each side. Sorted and disjoint.
// Throws Error(TooShort) when n < 3m.
std::vector<ChangePeriod> detect_change_periods(std::span<const double> values, const BreakParams& params);

struct BreakReport {
  std::vector<ChangePeriod> periods;  // after folding short stable stretches
  std::vector<double> adjustment;     // level/slope realignment, 0 on the final stable period
  std::vector<double> window_delta;   // what re-interpolating the change windows removed
  std::vector<double> cleaned;        // original - adjustment - window_delta
  std::vector<bool> significant;      // Chow verdict per boundary (between periods[k] neighbours)
};

// Chow-tested realignment of earlier stable periods to the last one, last
// boundary first. Stable periods shorter than 2m (3 for the final one) are
// folded into the adjacent change window.
BreakReport adjust_step_changes(std::span<const double> values, std::span<const ChangePeriod> periods,
                                const BreakParams& params = {});

}  // namespace strata
