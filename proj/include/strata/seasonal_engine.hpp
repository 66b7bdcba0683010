#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "strata/temporal_frame.hpp"

namespace strata {

enum class PeriodName { Hourly, Daily, Weekly, Monthly, Quarterly, Yearly };

std::string_view to_string(PeriodName name);
std::optional<PeriodName> parse_period_name(std::string_view text);

// How a cycle is laid out on the slot grid. Standardized kinds resample each
// calendar month / quarter / year onto a fixed number of slots.
enum class Standardization { None, Monthly, Quarterly, Yearly };

struct StlParams {
  std::size_t seasonal_window = 11;
  std::size_t trend_window = 0;     // 0: smallest odd >= 1.5K / (1 - 1.5 / seasonal_window)
  std::size_t low_pass_window = 0;  // 0: smallest odd >= K
  int inner_iters = 2;
  int robust_iters = 0;
  int degree = 1;
};

struct StlResult {
  std::vector<double> seasonal;
  std::vector<double> trend;
  std::vector<double> remainder;
};

// Cleveland et al. STL with loess cycle-subseries smoothing.
// Throws Error(PeriodTooLongForSeries) when n < 2K.
StlResult stl_decompose(std::span<const double> values, std::size_t period, const StlParams& params = {});

struct SeasonalCandidate {
  PeriodName name = PeriodName::Weekly;
  std::size_t period = 7;  // slots per cycle; standardized slots when standardized
  Standardization standardization = Standardization::None;
};

std::vector<SeasonalCandidate> default_candidates(const Frequency& freq);
// Candidate for a named period on the given grid, or nullopt when the period
// is not longer than one slot.
std::optional<SeasonalCandidate> candidate_for(PeriodName name, const Frequency& freq);

// Maps a series onto a standardized cycle grid and back.
struct StandardGrid {
  Standardization kind = Standardization::None;
  std::size_t period = 0;
  std::vector<double> u;      // standardized coordinate of each original slot
  std::int64_t first = 0;     // first integer coordinate on the standard grid
  std::vector<double> values; // resampled values at first, first + 1, ...

  // Standard-grid coordinate of an arbitrary slot of `grid`.
  static double coordinate(const RegularSeries& grid, std::int64_t slot, Standardization kind, std::size_t period);
};

// Throws Error(NotSubMonthlyFrequency) unless the grid is daily or finer with
// whole slots per day.
StandardGrid standardize(const RegularSeries& grid, std::span<const double> values, Standardization kind);
inline StandardGrid standardize_monthly(const RegularSeries& grid, std::span<const double> values) {
  return standardize(grid, values, Standardization::Monthly);
}
// Values on the standard grid (indexed from `first`) read back at coordinates
// u. Coordinates beyond the covered range borrow the same phase from the
// nearest covered cycle.
std::vector<double> back_map(std::span<const double> standard_values, std::int64_t first, std::size_t period,
                             std::span<const double> u);

// Forecasting by leaping: each phase sub-series is extrapolated by double
// exponential smoothing. Throws Error(TooFewCycles) with fewer than 2 cycles.
std::vector<double> leap_extrapolate(std::span<const double> seasonal, std::size_t period, std::size_t horizon,
                                     double alpha = 0.5, double beta = 0.05);

struct SeasonalComponent {
  PeriodName name = PeriodName::Weekly;
  std::size_t period = 0;
  Standardization standardization = Standardization::None;
  std::vector<double> history;  // per original slot
  std::vector<double> future;   // filled by extrapolate_component
  bool significant = false;
  double variance_reduction = 0.0;
  double kw_pvalue = 1.0;
  // Seasonal values on the standard grid (standardized kinds only).
  std::vector<double> standard_history;
  std::int64_t standard_first = 0;
};

struct SeasonalFit {
  std::vector<SeasonalComponent> components;  // significant ones only
  std::vector<SeasonalComponent> rejected;    // tested and dropped
  std::vector<double> deseasonalized;
};

struct SeasonalityTest {
  double min_variance_reduction = 0.05;
  double kw_alpha = 0.01;
};

// Extracts candidates in order from the running residual. `grid` is needed
// for standardized candidates; without it they are skipped, as are
// candidates the series is too short for.
SeasonalFit detect_and_extract(std::span<const double> values, std::span<const SeasonalCandidate> candidates,
                               const StlParams& params = {}, const RegularSeries* grid = nullptr,
                               const SeasonalityTest& test = {});

// Future values for slots [n, n + horizon) of `grid` (n = history length).
std::vector<double> extrapolate_component(const SeasonalComponent& component, const RegularSeries& grid,
                                          std::size_t horizon);

// Sum of significant seasonal components of a linearly gap-filled copy, used
// to make gap filling and holiday counterfactuals seasonality-aware.
std::vector<double> preliminary_seasonal_profile(const RegularSeries& series,
                                                 std::span<const SeasonalCandidate> candidates);

}  // namespace strata
