#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "strata/civil_time.hpp"
#include "strata/temporal_frame.hpp"

namespace strata {

struct HolidayOccurrence {
  Date date;
  int pre_days = 1;
  int post_days = 1;
};

struct HolidaySpec {
  std::string name;
  std::string region;
  std::vector<HolidayOccurrence> occurrences;  // at most one per year
};

// CSV columns region,holiday,date,pre_days,post_days; pre/post may be blank
// (default 1). Rows are grouped by (region, holiday).
std::vector<HolidaySpec> parse_holiday_csv(std::string_view text);
std::vector<HolidaySpec> load_holiday_file(const std::string& path);

// Built-in calendar for "US" or "GLOBAL" (case-insensitive). Unknown regions
// give an empty list.
std::vector<HolidaySpec> builtin_holidays(std::string_view region);
std::vector<std::string> builtin_regions();

// Affected slots of one holiday, per year. Each year's list is the full
// window in grid order (it may extend past the requested range).
struct HolidayWindows {
  std::string holiday;
  std::map<int, std::vector<std::int64_t>> slots;
};

// Windows overlapping slots [first, last). Daily and finer grids enumerate
// every slot of [date - pre, date + post]; coarser grids take the one slot
// containing the date.
std::vector<HolidayWindows> expand_windows(std::span<const HolidaySpec> specs, const RegularSeries& grid,
                                           std::int64_t first, std::int64_t last);

struct SubHolidayEffect {
  std::string holiday;
  int offset = 0;  // position j inside the window
  std::map<int, double> yearly_raw;
  std::map<int, double> yearly_smoothed;
  double effect = 0.0;  // smoothed level applied to future occurrences
};

struct HolidayEstimate {
  std::vector<SubHolidayEffect> effects;
  std::vector<double> counterfactual;
  std::vector<double> raw;  // Y - counterfactual on affected slots, 0 elsewhere
};

// Masks every affected slot, interpolates a counterfactual (after removing
// `seasonal_profile` when given) and smooths each sub-holiday across years:
// median with 4 or more years, mean otherwise.
// Throws Error(NoOccurrences) when no window touches the series.
HolidayEstimate estimate_effects(std::span<const double> values, std::span<const HolidayWindows> windows,
                                 std::span<const double> seasonal_profile = {});

// Largest positive effect plus most negative effect.
double reconcile(std::span<const double> effects);

struct HolidayEffectSeries {
  std::vector<double> total;                             // reconciled, per slot
  std::map<std::string, std::vector<double>> by_holiday;  // unreconciled
};

// Effects on slots [first, first + count): every occurrence of sub-holiday j
// gets its smoothed level, collisions reconciled, other slots 0.
HolidayEffectSeries apply_effects(std::span<const SubHolidayEffect> effects, std::span<const HolidayWindows> windows,
                                  std::int64_t first, std::size_t count);

// Same, for the forecast horizon [n, n + horizon) of `grid`.
HolidayEffectSeries extrapolate_effects(std::span<const SubHolidayEffect> effects,
                                        std::span<const HolidaySpec> specs, const RegularSeries& grid,
                                        std::size_t horizon);

}  // namespace strata
