#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "strata/civil_time.hpp"

namespace strata {

enum class FrequencyKind { PerMinute, Hourly, Daily, Weekly, Monthly, Quarterly, Yearly, CustomInterval };

std::string_view to_string(FrequencyKind kind);
// Accepts the config spellings: PER_MINUTE, HOURLY, DAILY, WEEKLY, MONTHLY, QUARTERLY, YEARLY.
std::optional<FrequencyKind> parse_frequency_kind(std::string_view text);

struct Frequency {
  FrequencyKind kind = FrequencyKind::Daily;
  // Microseconds for absolute kinds, months for calendar kinds.
  std::int64_t interval = kMicrosPerDay;

  static Frequency of(FrequencyKind kind);
  static Frequency custom(Micros interval) { return {FrequencyKind::CustomInterval, interval}; }

  bool is_calendar() const {
    return kind == FrequencyKind::Monthly || kind == FrequencyKind::Quarterly || kind == FrequencyKind::Yearly;
  }
  // Nominal spacing in microseconds (calendar kinds use the mean month length).
  double approx_micros() const;
  // True for daily and finer absolute grids.
  bool sub_daily_or_daily() const { return !is_calendar() && interval <= kMicrosPerDay; }
  // Whole slots per day, or 0 when a slot is longer than a day or does not divide it.
  int slots_per_day() const;

  friend bool operator==(const Frequency&, const Frequency&) = default;
};

enum class IndexBasis { UtcMicros, MonthsSinceStart, LocalMicrosSince1960 };

std::string_view to_string(IndexBasis basis);
std::optional<IndexBasis> parse_index_basis(std::string_view text);

struct RawPoint {
  std::optional<Micros> timestamp;  // nullopt marks a malformed row
  double value = 0.0;               // NaN marks a missing value
};

struct RawSeries {
  std::vector<RawPoint> points;
  std::vector<std::string> series_id;
};

enum class Aggregator { Mean, Sum };

// Equally spaced series on a UTC, calendar-month or local wall-clock grid.
// Missing slots hold NaN.
struct RegularSeries {
  Micros start = 0;  // UTC micros, or UTC micros of the origin date, or local micros since 1960
  Frequency freq;
  std::vector<double> values;
  std::optional<std::string> timezone;
  IndexBasis basis = IndexBasis::UtcMicros;

  std::size_t size() const { return values.size(); }

  // Wall-clock instant of slot i (i may lie outside [0, n)): UTC for UTC and
  // month grids, local wall time for local grids. Expressed since 1970.
  Micros slot_wall(std::int64_t i) const;
  Date slot_date(std::int64_t i) const { return date_of(slot_wall(i)); }

  // Absolute instants represented by slot i. Empty for a local time skipped
  // by a DST gap, two entries for a repeated local hour.
  std::vector<Micros> slot_utc(std::int64_t i) const;

  // Grid position of a wall-clock instant (floor), consistent with slot_wall.
  std::int64_t slot_of_wall(Micros wall) const;
  // Grid position of an absolute instant, as regularize assigns it.
  std::int64_t slot_of_instant(Micros utc) const;
};

// Modal inter-timestamp gap, snapped to a calendar kind within 5%.
// Throws Error(TooFewPoints) for fewer than 3 distinct timestamps.
Frequency infer_frequency(std::span<const Micros> timestamps);

struct LocalizedPoints {
  std::vector<RawPoint> points;        // timestamps as local micros since 1960
  std::vector<Micros> gaps;            // local slots skipped by spring-forward
  std::vector<Micros> duplicates;      // local slots repeated by fall-back
};

// Re-express UTC timestamps as local wall time. Throws Error(UnknownZone).
LocalizedPoints localize_timestamps(std::span<const RawPoint> points, const std::string& zone);

struct RegularizeOptions {
  std::optional<Frequency> freq_override;
  std::optional<std::string> timezone;
  Aggregator aggregator = Aggregator::Mean;
};

// Drops malformed rows, sorts, downsamples duplicate slots, and snaps onto
// the inferred grid. Throws Error(EmptyAfterCleaning) or Error(TooFewPoints).
RegularSeries regularize(const RawSeries& raw, const RegularizeOptions& options = {});

// Re-applies the grid to an already regular series (identity on its values).
RegularSeries regularize(const RegularSeries& series);

struct TimedValue {
  Micros utc;
  double value;
};

// Maps grid slots [first, first + values.size()) back to absolute time. DST
// gaps created on the way back are filled by interpolation, new duplicates dropped.
std::vector<TimedValue> to_absolute(const RegularSeries& grid, std::int64_t first, std::span<const double> values);

// Calendar coordinates of each slot: year, slot offset within that year,
// and the years the grid covers completely.
struct SlotCalendar {
  std::vector<int> year;
  std::vector<int> position;
  std::vector<int> full_years;
};
SlotCalendar slot_calendar(const RegularSeries& grid);

}  // namespace strata
