#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace strata {

// Microseconds since 1970-01-01T00:00:00 (UTC, or wall clock on local grids).
using Micros = std::int64_t;
using Date = std::chrono::year_month_day;

inline constexpr Micros kMicrosPerSecond = 1'000'000;
inline constexpr Micros kMicrosPerMinute = 60 * kMicrosPerSecond;
inline constexpr Micros kMicrosPerHour = 60 * kMicrosPerMinute;
inline constexpr Micros kMicrosPerDay = 24 * kMicrosPerHour;
inline constexpr Micros kMicrosPerWeek = 7 * kMicrosPerDay;

// 1960-01-01 lies 3653 days before the Unix epoch.
inline constexpr Micros kEpoch1960Offset = 3653 * kMicrosPerDay;

Micros day_start(Date d);
Date date_of(Micros t);
Micros micros_of_day(Micros t);
Date make_date(int y, unsigned m, unsigned d);

int days_in_month(Date d);
int days_in_year(int year);
// 0-based day of the year.
int day_of_year(Date d);

// Adds whole months, clamping the day to the end of the target month.
Date add_months(Date d, int months);

// Whole months elapsed from origin to date. A date clamped to the end of a
// short month counts as a full month when the origin day does not exist there.
int to_month_index(Date date, Date origin);
Date from_month_index(Date origin, int months);

// ISO-8601 ("2021-02-15", "2021-02-15T08:00:00Z", "2021-02-15 08:00:00+01:00")
// or an integer count of epoch microseconds. Naive times are taken as UTC.
std::optional<Micros> parse_timestamp(std::string_view text);
std::string format_timestamp(Micros t);
std::string format_date(Date d);

}  // namespace strata
