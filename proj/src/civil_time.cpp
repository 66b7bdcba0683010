#include "strata/civil_time.hpp"

#include <charconv>
#include <cstdio>

namespace strata {

namespace chr = std::chrono;

namespace {

Micros floor_div(Micros a, Micros b) {
  Micros q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

}  // namespace

Micros day_start(Date d) {
  return static_cast<Micros>(chr::sys_days{d}.time_since_epoch().count()) * kMicrosPerDay;
}

Date date_of(Micros t) { return Date{chr::sys_days{chr::days{floor_div(t, kMicrosPerDay)}}}; }

Micros micros_of_day(Micros t) { return t - floor_div(t, kMicrosPerDay) * kMicrosPerDay; }

Date make_date(int y, unsigned m, unsigned d) { return Date{chr::year{y}, chr::month{m}, chr::day{d}}; }

int days_in_month(Date d) {
  return static_cast<int>(static_cast<unsigned>(
      chr::year_month_day_last{d.year(), chr::month_day_last{d.month()}}.day()));
}

int days_in_year(int year) { return chr::year{year}.is_leap() ? 366 : 365; }

int day_of_year(Date d) {
  const auto jan1 = chr::sys_days{Date{d.year(), chr::January, chr::day{1}}};
  return static_cast<int>((chr::sys_days{d} - jan1).count());
}

Date add_months(Date d, int months) {
  const int total = static_cast<int>(d.year()) * 12 + static_cast<int>(static_cast<unsigned>(d.month())) - 1 + months;
  const int y = static_cast<int>(floor_div(total, 12));
  const unsigned m = static_cast<unsigned>(total - y * 12) + 1;
  const Date first = make_date(y, m, 1);
  const unsigned last = static_cast<unsigned>(days_in_month(first));
  const unsigned day = std::min(static_cast<unsigned>(d.day()), last);
  return make_date(y, m, day);
}

int to_month_index(Date date, Date origin) {
  int months = (static_cast<int>(date.year()) - static_cast<int>(origin.year())) * 12 +
               static_cast<int>(static_cast<unsigned>(date.month())) -
               static_cast<int>(static_cast<unsigned>(origin.month()));
  const unsigned dd = static_cast<unsigned>(date.day());
  const unsigned od = static_cast<unsigned>(origin.day());
  if (dd < od && static_cast<int>(dd) != days_in_month(date)) --months;
  return months;
}

Date from_month_index(Date origin, int months) { return add_months(origin, months); }

std::optional<Micros> parse_timestamp(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '"')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '"' || text.back() == '\r'))
    text.remove_suffix(1);
  if (text.empty()) return std::nullopt;

  if (all_digits(text) || (text.front() == '-' && all_digits(text.substr(1)))) {
    if (text.size() >= 5 && text.size() != 8) {
      long long v = 0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec == std::errc() && ptr == text.data() + text.size()) return static_cast<Micros>(v);
      return std::nullopt;
    }
  }

  if (text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0, m = 0, d = 0;
  if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
      !parse_int(text.substr(8, 2), d))
    return std::nullopt;
  const Date date = make_date(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
  if (!date.ok()) return std::nullopt;
  Micros t = day_start(date);
  std::string_view rest = text.substr(10);
  if (rest.empty()) return t;
  if (rest.front() != 'T' && rest.front() != ' ') return std::nullopt;
  rest.remove_prefix(1);
  if (rest.size() < 5 || rest[2] != ':') return std::nullopt;
  int hh = 0, mm = 0, ss = 0;
  if (!parse_int(rest.substr(0, 2), hh) || !parse_int(rest.substr(3, 2), mm)) return std::nullopt;
  rest.remove_prefix(5);
  Micros frac = 0;
  if (!rest.empty() && rest.front() == ':') {
    if (rest.size() < 3 || !parse_int(rest.substr(1, 2), ss)) return std::nullopt;
    rest.remove_prefix(3);
    if (!rest.empty() && rest.front() == '.') {
      rest.remove_prefix(1);
      Micros scale = 100000;
      while (!rest.empty() && rest.front() >= '0' && rest.front() <= '9') {
        frac += (rest.front() - '0') * scale;
        scale /= 10;
        rest.remove_prefix(1);
      }
    }
  }
  if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
  t += hh * kMicrosPerHour + mm * kMicrosPerMinute + ss * kMicrosPerSecond + frac;
  if (rest.empty() || rest == "Z" || rest == "z" || rest == " UTC") return t;
  if (rest.front() == '+' || rest.front() == '-') {
    const int sign = rest.front() == '-' ? -1 : 1;
    rest.remove_prefix(1);
    int oh = 0, om = 0;
    if (rest.size() == 5 && rest[2] == ':') {
      if (!parse_int(rest.substr(0, 2), oh) || !parse_int(rest.substr(3, 2), om)) return std::nullopt;
    } else if (rest.size() == 4) {
      if (!parse_int(rest.substr(0, 2), oh) || !parse_int(rest.substr(2, 2), om)) return std::nullopt;
    } else if (rest.size() == 2) {
      if (!parse_int(rest, oh)) return std::nullopt;
    } else {
      return std::nullopt;
    }
    return t - sign * (oh * kMicrosPerHour + om * kMicrosPerMinute);
  }
  return std::nullopt;
}

std::string format_date(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

std::string format_timestamp(Micros t) {
  const Date d = date_of(t);
  Micros rem = micros_of_day(t);
  const int hh = static_cast<int>(rem / kMicrosPerHour);
  rem %= kMicrosPerHour;
  const int mm = static_cast<int>(rem / kMicrosPerMinute);
  rem %= kMicrosPerMinute;
  const int ss = static_cast<int>(rem / kMicrosPerSecond);
  const int us = static_cast<int>(rem % kMicrosPerSecond);
  char buf[48];
  if (us != 0)
    std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02d.%06dZ", format_date(d).c_str(), hh, mm, ss, us);
  else
    std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02dZ", format_date(d).c_str(), hh, mm, ss);
  return buf;
}

}  // namespace strata
