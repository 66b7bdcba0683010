#include "strata/timezone.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <map>
#include <mutex>

#include "strata/error.hpp"

namespace strata {

namespace chr = std::chrono;

// One DST boundary rule from a POSIX TZ string ("M3.2.0/2", "J60", "59").
struct RuleDate {
  enum Kind { Julian1, Julian0, MonthWeekDay } kind = MonthWeekDay;
  int day = 0, month = 0, week = 0, weekday = 0;
  Micros time = 2 * kMicrosPerHour;
};

struct TimeZone::PosixRule {
  Micros std_offset = 0;
  bool has_dst = false;
  Micros dst_offset = 0;
  RuleDate start, end;
};

namespace {

std::int64_t read_be(const unsigned char* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v = (v << 8) | p[i];
  if (bytes == 4) return static_cast<std::int32_t>(static_cast<std::uint32_t>(v));
  return static_cast<std::int64_t>(v);
}

class PosixParser {
 public:
  explicit PosixParser(std::string s) : s_(std::move(s)) {}

  std::optional<TimeZone::PosixRule> parse() {
    TimeZone::PosixRule rule;
    if (!skip_name()) return std::nullopt;
    auto off = parse_offset();
    if (!off) return std::nullopt;
    rule.std_offset = -*off;
    if (pos_ >= s_.size()) return rule;
    if (!skip_name()) return std::nullopt;
    rule.has_dst = true;
    rule.dst_offset = rule.std_offset + kMicrosPerHour;
    if (pos_ < s_.size() && s_[pos_] != ',') {
      auto d = parse_offset();
      if (!d) return std::nullopt;
      rule.dst_offset = -*d;
    }
    if (pos_ >= s_.size() || s_[pos_] != ',') {
      // No rule given: US default.
      rule.start = RuleDate{RuleDate::MonthWeekDay, 0, 3, 2, 0, 2 * kMicrosPerHour};
      rule.end = RuleDate{RuleDate::MonthWeekDay, 0, 11, 1, 0, 2 * kMicrosPerHour};
      return rule;
    }
    ++pos_;
    auto a = parse_date();
    if (!a || pos_ >= s_.size() || s_[pos_] != ',') return std::nullopt;
    ++pos_;
    auto b = parse_date();
    if (!b) return std::nullopt;
    rule.start = *a;
    rule.end = *b;
    return rule;
  }

 private:
  std::string s_;
  size_t pos_ = 0;

  bool skip_name() {
    if (pos_ < s_.size() && s_[pos_] == '<') {
      auto close = s_.find('>', pos_);
      if (close == std::string::npos) return false;
      pos_ = close + 1;
      return true;
    }
    size_t start = pos_;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return pos_ - start >= 3;
  }

  std::optional<int> number() {
    size_t start = pos_;
    int v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) v = v * 10 + (s_[pos_++] - '0');
    if (pos_ == start) return std::nullopt;
    return v;
  }

  std::optional<Micros> parse_offset() {
    int sign = 1;
    if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) sign = s_[pos_++] == '-' ? -1 : 1;
    auto h = number();
    if (!h) return std::nullopt;
    Micros v = *h * kMicrosPerHour;
    if (pos_ < s_.size() && s_[pos_] == ':') {
      ++pos_;
      auto m = number();
      if (!m) return std::nullopt;
      v += *m * kMicrosPerMinute;
      if (pos_ < s_.size() && s_[pos_] == ':') {
        ++pos_;
        auto sec = number();
        if (!sec) return std::nullopt;
        v += *sec * kMicrosPerSecond;
      }
    }
    return sign * v;
  }

  std::optional<RuleDate> parse_date() {
    RuleDate r;
    if (pos_ < s_.size() && s_[pos_] == 'M') {
      ++pos_;
      auto m = number();
      if (!m || pos_ >= s_.size() || s_[pos_++] != '.') return std::nullopt;
      auto w = number();
      if (!w || pos_ >= s_.size() || s_[pos_++] != '.') return std::nullopt;
      auto d = number();
      if (!d) return std::nullopt;
      r.kind = RuleDate::MonthWeekDay;
      r.month = *m;
      r.week = *w;
      r.weekday = *d;
    } else if (pos_ < s_.size() && s_[pos_] == 'J') {
      ++pos_;
      auto n = number();
      if (!n) return std::nullopt;
      r.kind = RuleDate::Julian1;
      r.day = *n;
    } else {
      auto n = number();
      if (!n) return std::nullopt;
      r.kind = RuleDate::Julian0;
      r.day = *n;
    }
    if (pos_ < s_.size() && s_[pos_] == '/') {
      ++pos_;
      auto t = parse_offset();
      if (!t) return std::nullopt;
      r.time = *t;
    }
    return r;
  }
};

// Local wall-clock instant (as micros) of the rule date in the given year.
Micros rule_local_time(const RuleDate& r, int year) {
  chr::sys_days day;
  if (r.kind == RuleDate::MonthWeekDay) {
    const auto first = chr::sys_days{Date{chr::year{year}, chr::month{static_cast<unsigned>(r.month)}, chr::day{1}}};
    const int first_wd = static_cast<int>(chr::weekday{first}.c_encoding());
    int offset = (r.weekday - first_wd + 7) % 7 + (r.week - 1) * 7;
    const int dim = days_in_month(Date{first});
    while (offset >= dim) offset -= 7;
    day = first + chr::days{offset};
  } else {
    const auto jan1 = chr::sys_days{Date{chr::year{year}, chr::January, chr::day{1}}};
    int n = r.day;
    if (r.kind == RuleDate::Julian1) {
      n -= 1;
      if (chr::year{year}.is_leap() && r.day >= 60) n += 1;
    }
    day = jan1 + chr::days{n};
  }
  return static_cast<Micros>(day.time_since_epoch().count()) * kMicrosPerDay + r.time;
}

std::string zone_dir() {
  if (const char* env = std::getenv("TZDIR"); env && *env) return env;
  return "/usr/share/zoneinfo";
}

}  // namespace

std::shared_ptr<const TimeZone> TimeZone::utc() {
  static const std::shared_ptr<const TimeZone> zone = [] {
    auto z = std::make_shared<TimeZone>();
    z->name_ = "UTC";
    return std::shared_ptr<const TimeZone>(z);
  }();
  return zone;
}

std::shared_ptr<const TimeZone> TimeZone::load(const std::string& name) {
  if (name.empty() || name == "UTC" || name == "Etc/UTC") return utc();
  static std::mutex mu;
  static std::map<std::string, std::shared_ptr<const TimeZone>> cache;
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(name); it != cache.end()) return it->second;
  }
  if (name.find("..") != std::string::npos || name.front() == '/')
    throw Error(ErrorCode::UnknownZone, name);
  std::ifstream in(zone_dir() + "/" + name, std::ios::binary);
  if (!in) throw Error(ErrorCode::UnknownZone, name);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 44 || std::string(buf.begin(), buf.begin() + 4) != "TZif")
    throw Error(ErrorCode::UnknownZone, name + " (not a TZif file)");

  auto zone = std::make_shared<TimeZone>();
  zone->name_ = name;

  struct Counts {
    std::int64_t isut, isstd, leap, time, type, chars;
  };
  auto counts_at = [&](size_t off) {
    const unsigned char* p = buf.data() + off + 20;
    return Counts{read_be(p, 4), read_be(p + 4, 4), read_be(p + 8, 4),
                  read_be(p + 12, 4), read_be(p + 16, 4), read_be(p + 20, 4)};
  };
  const char version = static_cast<char>(buf[4]);
  Counts c = counts_at(0);
  size_t off = 44;
  int tbytes = 4;
  if (version >= '2') {
    off += c.time * 4 + c.time + c.type * 6 + c.chars + c.leap * 8 + c.isstd + c.isut;
    if (off + 44 > buf.size()) throw Error(ErrorCode::UnknownZone, name + " (truncated)");
    c = counts_at(off);
    off += 44;
    tbytes = 8;
  }
  const size_t need = off + c.time * tbytes + c.time + c.type * 6 + c.chars +
                      c.leap * (tbytes + 4) + c.isstd + c.isut;
  if (need > buf.size() || c.type <= 0) throw Error(ErrorCode::UnknownZone, name + " (truncated)");

  const unsigned char* times = buf.data() + off;
  const unsigned char* idx = times + c.time * tbytes;
  const unsigned char* types = idx + c.time;
  std::vector<Micros> type_offsets(static_cast<size_t>(c.type));
  std::vector<bool> type_dst(static_cast<size_t>(c.type));
  for (std::int64_t i = 0; i < c.type; ++i) {
    type_offsets[i] = read_be(types + i * 6, 4) * kMicrosPerSecond;
    type_dst[i] = types[i * 6 + 4] != 0;
  }
  zone->initial_offset_ = type_offsets[0];
  for (std::int64_t i = 0; i < c.type; ++i) {
    if (!type_dst[i]) {
      zone->initial_offset_ = type_offsets[i];
      break;
    }
  }
  for (std::int64_t i = 0; i < c.time; ++i) {
    const std::int64_t at = read_be(times + i * tbytes, tbytes);
    const unsigned t = idx[i];
    if (t >= type_offsets.size()) continue;
    zone->transitions_.push_back({at * kMicrosPerSecond, type_offsets[t]});
  }

  if (version >= '2' && need < buf.size() && buf[need] == '\n') {
    auto end = std::find(buf.begin() + static_cast<long>(need) + 1, buf.end(), '\n');
    std::string footer(buf.begin() + static_cast<long>(need) + 1, end);
    if (!footer.empty()) {
      if (auto rule = PosixParser(footer).parse())
        zone->footer_ = std::make_shared<const PosixRule>(*rule);
    }
  }

  std::shared_ptr<const TimeZone> result = zone;
  std::lock_guard lock(mu);
  cache.emplace(name, result);
  return result;
}

Micros TimeZone::footer_offset(Micros utc) const {
  const PosixRule& r = *footer_;
  if (!r.has_dst) return r.std_offset;
  const int year = static_cast<int>(date_of(utc + r.std_offset).year());
  // Check the neighbouring years too so instants near new year resolve correctly.
  for (int y : {year, year - 1, year + 1}) {
    const Micros start = rule_local_time(r.start, y) - r.std_offset;
    const Micros end = rule_local_time(r.end, y) - r.dst_offset;
    if (start < end) {
      if (utc >= start && utc < end) return r.dst_offset;
    } else {
      // Southern hemisphere: DST spans the new year.
      const Micros next_end = rule_local_time(r.end, y + 1) - r.dst_offset;
      if (utc >= start && utc < next_end) return r.dst_offset;
    }
  }
  return r.std_offset;
}

Micros TimeZone::offset_at(Micros utc) const {
  if (transitions_.empty()) return footer_ ? footer_offset(utc) : initial_offset_;
  if (utc < transitions_.front().at) return initial_offset_;
  if (footer_ && utc >= transitions_.back().at) return footer_offset(utc);
  auto it = std::upper_bound(transitions_.begin(), transitions_.end(), utc,
                             [](Micros t, const Transition& tr) { return t < tr.at; });
  return std::prev(it)->offset;
}

TimeZone::LocalResult TimeZone::to_utc(Micros local) const {
  std::vector<Micros> valid;
  for (Micros probe : {local - kMicrosPerDay, local, local + kMicrosPerDay}) {
    const Micros off = offset_at(probe);
    const Micros u = local - off;
    if (offset_at(u) == off && std::find(valid.begin(), valid.end(), u) == valid.end()) valid.push_back(u);
  }
  std::sort(valid.begin(), valid.end());
  LocalResult r;
  if (valid.empty()) {
    r.kind = LocalKind::Nonexistent;
    // Shift forward across the gap.
    const Micros before = offset_at(local - kMicrosPerDay);
    r.earliest = r.latest = local - before;
  } else if (valid.size() == 1) {
    r.kind = LocalKind::Unique;
    r.earliest = r.latest = valid.front();
  } else {
    r.kind = LocalKind::Ambiguous;
    r.earliest = valid.front();
    r.latest = valid.back();
  }
  return r;
}

}  // namespace strata
