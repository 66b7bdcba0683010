#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "strata/civil_time.hpp"

namespace strata {

// IANA zone backed by the system TZif database (TZDIR or /usr/share/zoneinfo).
class TimeZone {
 public:
  // Throws Error(UnknownZone).
  static std::shared_ptr<const TimeZone> load(const std::string& name);
  static std::shared_ptr<const TimeZone> utc();

  const std::string& name() const { return name_; }

  // UTC offset in microseconds (local = utc + offset).
  Micros offset_at(Micros utc) const;
  Micros to_local(Micros utc) const { return utc + offset_at(utc); }

  enum class LocalKind { Unique, Nonexistent, Ambiguous };
  struct LocalResult {
    LocalKind kind = LocalKind::Unique;
    Micros earliest = 0;  // valid for Unique and Ambiguous
    Micros latest = 0;
  };
  LocalResult to_utc(Micros local) const;

  struct PosixRule;

 private:
  struct Transition {
    Micros at;
    Micros offset;
  };

  std::string name_;
  std::vector<Transition> transitions_;
  Micros initial_offset_ = 0;
  std::shared_ptr<const PosixRule> footer_;

  Micros footer_offset(Micros utc) const;
};

}  // namespace strata
