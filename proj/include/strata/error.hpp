#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace strata {

enum class ErrorCode {
  TooFewPoints,
  EmptyAfterCleaning,
  UnknownZone,
  AllMissing,
  SpanTooSmall,
  IndexOutOfRange,
  NoOccurrences,
  TooShort,
  PeriodTooLongForSeries,
  NotSubMonthlyFrequency,
  TooFewCycles,
  NonConvergence,
  SingularFit,
  AllFitsFailed,
  TypeMismatch,
  SingularSystem,
  MisalignedCovariates,
  MissingFutureCovariates,
  InvalidConfidence,
  ValueOutsideLimits,
  InvalidThreshold,
  NonPositiveValue,
  MissingColumn,
  DivisionByZero,
  InvalidConfig,
  InvalidArgument,
  Io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 protected:
  struct Verbatim {};
  Error(ErrorCode code, const std::string& what, Verbatim) : std::runtime_error(what), code_(code) {}

 private:
  ErrorCode code_;
};

// Raised by the pipeline; carries the name of the stage that failed.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.code(), "[" + stage + "] " + cause.what(), Verbatim{}), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace strata
