#include "strata/error.hpp"

namespace strata {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::EmptyAfterCleaning: return "EmptyAfterCleaning";
    case ErrorCode::UnknownZone: return "UnknownZone";
    case ErrorCode::AllMissing: return "AllMissing";
    case ErrorCode::SpanTooSmall: return "SpanTooSmall";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NoOccurrences: return "NoOccurrences";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::PeriodTooLongForSeries: return "PeriodTooLongForSeries";
    case ErrorCode::NotSubMonthlyFrequency: return "NotSubMonthlyFrequency";
    case ErrorCode::TooFewCycles: return "TooFewCycles";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::SingularFit: return "SingularFit";
    case ErrorCode::AllFitsFailed: return "AllFitsFailed";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::MisalignedCovariates: return "MisalignedCovariates";
    case ErrorCode::MissingFutureCovariates: return "MissingFutureCovariates";
    case ErrorCode::InvalidConfidence: return "InvalidConfidence";
    case ErrorCode::ValueOutsideLimits: return "ValueOutsideLimits";
    case ErrorCode::InvalidThreshold: return "InvalidThreshold";
    case ErrorCode::NonPositiveValue: return "NonPositiveValue";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace strata
