#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "strata/break_finder.hpp"
#include "strata/holiday_effects.hpp"
#include "strata/seasonal_engine.hpp"
#include "strata/spike_guard.hpp"
#include "strata/temporal_frame.hpp"
#include "strata/trend_arima.hpp"
#include "strata/xreg.hpp"

namespace strata {

enum class Stage { Holidays, SpikesAndDips, Seasonality, StepChanges };
std::string_view to_string(Stage stage);
std::optional<Stage> parse_stage(std::string_view text);

struct LimitsTransform {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  bool active() const { return std::isfinite(lower) || std::isfinite(upper); }
  bool two_sided() const { return std::isfinite(lower) && std::isfinite(upper); }
  // Inward clamp distance for values sitting on a bound.
  double epsilon() const;
};

// Scaled logit (both bounds) or log (one bound). Values within epsilon of a
// bound are clamped inward. Throws Error(ValueOutsideLimits).
double apply_limits(double x, const LimitsTransform& limits);
double invert_limits(double y, const LimitsTransform& limits);
// Interval [lower, upper] on the original scale around the back-transformed
// point x for a transformed half-width c*sigma.
std::pair<double, double> limit_interval(double x, double c_sigma, const LimitsTransform& limits);

struct PipelineConfig {
  // Regularization
  std::optional<Frequency> data_frequency;  // unset: inferred
  std::optional<std::string> timezone;
  Aggregator aggregator = Aggregator::Mean;
  std::vector<double> missing_value_sentinels;
  std::vector<std::pair<Micros, Micros>> outlier_periods;  // inclusive wall-clock ranges marked missing

  // Stages, in execution order; ARIMA always runs last.
  std::vector<Stage> stages{Stage::Holidays, Stage::SpikesAndDips, Stage::Seasonality, Stage::StepChanges};
  std::vector<std::string> holiday_regions;
  std::vector<HolidaySpec> custom_holidays;
  bool clean_spikes_and_dips = true;
  SpikeParams spikes;
  bool second_spike_pass = false;  // rerun spike detection on the deseasonalized series
  std::optional<std::vector<PeriodName>> seasonalities;  // unset: by frequency; empty: none
  StlParams stl;
  SeasonalityTest seasonality_test;
  bool adjust_step_changes = true;
  double change_z_threshold = 5.0;
  double chow_alpha = 0.01;

  // Trend
  bool auto_arima = true;
  AutoArimaOptions arima;
  std::optional<ArimaOrder> non_seasonal_order;
  std::size_t max_time_series_length = 1024;
  std::size_t min_time_series_length = 20;
  std::optional<double> time_series_length_fraction;
  std::size_t trend_smoothing_window_size = 0;
  Execution arima_execution = Execution::Serial;

  LimitsTransform limits;
  double l2_reg = 0.0;
};

// Covariate columns aligned with the regularized grid (one cell per slot).
struct Covariates {
  std::vector<CovariateColumn> columns;
  bool empty() const { return columns.empty(); }
};

struct XregPart {
  RidgeModel ridge;
  std::vector<Encoding> encodings;
  std::vector<double> history;  // sum_k beta_k x_k on the training grid
  std::map<std::string, std::vector<double>> attribution_history;  // per feature
};

// Everything needed to forecast, decompose and score a single series.
struct Bundle {
  PipelineConfig config;
  RegularSeries grid;               // regularized input, NaN where missing
  std::vector<double> filled;       // gap-filled input (transformed when limits are active)
  std::vector<std::size_t> missing; // slots filled by interpolation

  std::vector<HolidaySpec> holidays;
  std::vector<SubHolidayEffect> holiday_effects;
  std::vector<double> holiday_effect;
  std::vector<std::size_t> spike_indices;
  std::vector<double> spikes_and_dips;
  std::vector<SeasonalComponent> seasonal;
  std::vector<ChangePeriod> change_periods;
  std::vector<double> step_changes;
  std::vector<double> trend;
  std::vector<double> residual;
  std::size_t trend_window_start = 0;
  ArimaModel arima;
  std::optional<XregPart> xreg;

  std::size_t size() const { return filled.size(); }
};

// Regularize, then fit. Stage failures raise StageError.
Bundle fit(const RawSeries& raw, const PipelineConfig& config = {});
Bundle fit(const RegularSeries& series, const PipelineConfig& config = {});
// Regression with pipeline errors: ridge on covariates plus a time index,
// residual routed through the univariate pipeline. Throws
// Error(MisalignedCovariates) when the covariates do not match the grid.
Bundle fit_xreg(const RegularSeries& series, const Covariates& covariates, const PipelineConfig& config = {});

struct ForecastResult {
  std::vector<Micros> timestamps;
  std::vector<double> mean, lower, upper, std_err;
  double confidence_level = 0.95;
  // Additive future components (transformed scale when limits are active).
  std::map<std::string, std::vector<double>> components;
};

// Throws Error(InvalidConfidence) unless 0 < confidence_level < 1. For xreg
// bundles `future` must carry `horizon` rows (Error(MissingFutureCovariates)).
ForecastResult forecast(const Bundle& bundle, std::size_t horizon, double confidence_level = 0.95,
                        const Covariates* future = nullptr);

struct ComponentDecomposition {
  std::vector<Micros> history_timestamps;
  std::vector<Micros> future_timestamps;
  std::map<std::string, std::vector<double>> history;  // includes "input"
  std::map<std::string, std::vector<double>> future;   // includes "forecast"
};

ComponentDecomposition decompose(const Bundle& bundle, std::size_t horizon = 0, const Covariates* future = nullptr);

struct AnomalyVerdict {
  std::int64_t slot = 0;
  Micros timestamp = 0;
  double actual = 0.0;
  double expected = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double probability = 0.0;
  bool is_anomaly = false;
};

// Scores history slots. Throws Error(InvalidThreshold) unless 0 < threshold < 1.
std::vector<AnomalyVerdict> detect_anomalies(const Bundle& bundle, double threshold = 0.95);
// Scores new observations on slots of the bundle grid (history slots or the
// contiguous horizon after it).
std::vector<AnomalyVerdict> detect_anomalies(const Bundle& bundle,
                                             const std::vector<std::pair<std::int64_t, double>>& observations,
                                             double threshold = 0.95, const Covariates* future = nullptr);

// Representative UTC instant of a grid slot.
Micros slot_timestamp(const RegularSeries& grid, std::int64_t slot);

nlohmann::json to_json(const Bundle& bundle);
Bundle bundle_from_json(const nlohmann::json& j);

}  // namespace strata
