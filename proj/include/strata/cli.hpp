#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "strata/csv.hpp"
#include "strata/metrics_bench.hpp"
#include "strata/pipeline.hpp"

namespace strata::cli {

enum class ModelType { Arima, ArimaXreg };

struct RunConfig {
  ModelType model_type = ModelType::Arima;
  std::string timestamp_col = "timestamp";
  std::string data_col = "value";
  std::vector<std::string> id_cols;
  std::vector<std::string> covariate_cols;  // xreg; empty: every other column
  std::size_t horizon = 1000;
  double confidence_level = 0.95;
  double threshold = 0.95;
  bool decompose = true;
  std::size_t workers = 1;
  PipelineConfig pipeline;
};

// Keys are the model option names in lower case (model_type, horizon,
// holiday_region, ...) plus workers, confidence_level, threshold, timezone,
// custom_holiday (CSV path) and stage_order. Throws Error(InvalidConfig).
RunConfig parse_config(const nlohmann::json& j, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

struct SeriesPartition {
  std::vector<std::string> id;
  std::vector<std::size_t> rows;  // table rows, sorted by timestamp
};

// Groups rows by the id tuple; partitions in lexicographic id order.
// Throws Error(MissingColumn).
std::vector<SeriesPartition> partition_input(const csv::Table& table, const std::vector<std::string>& id_cols,
                                             const std::string& timestamp_col = {});

struct SeriesInput {
  std::vector<std::string> id;
  RawSeries raw;
  std::vector<CovariateColumn> covariates;  // per raw row
};

std::vector<SeriesInput> build_inputs(const csv::Table& table, const RunConfig& config);

struct SeriesOutcome {
  std::vector<std::string> id;
  std::optional<Bundle> bundle;
  std::optional<ForecastResult> forecast;
  std::string stage;
  std::string error_code;
  std::string error;
  double seconds = 0.0;
  bool ok() const { return error.empty(); }
};

enum class Scheduling { Serial, Dynamic };

// Fits (and optionally forecasts) every series independently. Dynamic
// scheduling hands series to `workers` OpenMP threads one at a time; Serial
// is the plain reference loop. Outcomes are in input order either way.
std::vector<SeriesOutcome> fit_batch(const std::vector<SeriesInput>& inputs, const RunConfig& config,
                                     bool with_forecast, std::size_t workers,
                                     Scheduling scheduling = Scheduling::Dynamic);

// Covariates aligned to a regularized grid: the last row per slot wins,
// slots without a row get an empty cell.
std::vector<CovariateColumn> align_covariates(const RegularSeries& grid, const RawSeries& raw,
                                              const std::vector<CovariateColumn>& columns);

struct Paths {
  std::string input;
  std::string output_dir = ".";
  std::string model;   // models.jsonl from a previous fit
  std::string future;  // future covariates for xreg forecasts
};

struct RunStatus {
  std::size_t series = 0;
  std::size_t failed = 0;
  double seconds = 0.0;
};

// Subcommands. Each writes its CSV outputs plus errors.csv to the output
// directory; per-series failures are recorded, I/O failures throw.
RunStatus run_fit(const RunConfig& config, const Paths& paths);
RunStatus run_forecast(const RunConfig& config, const Paths& paths);
RunStatus run_decompose(const RunConfig& config, const Paths& paths);
RunStatus run_detect_anomalies(const RunConfig& config, const Paths& paths);
RunStatus run_evaluate(const RunConfig& config, const Paths& paths);
// `paths.input` is a directory holding benchmark.json.
RunStatus run_benchmark(const RunConfig& config, const Paths& paths, BenchmarkSummary* summary = nullptr);

}  // namespace strata::cli
