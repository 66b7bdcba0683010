#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "strata/cli.hpp"
#include "strata/error.hpp"

namespace {

struct Options {
  std::string input;
  std::string output_dir = ".";
  std::string config;
  std::string model;
  std::string future;
  std::optional<std::size_t> workers;
  std::optional<std::size_t> horizon;
  std::optional<double> confidence_level;
  std::optional<double> threshold;
  bool strict = false;
};

void add_common(CLI::App* cmd, Options& o, bool needs_input) {
  auto* in = cmd->add_option("--input,-i", o.input, "Input CSV (or dataset directory for benchmark)");
  if (needs_input) in->required();
  cmd->add_option("--output-dir,-o", o.output_dir, "Directory for output files");
  cmd->add_option("--config,-c", o.config, "JSON config with model options");
  cmd->add_option("--workers,-w", o.workers, "Parallel workers")->check(CLI::PositiveNumber);
  cmd->add_option("--horizon", o.horizon, "Forecast horizon")->check(CLI::PositiveNumber);
  cmd->add_option("--confidence-level", o.confidence_level, "Prediction interval level")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--threshold", o.threshold, "Anomaly probability threshold")->check(CLI::Range(0.0, 1.0));
  cmd->add_flag("--strict", o.strict, "Exit non-zero when any series fails");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"strata: batch time-series forecasting and anomaly detection"};
  app.require_subcommand(1);
  Options o;

  auto* fit = app.add_subcommand("fit", "Fit every series; write models, forecasts and components");
  add_common(fit, o, true);
  fit->add_option("--future", o.future, "Future covariates CSV (ARIMA_XREG)");

  auto* fc = app.add_subcommand("forecast", "Forecast from saved models or a fresh fit");
  add_common(fc, o, false);
  fc->add_option("--model,-m", o.model, "models.jsonl from a previous fit");
  fc->add_option("--future", o.future, "Future covariates CSV (ARIMA_XREG)");

  auto* dec = app.add_subcommand("decompose", "Write history and forecast components");
  add_common(dec, o, false);
  dec->add_option("--model,-m", o.model, "models.jsonl from a previous fit");
  dec->add_option("--future", o.future, "Future covariates CSV (ARIMA_XREG)");

  auto* an = app.add_subcommand("detect-anomalies", "Score history or new data for anomalies");
  add_common(an, o, true);
  an->add_option("--model,-m", o.model, "models.jsonl; --input then holds the new data");
  an->add_option("--future", o.future, "Future covariates CSV (ARIMA_XREG)");

  auto* ev = app.add_subcommand("evaluate", "Accuracy against held-out or new actuals");
  add_common(ev, o, true);
  ev->add_option("--model,-m", o.model, "models.jsonl; --input then holds the actuals");
  ev->add_option("--future", o.future, "Future covariates CSV (ARIMA_XREG)");

  auto* bench = app.add_subcommand("benchmark", "Hold-out benchmark over a dataset directory");
  add_common(bench, o, true);

  CLI11_PARSE(app, argc, argv);

  try {
    strata::cli::RunConfig rc = o.config.empty() ? strata::cli::RunConfig{} : strata::cli::load_config(o.config);
    if (o.workers) rc.workers = *o.workers;
    if (o.horizon) rc.horizon = *o.horizon;
    if (o.confidence_level) rc.confidence_level = *o.confidence_level;
    if (o.threshold) rc.threshold = *o.threshold;
    if (!(rc.confidence_level > 0.0 && rc.confidence_level < 1.0))
      throw strata::Error(strata::ErrorCode::InvalidConfidence, "confidence level must lie in (0, 1)");
    if (!(rc.threshold > 0.0 && rc.threshold < 1.0))
      throw strata::Error(strata::ErrorCode::InvalidThreshold, "threshold must lie in (0, 1)");
    strata::cli::Paths paths{o.input, o.output_dir, o.model, o.future};
    if (o.model.empty() && o.input.empty())
      throw strata::Error(strata::ErrorCode::InvalidArgument, "either --input or --model is required");

    strata::cli::RunStatus st;
    if (*fit) st = strata::cli::run_fit(rc, paths);
    else if (*fc) st = strata::cli::run_forecast(rc, paths);
    else if (*dec) st = strata::cli::run_decompose(rc, paths);
    else if (*an) st = strata::cli::run_detect_anomalies(rc, paths);
    else if (*ev) st = strata::cli::run_evaluate(rc, paths);
    else st = strata::cli::run_benchmark(rc, paths);

    std::cerr << st.series << " series, " << st.failed << " failed, " << st.seconds << " s";
    if (st.seconds > 0) std::cerr << " (" << static_cast<double>(st.series) / st.seconds << " series/s)";
    std::cerr << '\n';
    return o.strict && st.failed > 0 ? 2 : 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
