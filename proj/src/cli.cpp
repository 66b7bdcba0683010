#include "strata/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "strata/error.hpp"
#include "strata/holiday_effects.hpp"
#include "strata/timezone.hpp"

namespace strata::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}
std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw Error(ErrorCode::InvalidConfig, "option " + key + ": " + why);
}

std::vector<std::string> strings(const json& v) {
  if (v.is_string()) return {v.get<std::string>()};
  return v.get<std::vector<std::string>>();
}

double number(const json& v) {
  if (v.is_string()) return std::stod(v.get<std::string>());
  return v.get<double>();
}

std::int64_t integer(const std::string& key, const json& v) {
  const double d = number(v);
  if (d != std::floor(d)) bad(key, "expected an integer");
  return static_cast<std::int64_t>(d);
}

bool boolean(const json& v) {
  if (v.is_string()) {
    const auto s = upper(v.get<std::string>());
    if (s == "TRUE") return true;
    if (s == "FALSE") return false;
    throw Error(ErrorCode::InvalidConfig, "expected TRUE or FALSE, got " + s);
  }
  return v.get<bool>();
}

ArimaOrder parse_order(const std::string& key, const json& v) {
  std::vector<int> xs;
  if (v.is_array()) {
    for (const auto& x : v) xs.push_back(static_cast<int>(integer(key, x)));
  } else {
    for (char c : v.get<std::string>())
      if (std::isdigit(static_cast<unsigned char>(c))) xs.push_back(c - '0');
  }
  if (xs.size() != 3) bad(key, "expected (p, d, q)");
  if (xs[0] < 0 || xs[1] < 0 || xs[1] > 2 || xs[2] < 0) bad(key, "orders out of range");
  ArimaOrder o{xs[0], xs[1], xs[2], false};
  return o;
}

std::vector<HolidaySpec> inline_holidays(const json& arr) {
  std::ostringstream csv;
  csv << "region,holiday,date,pre_days,post_days\n";
  for (const auto& h : arr) {
    csv << csv::quote(h.value("region", "CUSTOM")) << ',' << csv::quote(h.at("holiday").get<std::string>()) << ','
        << h.at("date").get<std::string>() << ',';
    if (h.contains("pre_days")) csv << h.at("pre_days").get<int>();
    csv << ',';
    if (h.contains("post_days")) csv << h.at("post_days").get<int>();
    csv << '\n';
  }
  return parse_holiday_csv(csv.str());
}

std::optional<double> parse_value(const std::string& s) {
  if (s.empty()) return std::nan("");
  const auto u = upper(s);
  if (u == "NA" || u == "NAN" || u == "NULL" || u == "NONE") return std::nan("");
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (*b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) return std::nullopt;
  return v;
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  const auto path = (fs::path(dir) / name).string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  return out;
}

csv::Row with_id(const std::vector<std::string>& id, std::initializer_list<std::string> rest) {
  csv::Row r = id;
  r.insert(r.end(), rest.begin(), rest.end());
  return r;
}

std::string join_id(const std::vector<std::string>& id) {
  std::string s;
  for (std::size_t i = 0; i < id.size(); ++i) s += (i ? "|" : "") + id[i];
  return s;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Failure {
  std::vector<std::string> id;
  std::string stage, code, message;
};

template <class F>
std::optional<Failure> guarded(const std::vector<std::string>& id, F&& f) {
  try {
    f();
    return std::nullopt;
  } catch (const StageError& e) {
    return Failure{id, e.stage(), std::string(to_string(e.code())), e.what()};
  } catch (const Error& e) {
    return Failure{id, "", std::string(to_string(e.code())), e.what()};
  } catch (const std::exception& e) {
    return Failure{id, "", "Internal", e.what()};
  }
}

void write_errors(const RunConfig& rc, const std::string& dir, const std::vector<Failure>& failures) {
  auto out = open_out(dir, "errors.csv");
  csv::write_row(out, with_id(rc.id_cols, {"stage", "error_code", "message"}));
  for (const auto& f : failures) csv::write_row(out, with_id(f.id, {f.stage, f.code, f.message}));
}

void write_forecast_rows(std::ostream& out, const std::vector<std::string>& id, const ForecastResult& f) {
  for (std::size_t h = 0; h < f.mean.size(); ++h)
    csv::write_row(out, with_id(id, {format_timestamp(f.timestamps[h]), csv::format_number(f.mean[h]),
                                     csv::format_number(f.std_err[h]), csv::format_number(f.lower[h]),
                                     csv::format_number(f.upper[h]), csv::format_number(f.confidence_level)}));
}

void write_component_rows(std::ostream& out, const std::vector<std::string>& id, const ComponentDecomposition& d) {
  for (const auto& [name, v] : d.history)
    for (std::size_t i = 0; i < v.size(); ++i)
      csv::write_row(out, with_id(id, {format_timestamp(d.history_timestamps[i]), name, csv::format_number(v[i])}));
  for (const auto& [name, v] : d.future)
    for (std::size_t i = 0; i < v.size(); ++i)
      csv::write_row(out, with_id(id, {format_timestamp(d.future_timestamps[i]), name, csv::format_number(v[i])}));
}

struct LoadedModel {
  std::vector<std::string> id;
  Bundle bundle;
};

std::vector<LoadedModel> load_models(const std::string& path, std::vector<Failure>& failures) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
  std::vector<LoadedModel> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::Io, path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    std::vector<std::string> id = j.value("id", std::vector<std::string>{});
    if (auto f = guarded(id, [&] { out.push_back({id, bundle_from_json(j.at("bundle"))}); })) failures.push_back(*f);
  }
  return out;
}

// Rows of `table` for each id tuple.
std::map<std::vector<std::string>, SeriesInput> inputs_by_id(const csv::Table& table, const RunConfig& rc) {
  std::map<std::vector<std::string>, SeriesInput> out;
  for (auto& s : build_inputs(table, rc)) out.emplace(s.id, std::move(s));
  return out;
}

// Future covariate rows placed by slot: cell h belongs to slot n + h.
Covariates future_covariates(const SeriesInput* future, const Bundle& b) {
  Covariates c;
  if (!future || !b.xreg) return c;
  const auto n = static_cast<std::int64_t>(b.size());
  std::map<std::int64_t, std::size_t> rows;
  for (std::size_t r = 0; r < future->raw.points.size(); ++r) {
    const auto& t = future->raw.points[r].timestamp;
    if (!t) continue;
    const auto h = b.grid.slot_of_instant(*t) - n;
    if (h >= 0) rows[h] = r;
  }
  const std::size_t len = rows.empty() ? 0 : static_cast<std::size_t>(rows.rbegin()->first + 1);
  for (const auto& col : future->covariates) {
    CovariateColumn out{col.name, std::vector<std::string>(len)};
    for (const auto& [h, r] : rows) out.raw[static_cast<std::size_t>(h)] = col.raw[r];
    c.columns.push_back(std::move(out));
  }
  return c;
}

std::vector<double> original_history(const Bundle& b) {
  std::vector<double> h = b.filled;
  if (b.config.limits.active())
    for (auto& v : h) v = invert_limits(v, b.config.limits);
  return h;
}

// Forecast the slots covered by `actual` and score the matched pairs.
MetricReport score_holdout(const Bundle& b, const RawSeries& actual, const RunConfig& rc, const Covariates* fut) {
  const auto n = static_cast<std::int64_t>(b.size());
  std::map<std::int64_t, double> by_slot;
  for (const auto& p : actual.points)
    if (p.timestamp && !std::isnan(p.value)) by_slot[b.grid.slot_of_instant(*p.timestamp)] = p.value;
  std::erase_if(by_slot, [&](const auto& kv) { return kv.first < n; });
  if (by_slot.empty()) throw Error(ErrorCode::TooFewPoints, "no actuals after the training range");
  const auto horizon = static_cast<std::size_t>(by_slot.rbegin()->first - n + 1);
  const auto f = forecast(b, horizon, rc.confidence_level, fut);
  std::vector<double> ys, fs;
  for (const auto& [slot, y] : by_slot) {
    ys.push_back(y);
    fs.push_back(f.mean[static_cast<std::size_t>(slot - n)]);
  }
  const auto train = original_history(b);
  return compute_metrics(ys, fs, train, mase_period(b.grid.freq));
}

SeriesOutcome fit_one(const SeriesInput& in, const RunConfig& rc, bool with_forecast) {
  SeriesOutcome o;
  o.id = in.id;
  const auto t0 = std::chrono::steady_clock::now();
  auto fail = guarded(in.id, [&] {
    if (rc.model_type == ModelType::ArimaXreg) {
      RegularizeOptions ro;
      ro.freq_override = rc.pipeline.data_frequency;
      ro.timezone = rc.pipeline.timezone;
      ro.aggregator = rc.pipeline.aggregator;
      RegularSeries grid;
      try {
        grid = regularize(in.raw, ro);
      } catch (const Error& e) {
        throw StageError("regularize", e);
      }
      Covariates cov;
      cov.columns = align_covariates(grid, in.raw, in.covariates);
      o.bundle = fit_xreg(grid, cov, rc.pipeline);
    } else {
      o.bundle = fit(in.raw, rc.pipeline);
      if (with_forecast) o.forecast = forecast(*o.bundle, rc.horizon, rc.confidence_level);
    }
  });
  if (fail) {
    o.bundle.reset();
    o.forecast.reset();
    o.stage = fail->stage;
    o.error_code = fail->code;
    o.error = fail->message.empty() ? "error" : fail->message;
  }
  o.seconds = elapsed(t0);
  return o;
}

std::vector<SeriesInput> read_inputs(const RunConfig& rc, const std::string& path) {
  if (path.empty()) throw Error(ErrorCode::Io, "no input file given");
  const auto table = csv::read_file(path);
  table.require(rc.data_col);
  return build_inputs(table, rc);
}

}  // namespace

RunConfig parse_config(const json& in, const std::string& base_dir) {
  if (!in.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
  RunConfig rc;
  auto& pc = rc.pipeline;
  for (const auto& [raw_key, v] : in.items()) {
    const std::string key = lower(raw_key);
    try {
      if (key == "model_type") {
        const auto t = upper(v.get<std::string>());
        if (t == "ARIMA") rc.model_type = ModelType::Arima;
        else if (t == "ARIMA_XREG") rc.model_type = ModelType::ArimaXreg;
        else bad(key, "unknown model type " + t);
      } else if (key == "time_series_timestamp_col") {
        rc.timestamp_col = v.get<std::string>();
      } else if (key == "time_series_data_col") {
        rc.data_col = v.get<std::string>();
      } else if (key == "time_series_id_col") {
        rc.id_cols = strings(v);
      } else if (key == "covariate_cols") {
        rc.covariate_cols = strings(v);
      } else if (key == "horizon") {
        const auto h = integer(key, v);
        if (h < 1) bad(key, "must be at least 1");
        rc.horizon = static_cast<std::size_t>(h);
      } else if (key == "auto_arima") {
        pc.auto_arima = boolean(v);
      } else if (key == "auto_arima_max_order") {
        const auto m = integer(key, v);
        if (m < 0) bad(key, "must be non-negative");
        pc.arima.max_order = static_cast<int>(m);
      } else if (key == "auto_arima_min_order") {
        const auto m = integer(key, v);
        if (m < 0) bad(key, "must be non-negative");
        pc.arima.min_order = static_cast<int>(m);
      } else if (key == "non_seasonal_order") {
        pc.non_seasonal_order = parse_order(key, v);
      } else if (key == "data_frequency") {
        const auto s = upper(v.get<std::string>());
        if (s == "AUTO_FREQUENCY") {
          pc.data_frequency.reset();
        } else if (auto k = parse_frequency_kind(s)) {
          pc.data_frequency = Frequency::of(*k);
        } else {
          bad(key, "unknown frequency " + s);
        }
      } else if (key == "include_drift") {
        pc.arima.include_drift = boolean(v);
      } else if (key == "holiday_region") {
        pc.holiday_regions.clear();
        for (const auto& r : strings(v)) {
          const auto u = upper(r);
          if (u == "NONE" || u.empty()) continue;
          if (builtin_holidays(u).empty()) bad(key, "unknown region " + r);
          pc.holiday_regions.push_back(u);
        }
      } else if (key == "clean_spikes_and_dips") {
        pc.clean_spikes_and_dips = boolean(v);
      } else if (key == "adjust_step_changes") {
        pc.adjust_step_changes = boolean(v);
      } else if (key == "time_series_length_fraction") {
        const double f = number(v);
        if (!(f > 0.0 && f <= 1.0)) bad(key, "must lie in (0, 1]");
        pc.time_series_length_fraction = f;
      } else if (key == "min_time_series_length") {
        const auto m = integer(key, v);
        if (m < 4) bad(key, "must be at least 4");
        pc.min_time_series_length = static_cast<std::size_t>(m);
      } else if (key == "max_time_series_length") {
        const auto m = integer(key, v);
        if (m < 4) bad(key, "must be at least 4");
        pc.max_time_series_length = static_cast<std::size_t>(m);
      } else if (key == "trend_smoothing_window_size") {
        const auto w = integer(key, v);
        if (w < 0) bad(key, "must be non-negative");
        pc.trend_smoothing_window_size = static_cast<std::size_t>(w);
      } else if (key == "decompose_time_series") {
        rc.decompose = boolean(v);
      } else if (key == "forecast_limit_lower_bound") {
        pc.limits.lower = number(v);
      } else if (key == "forecast_limit_upper_bound") {
        pc.limits.upper = number(v);
      } else if (key == "seasonalities") {
        std::vector<PeriodName> names;
        bool automatic = false;
        for (const auto& s : strings(v)) {
          const auto u = upper(s);
          if (u == "NO_SEASONALITY") continue;
          if (u == "AUTO") {
            automatic = true;
            continue;
          }
          const auto p = parse_period_name(u);
          if (!p) bad(key, "unknown seasonality " + s);
          names.push_back(*p);
        }
        if (automatic) pc.seasonalities.reset();
        else pc.seasonalities = names;
      } else if (key == "hierarchical_time_series_cols") {
        bad(key, "hierarchical reconciliation is not supported");
      } else if (key == "l2_reg") {
        const double l = number(v);
        if (!(l >= 0.0)) bad(key, "must be non-negative");
        pc.l2_reg = l;
      } else if (key == "confidence_level") {
        rc.confidence_level = number(v);
        if (!(rc.confidence_level > 0.0 && rc.confidence_level < 1.0)) bad(key, "must lie in (0, 1)");
      } else if (key == "threshold") {
        rc.threshold = number(v);
        if (!(rc.threshold > 0.0 && rc.threshold < 1.0)) bad(key, "must lie in (0, 1)");
      } else if (key == "workers") {
        const auto w = integer(key, v);
        if (w < 1) bad(key, "must be at least 1");
        rc.workers = static_cast<std::size_t>(w);
      } else if (key == "timezone") {
        const auto tz = v.get<std::string>();
        TimeZone::load(tz);
        pc.timezone = tz;
      } else if (key == "custom_holiday") {
        if (v.is_string()) {
          fs::path p(v.get<std::string>());
          if (p.is_relative()) p = fs::path(base_dir) / p;
          pc.custom_holidays = load_holiday_file(p.string());
        } else {
          pc.custom_holidays = inline_holidays(v);
        }
      } else if (key == "stage_order") {
        pc.stages.clear();
        for (const auto& s : strings(v)) {
          const auto st = parse_stage(s);
          if (!st) bad(key, "unknown stage " + s);
          pc.stages.push_back(*st);
        }
      } else if (key == "second_spike_pass") {
        pc.second_spike_pass = boolean(v);
      } else if (key == "missing_value_sentinels") {
        pc.missing_value_sentinels = v.get<std::vector<double>>();
      } else if (key == "aggregator") {
        const auto a = upper(v.get<std::string>());
        if (a == "MEAN") pc.aggregator = Aggregator::Mean;
        else if (a == "SUM") pc.aggregator = Aggregator::Sum;
        else bad(key, "expected MEAN or SUM");
      } else {
        bad(key, "unknown option");
      }
    } catch (const json::exception& e) {
      bad(key, e.what());
    } catch (const std::invalid_argument&) {
      bad(key, "not a number");
    }
  }
  if (pc.arima.min_order > pc.arima.max_order)
    throw Error(ErrorCode::InvalidConfig, "auto_arima_min_order exceeds auto_arima_max_order");
  if (pc.limits.two_sided() && !(pc.limits.lower < pc.limits.upper))
    throw Error(ErrorCode::InvalidConfig, "forecast limits need lower < upper");
  if (!pc.auto_arima && !pc.non_seasonal_order)
    throw Error(ErrorCode::InvalidConfig, "non_seasonal_order is required when auto_arima is FALSE");
  return rc;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path + ": " + e.what());
  }
  return parse_config(j, fs::path(path).parent_path().string().empty() ? "." : fs::path(path).parent_path().string());
}

std::vector<SeriesPartition> partition_input(const csv::Table& table, const std::vector<std::string>& id_cols,
                                             const std::string& timestamp_col) {
  std::vector<std::size_t> idx;
  for (const auto& c : id_cols) idx.push_back(table.require(c));
  std::optional<std::size_t> ts_idx;
  if (!timestamp_col.empty()) ts_idx = table.require(timestamp_col);
  std::map<std::vector<std::string>, std::vector<std::size_t>> groups;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::vector<std::string> key;
    for (auto i : idx) key.push_back(i < table.rows[r].size() ? table.rows[r][i] : std::string());
    groups[std::move(key)].push_back(r);
  }
  std::vector<SeriesPartition> out;
  for (auto& [key, rows] : groups) {
    if (ts_idx) {
      std::vector<std::pair<Micros, std::size_t>> keyed;
      for (auto r : rows) {
        const auto& row = table.rows[r];
        const auto t = *ts_idx < row.size() ? parse_timestamp(row[*ts_idx]) : std::nullopt;
        keyed.emplace_back(t ? *t : std::numeric_limits<Micros>::max(), r);
      }
      std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = keyed[i].second;
    }
    out.push_back({key, std::move(rows)});
  }
  return out;
}

std::vector<SeriesInput> build_inputs(const csv::Table& table, const RunConfig& rc) {
  const std::size_t ts = table.require(rc.timestamp_col);
  const bool xreg = rc.model_type == ModelType::ArimaXreg;
  // The data column may be absent when new covariate-only rows are supplied.
  const auto data = table.column(rc.data_col);
  std::vector<std::size_t> cov_idx;
  std::vector<std::string> cov_names;
  if (xreg) {
    if (!rc.covariate_cols.empty()) {
      for (const auto& c : rc.covariate_cols) {
        cov_idx.push_back(table.require(c));
        cov_names.push_back(c);
      }
    } else {
      std::set<std::string> skip{lower(rc.timestamp_col), lower(rc.data_col)};
      for (const auto& c : rc.id_cols) skip.insert(lower(c));
      for (std::size_t i = 0; i < table.header.size(); ++i)
        if (!skip.count(lower(table.header[i]))) {
          cov_idx.push_back(i);
          cov_names.push_back(table.header[i]);
        }
    }
  }
  std::vector<SeriesInput> out;
  for (const auto& part : partition_input(table, rc.id_cols, rc.timestamp_col)) {
    SeriesInput s;
    s.id = part.id;
    s.raw.series_id = part.id;
    for (std::size_t k = 0; k < cov_idx.size(); ++k) s.covariates.push_back({cov_names[k], {}});
    for (auto r : part.rows) {
      const auto& row = table.rows[r];
      RawPoint p;
      p.timestamp = ts < row.size() ? parse_timestamp(row[ts]) : std::nullopt;
      std::optional<double> v = std::nan("");
      if (data) v = *data < row.size() ? parse_value(row[*data]) : std::nan("");
      if (!v) p.timestamp.reset();
      p.value = v ? *v : std::nan("");
      s.raw.points.push_back(p);
      for (std::size_t k = 0; k < cov_idx.size(); ++k)
        s.covariates[k].raw.push_back(cov_idx[k] < row.size() ? row[cov_idx[k]] : std::string());
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<CovariateColumn> align_covariates(const RegularSeries& grid, const RawSeries& raw,
                                              const std::vector<CovariateColumn>& columns) {
  std::vector<CovariateColumn> out;
  for (const auto& c : columns) out.push_back({c.name, std::vector<std::string>(grid.size())});
  for (std::size_t r = 0; r < raw.points.size(); ++r) {
    if (!raw.points[r].timestamp) continue;
    const auto slot = grid.slot_of_instant(*raw.points[r].timestamp);
    if (slot < 0 || slot >= static_cast<std::int64_t>(grid.size())) continue;
    for (std::size_t k = 0; k < columns.size(); ++k)
      if (r < columns[k].raw.size()) out[k].raw[static_cast<std::size_t>(slot)] = columns[k].raw[r];
  }
  return out;
}

std::vector<SeriesOutcome> fit_batch(const std::vector<SeriesInput>& inputs, const RunConfig& rc, bool with_forecast,
                                     std::size_t workers, Scheduling scheduling) {
  std::vector<SeriesOutcome> out(inputs.size());
  const auto n = static_cast<std::ptrdiff_t>(inputs.size());
  if (scheduling == Scheduling::Serial || workers <= 1) {
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = fit_one(inputs[i], rc, with_forecast);
    return out;
  }
  // fit_one never throws, so nothing escapes the parallel region
#pragma omp parallel for schedule(dynamic, 1) num_threads(static_cast<int>(workers))
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = fit_one(inputs[i], rc, with_forecast);
  return out;
}

RunStatus run_fit(const RunConfig& rc, const Paths& paths) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto inputs = read_inputs(rc, paths.input);
  std::map<std::vector<std::string>, SeriesInput> future;
  if (!paths.future.empty()) future = inputs_by_id(csv::read_file(paths.future), rc);
  auto outcomes = fit_batch(inputs, rc, true, rc.workers);

  std::vector<Failure> failures;
  auto models = open_out(paths.output_dir, "models.jsonl");
  auto fc = open_out(paths.output_dir, "forecasts.csv");
  csv::write_row(fc, with_id(rc.id_cols, {"timestamp", "forecast_value", "stderr", "lower", "upper", "confidence_level"}));
  std::optional<std::ofstream> comp;
  if (rc.decompose) {
    comp = open_out(paths.output_dir, "components.csv");
    csv::write_row(*comp, with_id(rc.id_cols, {"timestamp", "component_name", "value"}));
  }
  RunStatus st;
  st.series = outcomes.size();
  for (auto& o : outcomes) {
    if (!o.ok()) {
      failures.push_back({o.id, o.stage, o.error_code, o.error});
      continue;
    }
    const Bundle& b = *o.bundle;
    auto post = guarded(o.id, [&] {
      const Covariates* fut = nullptr;
      Covariates cov;
      if (b.xreg) {
        auto it = future.find(o.id);
        if (it == future.end()) return;  // no future covariates: model only
        cov = future_covariates(&it->second, b);
        fut = &cov;
        o.forecast = forecast(b, rc.horizon, rc.confidence_level, fut);
      }
      if (o.forecast) write_forecast_rows(fc, o.id, *o.forecast);
      if (comp) write_component_rows(*comp, o.id, decompose(b, o.forecast ? rc.horizon : 0, fut));
    });
    if (post) failures.push_back(*post);
    json line{{"id_columns", rc.id_cols}, {"id", o.id}, {"bundle", to_json(b)}};
    models << line.dump() << '\n';
  }
  write_errors(rc, paths.output_dir, failures);
  st.failed = std::count_if(outcomes.begin(), outcomes.end(), [](const auto& o) { return !o.ok(); });
  st.seconds = elapsed(t0);
  return st;
}

RunStatus run_forecast(const RunConfig& rc, const Paths& paths) {
  if (paths.model.empty()) return run_fit(rc, paths);
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<Failure> failures;
  const auto models = load_models(paths.model, failures);
  std::map<std::vector<std::string>, SeriesInput> future;
  if (!paths.future.empty()) future = inputs_by_id(csv::read_file(paths.future), rc);
  auto fc = open_out(paths.output_dir, "forecasts.csv");
  csv::write_row(fc, with_id(rc.id_cols, {"timestamp", "forecast_value", "stderr", "lower", "upper", "confidence_level"}));
  RunStatus st;
  st.series = models.size() + failures.size();
  for (const auto& m : models) {
    auto f = guarded(m.id, [&] {
      auto it = future.find(m.id);
      const Covariates cov = future_covariates(it == future.end() ? nullptr : &it->second, m.bundle);
      write_forecast_rows(fc, m.id, forecast(m.bundle, rc.horizon, rc.confidence_level, &cov));
    });
    if (f) failures.push_back(*f);
  }
  write_errors(rc, paths.output_dir, failures);
  st.failed = failures.size();
  st.seconds = elapsed(t0);
  return st;
}

RunStatus run_decompose(const RunConfig& rc, const Paths& paths) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<Failure> failures;
  std::vector<LoadedModel> models;
  if (!paths.model.empty()) {
    models = load_models(paths.model, failures);
  } else {
    for (auto& o : fit_batch(read_inputs(rc, paths.input), rc, false, rc.workers)) {
      if (o.ok()) models.push_back({o.id, std::move(*o.bundle)});
      else failures.push_back({o.id, o.stage, o.error_code, o.error});
    }
  }
  std::map<std::vector<std::string>, SeriesInput> future;
  if (!paths.future.empty()) future = inputs_by_id(csv::read_file(paths.future), rc);
  auto comp = open_out(paths.output_dir, "components.csv");
  csv::write_row(comp, with_id(rc.id_cols, {"timestamp", "component_name", "value"}));
  RunStatus st;
  st.series = models.size() + failures.size();
  for (const auto& m : models) {
    auto f = guarded(m.id, [&] {
      auto it = future.find(m.id);
      const Covariates cov = future_covariates(it == future.end() ? nullptr : &it->second, m.bundle);
      const std::size_t h = m.bundle.xreg && it == future.end() ? 0 : rc.horizon;
      write_component_rows(comp, m.id, decompose(m.bundle, h, &cov));
    });
    if (f) failures.push_back(*f);
  }
  write_errors(rc, paths.output_dir, failures);
  st.failed = failures.size();
  st.seconds = elapsed(t0);
  return st;
}

RunStatus run_detect_anomalies(const RunConfig& rc, const Paths& paths) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<Failure> failures;
  auto out = open_out(paths.output_dir, "anomalies.csv");
  csv::write_row(out, with_id(rc.id_cols, {"timestamp", "value", "expected", "lower", "upper", "anomaly_probability",
                                           "is_anomaly"}));
  auto write = [&](const std::vector<std::string>& id, const std::vector<AnomalyVerdict>& vs) {
    for (const auto& v : vs)
      csv::write_row(out, with_id(id, {format_timestamp(v.timestamp), csv::format_number(v.actual),
                                       csv::format_number(v.expected), csv::format_number(v.lower),
                                       csv::format_number(v.upper), csv::format_number(v.probability),
                                       v.is_anomaly ? "true" : "false"}));
  };
  RunStatus st;
  if (paths.model.empty()) {
    auto outcomes = fit_batch(read_inputs(rc, paths.input), rc, false, rc.workers);
    st.series = outcomes.size();
    for (const auto& o : outcomes) {
      if (!o.ok()) {
        failures.push_back({o.id, o.stage, o.error_code, o.error});
        continue;
      }
      if (auto f = guarded(o.id, [&] { write(o.id, detect_anomalies(*o.bundle, rc.threshold)); })) failures.push_back(*f);
    }
  } else {
    const auto models = load_models(paths.model, failures);
    const auto data = inputs_by_id(csv::read_file(paths.input), rc);
    std::map<std::vector<std::string>, SeriesInput> future;
    if (!paths.future.empty()) future = inputs_by_id(csv::read_file(paths.future), rc);
    st.series = models.size() + failures.size();
    for (const auto& m : models) {
      auto f = guarded(m.id, [&] {
        auto it = data.find(m.id);
        if (it == data.end()) return;
        std::vector<std::pair<std::int64_t, double>> obs;
        for (const auto& p : it->second.raw.points)
          if (p.timestamp) obs.emplace_back(m.bundle.grid.slot_of_instant(*p.timestamp), p.value);
        auto fit = future.find(m.id);
        const Covariates cov = future_covariates(fit == future.end() ? nullptr : &fit->second, m.bundle);
        write(m.id, detect_anomalies(m.bundle, obs, rc.threshold, &cov));
      });
      if (f) failures.push_back(*f);
    }
  }
  write_errors(rc, paths.output_dir, failures);
  st.failed = failures.size();
  st.seconds = elapsed(t0);
  return st;
}

namespace {

struct HoldoutResult {
  std::vector<MetricReport> reports;
  std::vector<std::vector<std::string>> ids;
  std::vector<Failure> failures;
};

// Last `horizon` rows of each series are held out, the rest fitted.
HoldoutResult holdout(const std::vector<SeriesInput>& inputs, const RunConfig& rc) {
  std::vector<SeriesInput> train(inputs.size());
  std::vector<SeriesInput> test(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& in = inputs[i];
    const std::size_t n = in.raw.points.size();
    const std::size_t cut = n > rc.horizon ? n - rc.horizon : 0;
    train[i].id = in.id;
    train[i].raw.series_id = in.raw.series_id;
    train[i].raw.points.assign(in.raw.points.begin(), in.raw.points.begin() + static_cast<std::ptrdiff_t>(cut));
    test[i].raw.points.assign(in.raw.points.begin() + static_cast<std::ptrdiff_t>(cut), in.raw.points.end());
    for (const auto& c : in.covariates) {
      train[i].covariates.push_back({c.name, {c.raw.begin(), c.raw.begin() + static_cast<std::ptrdiff_t>(cut)}});
      test[i].covariates.push_back({c.name, {c.raw.begin() + static_cast<std::ptrdiff_t>(cut), c.raw.end()}});
    }
  }
  auto outcomes = fit_batch(train, rc, false, rc.workers);
  HoldoutResult r;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    auto& o = outcomes[i];
    if (!o.ok()) {
      r.failures.push_back({o.id, o.stage, o.error_code, o.error});
      continue;
    }
    auto f = guarded(o.id, [&] {
      const Covariates cov = future_covariates(&test[i], *o.bundle);
      r.reports.push_back(score_holdout(*o.bundle, test[i].raw, rc, &cov));
      r.ids.push_back(o.id);
    });
    if (f) r.failures.push_back(*f);
  }
  return r;
}

void write_metric_row(std::ostream& out, csv::Row prefix, const MetricReport& m) {
  for (double v : {m.mae, m.rmse, m.mape, m.smape, m.mase}) prefix.push_back(csv::format_number(v));
  csv::write_row(out, prefix);
}

}  // namespace

RunStatus run_evaluate(const RunConfig& rc, const Paths& paths) {
  const auto t0 = std::chrono::steady_clock::now();
  auto out = open_out(paths.output_dir, "evaluation.csv");
  csv::write_row(out, with_id(rc.id_cols, {"horizon", "mae", "rmse", "mape", "smape", "mase"}));
  RunStatus st;
  std::vector<Failure> failures;
  if (paths.model.empty()) {
    const auto inputs = read_inputs(rc, paths.input);
    auto r = holdout(inputs, rc);
    st.series = inputs.size();
    for (std::size_t i = 0; i < r.reports.size(); ++i)
      write_metric_row(out, with_id(r.ids[i], {std::to_string(r.reports[i].horizon)}), r.reports[i]);
    failures = std::move(r.failures);
  } else {
    const auto models = load_models(paths.model, failures);
    const auto data = inputs_by_id(csv::read_file(paths.input), rc);
    std::map<std::vector<std::string>, SeriesInput> future;
    if (!paths.future.empty()) future = inputs_by_id(csv::read_file(paths.future), rc);
    st.series = models.size() + failures.size();
    for (const auto& m : models) {
      auto f = guarded(m.id, [&] {
        auto it = data.find(m.id);
        if (it == data.end()) throw Error(ErrorCode::TooFewPoints, "no actuals for this series");
        auto fit = future.find(m.id);
        const Covariates cov = future_covariates(fit == future.end() ? nullptr : &fit->second, m.bundle);
        const auto rep = score_holdout(m.bundle, it->second.raw, rc, &cov);
        write_metric_row(out, with_id(m.id, {std::to_string(rep.horizon)}), rep);
      });
      if (f) failures.push_back(*f);
    }
  }
  write_errors(rc, paths.output_dir, failures);
  st.failed = failures.size();
  st.seconds = elapsed(t0);
  return st;
}

RunStatus run_benchmark(const RunConfig& base, const Paths& paths, BenchmarkSummary* summary_out) {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path dir(paths.input);
  const auto manifest_path = (dir / "benchmark.json").string();
  std::ifstream in(manifest_path);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + manifest_path);
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, manifest_path + ": " + e.what());
  }
  std::vector<DatasetResult> results;
  std::vector<Failure> failures;
  RunStatus st;
  for (const auto& d : manifest.at("datasets")) {
    RunConfig rc = base;
    DatasetResult res;
    res.name = d.at("name").get<std::string>();
    rc.horizon = d.at("horizon").get<std::size_t>();
    rc.timestamp_col = d.value("timestamp_col", rc.timestamp_col);
    rc.data_col = d.value("data_col", rc.data_col);
    if (d.contains("id_cols")) rc.id_cols = strings(d.at("id_cols"));
    if (d.contains("frequency")) {
      const auto k = parse_frequency_kind(upper(d.at("frequency").get<std::string>()));
      if (!k) throw Error(ErrorCode::InvalidConfig, "dataset " + res.name + ": unknown frequency");
      rc.pipeline.data_frequency = Frequency::of(*k);
    }
    res.horizon = rc.horizon;
    const auto ds0 = std::chrono::steady_clock::now();
    const auto inputs = build_inputs(csv::read_file((dir / d.at("file").get<std::string>()).string()), rc);
    auto r = holdout(inputs, rc);
    res.seconds = elapsed(ds0);
    res.series = inputs.size();
    res.failed = r.failures.size();
    res.metrics = mean_report(r.reports);
    for (auto& f : r.failures) {
      f.id.insert(f.id.begin(), res.name);
      failures.push_back(std::move(f));
    }
    std::cout << "benchmark " << res.name << ": " << res.series << " series in " << res.seconds << " s ("
              << (res.seconds > 0 ? static_cast<double>(res.series) / res.seconds : 0.0) << " series/s)\n";
    st.series += res.series;
    st.failed += res.failed;
    results.push_back(std::move(res));
  }
  const auto summary = summarize(std::move(results));
  auto out = open_out(paths.output_dir, "report.csv");
  csv::write_row(out, {"dataset", "series", "failed", "horizon", "mae", "rmse", "mape", "smape", "mase", "seconds",
                       "series_per_second"});
  for (const auto& d : summary.datasets) {
    csv::Row row{d.name, std::to_string(d.series), std::to_string(d.failed), std::to_string(d.horizon)};
    for (double v : {d.metrics.mae, d.metrics.rmse, d.metrics.mape, d.metrics.smape, d.metrics.mase})
      row.push_back(csv::format_number(v));
    row.push_back(csv::format_number(d.seconds));
    row.push_back(csv::format_number(d.seconds > 0 ? static_cast<double>(d.series) / d.seconds : 0.0));
    csv::write_row(out, row);
  }
  csv::write_row(out, {"GEOMETRIC_MEAN", "", "", "", "", "", "", "", csv::format_number(summary.geometric_mean_mase), "", ""});
  {
    auto err = open_out(paths.output_dir, "errors.csv");
    csv::write_row(err, {"dataset", "series_id", "stage", "error_code", "message"});
    for (const auto& f : failures) {
      std::vector<std::string> rest(f.id.begin() + 1, f.id.end());
      csv::write_row(err, {f.id.front(), join_id(rest), f.stage, f.code, f.message});
    }
  }
  if (summary_out) *summary_out = summary;
  st.seconds = elapsed(t0);
  return st;
}

}  // namespace strata::cli
