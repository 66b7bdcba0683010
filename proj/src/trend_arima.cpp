#include "strata/trend_arima.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "strata/error.hpp"
#include "strata/stats.hpp"

namespace strata {

std::string ArimaOrder::to_string() const {
  std::string s = "ARIMA(" + std::to_string(p) + "," + std::to_string(d) + "," + std::to_string(q) + ")";
  if (d == 1 && drift) s += "+drift";
  return s;
}

double kpss_statistic(std::span<const double> values) {
  const std::size_t n = values.size();
  const double m = stats::mean(values);
  std::vector<double> e(n);
  for (std::size_t i = 0; i < n; ++i) e[i] = values[i] - m;
  double s = 0.0, eta = 0.0;
  for (double v : e) {
    s += v;
    eta += s * s;
  }
  const double nd = static_cast<double>(n);
  eta /= nd * nd;
  const auto lags = static_cast<std::size_t>(std::floor(4.0 * std::pow(nd / 100.0, 0.25)));
  double lrv = 0.0;
  for (double v : e) lrv += v * v;
  for (std::size_t l = 1; l <= lags && l < n; ++l) {
    double c = 0.0;
    for (std::size_t t = l; t < n; ++t) c += e[t] * e[t - l];
    lrv += 2.0 * (1.0 - static_cast<double>(l) / static_cast<double>(lags + 1)) * c;
  }
  lrv /= nd;
  if (!(lrv > 0.0)) return 0.0;
  return eta / lrv;
}

std::vector<double> difference(std::span<const double> values, int d) {
  std::vector<double> x(values.begin(), values.end());
  for (int k = 0; k < d && !x.empty(); ++k) {
    for (std::size_t i = 0; i + 1 < x.size(); ++i) x[i] = x[i + 1] - x[i];
    x.pop_back();
  }
  return x;
}

int kpss_d(std::span<const double> values, int max_d) {
  if (values.size() < 20) throw Error(ErrorCode::TooShort, "KPSS needs at least 20 points");
  std::vector<double> x(values.begin(), values.end());
  int d = 0;
  while (d < max_d && x.size() >= 20 && kpss_statistic(x) > kKpssCritical5) {
    x = difference(x, 1);
    ++d;
  }
  return d;
}

std::vector<double> pacf_to_ar(std::span<const double> raw) {
  const std::size_t p = raw.size();
  std::vector<double> phi(p), prev(p);
  for (std::size_t k = 0; k < p; ++k) {
    const double a = std::clamp(std::tanh(raw[k]), -1.0 + 1e-9, 1.0 - 1e-9);
    prev = phi;
    phi[k] = a;
    for (std::size_t j = 0; j < k; ++j) phi[j] = prev[j] - a * prev[k - 1 - j];
  }
  return phi;
}

std::vector<double> ar_to_pacf(std::span<const double> ar) {
  const std::size_t p = ar.size();
  std::vector<double> phi(ar.begin(), ar.end()), raw(p);
  for (std::size_t k = p; k-- > 0;) {
    const double a = std::clamp(phi[k], -0.99, 0.99);
    raw[k] = std::atanh(a);
    std::vector<double> next(k);
    for (std::size_t j = 0; j < k; ++j) next[j] = (phi[j] + a * phi[k - 1 - j]) / (1.0 - a * a);
    phi.assign(next.begin(), next.end());
    phi.resize(p);
  }
  return raw;
}

namespace {

struct Css {
  std::span<const double> x;
  int p, q;
  bool has_constant;
  double c0, c_scale;

  // Unpacks optimizer parameters into coefficients.
  void unpack(std::span<const double> theta, std::vector<double>& ar, std::vector<double>& ma, double& c) const {
    ar = pacf_to_ar(theta.subspan(0, static_cast<std::size_t>(p)));
    ma = pacf_to_ar(theta.subspan(static_cast<std::size_t>(p), static_cast<std::size_t>(q)));
    for (auto& v : ma) v = -v;
    c = has_constant ? c0 + c_scale * theta[static_cast<std::size_t>(p + q)] : 0.0;
  }
};

// Residuals e_t for t >= p with zero pre-sample residuals; returns the RSS
// over t >= max(p, from).
double css_residuals(std::span<const double> x, std::span<const double> ar, std::span<const double> ma, double c,
                     std::vector<double>* out, std::size_t from = 0) {
  const std::size_t n = x.size(), p = ar.size(), q = ma.size();
  thread_local std::vector<double> e;
  e.assign(n, 0.0);
  double rss = 0.0;
  for (std::size_t t = p; t < n; ++t) {
    double v = x[t] - c;
    for (std::size_t i = 0; i < p; ++i) v -= ar[i] * (x[t - 1 - i] - c);
    for (std::size_t j = 0; j < q && j < t; ++j) v -= ma[j] * e[t - 1 - j];
    e[t] = v;
    if (t >= from) rss += v * v;
  }
  if (out) *out = e;
  return rss;
}

// Hannan-Rissanen: long AR for innovations, then OLS on lags of x and e.
void hannan_rissanen(std::span<const double> w, int p, int q, std::vector<double>& ar, std::vector<double>& ma) {
  ar.assign(static_cast<std::size_t>(p), 0.0);
  ma.assign(static_cast<std::size_t>(q), 0.0);
  const auto n = static_cast<int>(w.size());
  if (p + q == 0) return;
  std::vector<double> e(w.size(), 0.0);
  if (q > 0) {
    const int k = std::min(std::max(p + q + 4, 10), n / 4);
    if (k < 1 || n - k <= k + 1) return;
    Eigen::MatrixXd X(n - k, k);
    Eigen::VectorXd y(n - k);
    for (int t = k; t < n; ++t) {
      y(t - k) = w[static_cast<std::size_t>(t)];
      for (int i = 0; i < k; ++i) X(t - k, i) = w[static_cast<std::size_t>(t - 1 - i)];
    }
    const Eigen::VectorXd a = X.colPivHouseholderQr().solve(y);
    for (int t = k; t < n; ++t) e[static_cast<std::size_t>(t)] = y(t - k) - X.row(t - k).dot(a);
  }
  const int start = std::max(p, q) + (q > 0 ? std::min(std::max(p + q + 4, 10), n / 4) : 0);
  if (n - start <= p + q + 1) return;
  Eigen::MatrixXd X(n - start, p + q);
  Eigen::VectorXd y(n - start);
  for (int t = start; t < n; ++t) {
    y(t - start) = w[static_cast<std::size_t>(t)];
    for (int i = 0; i < p; ++i) X(t - start, i) = w[static_cast<std::size_t>(t - 1 - i)];
    for (int j = 0; j < q; ++j) X(t - start, p + j) = e[static_cast<std::size_t>(t - 1 - j)];
  }
  const Eigen::VectorXd b = X.colPivHouseholderQr().solve(y);
  if (!b.allFinite()) return;
  for (int i = 0; i < p; ++i) ar[static_cast<std::size_t>(i)] = b(i);
  for (int j = 0; j < q; ++j) ma[static_cast<std::size_t>(j)] = b(p + j);
}

}  // namespace

ArimaModel fit_arima(std::span<const double> values, const ArimaOrder& order, const optim::LbfgsOptions& options,
                     std::size_t conditioning) {
  const int p = order.p, d = order.d, q = order.q;
  if (p < 0 || q < 0 || d < 0) throw Error(ErrorCode::InvalidArgument, "negative ARIMA order");
  if (static_cast<long>(values.size()) <= p + q + d + 1)
    throw Error(ErrorCode::TooShort, "series too short for " + order.to_string());
  const auto x = difference(values, d);
  const bool has_c = order.has_constant();
  ArimaModel model;
  model.order = order;
  model.order.drift = d == 1 && order.drift;
  model.train.assign(values.begin(), values.end());
  model.n_train = values.size();

  const double xm = stats::mean(x);
  const double xs = std::sqrt(stats::variance(x));
  Css css{x, p, q, has_c, has_c ? xm : 0.0, xs > 0.0 ? xs : 1.0};

  std::vector<double> w(x.begin(), x.end());
  if (has_c)
    for (auto& v : w) v -= xm;
  std::vector<double> ar0, ma0;
  hannan_rissanen(w, p, q, ar0, ma0);
  std::vector<double> theta0;
  for (double v : ar_to_pacf(ar0)) theta0.push_back(v);
  std::vector<double> neg_ma(ma0.size());
  for (std::size_t j = 0; j < ma0.size(); ++j) neg_ma[j] = -ma0[j];
  for (double v : ar_to_pacf(neg_ma)) theta0.push_back(v);
  if (has_c) theta0.push_back(0.0);

  const std::size_t from = std::max(static_cast<std::size_t>(p), conditioning);
  if (from + 2 > x.size()) throw Error(ErrorCode::TooShort, "series too short for " + order.to_string());
  const double n_eff = static_cast<double>(x.size() - from);
  auto objective = [&](std::span<const double> th) {
    std::vector<double> ar, ma;
    double c;
    css.unpack(th, ar, ma, c);
    const double rss = css_residuals(x, ar, ma, c, nullptr, from);
    return 0.5 * n_eff * std::log(std::max(rss / n_eff, 1e-300));
  };

  std::vector<double> best = theta0;
  if (!theta0.empty()) {
    const bool closed_form = p == 0 && q == 0;
    if (!closed_form) {
      const auto r = optim::minimize(objective, theta0, options);
      best = r.x;
      model.converged = r.converged;
    }
  }
  double c = 0.0;
  css.unpack(best, model.ar, model.ma, c);
  model.constant = c;
  const double rss = css_residuals(x, model.ar, model.ma, c, &model.residuals, from);
  if (!std::isfinite(rss)) throw Error(ErrorCode::SingularFit, "non-finite likelihood for " + order.to_string());
  model.sigma2 = rss / n_eff;
  model.loglik = -0.5 * n_eff * (std::log(2.0 * std::numbers::pi * std::max(model.sigma2, 1e-300)) + 1.0);
  const int k = p + q + (has_c ? 1 : 0) + 1;
  model.aic = 2.0 * k - 2.0 * model.loglik;
  return model;
}

std::vector<CandidateFit> fit_candidates(std::span<const double> values, const AutoArimaOptions& options,
                                         Execution execution) {
  if (options.min_order > options.max_order)
    throw Error(ErrorCode::InvalidArgument, "auto_arima min_order exceeds max_order");
  int d = 0;
  if (values.size() >= 20) d = kpss_d(values, options.max_d);
  std::vector<CandidateFit> out;
  for (int total = std::max(0, options.min_order); total <= options.max_order; ++total) {
    for (int q = 0; q <= total; ++q) {
      const int p = total - q;
      if (d == 1) {
        const bool with = options.include_drift.value_or(true);
        const bool without = !options.include_drift.has_value() || !*options.include_drift;
        if (without) out.push_back({{p, d, q, false}, std::nullopt, {}});
        if (with) out.push_back({{p, d, q, true}, std::nullopt, {}});
      } else {
        out.push_back({{p, d, q, false}, std::nullopt, {}});
      }
    }
  }
  // Every candidate conditions on the same leading slots so AICs compare
  // likelihoods of the same observations.
  const auto conditioning = static_cast<std::size_t>(std::max(0, options.max_order));
  auto run = [&](CandidateFit& c) {
    try {
      c.model = fit_arima(values, c.order, {}, conditioning);
    } catch (const std::exception& e) {
      c.error = e.what();
    }
  };
  const auto count = static_cast<long>(out.size());
  if (execution == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < count; ++i) run(out[static_cast<std::size_t>(i)]);
  } else {
    for (long i = 0; i < count; ++i) run(out[static_cast<std::size_t>(i)]);
  }
  return out;
}

ArimaModel select_best(std::span<const CandidateFit> candidates) {
  const ArimaModel* best = nullptr;
  auto better = [](const ArimaModel& a, const ArimaModel& b) {
    const double tol = 1e-9 * std::max(1.0, std::abs(b.aic));
    if (a.aic < b.aic - tol) return true;
    if (a.aic > b.aic + tol) return false;
    const int sa = a.order.p + a.order.q, sb = b.order.p + b.order.q;
    if (sa != sb) return sa < sb;
    if (a.order.q != b.order.q) return a.order.q < b.order.q;
    return !a.order.drift && b.order.drift;
  };
  for (const auto& c : candidates) {
    if (!c.model || !std::isfinite(c.model->aic)) continue;
    if (!best || better(*c.model, *best)) best = &*c.model;
  }
  if (!best) throw Error(ErrorCode::AllFitsFailed, "every ARIMA candidate failed");
  return *best;
}

ArimaModel auto_arima(std::span<const double> values, const AutoArimaOptions& options, Execution execution) {
  const auto candidates = fit_candidates(values, options, execution);
  return select_best(candidates);
}

std::vector<double> psi_weights(std::span<const double> ar, std::span<const double> ma, int d, std::size_t h) {
  // Full AR polynomial phi(B)(1 - B)^d as coefficients of x_{t-i}.
  std::vector<double> poly(ar.size() + 1, 0.0);
  poly[0] = 1.0;
  for (std::size_t i = 0; i < ar.size(); ++i) poly[i + 1] = -ar[i];
  for (int k = 0; k < d; ++k) {
    std::vector<double> next(poly.size() + 1, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i] += poly[i];
      next[i + 1] -= poly[i];
    }
    poly = std::move(next);
  }
  std::vector<double> psi(h, 0.0);
  if (h == 0) return psi;
  psi[0] = 1.0;
  for (std::size_t j = 1; j < h; ++j) {
    double v = j <= ma.size() ? ma[j - 1] : 0.0;
    for (std::size_t i = 1; i < poly.size() && i <= j; ++i) v -= poly[i] * psi[j - i];
    psi[j] = v;
  }
  return psi;
}

TrendForecast forecast_trend(const ArimaModel& model, std::size_t horizon) {
  TrendForecast out;
  out.mean.resize(horizon);
  out.std_err.resize(horizon);
  const int d = model.order.d;
  const std::size_t p = model.ar.size(), q = model.ma.size();
  const auto x = difference(model.train, d);
  const std::size_t n = x.size();
  const double c = model.constant;
  std::vector<double> w(n + horizon, 0.0), e(n + horizon, 0.0);
  for (std::size_t t = 0; t < n; ++t) w[t] = x[t] - c;
  for (std::size_t t = 0; t < model.residuals.size() && t < n; ++t) e[t] = model.residuals[t];
  for (std::size_t t = n; t < n + horizon; ++t) {
    double v = 0.0;
    for (std::size_t i = 0; i < p; ++i)
      if (t >= i + 1) v += model.ar[i] * w[t - 1 - i];
    for (std::size_t j = 0; j < q; ++j)
      if (t >= j + 1) v += model.ma[j] * e[t - 1 - j];
    w[t] = v;
  }
  std::vector<double> future(horizon);
  for (std::size_t h = 0; h < horizon; ++h) future[h] = w[n + h] + c;
  // Undo the differencing, innermost level first.
  for (int k = d; k-- > 0;) {
    const auto level = difference(model.train, k);
    double last = level.empty() ? 0.0 : level.back();
    for (auto& v : future) {
      last += v;
      v = last;
    }
  }
  out.mean = future;
  const auto psi = psi_weights(model.ar, model.ma, d, horizon);
  double acc = 0.0;
  for (std::size_t h = 0; h < horizon; ++h) {
    acc += psi[h] * psi[h];
    out.std_err[h] = std::sqrt(std::max(model.sigma2, 0.0) * acc);
  }
  return out;
}

std::vector<double> one_step_residuals(const ArimaModel& model, std::span<const double> values) {
  const int d = model.order.d;
  std::vector<double> out(values.size(), 0.0);
  if (values.size() <= static_cast<std::size_t>(d)) return out;
  const auto x = difference(values, d);
  std::vector<double> e;
  css_residuals(x, model.ar, model.ma, model.constant, &e);
  for (std::size_t t = 0; t < e.size(); ++t) out[t + static_cast<std::size_t>(d)] = e[t];
  return out;
}

}  // namespace strata
