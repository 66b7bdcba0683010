#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "strata/optim.hpp"

namespace strata {

struct ArimaOrder {
  int p = 0;
  int d = 0;
  int q = 0;
  bool drift = false;  // d == 1 only; d == 0 always carries a mean

  bool has_constant() const { return d == 0 || (d == 1 && drift); }
  std::string to_string() const;
  friend bool operator==(const ArimaOrder&, const ArimaOrder&) = default;
};

struct ArimaModel {
  ArimaOrder order;
  std::vector<double> ar;  // phi_1..phi_p
  std::vector<double> ma;  // theta_1..theta_q, w_t = sum phi w + e_t + sum theta e
  double constant = 0.0;   // mean (d = 0) or drift (d = 1)
  double sigma2 = 0.0;
  double loglik = 0.0;
  double aic = 0.0;
  std::size_t n_train = 0;
  bool converged = true;
  std::vector<double> train;      // training window, undifferenced
  std::vector<double> residuals;  // CSS residuals on the differenced window
};

// KPSS level-stationarity statistic with Bartlett long-run variance and lag
// floor(4 (n/100)^0.25).
double kpss_statistic(std::span<const double> values);
inline constexpr double kKpssCritical5 = 0.463;

// Differencing order by repeated KPSS tests. Throws Error(TooShort) for n < 20.
int kpss_d(std::span<const double> values, int max_d = 2);

std::vector<double> difference(std::span<const double> values, int d);

// Stationary AR coefficients from unconstrained parameters (tanh + Durbin-Levinson).
std::vector<double> pacf_to_ar(std::span<const double> raw);
// Inverse map; partial autocorrelations are clipped to +-0.99.
std::vector<double> ar_to_pacf(std::span<const double> ar);

// Conditional sum of squares fit, quasi-Newton over transformed parameters.
// Throws Error(TooShort) when n <= p + q + d + 1, Error(SingularFit) when the
// likelihood is not finite. Non-convergence is reported via `converged`.
// The likelihood covers differenced slots t >= max(p, conditioning).
ArimaModel fit_arima(std::span<const double> values, const ArimaOrder& order,
                     const optim::LbfgsOptions& options = {}, std::size_t conditioning = 0);

struct AutoArimaOptions {
  int max_order = 2;
  int min_order = 0;
  int max_d = 2;
  std::optional<bool> include_drift;  // unset: try with and without when d = 1
};

enum class Execution { Serial, Parallel };

struct CandidateFit {
  ArimaOrder order;
  std::optional<ArimaModel> model;
  std::string error;
};

// Every candidate of the auto search, in a fixed order. Parallel execution
// distributes candidates over OpenMP threads; results are identical.
std::vector<CandidateFit> fit_candidates(std::span<const double> values, const AutoArimaOptions& options,
                                         Execution execution = Execution::Serial);

// Lowest-AIC candidate; ties go to smaller p + q, then smaller q.
// Throws Error(AllFitsFailed).
ArimaModel auto_arima(std::span<const double> values, const AutoArimaOptions& options = {},
                      Execution execution = Execution::Serial);
ArimaModel select_best(std::span<const CandidateFit> candidates);

struct TrendForecast {
  std::vector<double> mean;
  std::vector<double> std_err;
};

// MA(infinity) weights psi_0..psi_{h-1} of phi(B)(1-B)^d w = theta(B) e.
std::vector<double> psi_weights(std::span<const double> ar, std::span<const double> ma, int d, std::size_t h);

TrendForecast forecast_trend(const ArimaModel& model, std::size_t horizon);

// One-step-ahead residuals of `values` under the fitted coefficients, aligned
// with `values` (the first d + p slots are 0).
std::vector<double> one_step_residuals(const ArimaModel& model, std::span<const double> values);

}  // namespace strata
