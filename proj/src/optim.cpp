#include "strata/optim.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

namespace strata::optim {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double safe(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::infinity(); }

}  // namespace

std::vector<double> numeric_gradient(const Objective& f, std::span<const double> x, double step) {
  std::vector<double> g(x.size()), xp(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = xp[i];
    xp[i] = xi + step;
    const double fp = f(xp);
    xp[i] = xi - step;
    const double fm = f(xp);
    xp[i] = xi;
    g[i] = (fp - fm) / (2.0 * step);
    if (!std::isfinite(g[i])) g[i] = 0.0;
  }
  return g;
}

LbfgsResult minimize(const Objective& f, std::vector<double> x0, const LbfgsOptions& options) {
  const std::size_t n = x0.size();
  LbfgsResult res;
  res.x = std::move(x0);
  res.value = safe(f(res.x));
  if (n == 0) {
    res.converged = true;
    return res;
  }
  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;
  auto g = numeric_gradient(f, res.x, options.fd_step);
  std::vector<double> d(n), x_new(n), q(n);
  std::vector<double> alpha(static_cast<std::size_t>(options.memory));

  for (int it = 0; it < options.max_iterations; ++it) {
    res.iterations = it + 1;
    if (std::sqrt(dot(g, g)) <= options.grad_tolerance) {
      res.converged = true;
      break;
    }
    // Two-loop recursion.
    q = g;
    const std::size_t k = s_hist.size();
    for (std::size_t i = k; i-- > 0;) {
      alpha[i] = rho_hist[i] * dot(s_hist[i], q);
      for (std::size_t j = 0; j < n; ++j) q[j] -= alpha[i] * y_hist[i][j];
    }
    double gamma = 1.0;
    if (k > 0) gamma = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
    for (std::size_t j = 0; j < n; ++j) q[j] *= gamma;
    for (std::size_t i = 0; i < k; ++i) {
      const double beta = rho_hist[i] * dot(y_hist[i], q);
      for (std::size_t j = 0; j < n; ++j) q[j] += s_hist[i][j] * (alpha[i] - beta);
    }
    for (std::size_t j = 0; j < n; ++j) d[j] = -q[j];
    double slope = dot(g, d);
    if (!(slope < 0.0)) {
      // Not a descent direction: restart from steepest descent.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (std::size_t j = 0; j < n; ++j) d[j] = -g[j];
      slope = dot(g, d);
    }
    double step = k == 0 ? std::min(1.0, 1.0 / std::sqrt(dot(g, g))) : 1.0;
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      for (std::size_t j = 0; j < n; ++j) x_new[j] = res.x[j] + step * d[j];
      f_new = safe(f(x_new));
      if (f_new <= res.value + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      res.converged = true;  // no further decrease available at this resolution
      break;
    }
    auto g_new = numeric_gradient(f, x_new, options.fd_step);
    std::vector<double> s(n), y(n);
    for (std::size_t j = 0; j < n; ++j) {
      s[j] = x_new[j] - res.x[j];
      y[j] = g_new[j] - g[j];
    }
    const double sy = dot(s, y);
    if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(y, y))) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > options.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    const double f_old = res.value;
    res.x = x_new;
    res.value = f_new;
    g = std::move(g_new);
    if (std::abs(f_old - f_new) <= options.rel_tolerance * (std::abs(f_old) + options.rel_tolerance)) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace strata::optim
