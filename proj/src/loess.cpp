#include "strata/loess.hpp"

#include <algorithm>
#include <cmath>

namespace strata::loess {

namespace {

// Weighted local fit over xs[lo, hi) with bandwidth h.
std::optional<double> local_fit(std::span<const double> xs, std::span<const double> ys,
                                std::span<const double> robustness, double x, std::size_t lo, std::size_t hi,
                                double h, int degree) {
  const double h9 = 0.999 * h;
  const double h1 = 0.001 * h;
  double sw = 0.0, swx = 0.0, swy = 0.0;
  thread_local std::vector<double> w;
  w.assign(hi - lo, 0.0);
  for (std::size_t j = lo; j < hi; ++j) {
    const double r = std::abs(xs[j] - x);
    double wj = 0.0;
    if (r <= h9) {
      if (r <= h1) {
        wj = 1.0;
      } else {
        const double u = r / h;
        const double t = 1.0 - u * u * u;
        wj = t * t * t;
      }
      if (!robustness.empty()) wj *= robustness[j];
    }
    w[j - lo] = wj;
    sw += wj;
    swx += wj * xs[j];
    swy += wj * ys[j];
  }
  if (sw <= 0.0) return std::nullopt;
  const double mean_y = swy / sw;
  if (degree <= 0) return mean_y;
  const double a = swx / sw;
  double c = 0.0, cxy = 0.0;
  for (std::size_t j = lo; j < hi; ++j) {
    const double wj = w[j - lo];
    if (wj == 0.0) continue;
    const double dx = xs[j] - a;
    c += wj * dx * dx;
    cxy += wj * dx * ys[j];
  }
  const double range = xs[hi - 1] - xs[lo];
  if (std::sqrt(c / sw) <= 0.001 * range || c <= 0.0) return mean_y;
  return mean_y + (cxy / c) * (x - a);
}

}  // namespace

std::optional<double> fit_at(std::span<const double> xs, std::span<const double> ys,
                             std::span<const double> robustness, double x, std::size_t window, int degree) {
  const std::size_t n = xs.size();
  if (n == 0) return std::nullopt;
  const std::size_t q = std::min(window, n);
  // Grow [lo, hi) to the q nearest points around x.
  std::size_t hi = static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), x) - xs.begin());
  std::size_t lo = hi;
  while (hi - lo < q) {
    if (lo == 0) {
      ++hi;
    } else if (hi == n) {
      --lo;
    } else if (x - xs[lo - 1] <= xs[hi] - x) {
      --lo;
    } else {
      ++hi;
    }
  }
  double h = std::max(x - xs[lo], xs[hi - 1] - x);
  if (window > n) h += static_cast<double>(window - n) / 2.0;
  if (h <= 0.0) h = 1.0;
  return local_fit(xs, ys, robustness, x, lo, hi, h, degree);
}

std::optional<double> fit_at_regular(std::span<const double> ys, std::span<const double> robustness, double x,
                                     std::size_t window, int degree) {
  const std::size_t n = ys.size();
  if (n == 0) return std::nullopt;
  thread_local std::vector<double> xs;
  if (xs.size() < n) {
    const std::size_t old = xs.size();
    xs.resize(n);
    for (std::size_t i = old; i < n; ++i) xs[i] = static_cast<double>(i);
  }
  return fit_at(std::span<const double>(xs.data(), n), ys, robustness, x, window, degree);
}

std::vector<double> smooth_regular(std::span<const double> ys, std::size_t window, int degree, std::size_t jump,
                                   std::span<const double> robustness) {
  const std::size_t n = ys.size();
  std::vector<double> out(n, 0.0);
  if (n == 0) return out;
  if (n == 1) {
    out[0] = ys[0];
    return out;
  }
  jump = std::max<std::size_t>(1, std::min(jump, n - 1));
  std::vector<std::size_t> at;
  for (std::size_t i = 0; i < n; i += jump) at.push_back(i);
  if (at.back() != n - 1) at.push_back(n - 1);
  for (std::size_t i : at) {
    auto v = fit_at_regular(ys, robustness, static_cast<double>(i), window, degree);
    out[i] = v ? *v : ys[i];
  }
  for (std::size_t k = 0; k + 1 < at.size(); ++k) {
    const std::size_t a = at[k], b = at[k + 1];
    for (std::size_t i = a + 1; i < b; ++i) {
      const double t = static_cast<double>(i - a) / static_cast<double>(b - a);
      out[i] = out[a] + t * (out[b] - out[a]);
    }
  }
  return out;
}

std::vector<double> bisquare_weights(std::span<const double> residuals) {
  const std::size_t n = residuals.size();
  std::vector<double> absr(n);
  for (std::size_t i = 0; i < n; ++i) absr[i] = std::abs(residuals[i]);
  std::vector<double> sorted = absr;
  std::vector<double> w(n, 1.0);
  if (n == 0) return w;
  const std::size_t mid = n / 2;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(mid), sorted.end());
  double med = sorted[mid];
  if (n % 2 == 0) {
    const double lower = *std::max_element(sorted.begin(), sorted.begin() + static_cast<long>(mid));
    med = 0.5 * (med + lower);
  }
  const double h = 6.0 * med;
  if (h <= 0.0) return w;
  const double c9 = 0.999 * h, c1 = 0.001 * h;
  for (std::size_t i = 0; i < n; ++i) {
    if (absr[i] <= c1) {
      w[i] = 1.0;
    } else if (absr[i] <= c9) {
      const double u = absr[i] / h;
      w[i] = (1.0 - u * u) * (1.0 - u * u);
    } else {
      w[i] = 0.0;
    }
  }
  return w;
}

}  // namespace strata::loess
