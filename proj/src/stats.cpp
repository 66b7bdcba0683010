#include "strata/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>

namespace strata::stats {

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.empty()) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size());
}

double median(std::span<const double> x) {
  if (x.empty()) return 0.0;
  std::vector<double> v(x.begin(), x.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<long>(mid)));
  return m;
}

double robust_std(std::span<const double> x) {
  const double m = median(x);
  std::vector<double> dev(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) dev[i] = std::abs(x[i] - m);
  return 1.4826 * median(dev);
}

double robust_scale(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double max_abs = 0.0;
  for (double v : x) max_abs = std::max(max_abs, std::abs(v));
  return std::max(robust_std(x), 1e-9 * max_abs);
}

std::vector<double> robust_z(std::span<const double> x) {
  std::vector<double> z(x.size(), 0.0);
  if (x.empty()) return z;
  const double scale = robust_scale(x);
  if (scale <= 0.0) return z;
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] / scale;
  return z;
}

double normal_cdf(double z) {
  if (std::isinf(z)) return z > 0 ? 1.0 : 0.0;
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double normal_quantile(double p) {
  static const boost::math::normal dist(0.0, 1.0);
  return boost::math::quantile(dist, p);
}

double f_pvalue(double f, double df1, double df2) {
  if (!(f > 0.0) || df1 <= 0.0 || df2 <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  const boost::math::fisher_f dist(df1, df2);
  return boost::math::cdf(boost::math::complement(dist, f));
}

double kruskal_wallis_pvalue(const std::vector<std::vector<double>>& groups) {
  struct Obs {
    double value;
    std::size_t group;
  };
  std::vector<Obs> all;
  std::size_t k = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) continue;
    ++k;
    for (double v : groups[g]) all.push_back({v, g});
  }
  const std::size_t n = all.size();
  if (k < 2 || n <= k) return 1.0;
  std::sort(all.begin(), all.end(), [](const Obs& a, const Obs& b) { return a.value < b.value; });
  std::vector<double> rank_sum(groups.size(), 0.0);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && all[j].value == all[i].value) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) rank_sum[all[t].group] += avg_rank;
    const double ties = static_cast<double>(j - i);
    tie_term += ties * ties * ties - ties;
    i = j;
  }
  const double nd = static_cast<double>(n);
  double h = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) continue;
    h += rank_sum[g] * rank_sum[g] / static_cast<double>(groups[g].size());
  }
  h = 12.0 / (nd * (nd + 1.0)) * h - 3.0 * (nd + 1.0);
  const double correction = 1.0 - tie_term / (nd * nd * nd - nd);
  if (correction <= 0.0) return 1.0;
  h /= correction;
  if (!(h > 0.0)) return 1.0;
  const boost::math::chi_squared dist(static_cast<double>(k - 1));
  return boost::math::cdf(boost::math::complement(dist, h));
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  LineFit fit;
  const std::size_t n = x.size();
  if (n == 0) return fit;
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    fit.rss += r * r;
  }
  return fit;
}

}  // namespace strata::stats
