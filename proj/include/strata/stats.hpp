#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace strata::stats {

double mean(std::span<const double> x);
// Population variance.
double variance(std::span<const double> x);
double median(std::span<const double> x);
// 1.4826 * median absolute deviation.
double robust_std(std::span<const double> x);
// x_i / robust_std(x), with 0/0 read as 0. The scale is floored at a tiny
// fraction of max |x| so exact fits do not blow up.
std::vector<double> robust_z(std::span<const double> x);
// The scale robust_z divides by.
double robust_scale(std::span<const double> x);

double normal_cdf(double z);
double normal_quantile(double p);

// Upper tail p-value of the F distribution.
double f_pvalue(double f, double df1, double df2);

// Kruskal-Wallis H test over groups; returns the chi-square p-value
// (tie-corrected). Groups with no members are ignored.
double kruskal_wallis_pvalue(const std::vector<std::vector<double>>& groups);

// Ordinary least squares of y on (1, x). Returns {intercept, slope, rss}.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double rss = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace strata::stats
