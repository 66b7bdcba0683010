#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace strata::loess {

// Locally weighted polynomial (degree 0 or 1) fit at x using the `window`
// nearest points of (xs, ys) with tricube weights. xs must be ascending.
// `robustness` may be empty (all ones). Returns nullopt when every weight is 0.
std::optional<double> fit_at(std::span<const double> xs, std::span<const double> ys,
                             std::span<const double> robustness, double x, std::size_t window, int degree);

// Same, for ys observed at x = 0, 1, ..., n-1.
std::optional<double> fit_at_regular(std::span<const double> ys, std::span<const double> robustness, double x,
                                     std::size_t window, int degree);

// Smooth equally spaced data at every index. Fits every `jump` points and
// interpolates linearly in between.
std::vector<double> smooth_regular(std::span<const double> ys, std::size_t window, int degree, std::size_t jump = 1,
                                   std::span<const double> robustness = {});

// Bisquare robustness weights from residuals (6 * median |r| scale).
std::vector<double> bisquare_weights(std::span<const double> residuals);

}  // namespace strata::loess
