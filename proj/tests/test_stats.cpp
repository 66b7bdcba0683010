#include "doctest.h"

#include <cmath>
#include <vector>

#include "strata/stats.hpp"

using namespace strata;

TEST_CASE("normal quantile and cdf") {
  CHECK(stats::normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(stats::normal_quantile(0.75) == doctest::Approx(0.6744897501960817).epsilon(1e-12));
  CHECK(stats::normal_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-12));
  CHECK(stats::normal_cdf(0.0) == 0.5);
  for (double p : {0.001, 0.2, 0.5, 0.9, 0.999}) CHECK(stats::normal_cdf(stats::normal_quantile(p)) == doctest::Approx(p));
}

TEST_CASE("F and Kruskal-Wallis p-values against scipy") {
  CHECK(stats::f_pvalue(3.0, 2, 10) == doctest::Approx(0.095367431640625).epsilon(1e-9));
  CHECK(stats::f_pvalue(1.5, 3, 40) == doctest::Approx(0.22923725593153116).epsilon(1e-9));
  CHECK(stats::kruskal_wallis_pvalue({{1, 2, 3, 4}, {5, 6, 7, 8}, {2, 9, 9, 1}}) ==
        doctest::Approx(0.19543863546425794).epsilon(1e-9));
}

TEST_CASE("robust location and scale") {
  std::vector<double> x{1, 2, 3, 4, 100};
  CHECK(stats::median(x) == 3.0);
  CHECK(stats::robust_std(x) == doctest::Approx(1.4826));
  CHECK(stats::variance(std::vector<double>{1, 3}) == 1.0);
  auto z = stats::robust_z(std::vector<double>{0, 0, 0});
  for (double v : z) CHECK(v == 0.0);
}

TEST_CASE("line fit") {
  std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  auto f = stats::fit_line(x, y);
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.rss == doctest::Approx(0.0).epsilon(1e-12));
}
