#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "strata/csv.hpp"
#include "strata/error.hpp"
#include "strata/pipeline.hpp"
#include "strata/xreg.hpp"
#include "sim.hpp"

using namespace strata;

namespace {

CovariateColumn numeric(const std::string& name, const std::vector<double>& v) {
  CovariateColumn c{name, {}};
  for (double x : v) c.raw.push_back(csv::format_number(x));
  return c;
}

PipelineConfig plain() {
  PipelineConfig c;
  c.stages.clear();
  return c;
}

}  // namespace

TEST_CASE("dummy coding drops the first level") {
  const std::vector<CovariateColumn> cols{{"f", {"B", "A", "C", "A"}}};
  const auto d = dummy_encode(cols);
  REQUIRE(d.x.cols() == 4);
  CHECK(d.column_names[2] == "f=B");
  CHECK(d.column_names[3] == "f=C");
  CHECK(d.x(0, 2) == 1.0);
  CHECK(d.x(1, 2) == 0.0);
  CHECK(d.x(1, 3) == 0.0);
  CHECK(d.x(2, 3) == 1.0);
  CHECK(d.x(3, 1) == 3.0);

  const std::vector<CovariateColumn> future{{"f", {"D", "C"}}};
  const auto e = encode_with(d.encodings, future, 4);
  CHECK(e.x(0, 2) == 0.0);
  CHECK(e.x(0, 3) == 0.0);
  CHECK(e.x(1, 3) == 1.0);
  CHECK(e.x(0, 1) == 4.0);
  CHECK_THROWS_AS(encode_with(d.encodings, std::vector<CovariateColumn>{{"g", {"A"}}}, 0), Error);
}

TEST_CASE("numeric columns pass through") {
  const std::vector<CovariateColumn> cols{numeric("a", {1, 2, 3}), numeric("b", {0.5, -1, 2})};
  const auto d = dummy_encode(cols);
  REQUIRE(d.x.cols() == 4);
  for (Eigen::Index i = 0; i < 3; ++i) {
    CHECK(d.x(i, 0) == 1.0);
    CHECK(d.x(i, 1) == static_cast<double>(i));
  }
  CHECK(d.x(2, 2) == 3.0);
  CHECK(d.x(1, 3) == -1.0);
  CHECK_THROWS_AS(dummy_encode(std::vector<CovariateColumn>{{"a", {"1", "", "3"}}}), Error);
}

TEST_CASE("encoding round trip keeps training columns") {
  const std::vector<CovariateColumn> cols{{"f", {"x", "y", "z", "y"}}, numeric("n", {1, 2, 3, 4})};
  const auto d = dummy_encode(cols);
  const auto again = encode_with(d.encodings, cols, 0);
  CHECK(again.column_names == d.column_names);
  CHECK(again.x == d.x);
}

TEST_CASE("hand-solved normal equations") {
  DesignMatrix d;
  d.x.resize(3, 2);
  d.x << 1, 1, 1, 2, 1, 3;
  d.column_names = {"__intercept", "x"};
  Eigen::VectorXd y(3);
  y << 2, 4, 6;
  const auto m = fit_ridge(d, y, 0.0);
  CHECK(m.beta(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(m.beta(1) == doctest::Approx(2.0));
}

TEST_CASE("exact recovery, orthogonal residuals and the penalty limit") {
  const std::size_t n = 60;
  const auto a = sim::noise(n, 1), b = sim::noise(n, 2);
  const auto d = dummy_encode({numeric("a", a), numeric("b", b)});
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) y(static_cast<Eigen::Index>(i)) = 1.0 + 0.1 * static_cast<double>(i) + 2.0 * d.x(static_cast<Eigen::Index>(i), 2) - 3.0 * d.x(static_cast<Eigen::Index>(i), 3);
  const auto m = fit_ridge(d, y, 0.0);
  CHECK((y - predict(m, d)).cwiseAbs().maxCoeff() < 1e-9);

  const auto noise = sim::noise(n, 3);
  Eigen::VectorXd z = y;
  for (std::size_t i = 0; i < n; ++i) z(static_cast<Eigen::Index>(i)) += noise[i];
  const auto mz = fit_ridge(d, z, 0.0);
  const Eigen::VectorXd r = z - predict(mz, d);
  CHECK((d.x.transpose() * r).cwiseAbs().maxCoeff() < 1e-6 * z.norm());

  const auto big = fit_ridge(d, z, 1e12);
  CHECK(std::abs(big.beta(2)) < 1e-6);
  CHECK(std::abs(big.beta(3)) < 1e-6);
  CHECK(covariate_part(big, d).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("rank deficiency without a penalty") {
  const std::vector<double> a{1, 2, 3, 4, 5};
  const auto d = dummy_encode({numeric("a", a), numeric("a2", a)});
  Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(5, 0, 4);
  CHECK_THROWS_AS(fit_ridge(d, y, 0.0), Error);
  CHECK_NOTHROW(fit_ridge(d, y, 1.0));
}

TEST_CASE("no covariates degenerates to the univariate fit") {
  const auto y = sim::ar1(200, 0.6, 5);
  const auto grid = sim::daily(y);
  const auto uni = fit(grid, plain());
  const auto x = fit_xreg(grid, Covariates{}, plain());
  CHECK(x.arima.order == uni.arima.order);
  CHECK(forecast(x, 5).mean == forecast(uni, 5).mean);
}

TEST_CASE("covariate-driven series") {
  const std::size_t n = 500, h = 20;
  const auto xs = sim::noise(n + h, 8, 2.0);
  const auto noise = sim::ar1(n + h, 0.7, 9);
  std::vector<double> y(n + h);
  for (std::size_t i = 0; i < n + h; ++i) y[i] = 3.0 * xs[i] + noise[i];
  const std::vector<double> xhist(xs.begin(), xs.begin() + n), xfut(xs.begin() + n, xs.end());
  const auto grid = sim::daily(std::vector<double>(y.begin(), y.begin() + n));
  Covariates cov{{numeric("x", xhist)}};
  Covariates fut{{numeric("x", xfut)}};

  const auto b = fit_xreg(grid, cov, plain());
  REQUIRE(b.xreg);
  CHECK(b.xreg->ridge.beta(2) >= 2.8);
  CHECK(b.xreg->ridge.beta(2) <= 3.2);
  CHECK(b.arima.order.p >= 1);

  const auto f = forecast(b, h, 0.95, &fut);
  const auto& lin = f.components.at("attribution_x");
  for (std::size_t i = 0; i < h; ++i) {
    double rest = f.components.at("trend")[i];
    CHECK(f.mean[i] == doctest::Approx(rest + lin[i]).epsilon(1e-12));
    CHECK(lin[i] == doctest::Approx(b.xreg->ridge.beta(2) * xfut[i]).epsilon(1e-9));
  }

  // Covariates add no variance: constant future covariates give the same widths.
  Covariates flat{{numeric("x", std::vector<double>(h, 1.0))}};
  const auto g = forecast(b, h, 0.95, &flat);
  for (std::size_t i = 0; i < h; ++i) CHECK(g.upper[i] - g.lower[i] == doctest::Approx(f.upper[i] - f.lower[i]));

  Covariates one{{numeric("x", {xfut[0]})}};
  CHECK(forecast(b, 1, 0.95, &one).mean.size() == 1);
  CHECK_THROWS_AS(forecast(b, h, 0.95, &one), Error);
  CHECK_THROWS_AS(forecast(b, h), Error);

  // Regression beats the univariate model on held-out data.
  const auto uni = forecast(fit(grid, plain()), h);
  double mae_x = 0, mae_u = 0;
  for (std::size_t i = 0; i < h; ++i) mae_x += std::abs(f.mean[i] - y[n + i]), mae_u += std::abs(uni.mean[i] - y[n + i]);
  CHECK(mae_x < mae_u);
}

TEST_CASE("misaligned covariates are rejected") {
  const auto grid = sim::daily(sim::noise(50, 1));
  Covariates cov{{numeric("x", sim::noise(49, 2))}};
  CHECK_THROWS_AS(fit_xreg(grid, cov, plain()), Error);
}
