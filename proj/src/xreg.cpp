#include "strata/xreg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "strata/error.hpp"

namespace strata {

namespace {

std::optional<double> number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* b = s.data();
  if (*b == '+') ++b;
  auto [p, ec] = std::from_chars(b, s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

bool is_numeric(const CovariateColumn& c) {
  bool any = false;
  for (const auto& s : c.raw) {
    if (s.empty()) continue;
    if (!number(s)) return false;
    any = true;
  }
  return any;
}

DesignMatrix build(const std::vector<Encoding>& encodings, const std::vector<CovariateColumn>& columns,
                   std::size_t t0, bool future) {
  const std::size_t n = columns.empty() ? 0 : columns.front().raw.size();
  for (const auto& c : columns)
    if (c.raw.size() != n) throw Error(ErrorCode::TypeMismatch, "covariate columns differ in length");
  DesignMatrix dm;
  dm.encodings = encodings;
  dm.column_names = {"__intercept", "__time"};
  std::size_t width = 2;
  for (const auto& e : encodings) width += e.categorical ? e.levels.size() - 1 : 1;
  dm.x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < n; ++i) {
    dm.x(static_cast<Eigen::Index>(i), 0) = 1.0;
    dm.x(static_cast<Eigen::Index>(i), 1) = static_cast<double>(t0 + i);
  }
  Eigen::Index col = 2;
  for (const auto& e : encodings) {
    auto it = std::find_if(columns.begin(), columns.end(), [&](const auto& c) { return c.name == e.feature; });
    if (it == columns.end())
      throw Error(future ? ErrorCode::MissingFutureCovariates : ErrorCode::MisalignedCovariates,
                  "covariate '" + e.feature + "' missing");
    if (e.categorical) {
      for (std::size_t l = 1; l < e.levels.size(); ++l) dm.column_names.push_back(e.feature + "=" + e.levels[l]);
      for (std::size_t i = 0; i < n; ++i) {
        auto lv = std::lower_bound(e.levels.begin(), e.levels.end(), it->raw[i]);
        if (lv == e.levels.end() || *lv != it->raw[i] || lv == e.levels.begin()) continue;
        dm.x(static_cast<Eigen::Index>(i), col + (lv - e.levels.begin()) - 1) = 1.0;
      }
      col += static_cast<Eigen::Index>(e.levels.size()) - 1;
    } else {
      dm.column_names.push_back(e.feature);
      for (std::size_t i = 0; i < n; ++i) {
        const auto v = number(it->raw[i]);
        if (!v || !std::isfinite(*v))
          throw Error(future ? ErrorCode::MissingFutureCovariates : ErrorCode::TypeMismatch,
                      "non-numeric value '" + it->raw[i] + "' in numeric covariate " + e.feature);
        dm.x(static_cast<Eigen::Index>(i), col) = *v;
      }
      ++col;
    }
  }
  return dm;
}

}  // namespace

DesignMatrix dummy_encode(const std::vector<CovariateColumn>& columns, std::size_t t0) {
  std::vector<Encoding> enc;
  for (const auto& c : columns) {
    Encoding e;
    e.feature = c.name;
    e.categorical = !is_numeric(c);
    if (e.categorical) {
      std::set<std::string> levels(c.raw.begin(), c.raw.end());
      e.levels.assign(levels.begin(), levels.end());
    }
    enc.push_back(std::move(e));
  }
  return build(enc, columns, t0, false);
}

DesignMatrix encode_with(const std::vector<Encoding>& encodings, const std::vector<CovariateColumn>& columns,
                         std::size_t t0) {
  return build(encodings, columns, t0, true);
}

RidgeModel fit_ridge(const DesignMatrix& design, const Eigen::VectorXd& y, double lambda) {
  const auto& X = design.x;
  if (X.rows() != y.size()) throw Error(ErrorCode::MisalignedCovariates, "design rows differ from target length");
  if (lambda < 0.0) throw Error(ErrorCode::InvalidArgument, "negative l2 penalty");
  RidgeModel m;
  m.lambda = lambda;
  m.column_names = design.column_names;
  const Eigen::Index k = X.cols();
  if (lambda == 0.0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < k) throw Error(ErrorCode::SingularSystem, "design matrix is rank deficient");
  }
  Eigen::MatrixXd A = X.transpose() * X;
  for (Eigen::Index j = 2; j < k; ++j) A(j, j) += lambda;
  const Eigen::VectorXd b = X.transpose() * y;
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) {
    const double jitter = 1e-10 * A.trace();
    A.diagonal().array() += jitter;
    llt.compute(A);
    if (llt.info() != Eigen::Success) throw Error(ErrorCode::SingularSystem, "normal equations not positive definite");
  }
  m.beta = llt.solve(b);
  return m;
}

Eigen::VectorXd covariate_part(const RidgeModel& model, const DesignMatrix& design) {
  const Eigen::Index k = design.x.cols();
  if (k <= 2) return Eigen::VectorXd::Zero(design.x.rows());
  return design.x.rightCols(k - 2) * model.beta.tail(k - 2);
}

Eigen::VectorXd predict(const RidgeModel& model, const DesignMatrix& design) { return design.x * model.beta; }

}  // namespace strata
