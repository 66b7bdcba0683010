#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace strata {

// A covariate column as read from input: numeric or categorical.
struct CovariateColumn {
  std::string name;
  std::vector<std::string> raw;  // textual cells, one per row
};

struct Encoding {
  std::string feature;
  bool categorical = false;
  std::vector<std::string> levels;  // sorted; levels[0] is the dropped reference
};

// Columns: intercept, t, then encoded features in input order.
struct DesignMatrix {
  Eigen::MatrixXd x;
  std::vector<std::string> column_names;
  std::vector<Encoding> encodings;
};

// A column is numeric when every non-empty cell parses as a number, else
// categorical. Categorical columns become is_<level> indicators with the
// first sorted level as reference. Throws Error(TypeMismatch) when a numeric
// column has an empty cell or when lengths differ.
DesignMatrix dummy_encode(const std::vector<CovariateColumn>& columns, std::size_t t0 = 0);

// Re-encodes forecast-time rows with the stored encodings; unseen levels map
// to all-zero indicators. `t0` is the time index of the first row.
// Throws Error(MissingFutureCovariates) when a feature is absent.
DesignMatrix encode_with(const std::vector<Encoding>& encodings, const std::vector<CovariateColumn>& columns,
                         std::size_t t0);

struct RidgeModel {
  Eigen::VectorXd beta;
  double lambda = 0.0;
  std::vector<std::string> column_names;
};

// (X'X + lambda P) beta = X'y, P the identity without intercept and time
// columns. Cholesky with a 1e-10 trace jitter fallback.
// Throws Error(SingularSystem) when lambda = 0 and X is rank-deficient.
RidgeModel fit_ridge(const DesignMatrix& design, const Eigen::VectorXd& y, double lambda = 0.0);

// Covariate contribution sum_k beta_k x_k, excluding intercept and time.
Eigen::VectorXd covariate_part(const RidgeModel& model, const DesignMatrix& design);
// Full linear prediction including intercept and time.
Eigen::VectorXd predict(const RidgeModel& model, const DesignMatrix& design);

}  // namespace strata
