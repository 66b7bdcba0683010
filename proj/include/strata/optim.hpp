#pragma once

#include <functional>
#include <span>
#include <vector>

namespace strata::optim {

using Objective = std::function<double(std::span<const double>)>;

struct LbfgsOptions {
  int max_iterations = 200;
  int memory = 6;
  double rel_tolerance = 1e-9;  // stop when |f_k - f_{k+1}| <= tol * (|f_k| + tol)
  double grad_tolerance = 1e-8;
  double fd_step = 1e-6;        // central difference step
};

struct LbfgsResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Central finite-difference gradient.
std::vector<double> numeric_gradient(const Objective& f, std::span<const double> x, double step);

// Limited-memory BFGS with a backtracking Armijo line search. Returns the
// best point seen even when the iteration cap is hit.
LbfgsResult minimize(const Objective& f, std::vector<double> x0, const LbfgsOptions& options = {});

}  // namespace strata::optim
