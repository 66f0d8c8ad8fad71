#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>

namespace miwave {

/// f(x) and, when grad is non-null, its gradient.
using SmoothObjective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

struct MinimizerOptions {
  int max_iterations = 500;
  /// Stop when (f_prev - f) <= relative_tolerance * |f_prev|.
  double relative_tolerance = 1e-10;
  /// Stop when f itself drops to this value (0 for least squares with exact fits).
  double absolute_floor = -std::numeric_limits<double>::infinity();
  int max_line_search_steps = 40;
};

struct MinimizerResult {
  Eigen::VectorXd x;
  double value;
  int iterations;
  bool converged;
};

/// BFGS with an Armijo backtracking line search (quadratic/cubic interpolation) that skips
/// curvature-violating updates.
MinimizerResult minimize_bfgs(const SmoothObjective& objective, Eigen::VectorXd x0,
                              const MinimizerOptions& options = {});

/// Central-difference gradient with step h_i = step * max(1, |x_i|).
Eigen::VectorXd central_difference_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
    double step = 1e-6);

}  // namespace miwave
