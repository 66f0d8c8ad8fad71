#include "miwave/optimizer.hpp"

#include <algorithm>
#include <cmath>

namespace miwave {

Eigen::VectorXd central_difference_gradient(
    const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
    double step) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = step * std::max(1.0, std::abs(x[i]));
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

MinimizerResult minimize_bfgs(const SmoothObjective& objective, Eigen::VectorXd x0,
                              const MinimizerOptions& options) {
  constexpr double kArmijo = 1e-4;
  const Eigen::Index n = x0.size();

  Eigen::VectorXd x = std::move(x0);
  Eigen::VectorXd g(n);
  double f = objective(x, &g);
  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
  bool fresh_scaling = true;

  MinimizerResult result{x, f, 0, false};
  if (!std::isfinite(f)) return result;

  Eigen::VectorXd g_new(n);
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    result.iterations = iter;
    if (f <= options.absolute_floor || g.squaredNorm() == 0.0) {
      result.converged = true;
      break;
    }

    Eigen::VectorXd dir = -h_inv * g;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      // Lost descent; fall back to steepest descent.
      h_inv.setIdentity();
      fresh_scaling = true;
      dir = -g;
      slope = -g.squaredNorm();
    }

    // Backtracking with safeguarded quadratic interpolation.
    double alpha = 1.0;
    double f_new = 0.0;
    Eigen::VectorXd x_new(n);
    bool accepted = false;
    for (int ls = 0; ls < options.max_line_search_steps; ++ls) {
      x_new = x + alpha * dir;
      f_new = objective(x_new, nullptr);
      if (std::isfinite(f_new) && f_new <= f + kArmijo * alpha * slope) {
        accepted = true;
        break;
      }
      double next = 0.5 * alpha;
      if (std::isfinite(f_new)) {
        const double denom = 2.0 * (f_new - f - slope * alpha);
        if (denom > 0.0) next = -slope * alpha * alpha / denom;
      }
      alpha = std::clamp(next, 0.1 * alpha, 0.5 * alpha);
    }
    if (!accepted) {
      if (!fresh_scaling) {
        // Retry from a steepest-descent model before giving up.
        h_inv.setIdentity();
        fresh_scaling = true;
        continue;
      }
      result.converged = true;  // no further decrease available at this resolution
      break;
    }

    f_new = objective(x_new, &g_new);
    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g;
    const double decrease = f - f_new;
    x = x_new;
    g = g_new;
    const double f_prev = f;
    f = f_new;

    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (fresh_scaling) {
        h_inv *= sy / y.squaredNorm();
        fresh_scaling = false;
      }
      const double rho = 1.0 / sy;
      const Eigen::VectorXd hy = h_inv * y;
      h_inv += (rho * rho * y.dot(hy) + rho) * (s * s.transpose()) -
               rho * (hy * s.transpose() + s * hy.transpose());
    }

    if (decrease <= options.relative_tolerance * std::abs(f_prev)) {
      result.converged = true;
      break;
    }
  }
  result.x = x;
  result.value = f;
  return result;
}

}  // namespace miwave
