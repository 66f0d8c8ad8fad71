#include "miwave/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "miwave/detection.hpp"
#include "miwave/errors.hpp"
#include "miwave/mtsfm.hpp"
#include "miwave/optimizer.hpp"
#include "miwave/parallel.hpp"

namespace miwave {

namespace {

constexpr int kFitGuardOrders = 16;
// Violations this small (relative to kappa) are removed by projection rather than more rounds.
constexpr double kProjectionSlack = 1e-6;
// Line-search probes far outside the coefficient window are rejected before sampling,
// otherwise the FFT length grows with |beta| without bound.
constexpr double kProbeSupportFactor = 4.0;

struct Slab {
  double lo;
  double hi;

  double violation(double s) const {
    if (s < lo) return s - lo;
    if (s > hi) return s - hi;
    return 0.0;
  }
};

double constraint_value(std::span<const double> beta) {
  double s = 0.0;
  for (std::size_t k = 0; k < beta.size(); ++k) s += static_cast<double>(k + 1) * beta[k];
  return s;
}

// Shifts beta along (1, 2, ..., K) onto the nearest slab face.
void project_onto_slab(std::vector<double>& beta, const Slab& slab) {
  const double v = slab.violation(constraint_value(beta));
  if (v == 0.0) return;
  double norm2 = 0.0;
  for (std::size_t k = 0; k < beta.size(); ++k) norm2 += static_cast<double>((k + 1) * (k + 1));
  for (std::size_t k = 0; k < beta.size(); ++k) beta[k] -= v * static_cast<double>(k + 1) / norm2;
  // Land inside despite rounding.
  const double s = constraint_value(beta);
  if (s < slab.lo || s > slab.hi) {
    const double nudge = (s < slab.lo ? slab.lo - s : slab.hi - s);
    beta[0] += nudge;
  }
}

double evaluate(std::span<const double> beta, const OfdmTarget& target, int order_bound,
                std::span<double> gradient) {
  const int k_max = static_cast<int>(beta.size());
  double support = 0.0;
  for (int k = 1; k <= k_max; ++k) support += k * std::abs(beta[static_cast<std::size_t>(k - 1)]);
  if (!(support <= kProbeSupportFactor * order_bound)) {
    std::fill(gradient.begin(), gradient.end(), 0.0);
    return std::numeric_limits<double>::infinity();
  }
  const int wide = order_bound + (gradient.empty() ? 0 : k_max);
  const auto c = unit_modulus_coefficients(beta, wide);
  const auto at = [&](int m) { return c[static_cast<std::size_t>(m + wide)]; };

  double f = 0.0;
  std::fill(gradient.begin(), gradient.end(), 0.0);
  for (int m = -order_bound; m <= order_bound; ++m) {
    const double t = target.coefficient(m);
    const double r = t * t - target.energy * std::norm(at(m));
    f += r * r;
    if (gradient.empty()) continue;
    for (int k = 1; k <= k_max; ++k) {
      const auto dc = std::complex<double>(0.0, -0.5) * (at(m - k) + at(m + k));
      const double dp = 2.0 * std::real(std::conj(at(m)) * dc);
      gradient[static_cast<std::size_t>(k - 1)] += -2.0 * r * target.energy * dp;
    }
  }
  return f;
}

}  // namespace

Eigen::MatrixXd sinc_matrix(std::span<const double> sample_freqs, double duration,
                            int order_bound) {
  if (!(duration > 0.0)) throw InvalidArgument("sinc_matrix: duration must be positive");
  if (order_bound < 0) throw InvalidArgument("sinc_matrix: negative order bound");
  const auto n = static_cast<Eigen::Index>(2 * order_bound + 1);
  if (static_cast<Eigen::Index>(sample_freqs.size()) != n) {
    throw InvalidArgument("sinc_matrix: " + std::to_string(sample_freqs.size()) +
                          " samples for " + std::to_string(n) + " orders; matrix must be square");
  }
  Eigen::MatrixXd x(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double m = static_cast<double>(j - order_bound);
      // sin(pi n)/(pi n) is not exactly zero in floating point; pin integer offsets.
      const double offset = duration * sample_freqs[static_cast<std::size_t>(i)] - m;
      const double rounded = std::round(offset);
      if (std::abs(offset - rounded) < 1e-12) {
        x(i, j) = rounded == 0.0 ? 1.0 : 0.0;
      } else {
        x(i, j) = sinc(std::numbers::pi * offset);
      }
    }
  }
  return x;
}

Eigen::MatrixXd sinc_matrix(const FrequencyGrid& grid, int order_bound) {
  return sinc_matrix(grid.freqs(), grid.duration(), order_bound);
}

double OfdmTarget::coefficient(int m) const {
  if (m < -half_order || m > half_order) return 0.0;
  return coeffs[static_cast<std::size_t>(m + half_order)];
}

double OfdmTarget::power() const {
  double p = 0.0;
  for (double c : coeffs) p += c * c;
  return p;
}

int support_halfwidth(const OfdmTarget& target, double support_tol) {
  if (!(support_tol > 0.0 && support_tol <= 0.1)) {
    throw InvalidArgument("support_halfwidth: support_tol must lie in (0, 0.1]");
  }
  const double total = target.power();
  const double needed = (1.0 - support_tol) * total;
  double acc = 0.0;
  for (int kappa = 0; kappa <= target.half_order; ++kappa) {
    acc += kappa == 0 ? std::pow(target.coefficient(0), 2)
                      : std::pow(target.coefficient(kappa), 2) + std::pow(target.coefficient(-kappa), 2);
    if (acc >= needed) return kappa;
  }
  return target.half_order;
}

OfdmTarget solve_ofdm_coeffs(const SpectralDensity& mi_esd, const FrequencyGrid& grid,
                             double energy, double support_tol) {
  if (!(mi_esd.grid() == grid)) throw InvalidArgument("solve_ofdm_coeffs: grid mismatch");
  if (!(energy > 0.0)) throw InvalidArgument("solve_ofdm_coeffs: energy must be positive");
  const int half = grid.half_order();
  const Eigen::MatrixXd x = sinc_matrix(grid, half);
  Eigen::VectorXd s_o(static_cast<Eigen::Index>(grid.num_bins()));
  for (std::size_t i = 0; i < grid.num_bins(); ++i) s_o[static_cast<Eigen::Index>(i)] = std::sqrt(mi_esd[i]);

  const Eigen::FullPivLU<Eigen::MatrixXd> lu(x);
  if (!lu.isInvertible()) throw ConvergenceError("solve_ofdm_coeffs: sinc matrix is singular");
  const Eigen::VectorXd c = lu.solve(s_o) / std::sqrt(grid.duration());

  OfdmTarget target;
  target.coeffs.assign(c.data(), c.data() + c.size());
  target.half_order = half;
  target.energy = energy;
  target.support_halfwidth = target.power() > 0.0 ? support_halfwidth(target, support_tol) : 0;
  return target;
}

double objective(std::span<const double> beta, const OfdmTarget& target, int order_bound) {
  return evaluate(beta, target, order_bound, {});
}

double objective_with_gradient(std::span<const double> beta, const OfdmTarget& target,
                               int order_bound, std::span<double> gradient) {
  if (gradient.size() != beta.size()) {
    throw InvalidArgument("objective_with_gradient: gradient size must equal beta size");
  }
  return evaluate(beta, target, order_bound, gradient);
}

int fit_order_bound(const OfdmTarget& target, double delta) {
  const int widest = static_cast<int>(std::ceil(2.0 * (1.0 + delta) * target.support_halfwidth));
  return std::max(target.half_order, widest) + kFitGuardOrders;
}

std::vector<double> feasible_start(int harmonics, int kappa, double delta,
                                   std::uint64_t stream_seed) {
  std::mt19937_64 rng(stream_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> u(static_cast<std::size_t>(harmonics));
  double sum = 0.0;
  for (double& v : u) {
    v = unit(rng);
    sum += v;
  }
  const double scale = std::uniform_real_distribution<double>(1.0 - delta, 1.0 + delta)(rng);
  std::vector<double> beta(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) {
    beta[k] = u[k] * kappa * scale / (static_cast<double>(k + 1) * sum);
  }
  return beta;
}

std::vector<FitResult> fit(const OfdmTarget& target, const Scenario& scenario,
                           const FitOptions& options) {
  if (options.harmonics < 1) throw InvalidArgument("fit: need at least one harmonic");
  if (!(options.delta > 0.0 && options.delta < 1.0)) throw InvalidArgument("fit: delta must lie in (0, 1)");
  if (options.starts < 1) throw InvalidArgument("fit: need at least one start");
  if (!(target.power() > 0.0)) {
    throw InfeasibleError("fit: target has no energy, so no support region can be defined");
  }
  if (target.half_order != scenario.grid().half_order()) {
    throw InvalidArgument("fit: target and scenario grids differ");
  }

  const double kappa = target.support_halfwidth;
  const Slab slab{(1.0 - options.delta) * kappa, (1.0 + options.delta) * kappa};
  const int order_bound = fit_order_bound(target, options.delta);
  const double mu0 = target.energy * target.energy;
  const double duration = scenario.grid().duration();

  std::vector<FitResult> results(options.starts);
  parallel_for(options.starts, options.workers, [&](std::size_t start) {
    FitResult& res = results[start];
    res.start_index = start;
    res.init_beta = feasible_start(options.harmonics, target.support_halfwidth, options.delta,
                                   mix_seed(options.seed, start));
    std::vector<double> beta = res.init_beta;
    const auto k = static_cast<Eigen::Index>(beta.size());

    double mu = mu0;
    bool minimizer_converged = false;
    for (int round = 0; round < options.penalty_rounds; ++round) {
      SmoothObjective penalized = [&](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
        const std::span<const double> b(x.data(), static_cast<std::size_t>(x.size()));
        double f = 0.0;
        if (grad == nullptr) {
          f = objective(b, target, order_bound);
        } else if (options.gradient == GradientMode::analytic) {
          grad->resize(x.size());
          f = objective_with_gradient(b, target, order_bound,
                                      std::span<double>(grad->data(), static_cast<std::size_t>(k)));
        } else {
          f = objective(b, target, order_bound);
          *grad = central_difference_gradient(
              [&](const Eigen::VectorXd& p) {
                return objective(std::span<const double>(p.data(), static_cast<std::size_t>(k)),
                                 target, order_bound);
              },
              x);
        }
        const double v = slab.violation(constraint_value(b));
        f += mu * v * v;
        if (grad != nullptr && v != 0.0) {
          for (Eigen::Index i = 0; i < k; ++i) (*grad)[i] += 2.0 * mu * v * static_cast<double>(i + 1);
        }
        return f;
      };

      MinimizerOptions mopts;
      mopts.max_iterations = options.max_iterations;
      mopts.relative_tolerance = options.relative_tolerance;
      mopts.absolute_floor = 0.0;
      Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(beta.data(), k);
      const auto run = minimize_bfgs(penalized, std::move(x0), mopts);
      beta.assign(run.x.data(), run.x.data() + k);
      res.iterations += run.iterations;
      minimizer_converged = run.converged;
      if (slab.violation(constraint_value(beta)) == 0.0) break;
      mu *= 10.0;
    }

    const double residual = std::abs(slab.violation(constraint_value(beta)));
    const bool projectable = residual <= kProjectionSlack * std::max(kappa, 1.0);
    if (projectable) project_onto_slab(beta, slab);
    res.beta = beta;
    res.objective = objective(beta, target, order_bound);
    res.constraint_value = constraint_value(beta);
    res.converged = minimizer_converged && projectable;
    const MtsfmWaveform waveform(duration, target.energy, beta);
    res.d_squared = detection_metric(esd_on_grid(waveform, scenario.grid()), scenario);
  });

  std::sort(results.begin(), results.end(), [](const FitResult& a, const FitResult& b) {
    if (a.d_squared != b.d_squared) return a.d_squared > b.d_squared;
    return a.start_index < b.start_index;
  });
  return results;
}

}  // namespace miwave
