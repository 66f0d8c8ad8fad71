#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "miwave/spectral.hpp"

namespace miwave {

using Complex = std::complex<double>;

/// d^2 = sigma_A^2 * integral |S|^2 / (P_h |S|^2 + P_n) df on the scenario grid.
double detection_metric(const SpectralDensity& esd, const Scenario& scenario);

struct RocPoint {
  double p_fa;
  double p_d;
};

/// P_D = P_FA^(1 / (1 + d^2)).
std::vector<RocPoint> analytic_roc(double d_squared, std::span<const double> p_fa);
double analytic_pd(double d_squared, double p_fa);

struct DetectionReport {
  double d_squared;
  std::vector<RocPoint> roc;
  SpectralDensity esd_used;
};

DetectionReport evaluate_detection(const SpectralDensity& esd, const Scenario& scenario,
                                   std::span<const double> p_fa);

/// Zero-phase spectrum samples sqrt(E_s(f_m)) for an ESD.
std::vector<Complex> spectrum_from_esd(const SpectralDensity& esd);

/// Optimal Neyman-Pearson statistic |sum_m X_m S_m^* / (P_h |S_m|^2 + P_n)|^2.
double np_statistic(std::span<const Complex> x_bins, std::span<const Complex> s_bins,
                    const Scenario& scenario);

struct MonteCarloOptions {
  /// Number of target-present (H1) trials.
  std::size_t trials = 100000;
  /// H0 trials used to set thresholds, as a multiple of `trials`.
  std::size_t null_trial_factor = 10;
  std::uint64_t seed = 1;
  std::vector<double> p_fa = {0.01, 0.1};
  /// Overrides the scenario's target variance; zero is allowed here (H1 == H0).
  std::optional<double> target_variance;
  unsigned workers = 0;
};

struct MonteCarloPoint {
  double p_fa_target;
  double threshold;
  double p_fa_hat;
  double p_d_hat;
  double p_fa_stderr;
  double p_d_stderr;
};

struct MonteCarloRoc {
  std::size_t trials;
  std::size_t null_trials;
  std::uint64_t rng_seed;
  std::vector<MonteCarloPoint> points;
};

/// Trials are generated in fixed-size blocks, each with its own RNG stream derived from
/// (seed, block index); output does not depend on the worker count.
inline constexpr std::size_t kMonteCarloBlock = 4096;

/// Simulates X_m = (A + H_m) S_m + N_m with A ~ CN(0, sigma_A^2), H_m ~ CN(0, P_h T),
/// N_m ~ CN(0, P_n T); thresholds are H0 empirical quantiles.
MonteCarloRoc monte_carlo_roc(std::span<const Complex> spectrum_bins, const Scenario& scenario,
                              const MonteCarloOptions& options);

/// CSV with columns p_fa,p_d_analytic,p_d_empirical,stderr.
void write_roc_csv(std::ostream& out, double d_squared, const MonteCarloRoc& roc);

}  // namespace miwave
