#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "miwave/spectral.hpp"

namespace miwave {

/// X[i][m] = sinc(pi T (f_i - m/T)) for m = -order_bound..order_bound.
/// Requires sample_freqs.size() == 2 * order_bound + 1.
Eigen::MatrixXd sinc_matrix(std::span<const double> sample_freqs, double duration,
                            int order_bound);
/// Samples at the grid bins; order bound is the grid's M/2, so the result is the identity.
Eigen::MatrixXd sinc_matrix(const FrequencyGrid& grid, int order_bound);

/// Real multicarrier coefficients recovered from an ESD, scaled so sum c_m^2 = integral E_s.
struct OfdmTarget {
  std::vector<double> coeffs;  // indexed by m + half_order
  int half_order = 0;
  double energy = 0.0;
  /// Support half-width kappa in harmonic-index units.
  int support_halfwidth = 0;

  double coefficient(int m) const;
  /// sum_m c_m^2
  double power() const;
};

inline constexpr double kDefaultSupportTolerance = 0.01;

/// c = X^{-1} s_o / sqrt(T) with s_o = sqrt(E_s(f_i)) (zero-phase spectrum).
OfdmTarget solve_ofdm_coeffs(const SpectralDensity& mi_esd, const FrequencyGrid& grid,
                             double energy, double support_tol = kDefaultSupportTolerance);

/// Smallest kappa with sum_{|m| <= kappa} c_m^2 >= (1 - support_tol) sum_m c_m^2.
int support_halfwidth(const OfdmTarget& target, double support_tol);
/// F(beta) = sum_{|m| <= order_bound} (c_m^2 - E |I_m(beta)|^2)^2. Returns +inf when
/// sum k |beta_k| exceeds 4 order_bound, far outside the window the sum covers.
/// F(beta) = sum_{|m| <= order_bound} (c_m^2 - E |I_m(beta)|^2)^2.
double objective(std::span<const double> beta, const OfdmTarget& target, int order_bound);

/// Same as objective(), also writing dF/dbeta into `gradient` (size K) using
/// dI_m/dbeta_k = -(j/2) (I_{m-k} + I_{m+k}).
double objective_with_gradient(std::span<const double> beta, const OfdmTarget& target,
                               int order_bound, std::span<double> gradient);

enum class GradientMode { analytic, finite_difference };

struct FitOptions {
  int harmonics = 8;
  double delta = 0.2;
  std::size_t starts = 100;
  std::uint64_t seed = 1;
  GradientMode gradient = GradientMode::analytic;
  int max_iterations = 500;
  double relative_tolerance = 1e-10;
  /// Penalty weight is multiplied by 10 for each round that ends infeasible.
  int penalty_rounds = 8;
  unsigned workers = 0;
};

struct FitResult {
  std::size_t start_index = 0;
  std::vector<double> beta;
  std::vector<double> init_beta;
  double objective = 0.0;
  double constraint_value = 0.0;  // sum_k k beta_k
  double d_squared = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Objective order bound used by fit(): covers the grid and twice the widest admissible support.
int fit_order_bound(const OfdmTarget& target, double delta);

/// Feasible random start: beta_k = u_k kappa s / (k sum u), u_k ~ U(0,1), s ~ U(1-delta, 1+delta).
std::vector<double> feasible_start(int harmonics, int kappa, double delta, std::uint64_t stream_seed);

/// Multistart fit of MTSFM modulation indices to the target under
/// (1-delta) kappa <= sum_k k beta_k <= (1+delta) kappa. d^2 is evaluated on `scenario`.
/// Results are sorted by d^2, highest first, ties by start index.
std::vector<FitResult> fit(const OfdmTarget& target, const Scenario& scenario,
                           const FitOptions& options);

}  // namespace miwave
