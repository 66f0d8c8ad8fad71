#pragma once

#include <cstddef>
#include <vector>

#include "miwave/spectral.hpp"

namespace miwave {

struct DesignOptions {
  /// Relative tolerance on the allocated energy.
  double energy_tolerance = 1e-6;
  int max_iterations = 200;
  /// Replace P_h = 0 bins by 1e-12 * max(P_h) instead of failing.
  bool regularize_zero_channel = false;
};

/// Optimal matched-illumination ESD and its water level.
struct MiDesign {
  SpectralDensity esd;
  double lagrange_lambda;
  double achieved_energy;
  /// Bins with strictly positive ESD.
  std::vector<std::size_t> active_set;
};

/// Channel PSD actually used by the water-filling, after optional zero-bin regularization.
SpectralDensity effective_channel_psd(const Scenario& scenario, const DesignOptions& options = {});

/// E_s(f) = max((sqrt(P_n/lambda) - P_n) / P_h, 0), per bin.
SpectralDensity esd_for_lambda(const Scenario& scenario, double lambda,
                               const DesignOptions& options = {});

/// Integrated energy of esd_for_lambda; strictly decreasing in lambda until it hits zero.
double allocated_energy(const Scenario& scenario, double lambda, const DesignOptions& options = {});

/// Water level meeting the scenario's energy; bisection on log(lambda).
double solve_lambda(const Scenario& scenario, const DesignOptions& options = {});

MiDesign design_mi(const Scenario& scenario, const DesignOptions& options = {});

}  // namespace miwave
