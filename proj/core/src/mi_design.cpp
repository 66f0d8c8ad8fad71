#include "miwave/mi_design.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

#include "miwave/errors.hpp"

namespace miwave {

namespace {

constexpr double kZeroChannelScale = 1e-12;

double water_level_ceiling(const Scenario& scenario) {
  double hi = 0.0;
  for (double pn : scenario.noise_psd().values()) hi = std::max(hi, 1.0 / pn);
  return hi;
}

}  // namespace

SpectralDensity effective_channel_psd(const Scenario& scenario, const DesignOptions& options) {
  const auto& ph = scenario.channel_psd();
  const auto zeros = scenario.zero_channel_bins();
  if (zeros.empty() || !options.regularize_zero_channel) return ph;

  const double peak = ph.max();
  if (!(peak > 0.0)) {
    throw UnboundedAllocation("channel PSD is identically zero; cannot regularize");
  }
  std::cerr << "miwave: warning: " << zeros.size()
            << " zero-channel bin(s) regularized to " << kZeroChannelScale * peak << "\n";
  std::vector<double> values(ph.values().begin(), ph.values().end());
  for (auto i : zeros) values[i] = kZeroChannelScale * peak;
  return SpectralDensity(ph.grid(), std::move(values));
}

SpectralDensity esd_for_lambda(const Scenario& scenario, double lambda,
                               const DesignOptions& options) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("esd_for_lambda: lambda must be positive and finite");
  }
  const auto ph = effective_channel_psd(scenario, options);
  const auto& pn = scenario.noise_psd();
  std::vector<double> values(pn.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double numerator = std::sqrt(pn[i] / lambda) - pn[i];
    if (!(numerator > 0.0)) {
      values[i] = 0.0;
      continue;
    }
    if (ph[i] == 0.0) {
      std::ostringstream msg;
      msg << "esd_for_lambda: P_h = 0 at f = " << pn.grid().freq(i)
          << " Hz with positive numerator; allocation is unbounded";
      throw UnboundedAllocation(msg.str());
    }
    values[i] = numerator / ph[i];
  }
  return SpectralDensity(pn.grid(), std::move(values));
}

double allocated_energy(const Scenario& scenario, double lambda, const DesignOptions& options) {
  return integrate(esd_for_lambda(scenario, lambda, options));
}

double solve_lambda(const Scenario& scenario, const DesignOptions& options) {
  const double target = scenario.energy();
  const auto& pn = scenario.noise_psd();
  const Scenario effective(pn, effective_channel_psd(scenario, options),
                           scenario.target_variance(), target);
  const auto& ph = effective.channel_psd();

  // Zero-channel bins make the allocation infinite as soon as they turn active.
  auto allocation = [&](double lambda) {
    double sum = 0.0;
    for (std::size_t i = 0; i < pn.size(); ++i) {
      const double numerator = std::sqrt(pn[i] / lambda) - pn[i];
      if (!(numerator > 0.0)) continue;
      if (ph[i] == 0.0) return std::numeric_limits<double>::infinity();
      sum += numerator / ph[i];
    }
    return sum * pn.grid().spacing();
  };

  // Above the ceiling max(1/P_n) nothing is allocated.
  double log_hi = std::log(water_level_ceiling(effective));
  double log_lo = log_hi - std::log(2.0);
  int expansions = 0;
  while (allocation(std::exp(log_lo)) < target) {
    log_hi = log_lo;
    log_lo -= std::log(2.0) * (1 << std::min(expansions, 8));
    if (++expansions > options.max_iterations) {
      std::ostringstream msg;
      msg << "solve_lambda: failed to bracket E = " << target << " after " << expansions
          << " expansions (lambda_lo = " << std::exp(log_lo) << ")";
      throw ConvergenceError(msg.str());
    }
  }

  // Bisect to floating-point resolution; the energy tolerance is checked afterwards.
  int iterations = 0;
  while (iterations < options.max_iterations) {
    const double mid = 0.5 * (log_lo + log_hi);
    if (!(mid > log_lo && mid < log_hi)) break;
    ++iterations;
    if (allocation(std::exp(mid)) >= target) {
      log_lo = mid;
    } else {
      log_hi = mid;
    }
  }

  const double lo = std::exp(log_lo);
  const double hi = std::exp(log_hi);
  const double e_lo = allocation(lo);
  const double e_hi = allocation(hi);
  if (std::isinf(e_lo) && std::abs(e_hi - target) > options.energy_tolerance * target) {
    std::ostringstream msg;
    msg << "solve_lambda: a zero-channel bin turns active at lambda = " << lo
        << " before E = " << target << " is reached; allocation is unbounded";
    throw UnboundedAllocation(msg.str());
  }
  const bool take_lo = std::abs(e_lo - target) <= std::abs(e_hi - target);
  const double lambda = take_lo ? lo : hi;
  const double residual = std::abs((take_lo ? e_lo : e_hi) - target);
  // A regularized bin makes E(lambda) steeper than double resolution in lambda can follow;
  // design_mi rescales the allocation to E in that case.
  const bool regularized = options.regularize_zero_channel && !scenario.zero_channel_bins().empty();
  if (residual > options.energy_tolerance * target && !regularized) {
    std::ostringstream msg;
    msg << "solve_lambda: energy residual " << residual << " exceeds "
        << options.energy_tolerance << " * E after " << iterations
        << " bisection steps (lambda in [" << lo << ", " << hi << "])";
    throw ConvergenceError(msg.str());
  }
  return lambda;
}

MiDesign design_mi(const Scenario& scenario, const DesignOptions& options) {
  const double lambda = solve_lambda(scenario, options);
  auto esd = esd_for_lambda(scenario, lambda, options);
  if (options.regularize_zero_channel && !scenario.zero_channel_bins().empty()) {
    const double scale = scenario.energy() / integrate(esd);
    std::vector<double> values(esd.values().begin(), esd.values().end());
    for (auto& v : values) v *= scale;
    esd = SpectralDensity(esd.grid(), std::move(values));
  }
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < esd.size(); ++i) {
    if (esd[i] > 0.0) active.push_back(i);
  }
  const double achieved = integrate(esd);
  return MiDesign{std::move(esd), lambda, achieved, std::move(active)};
}

}  // namespace miwave
