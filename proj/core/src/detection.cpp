#include "miwave/detection.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "miwave/csv.hpp"
#include "miwave/errors.hpp"
#include "miwave/parallel.hpp"

namespace miwave {

namespace {

void require_same_grid(const FrequencyGrid& a, const FrequencyGrid& b, const char* who) {
  if (!(a == b)) throw InvalidArgument(std::string(who) + ": grid mismatch");
}

void require_bins(std::size_t n, const Scenario& scenario, const char* who) {
  if (n != scenario.grid().num_bins()) {
    throw InvalidArgument(std::string(who) + ": expected " +
                          std::to_string(scenario.grid().num_bins()) + " bins, got " +
                          std::to_string(n));
  }
}

double binomial_stderr(double p, std::size_t n) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

// Draws CN(0, variance).
Complex complex_normal(std::mt19937_64& rng, std::normal_distribution<double>& unit,
                       double variance) {
  const double s = std::sqrt(0.5 * variance);
  const double re = unit(rng);
  const double im = unit(rng);
  return {s * re, s * im};
}

// Fills out[i] with the statistic of trial (first + i) of one hypothesis.
void simulate_block(std::span<const Complex> s, std::span<const double> inv_denominator,
                    std::span<const double> clutter_var, std::span<const double> noise_var,
                    double target_var, std::uint64_t stream_seed, std::span<double> out) {
  std::mt19937_64 rng(stream_seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  for (double& stat : out) {
    const Complex a = target_var > 0.0 ? complex_normal(rng, unit, target_var) : Complex{};
    Complex acc{};
    for (std::size_t m = 0; m < s.size(); ++m) {
      const Complex h = complex_normal(rng, unit, clutter_var[m]);
      const Complex n = complex_normal(rng, unit, noise_var[m]);
      const Complex x = (a + h) * s[m] + n;
      acc += x * std::conj(s[m]) * inv_denominator[m];
    }
    stat = std::norm(acc);
  }
}

}  // namespace

double detection_metric(const SpectralDensity& esd, const Scenario& scenario) {
  require_same_grid(esd.grid(), scenario.grid(), "detection_metric");
  const auto& pn = scenario.noise_psd();
  const auto& ph = scenario.channel_psd();
  double sum = 0.0;
  for (std::size_t i = 0; i < esd.size(); ++i) {
    sum += esd[i] / (ph[i] * esd[i] + pn[i]);
  }
  return scenario.target_variance() * sum * esd.grid().spacing();
}

double analytic_pd(double d_squared, double p_fa) {
  if (!(d_squared >= 0.0)) throw InvalidArgument("analytic_roc: d^2 must be nonnegative");
  if (!(p_fa > 0.0 && p_fa <= 1.0)) throw InvalidArgument("analytic_roc: p_fa must lie in (0, 1]");
  return std::pow(p_fa, 1.0 / (1.0 + d_squared));
}

std::vector<RocPoint> analytic_roc(double d_squared, std::span<const double> p_fa) {
  std::vector<RocPoint> roc;
  roc.reserve(p_fa.size());
  for (double p : p_fa) roc.push_back({p, analytic_pd(d_squared, p)});
  return roc;
}

DetectionReport evaluate_detection(const SpectralDensity& esd, const Scenario& scenario,
                                   std::span<const double> p_fa) {
  const double d2 = detection_metric(esd, scenario);
  std::vector<double> sorted(p_fa.begin(), p_fa.end());
  std::sort(sorted.begin(), sorted.end());
  return DetectionReport{d2, analytic_roc(d2, sorted), esd};
}

std::vector<Complex> spectrum_from_esd(const SpectralDensity& esd) {
  std::vector<Complex> s(esd.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::sqrt(esd[i]);
  return s;
}

double np_statistic(std::span<const Complex> x_bins, std::span<const Complex> s_bins,
                    const Scenario& scenario) {
  require_bins(x_bins.size(), scenario, "np_statistic");
  require_bins(s_bins.size(), scenario, "np_statistic");
  const auto& pn = scenario.noise_psd();
  const auto& ph = scenario.channel_psd();
  Complex acc{};
  for (std::size_t m = 0; m < x_bins.size(); ++m) {
    acc += x_bins[m] * std::conj(s_bins[m]) / (ph[m] * std::norm(s_bins[m]) + pn[m]);
  }
  return std::norm(acc);
}

MonteCarloRoc monte_carlo_roc(std::span<const Complex> spectrum_bins, const Scenario& scenario,
                              const MonteCarloOptions& options) {
  require_bins(spectrum_bins.size(), scenario, "monte_carlo_roc");
  if (options.trials < 1000) throw InvalidArgument("monte_carlo_roc: need at least 1000 trials");
  if (options.null_trial_factor < 1) {
    throw InvalidArgument("monte_carlo_roc: null_trial_factor must be at least 1");
  }
  const double target_var = options.target_variance.value_or(scenario.target_variance());
  if (!(target_var >= 0.0)) throw InvalidArgument("monte_carlo_roc: negative target variance");
  for (double p : options.p_fa) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("monte_carlo_roc: p_fa must lie in (0, 1)");
  }

  // One Rayleigh bin: a PSD P maps to per-bin variance P * T so that the simulated
  // statistic has d^2 = sigma_A^2 * sum |S|^2 / D * (1/T).
  const double bin_variance = scenario.grid().duration();
  const auto& pn = scenario.noise_psd();
  const auto& ph = scenario.channel_psd();
  const std::size_t bins = spectrum_bins.size();
  std::vector<double> inv_den(bins), clutter_var(bins), noise_var(bins);
  for (std::size_t m = 0; m < bins; ++m) {
    inv_den[m] = 1.0 / (ph[m] * std::norm(spectrum_bins[m]) + pn[m]);
    clutter_var[m] = ph[m] * bin_variance;
    noise_var[m] = pn[m] * bin_variance;
  }

  const std::size_t n1 = options.trials;
  const std::size_t n0 = options.trials * options.null_trial_factor;
  std::vector<double> null_stats(n0), alt_stats(n1);
  const std::size_t null_blocks = (n0 + kMonteCarloBlock - 1) / kMonteCarloBlock;
  const std::size_t alt_blocks = (n1 + kMonteCarloBlock - 1) / kMonteCarloBlock;

  parallel_for(null_blocks + alt_blocks, options.workers, [&](std::size_t b) {
    const bool is_null = b < null_blocks;
    auto& stats = is_null ? null_stats : alt_stats;
    const std::size_t block = is_null ? b : b - null_blocks;
    const std::size_t first = block * kMonteCarloBlock;
    const std::size_t len = std::min(kMonteCarloBlock, stats.size() - first);
    // Streams 2k and 2k+1 keep the hypotheses disjoint.
    const std::uint64_t stream = 2 * block + (is_null ? 0 : 1);
    simulate_block(spectrum_bins, inv_den, clutter_var, noise_var, is_null ? 0.0 : target_var,
                   mix_seed(options.seed, stream), std::span(stats).subspan(first, len));
  });

  std::sort(null_stats.begin(), null_stats.end());
  std::sort(alt_stats.begin(), alt_stats.end());

  std::vector<double> p_fa = options.p_fa;
  std::sort(p_fa.begin(), p_fa.end());
  MonteCarloRoc roc{n1, n0, options.seed, {}};
  for (double target : p_fa) {
    // Exactly k null statistics lie strictly above the threshold.
    auto k = static_cast<std::size_t>(std::llround(target * static_cast<double>(n0)));
    k = std::clamp<std::size_t>(k, 1, n0 - 1);
    const double threshold = 0.5 * (null_stats[n0 - k - 1] + null_stats[n0 - k]);
    const auto above = [](const std::vector<double>& v, double g) {
      return static_cast<std::size_t>(v.end() - std::upper_bound(v.begin(), v.end(), g));
    };
    const double pfa_hat = static_cast<double>(above(null_stats, threshold)) / static_cast<double>(n0);
    const double pd_hat = static_cast<double>(above(alt_stats, threshold)) / static_cast<double>(n1);
    roc.points.push_back({target, threshold, pfa_hat, pd_hat, binomial_stderr(pfa_hat, n0),
                          binomial_stderr(pd_hat, n1)});
  }
  return roc;
}

void write_roc_csv(std::ostream& out, double d_squared, const MonteCarloRoc& roc) {
  out << "p_fa,p_d_analytic,p_d_empirical,stderr\n";
  for (const auto& p : roc.points) {
    out << format_number(p.p_fa_hat) << ',' << format_number(analytic_pd(d_squared, p.p_fa_hat))
        << ',' << format_number(p.p_d_hat) << ',' << format_number(p.p_d_stderr) << '\n';
  }
}

}  // namespace miwave
