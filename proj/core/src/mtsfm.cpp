#include "miwave/mtsfm.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>

#include "miwave/errors.hpp"
#include "miwave/fourier.hpp"

namespace miwave {

using std::numbers::pi;

namespace {

constexpr int kGuardOrders = 16;
constexpr int kSamplesPerOrder = 8;
constexpr double kSamplesPerCycle = 16.0;

// exp(j phi) sampled at theta_n = -pi + 2 pi n / N.
std::vector<std::complex<double>> unit_modulus_samples(std::span<const double> beta,
                                                       std::size_t n) {
  std::vector<std::complex<double>> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double theta = -pi + 2.0 * pi * static_cast<double>(i) / static_cast<double>(n);
    double phi = 0.0;
    for (std::size_t k = 0; k < beta.size(); ++k) {
      phi -= beta[k] * std::cos(static_cast<double>(k + 1) * theta);
    }
    out[i] = std::polar(1.0, phi);
  }
  return out;
}

double support_of(std::span<const double> beta) {
  double s = 0.0;
  for (std::size_t k = 0; k < beta.size(); ++k) s += static_cast<double>(k + 1) * std::abs(beta[k]);
  return s;
}

// Past the support edge the coefficients decay on an Airy scale set by the curvature of the
// instantaneous frequency at its peak, bounded by sum_k k^3 |beta_k|.
int guard_orders(std::span<const double> beta) {
  double curvature = 0.0;
  for (std::size_t k = 0; k < beta.size(); ++k) {
    const double order = static_cast<double>(k + 1);
    curvature += order * order * order * std::abs(beta[k]);
  }
  return std::max(kGuardOrders, static_cast<int>(std::ceil(8.0 * std::cbrt(0.5 * curvature))));
}

}  // namespace

double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

MtsfmWaveform::MtsfmWaveform(double duration, double energy, std::vector<double> mod_indices)
    : duration_(duration), energy_(energy), beta_(std::move(mod_indices)) {
  if (!(duration_ > 0.0) || !std::isfinite(duration_)) {
    throw InvalidArgument("MtsfmWaveform: duration must be positive");
  }
  if (!(energy_ > 0.0) || !std::isfinite(energy_)) {
    throw InvalidArgument("MtsfmWaveform: energy must be positive");
  }
  if (beta_.empty()) throw InvalidArgument("MtsfmWaveform: need at least one harmonic");
  for (double b : beta_) {
    if (!std::isfinite(b)) throw InvalidArgument("MtsfmWaveform: modulation indices must be finite");
  }
}

double MtsfmWaveform::amplitude() const { return std::sqrt(energy_ / duration_); }

void MtsfmWaveform::check_support(double t, const char* who) const {
  if (!(std::abs(t) <= 0.5 * duration_)) {
    throw InvalidArgument(std::string(who) + ": t outside [-T/2, T/2]");
  }
}

double MtsfmWaveform::phase(double t) const {
  check_support(t, "phase");
  double phi = 0.0;
  for (std::size_t k = 0; k < beta_.size(); ++k) {
    phi -= beta_[k] * std::cos(2.0 * pi * static_cast<double>(k + 1) * t / duration_);
  }
  return phi;
}

double MtsfmWaveform::modulation(double t) const {
  check_support(t, "modulation");
  double m = 0.0;
  for (std::size_t k = 0; k < beta_.size(); ++k) {
    const double order = static_cast<double>(k + 1);
    const double b = beta_[k] * order / duration_;
    m += b * std::sin(2.0 * pi * order * t / duration_);
  }
  return m;
}

double MtsfmWaveform::peak_frequency_bound() const { return support_of(beta_) / duration_; }

double MtsfmWaveform::support_estimate() const { return support_of(beta_); }

double default_sample_rate(const MtsfmWaveform& w) {
  return kSamplesPerCycle * std::max(w.peak_frequency_bound(), 1.0 / w.duration());
}

std::vector<std::complex<double>> time_series(const MtsfmWaveform& w, double sample_rate,
                                              bool strict) {
  if (!(sample_rate > 0.0)) throw InvalidArgument("time_series: sample rate must be positive");
  const double nyquist = 2.0 * w.peak_frequency_bound();
  if (sample_rate < nyquist) {
    const std::string msg = "time_series: sample rate " + std::to_string(sample_rate) +
                            " Hz is below the Nyquist guard " + std::to_string(nyquist) + " Hz";
    if (strict) throw InvalidArgument(msg);
    std::cerr << "miwave: warning: " << msg << "\n";
  }
  const auto n = static_cast<std::size_t>(std::max(1.0, std::round(sample_rate * w.duration())));
  std::vector<std::complex<double>> out(n);
  const double dt = w.duration() / static_cast<double>(n);
  const double a = w.amplitude();
  for (std::size_t i = 0; i < n; ++i) {
    const double t = -0.5 * w.duration() + dt * static_cast<double>(i);
    out[i] = std::polar(a, w.phase(t));
  }
  return out;
}

CoefficientSet::CoefficientSet(int order_bound, double energy,
                               std::vector<std::complex<double>> coeffs)
    : order_bound_(order_bound), energy_(energy), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != static_cast<std::size_t>(2 * order_bound_ + 1)) {
    throw InvalidArgument("CoefficientSet: size does not match order bound");
  }
}

std::complex<double> CoefficientSet::operator()(int m) const {
  if (m < -order_bound_ || m > order_bound_) return {};
  return coeffs_[static_cast<std::size_t>(m + order_bound_)];
}

double CoefficientSet::captured_power() const {
  double p = 0.0;
  for (const auto& c : coeffs_) p += std::norm(c);
  return p;
}

int default_order_bound(const MtsfmWaveform& w) {
  return static_cast<int>(std::ceil(w.support_estimate())) + guard_orders(w.mod_indices());
}

std::vector<std::complex<double>> unit_modulus_coefficients(std::span<const double> beta,
                                                            int order_bound) {
  if (order_bound < 0) throw InvalidArgument("coefficients: order bound must be nonnegative");
  const auto support = static_cast<std::size_t>(std::ceil(support_of(beta)) + guard_orders(beta));
  const std::size_t needed =
      kSamplesPerOrder * (2 * std::max(static_cast<std::size_t>(order_bound), support) + 1);
  const auto samples = unit_modulus_samples(beta, next_pow2(needed));
  return periodic_coefficients(samples, order_bound);
}

CoefficientSet coefficients(const MtsfmWaveform& w, int order_bound) {
  if (order_bound < 1) throw InvalidArgument("coefficients: order bound must be at least 1");
  return CoefficientSet(order_bound, w.energy(), unit_modulus_coefficients(w.mod_indices(), order_bound));
}

std::complex<double> spectrum(const MtsfmWaveform& w, const CoefficientSet& coeffs, double f) {
  const double t = w.duration();
  std::complex<double> acc{};
  for (int m = -coeffs.order_bound(); m <= coeffs.order_bound(); ++m) {
    acc += coeffs(m) * sinc(pi * t * (f - static_cast<double>(m) / t));
  }
  return std::sqrt(w.energy() * t) * acc;
}

SpectralDensity esd_on_grid(const MtsfmWaveform& w, const FrequencyGrid& grid) {
  if (std::abs(grid.duration() - w.duration()) > 1e-12 * w.duration()) {
    throw InvalidArgument("esd_on_grid: grid spacing must be 1/T of the waveform");
  }
  const int order = std::max(grid.half_order(), 1);
  const auto c = coefficients(w, order);
  std::vector<double> values(grid.num_bins());
  const double scale = w.energy() * w.duration();
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = scale * std::norm(c(grid.order(i)));
  return SpectralDensity(grid, std::move(values));
}

double rms_bandwidth(const SpectralDensity& esd, double energy) {
  if (!(energy > 0.0)) throw InvalidArgument("rms_bandwidth: energy must be positive");
  const auto& grid = esd.grid();
  double moment = 0.0;
  for (std::size_t i = 0; i < esd.size(); ++i) moment += grid.freq(i) * grid.freq(i) * esd[i];
  moment *= grid.spacing();
  return 2.0 * pi * std::sqrt(moment / energy);
}

}  // namespace miwave
