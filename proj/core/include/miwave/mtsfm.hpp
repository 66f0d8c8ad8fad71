#pragma once

#include <complex>
#include <span>
#include <vector>

#include "miwave/spectral.hpp"

namespace miwave {

/// Multi-tone sinusoidal FM waveform on [-T/2, T/2):
///   s(t) = sqrt(E/T) exp(j phi(t)),  phi(t) = -sum_k beta_k cos(2 pi k t / T).
class MtsfmWaveform {
 public:
  MtsfmWaveform(double duration, double energy, std::vector<double> mod_indices);

  double duration() const { return duration_; }
  double energy() const { return energy_; }
  double amplitude() const;
  std::span<const double> mod_indices() const { return beta_; }
  int harmonics() const { return static_cast<int>(beta_.size()); }

  /// Radians; t must lie in [-T/2, T/2].
  double phase(double t) const;
  /// Hz; m(t) = sum_k b_k sin(2 pi k t / T) with b_k = beta_k k / T.
  double modulation(double t) const;
  /// Upper bound on |m(t)|: sum_k |b_k|.
  double peak_frequency_bound() const;
  /// sum_k k |beta_k|, in harmonic-index units.
  double support_estimate() const;

 private:
  void check_support(double t, const char* who) const;

  double duration_;
  double energy_;
  std::vector<double> beta_;
};

/// 16 samples per cycle of the fastest instantaneous frequency (and at least 16 per 1/T).
double default_sample_rate(const MtsfmWaveform& w);

/// Uniform samples of s(t) on [-T/2, T/2). N = round(sample_rate * T); spacing is exactly T/N.
/// With `strict`, sampling below twice the peak frequency bound throws; otherwise warns.
std::vector<std::complex<double>> time_series(const MtsfmWaveform& w, double sample_rate,
                                              bool strict = true);

/// Fourier-series (M-GBF) coefficients of the unit-modulus factor exp(j phi(t)).
class CoefficientSet {
 public:
  CoefficientSet(int order_bound, double energy, std::vector<std::complex<double>> coeffs);

  int order_bound() const { return order_bound_; }
  double energy() const { return energy_; }
  /// c_m; zero outside [-order_bound, order_bound].
  std::complex<double> operator()(int m) const;
  std::span<const std::complex<double>> values() const { return coeffs_; }
  /// sum |c_m|^2 over the retained orders.
  double captured_power() const;
  /// 1 - captured_power(): energy fraction beyond the order bound.
  double tail() const { return 1.0 - captured_power(); }
  bool truncated(double tail_tolerance = 1e-8) const { return tail() > tail_tolerance; }

 private:
  int order_bound_;
  double energy_;
  std::vector<std::complex<double>> coeffs_;
};

/// ceil(sum_k k |beta_k|) + max(16, ceil(8 (sum_k k^3 |beta_k| / 2)^(1/3))) guard orders.
int default_order_bound(const MtsfmWaveform& w);

/// Dense DFT of exp(j phi) with N >= 8 (2 M_c + 1) samples, also large enough for the
/// waveform's own support so aliasing stays below rounding.
CoefficientSet coefficients(const MtsfmWaveform& w, int order_bound);

/// Coefficients of exp(-j sum_k beta_k cos(k theta)), without the waveform wrapper.
std::vector<std::complex<double>> unit_modulus_coefficients(std::span<const double> beta,
                                                            int order_bound);

/// S(f) = sqrt(E T) sum_m c_m sinc(pi T (f - m/T)), truncated at the set's order bound.
std::complex<double> spectrum(const MtsfmWaveform& w, const CoefficientSet& coeffs, double f);

/// E T |c_m|^2 at the grid bins. Energy beyond the grid is dropped, so the integral is <= E.
SpectralDensity esd_on_grid(const MtsfmWaveform& w, const FrequencyGrid& grid);

/// beta_rms = sqrt((2 pi)^2 / E * integral f^2 E_s(f) df), rad/s.
double rms_bandwidth(const SpectralDensity& esd, double energy);

/// sin(x)/x with the removable singularity filled in.
double sinc(double x);

}  // namespace miwave
