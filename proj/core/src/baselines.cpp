#include "miwave/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

#include "miwave/errors.hpp"
#include "miwave/fourier.hpp"
#include "miwave/mtsfm.hpp"

namespace miwave {

using std::numbers::pi;

namespace {

constexpr double kSamplesPerCycle = 16.0;
constexpr double kMatchTolerance = 1e-3;
constexpr int kMatchIterations = 100;

void validate(const LfmWaveform& w) {
  if (!(w.duration > 0.0)) throw InvalidArgument("LfmWaveform: duration must be positive");
  if (!(w.energy > 0.0)) throw InvalidArgument("LfmWaveform: energy must be positive");
  if (!(w.sweep_bandwidth >= 0.0) || !std::isfinite(w.sweep_bandwidth)) {
    throw InvalidArgument("LfmWaveform: sweep bandwidth must be nonnegative");
  }
}

SpectralDensity normalized(const FrequencyGrid& grid, std::vector<double> values, double energy) {
  SpectralDensity raw(grid, std::move(values));
  const double total = integrate(raw);
  if (!(total > 0.0)) throw InvalidArgument("lfm_esd: chirp has no energy on the grid");
  std::vector<double> scaled(raw.values().begin(), raw.values().end());
  for (double& v : scaled) v *= energy / total;
  return SpectralDensity(grid, std::move(scaled));
}

}  // namespace

double LfmWaveform::amplitude() const { return std::sqrt(energy / duration); }

double LfmWaveform::phase(double t) const { return pi * sweep_bandwidth * t * t / duration; }

double LfmWaveform::instantaneous_frequency(double t) const { return sweep_bandwidth * t / duration; }

double default_sample_rate(const LfmWaveform& w) {
  return kSamplesPerCycle * std::max(0.5 * w.sweep_bandwidth, 1.0 / w.duration);
}

std::vector<std::complex<double>> lfm_time_series(const LfmWaveform& w, double sample_rate,
                                                  bool strict) {
  validate(w);
  if (!(sample_rate > 0.0)) throw InvalidArgument("lfm_time_series: sample rate must be positive");
  if (sample_rate < w.sweep_bandwidth) {
    const std::string msg = "lfm_time_series: sample rate " + std::to_string(sample_rate) +
                            " Hz is below the sweep bandwidth " +
                            std::to_string(w.sweep_bandwidth) + " Hz";
    if (strict) throw InvalidArgument(msg);
    std::cerr << "miwave: warning: " << msg << "\n";
  }
  const auto n = static_cast<std::size_t>(std::max(1.0, std::round(sample_rate * w.duration)));
  const double dt = w.duration / static_cast<double>(n);
  const double a = w.amplitude();
  std::vector<std::complex<double>> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = -0.5 * w.duration + dt * static_cast<double>(i);
    out[i] = std::polar(a, w.phase(t));
  }
  return out;
}

SpectralDensity lfm_esd(const LfmWaveform& w, const FrequencyGrid& grid, LfmSpectrumMode mode) {
  validate(w);
  if (std::abs(grid.duration() - w.duration) > 1e-12 * w.duration) {
    throw InvalidArgument("lfm_esd: grid spacing must be 1/T of the waveform");
  }
  std::vector<double> values(grid.num_bins(), 0.0);

  if (mode == LfmSpectrumMode::idealized_flat) {
    // Bin-averaged: each bin carries its overlap with [-B/2, B/2], so the ESD moves continuously with B.
    const double half = 0.5 * w.sweep_bandwidth;
    const double df = grid.spacing();
    bool any = false;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double f = grid.freq(i);
      const double overlap = std::min(f + 0.5 * df, half) - std::max(f - 0.5 * df, -half);
      if (overlap > 0.0) {
        values[i] = overlap / df;
        any = true;
      }
    }
    if (!any) values[static_cast<std::size_t>(grid.half_order())] = 1.0;
    return normalized(grid, std::move(values), w.energy);
  }

  // The chirp's Fourier-series coefficients decay only like 1/m^2 (kink at the period
  // boundary), so oversample generously to keep aliasing out of the in-band bins.
  const std::size_t order_span = 2 * static_cast<std::size_t>(grid.half_order()) + 1;
  const auto sweep_cycles = static_cast<std::size_t>(std::ceil(w.sweep_bandwidth * w.duration));
  const std::size_t n = next_pow2(std::max<std::size_t>({64 * order_span, 32 * sweep_cycles, 1024}));
  std::vector<std::complex<double>> unit(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = w.duration * (-0.5 + static_cast<double>(i) / static_cast<double>(n));
    unit[i] = std::polar(1.0, w.phase(t));
  }
  const auto c = periodic_coefficients(unit, grid.half_order());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = w.energy * w.duration * std::norm(c[i]);
  }
  return normalized(grid, std::move(values), w.energy);
}

LfmWaveform match_rms_bandwidth(double target_beta_rms, double duration, double energy,
                                const FrequencyGrid& grid, LfmSpectrumMode mode) {
  if (!(target_beta_rms >= 0.0) || !std::isfinite(target_beta_rms)) {
    throw InvalidArgument("match_rms_bandwidth: target must be nonnegative");
  }
  auto rms_at = [&](double b) {
    return rms_bandwidth(lfm_esd(LfmWaveform{duration, energy, b}, grid, mode), energy);
  };
  const double b_max = grid.band_width();
  if (target_beta_rms == 0.0) return LfmWaveform{duration, energy, 0.0};

  const double g_hi = rms_at(b_max) - target_beta_rms;
  if (std::abs(g_hi) <= kMatchTolerance * target_beta_rms) return LfmWaveform{duration, energy, b_max};
  if (g_hi < 0.0) {
    std::ostringstream msg;
    msg << "match_rms_bandwidth: target " << target_beta_rms
        << " rad/s exceeds the RMS bandwidth " << (g_hi + target_beta_rms)
        << " rad/s of a chirp sweeping the full band W = " << b_max << " Hz";
    throw InfeasibleError(msg.str());
  }

  // Illinois variant of regula falsi on [lo, hi].
  double lo = 0.0;
  double hi = b_max;
  double g_lo = rms_at(lo) - target_beta_rms;
  double g_up = g_hi;
  // Flat-spectrum guess B = sqrt(12) beta_rms / (2 pi) seeds the bracket.
  const double guess = std::clamp(std::sqrt(12.0) * target_beta_rms / (2.0 * pi), 0.0, b_max);
  if (guess > lo && guess < hi) {
    const double g = rms_at(guess) - target_beta_rms;
    if (std::abs(g) <= kMatchTolerance * target_beta_rms) return LfmWaveform{duration, energy, guess};
    if (g < 0.0) {
      lo = guess;
      g_lo = g;
    } else {
      hi = guess;
      g_up = g;
    }
  }
  int side = 0;
  for (int iter = 0; iter < kMatchIterations; ++iter) {
    const double b = (lo * g_up - hi * g_lo) / (g_up - g_lo);
    const double g = rms_at(b) - target_beta_rms;
    if (std::abs(g) <= kMatchTolerance * target_beta_rms) return LfmWaveform{duration, energy, b};
    if (g < 0.0) {
      lo = b;
      g_lo = g;
      if (side == -1) g_up *= 0.5;
      side = -1;
    } else {
      hi = b;
      g_up = g;
      if (side == 1) g_lo *= 0.5;
      side = 1;
    }
    if (hi - lo <= 1e-12 * b_max) break;
  }
  std::ostringstream msg;
  msg << "match_rms_bandwidth: no sweep in [" << lo << ", " << hi << "] Hz reaches "
      << target_beta_rms << " rad/s to " << kMatchTolerance << " relative";
  throw ConvergenceError(msg.str());
}

}  // namespace miwave
