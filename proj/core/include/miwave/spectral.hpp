#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace miwave {

/// Uniform baseband frequency sampling f_m = m/T, m = -M/2..M/2.
///
/// M is ceil(W*T) rounded up to the next even integer so the bin set is
/// symmetric about DC. Because of the rounding, the outermost bin may sit up
/// to 1/T beyond W/2.
class FrequencyGrid {
 public:
  static FrequencyGrid make(double band_width, double duration);

  double band_width() const { return band_width_; }
  double duration() const { return duration_; }
  double spacing() const { return 1.0 / duration_; }
  std::size_t num_bins() const { return freqs_.size(); }
  /// M/2: the largest harmonic index on the grid.
  int half_order() const { return half_order_; }
  /// Harmonic index m of bin i.
  int order(std::size_t i) const { return static_cast<int>(i) - half_order_; }
  double freq(std::size_t i) const { return freqs_[i]; }
  std::span<const double> freqs() const { return freqs_; }

  bool operator==(const FrequencyGrid& other) const;

 private:
  FrequencyGrid(double band_width, double duration, int half_order);

  double band_width_;
  double duration_;
  int half_order_;
  std::vector<double> freqs_;
};

FrequencyGrid make_grid(double band_width, double duration);

/// Nonnegative real density sampled on a FrequencyGrid (PSD or ESD).
class SpectralDensity {
 public:
  SpectralDensity(FrequencyGrid grid, std::vector<double> values);

  static SpectralDensity constant(const FrequencyGrid& grid, double level);

  const FrequencyGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  double max() const;
  double min() const;

 private:
  FrequencyGrid grid_;
  std::vector<double> values_;
};

/// Left-point Riemann sum with the grid spacing 1/T.
double integrate(const SpectralDensity& sd);

// Parametric PSD families. All are even functions of frequency.

struct FlatPsd {
  double level = 1.0;

  bool operator==(const FlatPsd&) const = default;
};

/// n(f) = n_min + (n_max - n_min) (1 - cos(2 pi f / W)) / 2, n_max = n_min * 10^(depth_db/10).
struct NoiseValleyPsd {
  double floor = 1.0;
  double depth_db = 20.0;

  bool operator==(const NoiseValleyPsd&) const = default;
};

/// c(f) = floor + peak_amplitude exp(-f^2 / 2 peak_width^2) + ripple_amplitude cos^2(2 pi f q / W).
struct ClutterPeakPsd {
  double floor = 0.1;
  double peak_amplitude = 1.0;
  double peak_width = 1.0;
  double ripple_amplitude = 0.1;
  double ripple_cycles = 2.0;

  bool operator==(const ClutterPeakPsd&) const = default;
};

/// c(f) = level (1 - notch_depth exp(-f^2 / 2 notch_width^2)).
struct ClutterNotchPsd {
  double level = 1.0;
  double notch_depth = 0.99;
  double notch_width = 1.0;

  bool operator==(const ClutterNotchPsd&) const = default;
};

/// Piecewise-linear interpolation of a (frequency, density) table; held constant past the ends.
struct TablePsd {
  std::vector<double> freqs;
  std::vector<double> values;

  bool operator==(const TablePsd&) const = default;
};

using PsdShape = std::variant<FlatPsd, NoiseValleyPsd, ClutterPeakPsd, ClutterNotchPsd, TablePsd>;

enum class PsdRole {
  noise,    // must be strictly positive
  channel,  // nonnegative
};

SpectralDensity build_parametric_psd(const PsdShape& shape, const FrequencyGrid& grid,
                                     PsdRole role);

/// Reads a two-column whitespace- or comma-separated table. Lines starting with '#' are skipped.
TablePsd load_psd_table(const std::filesystem::path& path);

/// Point-target detection scenario: noise PSD P_n, channel PSD P_h, target variance, energy.
class Scenario {
 public:
  Scenario(SpectralDensity noise_psd, SpectralDensity channel_psd, double target_variance,
           double energy);

  const FrequencyGrid& grid() const { return noise_psd_.grid(); }
  const SpectralDensity& noise_psd() const { return noise_psd_; }
  const SpectralDensity& channel_psd() const { return channel_psd_; }
  double target_variance() const { return target_variance_; }
  double energy() const { return energy_; }

  /// Bins with P_h = 0, where the optimal-ESD formula divides by zero.
  std::vector<std::size_t> zero_channel_bins() const;

  Scenario with_energy(double energy) const;
  Scenario with_target_variance(double target_variance) const;

 private:
  SpectralDensity noise_psd_;
  SpectralDensity channel_psd_;
  double target_variance_;
  double energy_;
};

}  // namespace miwave
