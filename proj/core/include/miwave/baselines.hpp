#pragma once

#include <complex>
#include <vector>

#include "miwave/spectral.hpp"

namespace miwave {

/// Linear FM chirp on [-T/2, T/2): phase pi B t^2 / T, instantaneous frequency B t / T.
struct LfmWaveform {
  double duration;
  double energy;
  double sweep_bandwidth;

  double amplitude() const;
  double phase(double t) const;
  double instantaneous_frequency(double t) const;
};

/// 16 samples per cycle at the sweep edge (and at least 16 per 1/T).
double default_sample_rate(const LfmWaveform& w);

/// With `strict`, sampling below the sweep bandwidth (complex Nyquist) throws; otherwise warns.
std::vector<std::complex<double>> lfm_time_series(const LfmWaveform& w, double sample_rate,
                                                  bool strict = true);

enum class LfmSpectrumMode {
  /// |DFT|^2 of the sampled chirp at the grid bins, renormalized to E.
  sampled,
  /// E / B on [-B/2, B/2] averaged over each bin, renormalized to E on the grid.
  idealized_flat,
};

SpectralDensity lfm_esd(const LfmWaveform& w, const FrequencyGrid& grid,
                        LfmSpectrumMode mode = LfmSpectrumMode::sampled);

/// Finds the sweep B in [0, W] whose ESD has the requested RMS bandwidth (rad/s) to 0.1%.
/// Throws InfeasibleError when the target exceeds what B = W achieves.
LfmWaveform match_rms_bandwidth(double target_beta_rms, double duration, double energy,
                                const FrequencyGrid& grid,
                                LfmSpectrumMode mode = LfmSpectrumMode::sampled);

}  // namespace miwave
