#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "miwave/baselines.hpp"
#include "miwave/detection.hpp"
#include "miwave/errors.hpp"
#include "miwave/mi_design.hpp"
#include "miwave/mtsfm.hpp"
#include "test_support.hpp"

namespace miwave {
namespace {

using std::numbers::pi;

TEST(Lfm, PhaseAndFrequency) {
  const LfmWaveform w{2.0, 1.0, 10.0};
  EXPECT_DOUBLE_EQ(w.phase(0.0), 0.0);
  EXPECT_DOUBLE_EQ(w.phase(1.0), pi * 10.0 / 2.0);
  EXPECT_DOUBLE_EQ(w.instantaneous_frequency(-1.0), -5.0);
  EXPECT_DOUBLE_EQ(w.instantaneous_frequency(1.0), 5.0);
  // Finite-difference derivative of the phase is the instantaneous frequency.
  for (double t : {-0.7, 0.1, 0.9}) {
    const double h = 1e-6;
    EXPECT_NEAR((w.phase(t + h) - w.phase(t - h)) / (2 * h) / (2 * pi), w.instantaneous_frequency(t), 1e-6);
  }
}

TEST(LfmTimeSeries, CwTone) {
  const LfmWaveform w{2.0, 8.0, 0.0};
  for (const auto& x : lfm_time_series(w, 32.0)) EXPECT_EQ(x, std::complex<double>(2.0, 0.0));
}

TEST(LfmTimeSeries, ConstantModulusAndEnergy) {
  for (double b : {0.5, 3.0, 17.0, 150.0}) {
    for (double t : {0.3, 1.0, 4.0}) {
      const LfmWaveform w{t, 2.5, b};
      const auto x = lfm_time_series(w, default_sample_rate(w));
      double energy = 0.0;
      for (const auto& v : x) {
        ASSERT_NEAR(std::abs(v), w.amplitude(), 2e-16 * w.amplitude());
        energy += std::norm(v);
      }
      EXPECT_NEAR(energy * t / static_cast<double>(x.size()), 2.5, 1e-9 * 2.5);
    }
  }
}

TEST(LfmTimeSeries, Validation) {
  const LfmWaveform w{1.0, 1.0, 10.0};
  EXPECT_THROW(lfm_time_series(w, 9.0), InvalidArgument);
  EXPECT_EQ(lfm_time_series(w, 9.0, false).size(), 9u);
  EXPECT_THROW(lfm_time_series(LfmWaveform{1.0, 1.0, -1.0}, 10.0), InvalidArgument);
  EXPECT_THROW(lfm_time_series(LfmWaveform{0.0, 1.0, 1.0}, 10.0), InvalidArgument);
}

TEST(LfmEsd, DcAndEnergy) {
  const auto g = make_grid(20.0, 1.0);
  const auto dc = lfm_esd(LfmWaveform{1.0, 3.0, 0.0}, g);
  EXPECT_NEAR(dc[10], 3.0, 1e-12);
  for (std::size_t i = 0; i < dc.size(); ++i) {
    if (i != 10) EXPECT_NEAR(dc[i], 0.0, 1e-12);
  }
  for (double b : {0.0, 2.0, 7.5, 20.0}) {
    for (auto mode : {LfmSpectrumMode::sampled, LfmSpectrumMode::idealized_flat}) {
      EXPECT_NEAR(integrate(lfm_esd(LfmWaveform{1.0, 3.0, b}, g, mode)), 3.0, 1e-9);
    }
  }
  EXPECT_THROW(lfm_esd(LfmWaveform{2.0, 3.0, 1.0}, g), InvalidArgument);
}

TEST(LfmEsd, LargeTimeBandwidthIsFlat) {
  const auto g = make_grid(160.0, 1.0);
  const LfmWaveform w{1.0, 1.0, 120.0};
  const auto esd = lfm_esd(w, g);
  const double level = 1.0 / 120.0;
  // Fresnel ripple is largest at the sweep edges; test the inner 80% of the band.
  for (std::size_t i = 0; i < esd.size(); ++i) {
    if (std::abs(g.freq(i)) > 0.4 * 120.0) continue;
    const double db = 10.0 * std::log10(esd[i] / level);
    EXPECT_LE(std::abs(db), 1.5) << "f = " << g.freq(i);
  }
  // Energy outside the sweep is small.
  double outside = 0.0;
  for (std::size_t i = 0; i < esd.size(); ++i) {
    if (std::abs(g.freq(i)) > 0.5 * 120.0 + 3.0) outside += esd[i];
  }
  EXPECT_LT(outside, 0.02);
}

TEST(LfmEsd, MatchesDenseDftOfSamples) {
  // Independent route: direct DFT of the sampled chirp at the grid bins.
  const auto g = make_grid(20.0, 1.0);
  const LfmWaveform w{1.0, 1.0, 12.0};
  const auto esd = lfm_esd(w, g);
  const std::size_t n = 4096;
  std::vector<double> ref(g.num_bins());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    std::complex<double> acc{};
    for (std::size_t k = 0; k < n; ++k) {
      const double t = -0.5 + static_cast<double>(k) / n;
      acc += std::polar(1.0, w.phase(t) - 2.0 * pi * g.freq(i) * t);
    }
    ref[i] = std::norm(acc / static_cast<double>(n));
  }
  double total = 0.0;
  for (double v : ref) total += v;
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(esd[i], ref[i] / total, 1e-5);
}

TEST(MatchRms, ZeroAndInfeasible) {
  const auto g = make_grid(20.0, 1.0);
  EXPECT_EQ(match_rms_bandwidth(0.0, 1.0, 1.0, g).sweep_bandwidth, 0.0);
  const double full = rms_bandwidth(lfm_esd(LfmWaveform{1.0, 1.0, 20.0}, g), 1.0);
  EXPECT_THROW(match_rms_bandwidth(1.01 * full, 1.0, 1.0, g), InfeasibleError);
  EXPECT_THROW(match_rms_bandwidth(-1.0, 1.0, 1.0, g), InvalidArgument);
}

TEST(MatchRms, RoundTrip) {
  const auto g = make_grid(20.0, 1.0);
  const double full = rms_bandwidth(lfm_esd(LfmWaveform{1.0, 1.0, 20.0}, g), 1.0);
  for (int i = 1; i <= 20; ++i) {
    const double target = full * i / 20.0;
    for (auto mode : {LfmSpectrumMode::sampled, LfmSpectrumMode::idealized_flat}) {
      const auto w = match_rms_bandwidth(target, 1.0, 1.0, g, mode);
      EXPECT_GE(w.sweep_bandwidth, 0.0);
      EXPECT_LE(w.sweep_bandwidth, 20.0);
      EXPECT_NEAR(rms_bandwidth(lfm_esd(w, g, mode), 1.0), target, 1e-3 * target);
    }
  }
}

TEST(MatchRms, FlatApproximation) {
  const auto g = make_grid(400.0, 1.0);
  const double beta = 2.0 * pi * 200.0 / std::sqrt(12.0);
  const auto w = match_rms_bandwidth(beta, 1.0, 1.0, g);
  EXPECT_NEAR(w.sweep_bandwidth, std::sqrt(12.0) * beta / (2.0 * pi), 0.05 * 200.0);
}

TEST(MatchRms, ClutterPeakDesign) {
  const auto s = testing::clutter_peak(1.0);
  const auto d = design_mi(s);
  const double target = rms_bandwidth(d.esd, 1.0);
  const auto w = match_rms_bandwidth(target, 1.0, 1.0, s.grid());
  const auto esd = lfm_esd(w, s.grid());
  EXPECT_NEAR(rms_bandwidth(esd, 1.0), target, 1e-3 * target);
  EXPECT_LE(detection_metric(esd, s), detection_metric(d.esd, s) + 1e-9);
}

TEST(MatchRms, NeverBeatsMi) {
  for (double e : {0.5, 2.0, 10.0}) {
    for (const auto& [name, s] : testing::scenario_suite(e)) {
      const auto d = design_mi(s);
      const double target = rms_bandwidth(d.esd, e);
      const auto lfm_full = rms_bandwidth(lfm_esd(LfmWaveform{s.grid().duration(), e, s.grid().band_width()}, s.grid()), e);
      if (target > lfm_full) continue;
      const auto w = match_rms_bandwidth(target, s.grid().duration(), e, s.grid());
      EXPECT_LE(detection_metric(lfm_esd(w, s.grid()), s), detection_metric(d.esd, s) + 1e-9) << name;
    }
  }
}

}  // namespace
}  // namespace miwave
