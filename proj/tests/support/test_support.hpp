#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include "miwave/spectral.hpp"

namespace miwave::testing {

struct NamedScenario {
  std::string name;
  Scenario scenario;
};

inline Scenario make_scenario(double w, double t, const PsdShape& noise, const PsdShape& channel,
                              double energy, double sigma2 = 1.0) {
  const auto grid = make_grid(w, t);
  return Scenario(build_parametric_psd(noise, grid, PsdRole::noise),
                  build_parametric_psd(channel, grid, PsdRole::channel), sigma2, energy);
}

// The reconstructed scenarios shipped in configs/.
inline Scenario clutter_notch(double energy) {
  return make_scenario(20.0, 1.0, NoiseValleyPsd{0.005, 20.0}, ClutterNotchPsd{1.0, 0.995, 3.0}, energy);
}

inline Scenario clutter_peak(double energy) {
  return make_scenario(20.0, 1.0, NoiseValleyPsd{0.01, 20.0},
                       ClutterPeakPsd{0.2, 5.0, 0.5, 0.5, 2.0}, energy);
}

// Ten scenarios spanning grid sizes, PSD families and levels.
inline std::vector<NamedScenario> scenario_suite(double energy) {
  const TablePsd table{{-6.0, -2.0, 0.0, 3.0, 6.0}, {2.0, 0.3, 0.05, 0.4, 1.5}};
  std::vector<NamedScenario> out;
  out.push_back({"flat", make_scenario(20.0, 1.0, FlatPsd{1.0}, FlatPsd{1.0}, energy)});
  out.push_back({"valley_flat", make_scenario(20.0, 1.0, NoiseValleyPsd{0.1, 20.0}, FlatPsd{0.5}, energy)});
  out.push_back({"clutter_notch", clutter_notch(energy)});
  out.push_back({"clutter_peak", clutter_peak(energy)});
  out.push_back({"notch_wide_grid",
                 make_scenario(40.0, 0.5, NoiseValleyPsd{0.02, 10.0}, ClutterNotchPsd{2.0, 0.9, 4.0}, energy)});
  out.push_back({"peak_fine_grid", make_scenario(8.0, 4.0, NoiseValleyPsd{0.05, 15.0},
                                                 ClutterPeakPsd{0.1, 3.0, 1.0, 0.3, 1.5}, energy, 2.0)});
  out.push_back({"table_noise", make_scenario(12.0, 1.0, table, FlatPsd{0.3}, energy)});
  out.push_back({"table_channel", make_scenario(12.0, 1.0, FlatPsd{0.2}, table, energy, 0.5)});
  out.push_back({"odd_width",
                 make_scenario(7.3, 1.7, NoiseValleyPsd{0.3, 20.0}, ClutterNotchPsd{1.0, 0.5, 1.0}, energy)});
  out.push_back({"strong_clutter", make_scenario(16.0, 1.0, NoiseValleyPsd{0.001, 30.0},
                                                 ClutterPeakPsd{1.0, 10.0, 2.0, 2.0, 3.0}, energy)});
  return out;
}

// Reference d^2 evaluated with a plain loop.
inline double reference_d2(const std::vector<double>& esd, const Scenario& s) {
  double acc = 0.0;
  for (std::size_t i = 0; i < esd.size(); ++i) {
    acc += esd[i] / (s.channel_psd()[i] * esd[i] + s.noise_psd()[i]);
  }
  return s.target_variance() * acc * s.grid().spacing();
}

// Euclidean projection onto {q >= 0, sum q = total}.
inline std::vector<double> project_simplex(std::vector<double> v, double total) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0;
  double theta = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cum += u[i];
    const double t = (cum - total) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  for (double& x : v) x = std::max(x - theta, 0.0);
  return v;
}

// Maximizes d^2 over equal-energy nonnegative ESDs by projected gradient ascent with
// backtracking. Knows nothing about water-filling.
inline std::vector<double> projected_gradient_esd(const Scenario& s, int iterations = 20000) {
  const std::size_t n = s.grid().num_bins();
  const double df = s.grid().spacing();
  const double total = s.energy() / df;
  std::vector<double> q(n, total / static_cast<double>(n));
  double value = reference_d2(q, s);
  double step = 1.0;
  for (int it = 0; it < iterations; ++it) {
    std::vector<double> grad(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double den = s.channel_psd()[i] * q[i] + s.noise_psd()[i];
      grad[i] = s.target_variance() * df * s.noise_psd()[i] / (den * den);
    }
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      std::vector<double> trial(n);
      for (std::size_t i = 0; i < n; ++i) trial[i] = q[i] + step * grad[i];
      trial = project_simplex(std::move(trial), total);
      const double v = reference_d2(trial, s);
      if (v > value) {
        q = std::move(trial);
        value = v;
        step *= 2.0;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return q;
}

// J_m(x) for any integer order.
inline double bessel_j(int m, double x) {
  const double v = std::cyl_bessel_j(static_cast<double>(std::abs(m)), std::abs(x));
  double sign = 1.0;
  if (m < 0 && (m % 2) != 0) sign = -sign;
  if (x < 0.0 && (m % 2) != 0) sign = -sign;
  return sign * v;
}

// (-j)^m
inline std::complex<double> minus_j_pow(int m) {
  static const std::complex<double> cycle[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  return cycle[((m % 4) + 4) % 4];
}

// Fourier coefficient of exp(-j beta cos(k theta)): (-j)^(m/k) J_(m/k)(beta) when k | m.
inline std::complex<double> single_tone_coefficient(int m, int k, double beta) {
  if (m % k != 0) return 0.0;
  return minus_j_pow(m / k) * bessel_j(m / k, beta);
}

}  // namespace miwave::testing
