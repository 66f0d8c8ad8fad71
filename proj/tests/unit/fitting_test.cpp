#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "miwave/detection.hpp"
#include "miwave/errors.hpp"
#include "miwave/fitting.hpp"
#include "miwave/mi_design.hpp"
#include "miwave/mtsfm.hpp"
#include "miwave/optimizer.hpp"
#include "test_support.hpp"

namespace miwave {
namespace {

using std::numbers::pi;

TEST(SincMatrix, OnGridIsIdentity) {
  const auto g = make_grid(20.0, 1.3);
  const auto x = sinc_matrix(g, g.half_order());
  EXPECT_TRUE(x.isIdentity(0.0));
}

TEST(SincMatrix, HalfBinOffsetInverts) {
  const auto g = make_grid(12.0, 1.0);
  std::vector<double> f(g.freqs().begin(), g.freqs().end());
  for (auto& v : f) v += 0.5;
  const auto x = sinc_matrix(f, 1.0, g.half_order());
  const Eigen::MatrixXd residual = x * x.inverse() - Eigen::MatrixXd::Identity(x.rows(), x.cols());
  EXPECT_LT(residual.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(SincMatrix, ThreeByThreeClosedForm) {
  const double t = 2.0;
  const std::vector<double> f = {-0.5 / t, 0.0, 0.5 / t};
  const auto x = sinc_matrix(f, t, 1);
  const double a = 2.0 / pi;
  const double b = -2.0 / (3.0 * pi);
  Eigen::Matrix3d expected;
  expected << a, a, b, 0.0, 1.0, 0.0, b, a, a;
  EXPECT_LT((x - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SincMatrix, MustBeSquare) {
  const std::vector<double> f = {0.0, 1.0};
  EXPECT_THROW(sinc_matrix(f, 1.0, 1), InvalidArgument);
  EXPECT_THROW(sinc_matrix(make_grid(4.0, 1.0), 3), InvalidArgument);
}

TEST(SolveOfdm, FlatAndSingleBin) {
  const auto g = make_grid(20.0, 1.0);
  const auto flat = solve_ofdm_coeffs(SpectralDensity::constant(g, 3.0 / 21.0), g, 3.0);
  for (double c : flat.coeffs) EXPECT_NEAR(c, flat.coeffs[0], 1e-15);
  EXPECT_NEAR(flat.power(), 3.0, 1e-12);
  EXPECT_EQ(flat.support_halfwidth, 10);

  std::vector<double> v(21, 0.0);
  v[13] = 2.0;
  const auto one = solve_ofdm_coeffs(SpectralDensity(g, v), g, 2.0);
  for (int m = -10; m <= 10; ++m) {
    if (m == 3) EXPECT_NEAR(one.coefficient(m), std::sqrt(2.0), 1e-15);
    else EXPECT_EQ(one.coefficient(m), 0.0);
  }
  EXPECT_EQ(one.support_halfwidth, 3);
  EXPECT_EQ(one.coefficient(11), 0.0);
}

TEST(SolveOfdm, EnergyBookkeeping) {
  for (double e : {1.0, 4.0}) {
    const auto s = testing::clutter_notch(e);
    const auto d = design_mi(s);
    const auto t = solve_ofdm_coeffs(d.esd, s.grid(), e);
    EXPECT_NEAR(t.power(), integrate(d.esd), 1e-9);
    for (double c : t.coeffs) EXPECT_GE(c, 0.0);
  }
  const auto g = make_grid(4.0, 1.0);
  EXPECT_THROW(solve_ofdm_coeffs(SpectralDensity::constant(make_grid(6.0, 1.0), 1.0), g, 1.0), InvalidArgument);
}

OfdmTarget target_from(std::vector<double> coeffs, double energy) {
  OfdmTarget t;
  t.half_order = static_cast<int>(coeffs.size() / 2);
  t.coeffs = std::move(coeffs);
  t.energy = energy;
  return t;
}

TEST(SupportHalfwidth, Examples) {
  std::vector<double> c(21, 0.0);
  c[10] = 1.0;
  EXPECT_EQ(support_halfwidth(target_from(c, 1.0), 0.01), 0);
  std::fill(c.begin(), c.end(), 0.0);
  for (int m = -5; m <= 5; ++m) c[static_cast<std::size_t>(m + 10)] = 1.0;
  EXPECT_EQ(support_halfwidth(target_from(c, 11.0), 0.01), 5);
  EXPECT_THROW(support_halfwidth(target_from(c, 11.0), 0.0), InvalidArgument);
  EXPECT_THROW(support_halfwidth(target_from(c, 11.0), 0.2), InvalidArgument);
}

TEST(SupportHalfwidth, MatchesExhaustiveScan) {
  for (double e : {0.5, 1.0, 5.0, 10.0}) {
    const auto s = testing::clutter_peak(e);
    const auto t = solve_ofdm_coeffs(design_mi(s).esd, s.grid(), e);
    double total = 0.0;
    for (double c : t.coeffs) total += c * c;
    int expected = -1;
    for (int k = 0; k <= t.half_order && expected < 0; ++k) {
      double inside = 0.0;
      for (int m = -k; m <= k; ++m) inside += t.coefficient(m) * t.coefficient(m);
      if (inside >= 0.99 * total) expected = k;
    }
    EXPECT_EQ(t.support_halfwidth, expected) << "E = " << e;
  }
}

TEST(Objective, Examples) {
  const double e = 2.5;
  std::vector<double> c(21, 0.0);
  c[10] = std::sqrt(e);
  const std::vector<double> zero = {0.0, 0.0};
  EXPECT_NEAR(objective(zero, target_from(c, e), 10), 0.0, 1e-20);

  for (int l : {1, 3, 7}) {
    std::fill(c.begin(), c.end(), 0.0);
    const double n = 2.0 * l + 1.0;
    for (int m = -l; m <= l; ++m) c[static_cast<std::size_t>(m + 10)] = std::sqrt(e / n);
    const double expected = e * e * std::pow(1.0 - 1.0 / n, 2) + 2.0 * l * e * e / (n * n);
    EXPECT_NEAR(objective(zero, target_from(c, e), 10), expected, 1e-12 * expected);
  }
}

TEST(Objective, NonnegativeAndRejectsWildProbes) {
  const auto s = testing::clutter_peak(2.0);
  const auto t = solve_ofdm_coeffs(design_mi(s).esd, s.grid(), 2.0);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> b(6);
    for (auto& v : b) v = u(rng);
    EXPECT_GE(objective(b, t, 40), 0.0);
  }
  const std::vector<double> wild = {1e9, 0.0};
  EXPECT_TRUE(std::isinf(objective(wild, t, 40)));
}

TEST(Objective, AnalyticGradientMatchesFiniteDifference) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.5);
  for (double e : {1.0, 5.0}) {
    const auto s = testing::clutter_peak(e);
    const auto t = solve_ofdm_coeffs(design_mi(s).esd, s.grid(), e);
    const int bound = fit_order_bound(t, 0.2);
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::VectorXd b(8);
      for (auto& v : b) v = u(rng) / (1.0 + trial % 3);
      std::vector<double> g(8);
      objective_with_gradient(std::span<const double>(b.data(), 8), t, bound, g);
      const auto fd = central_difference_gradient(
          [&](const Eigen::VectorXd& p) { return objective(std::span<const double>(p.data(), 8), t, bound); },
          b);
      const double scale = fd.norm();
      for (int k = 0; k < 8; ++k) EXPECT_NEAR(g[static_cast<std::size_t>(k)], fd[k], 1e-4 * scale);
    }
  }
  const std::vector<double> b(3, 0.1);
  std::vector<double> g(2);
  EXPECT_THROW(objective_with_gradient(b, target_from({1.0}, 1.0), 2, g), InvalidArgument);
}

TEST(FeasibleStart, InsideSlab) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const int kappa = 1 + static_cast<int>(seed % 9);
    const auto b = feasible_start(8, kappa, 0.2, seed);
    double s = 0.0;
    for (std::size_t k = 0; k < b.size(); ++k) {
      EXPECT_GE(b[k], 0.0);
      s += static_cast<double>(k + 1) * b[k];
    }
    EXPECT_GE(s, 0.8 * kappa - 1e-12);
    EXPECT_LE(s, 1.2 * kappa + 1e-12);
  }
  EXPECT_EQ(feasible_start(4, 3, 0.2, 9), feasible_start(4, 3, 0.2, 9));
}

FitOptions quick(std::size_t starts, std::uint64_t seed) {
  FitOptions o;
  o.starts = starts;
  o.seed = seed;
  return o;
}

TEST(Fit, PlantedSolution) {
  const auto g = make_grid(40.0, 1.0);
  const Scenario s(SpectralDensity::constant(g, 1.0), SpectralDensity::constant(g, 0.1), 1.0, 2.0);
  const MtsfmWaveform planted(1.0, 2.0, {2.0, 0.7, 0.4});
  const auto t = solve_ofdm_coeffs(esd_on_grid(planted, g), g, 2.0);
  const double sum_k_beta = 2.0 + 1.4 + 1.2;
  ASSERT_GE(sum_k_beta, 0.8 * t.support_halfwidth);
  ASSERT_LE(sum_k_beta, 1.2 * t.support_halfwidth);
  auto o = quick(20, 5);
  o.harmonics = 3;
  const auto r = fit(t, s, o);
  double best = INFINITY;
  for (const auto& x : r) best = std::min(best, x.objective);
  EXPECT_LE(best, 1e-6 * 4.0);
}

TEST(Fit, InvariantsAndOrdering) {
  const auto s = testing::clutter_peak(2.0);
  const auto d = design_mi(s);
  const double mi = detection_metric(d.esd, s);
  const auto t = solve_ofdm_coeffs(d.esd, s.grid(), 2.0);
  const auto r = fit(t, s, quick(12, 3));
  ASSERT_EQ(r.size(), 12u);
  std::vector<bool> seen(12, false);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const auto& x = r[i];
    seen[x.start_index] = true;
    EXPECT_GE(x.objective, 0.0);
    EXPECT_LE(x.d_squared, mi + 1e-9);
    if (i > 0) EXPECT_GE(r[i - 1].d_squared, x.d_squared);
    if (x.converged) {
      EXPECT_GE(x.constraint_value, 0.8 * t.support_halfwidth);
      EXPECT_LE(x.constraint_value, 1.2 * t.support_halfwidth);
    }
    EXPECT_EQ(x.beta.size(), 8u);
    const MtsfmWaveform w(1.0, 2.0, x.beta);
    EXPECT_NEAR(x.d_squared, detection_metric(esd_on_grid(w, s.grid()), s), 1e-12);
  }
  for (bool b : seen) EXPECT_TRUE(b);
}

TEST(Fit, DeterministicAcrossWorkers) {
  const auto s = testing::clutter_notch(5.0);
  const auto t = solve_ofdm_coeffs(design_mi(s).esd, s.grid(), 5.0);
  auto a = quick(8, 11);
  a.workers = 1;
  auto b = a;
  b.workers = 4;
  const auto ra = fit(t, s, a);
  const auto rb = fit(t, s, b);
  ASSERT_EQ(ra.size(), rb.size());
  for (std::size_t i = 0; i < ra.size(); ++i) {
    EXPECT_EQ(ra[i].start_index, rb[i].start_index);
    EXPECT_EQ(ra[i].beta, rb[i].beta);
    EXPECT_EQ(ra[i].objective, rb[i].objective);
    EXPECT_EQ(ra[i].init_beta, rb[i].init_beta);
  }
}

TEST(Fit, FiniteDifferenceModeAgrees) {
  const auto s = testing::clutter_notch(2.0);
  const auto t = solve_ofdm_coeffs(design_mi(s).esd, s.grid(), 2.0);
  auto a = quick(4, 2);
  auto b = a;
  b.gradient = GradientMode::finite_difference;
  const auto ra = fit(t, s, a);
  const auto rb = fit(t, s, b);
  double best_a = INFINITY, best_b = INFINITY;
  for (const auto& x : ra) best_a = std::min(best_a, x.objective);
  for (const auto& x : rb) best_b = std::min(best_b, x.objective);
  EXPECT_NEAR(best_a, best_b, 1e-6 * 4.0);
}

TEST(Fit, ManyStartsSpreadBelowMi) {
  const auto s = testing::clutter_notch(2.0);
  const auto d = design_mi(s);
  const double mi = detection_metric(d.esd, s);
  const auto t = solve_ofdm_coeffs(d.esd, s.grid(), 2.0);
  const auto r = fit(t, s, quick(1000, 1));
  EXPECT_GT(r.front().d_squared, r.back().d_squared);
  EXPECT_LE(r.front().d_squared, mi + 1e-9);
}

TEST(Fit, Errors) {
  const auto s = testing::clutter_notch(2.0);
  const auto t = solve_ofdm_coeffs(design_mi(s).esd, s.grid(), 2.0);
  auto o = quick(2, 1);
  o.delta = 0.0;
  EXPECT_THROW(fit(t, s, o), InvalidArgument);
  o = quick(0, 1);
  EXPECT_THROW(fit(t, s, o), InvalidArgument);
  o = quick(2, 1);
  o.harmonics = 0;
  EXPECT_THROW(fit(t, s, o), InvalidArgument);
  auto empty = t;
  std::fill(empty.coeffs.begin(), empty.coeffs.end(), 0.0);
  EXPECT_THROW(fit(empty, s, quick(2, 1)), InfeasibleError);
  const auto other = testing::make_scenario(10.0, 1.0, FlatPsd{1.0}, FlatPsd{1.0}, 2.0);
  EXPECT_THROW(fit(t, other, quick(2, 1)), InvalidArgument);
}

}  // namespace
}  // namespace miwave
