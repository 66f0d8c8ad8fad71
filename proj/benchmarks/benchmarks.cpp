#include <benchmark/benchmark.h>

#include <random>

#include "miwave/detection.hpp"
#include "miwave/fitting.hpp"
#include "miwave/mi_design.hpp"
#include "miwave/mtsfm.hpp"

namespace {

using namespace miwave;

Scenario notch_scenario(double band_width, double energy) {
  const auto g = make_grid(band_width, 1.0);
  return Scenario(build_parametric_psd(NoiseValleyPsd{0.005, 20.0}, g, PsdRole::noise),
                  build_parametric_psd(ClutterNotchPsd{1.0, 0.995, 3.0}, g, PsdRole::channel), 1.0, energy);
}

void BM_DesignMi(benchmark::State& state) {
  const auto s = notch_scenario(static_cast<double>(state.range(0)), 5.0);
  for (auto _ : state) benchmark::DoNotOptimize(design_mi(s));
}
BENCHMARK(BM_DesignMi)->Arg(20)->Arg(200)->Arg(2000);

void BM_Coefficients(benchmark::State& state) {
  std::vector<double> beta(static_cast<std::size_t>(state.range(0)));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (auto& b : beta) b = u(rng);
  const MtsfmWaveform w(1.0, 1.0, beta);
  const int bound = default_order_bound(w);
  for (auto _ : state) benchmark::DoNotOptimize(coefficients(w, bound));
}
BENCHMARK(BM_Coefficients)->Arg(2)->Arg(8)->Arg(16);

void BM_ObjectiveWithGradient(benchmark::State& state) {
  const auto s = notch_scenario(20.0, 5.0);
  const auto t = solve_ofdm_coeffs(design_mi(s).esd, s.grid(), 5.0);
  const int bound = fit_order_bound(t, 0.2);
  const auto beta = feasible_start(static_cast<int>(state.range(0)), t.support_halfwidth, 0.2, 3);
  std::vector<double> grad(beta.size());
  for (auto _ : state) benchmark::DoNotOptimize(objective_with_gradient(beta, t, bound, grad));
}
BENCHMARK(BM_ObjectiveWithGradient)->Arg(4)->Arg(8);

void BM_FitStart(benchmark::State& state) {
  const auto s = notch_scenario(20.0, 5.0);
  const auto t = solve_ofdm_coeffs(design_mi(s).esd, s.grid(), 5.0);
  FitOptions o;
  o.starts = 1;
  o.workers = 1;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    o.seed = seed++;
    benchmark::DoNotOptimize(fit(t, s, o));
  }
}
BENCHMARK(BM_FitStart)->Unit(benchmark::kMillisecond);

void BM_MonteCarlo(benchmark::State& state) {
  const auto s = notch_scenario(20.0, 2.0);
  const auto bins = spectrum_from_esd(design_mi(s).esd);
  MonteCarloOptions o;
  o.trials = static_cast<std::size_t>(state.range(0));
  o.workers = 1;
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_roc(bins, s, o));
}
BENCHMARK(BM_MonteCarlo)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
