#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "miwave/baselines.hpp"
#include "miwave/detection.hpp"
#include "miwave/fitting.hpp"
#include "miwave/mi_design.hpp"
#include "miwave/spectral.hpp"

namespace miwave {

struct ScenarioSpec {
  std::string name = "scenario";
  PsdShape noise = NoiseValleyPsd{};
  PsdShape channel = FlatPsd{};
  double band_width = 20.0;
  double duration = 1.0;
  double target_variance = 1.0;

  bool operator==(const ScenarioSpec&) const = default;
};

struct FitSettings {
  int harmonics = 8;
  double delta = 0.2;
  std::size_t starts = 100;
  double support_tol = kDefaultSupportTolerance;
  int max_iterations = 500;
  GradientMode gradient = GradientMode::analytic;

  bool operator==(const FitSettings&) const = default;
};

struct MonteCarloSettings {
  std::size_t trials = 100000;
  std::vector<double> p_fa = {0.01, 0.1};
  std::size_t null_trial_factor = 10;

  bool operator==(const MonteCarloSettings&) const = default;
};

struct ExperimentConfig {
  ScenarioSpec scenario;
  std::vector<double> energies = {1.0};
  FitSettings fit;
  MonteCarloSettings monte_carlo;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  LfmSpectrumMode lfm_spectrum = LfmSpectrumMode::sampled;
  bool regularize_zero_channel = false;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses the JSON config format (comments allowed). `base_dir` resolves relative
/// custom-table paths. Throws ConfigError.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
/// Canonical JSON; tables are written inline so the output is self-contained.
std::string serialize_config(const ExperimentConfig& config);
/// FNV-1a 64 of the canonical serialization without output_dir, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

Scenario build_scenario(const ScenarioSpec& spec, double energy);

struct BoxSummary {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double lower_whisker = 0.0;
  double upper_whisker = 0.0;
  std::vector<double> outliers;
};

/// Type-7 quartiles; outliers lie outside [Q1 - 1.5 IQR, Q3 + 1.5 IQR]. Needs >= 5 samples.
BoxSummary summarize_boxplot(std::span<const double> samples);

struct EnergyRecord {
  double energy = 0.0;
  MiDesign design;
  double mi_d_squared = 0.0;
  double mi_rms_bandwidth = 0.0;
  int kappa = 0;

  // Filled by the full pipeline only.
  std::optional<LfmWaveform> lfm{};
  double lfm_d_squared = 0.0;
  std::optional<SpectralDensity> lfm_esd{};
  std::vector<FitResult> fits{};
  std::optional<SpectralDensity> mtsfm_esd{};  // best fit
  std::optional<BoxSummary> mtsfm_box{};
  std::size_t converged = 0;

  // Filled by the Monte Carlo stage only.
  std::optional<MonteCarloRoc> roc{};
};

struct ExperimentReport {
  ExperimentConfig config;
  std::string config_hash;
  std::string tool_version;
  std::vector<EnergyRecord> records;
};

struct RunOptions {
  unsigned workers = 0;
  /// Progress lines; null for silence.
  std::ostream* log = nullptr;
};

/// MI design and its d^2 at every energy.
ExperimentReport run_design(const ExperimentConfig& config, const RunOptions& options = {});
/// Full pipeline: MI design, OFDM target, multistart MTSFM fit, RMS-matched LFM.
ExperimentReport run_experiment(const ExperimentConfig& config, const RunOptions& options = {});
/// MI design plus Monte Carlo ROC of the MI spectrum at every energy.
ExperimentReport run_roc(const ExperimentConfig& config, const RunOptions& options = {});

/// CSV: f, P_n, P_h, one E_s column per energy, then one MTSFM ESD column per energy when present.
void emit_esd_table(const ExperimentReport& report, const std::filesystem::path& path);
/// CSV rows start_index,objective,constraint_value,d_squared,converged in d^2 order.
void write_fit_csv(const EnergyRecord& record, const std::filesystem::path& path);
void write_summary_json(const ExperimentReport& report, const std::filesystem::path& path);
/// CSV (t, real, imag) of the best-fit MTSFM and (m, real, imag) of its coefficients.
void write_waveform_csv(const EnergyRecord& record, double duration, const std::filesystem::path& path);
void write_coefficient_csv(const EnergyRecord& record, double duration, const std::filesystem::path& path);

/// Writes every artifact of the report under `dir`; returns the paths written.
std::vector<std::filesystem::path> write_outputs(const ExperimentReport& report,
                                                 const std::filesystem::path& dir);

/// Human-readable table from a summary.json produced by write_summary_json.
void print_summary(const std::filesystem::path& summary_json, std::ostream& out);

/// "E<energy>" label used in file names and column headers.
std::string energy_label(double energy);

}  // namespace miwave
