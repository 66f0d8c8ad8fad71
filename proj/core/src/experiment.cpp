#include "miwave/experiment.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "miwave/csv.hpp"
#include "miwave/errors.hpp"
#include "miwave/mtsfm.hpp"
#include "miwave/parallel.hpp"

#ifndef MIWAVE_VERSION
#define MIWAVE_VERSION "0.0.0"
#endif

namespace miwave {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                         const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

PsdShape parse_psd(const json& j, const std::filesystem::path& base_dir, const std::string& where) {
  if (!j.is_object() || !j.contains("kind")) {
    throw ConfigError(where + ": expected an object with a 'kind' field");
  }
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "flat") {
    reject_unknown_keys(j, {"kind", "level"}, where);
    FlatPsd p;
    p.level = get_or(j, "level", p.level);
    return p;
  }
  if (kind == "noise_valley") {
    reject_unknown_keys(j, {"kind", "floor", "depth_db"}, where);
    NoiseValleyPsd p;
    p.floor = get_or(j, "floor", p.floor);
    p.depth_db = get_or(j, "depth_db", p.depth_db);
    return p;
  }
  if (kind == "clutter_peak") {
    reject_unknown_keys(
        j, {"kind", "floor", "peak_amplitude", "peak_width", "ripple_amplitude", "ripple_cycles"}, where);
    ClutterPeakPsd p;
    p.floor = get_or(j, "floor", p.floor);
    p.peak_amplitude = get_or(j, "peak_amplitude", p.peak_amplitude);
    p.peak_width = get_or(j, "peak_width", p.peak_width);
    p.ripple_amplitude = get_or(j, "ripple_amplitude", p.ripple_amplitude);
    p.ripple_cycles = get_or(j, "ripple_cycles", p.ripple_cycles);
    return p;
  }
  if (kind == "clutter_notch") {
    reject_unknown_keys(j, {"kind", "level", "notch_depth", "notch_width"}, where);
    ClutterNotchPsd p;
    p.level = get_or(j, "level", p.level);
    p.notch_depth = get_or(j, "notch_depth", p.notch_depth);
    p.notch_width = get_or(j, "notch_width", p.notch_width);
    return p;
  }
  if (kind == "custom_table") {
    reject_unknown_keys(j, {"kind", "file", "freqs", "values"}, where);
    if (j.contains("file")) {
      std::filesystem::path file = j.at("file").get<std::string>();
      if (file.is_relative()) file = base_dir / file;
      try {
        return load_psd_table(file);
      } catch (const InvalidArgument& e) {
        throw ConfigError(where + ": " + e.what());
      }
    }
    TablePsd p;
    p.freqs = get_or(j, "freqs", p.freqs);
    p.values = get_or(j, "values", p.values);
    return p;
  }
  throw ConfigError(where + ": unknown PSD kind '" + kind + "'");
}

json psd_to_json(const PsdShape& shape) {
  struct Visitor {
    json operator()(const FlatPsd& p) const { return {{"kind", "flat"}, {"level", p.level}}; }
    json operator()(const NoiseValleyPsd& p) const {
      return {{"kind", "noise_valley"}, {"floor", p.floor}, {"depth_db", p.depth_db}};
    }
    json operator()(const ClutterPeakPsd& p) const {
      return {{"kind", "clutter_peak"},          {"floor", p.floor},
              {"peak_amplitude", p.peak_amplitude}, {"peak_width", p.peak_width},
              {"ripple_amplitude", p.ripple_amplitude}, {"ripple_cycles", p.ripple_cycles}};
    }
    json operator()(const ClutterNotchPsd& p) const {
      return {{"kind", "clutter_notch"},
              {"level", p.level},
              {"notch_depth", p.notch_depth},
              {"notch_width", p.notch_width}};
    }
    json operator()(const TablePsd& p) const {
      return {{"kind", "custom_table"}, {"freqs", p.freqs}, {"values", p.values}};
    }
  };
  return std::visit(Visitor{}, shape);
}

const char* to_string(GradientMode m) {
  return m == GradientMode::analytic ? "analytic" : "finite_difference";
}

const char* to_string(LfmSpectrumMode m) {
  return m == LfmSpectrumMode::sampled ? "sampled" : "idealized_flat";
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["scenario"] = {{"name", c.scenario.name},
                   {"band_width", c.scenario.band_width},
                   {"duration", c.scenario.duration},
                   {"target_variance", c.scenario.target_variance},
                   {"noise", psd_to_json(c.scenario.noise)},
                   {"channel", psd_to_json(c.scenario.channel)}};
  j["energies"] = c.energies;
  j["fit"] = {{"harmonics", c.fit.harmonics},         {"delta", c.fit.delta},
              {"starts", c.fit.starts},               {"support_tol", c.fit.support_tol},
              {"max_iterations", c.fit.max_iterations}, {"gradient", to_string(c.fit.gradient)}};
  j["monte_carlo"] = {{"trials", c.monte_carlo.trials},
                      {"p_fa", c.monte_carlo.p_fa},
                      {"null_trial_factor", c.monte_carlo.null_trial_factor}};
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["lfm_spectrum"] = to_string(c.lfm_spectrum);
  j["regularize_zero_channel"] = c.regularize_zero_channel;
  return j;
}

void validate_config(const ExperimentConfig& c) {
  auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
  if (c.energies.empty()) fail("energy list must not be empty");
  for (double e : c.energies) {
    if (!(e > 0.0) || !std::isfinite(e)) fail("energies must be positive and finite");
  }
  if (!(c.scenario.band_width > 0.0)) fail("scenario.band_width must be positive");
  if (!(c.scenario.duration > 0.0)) fail("scenario.duration must be positive");
  if (!(c.scenario.target_variance > 0.0)) fail("scenario.target_variance must be positive");
  if (c.fit.harmonics < 1) fail("fit.harmonics must be at least 1");
  if (!(c.fit.delta > 0.0 && c.fit.delta < 1.0)) fail("fit.delta must lie in (0, 1)");
  if (c.fit.starts < 1) fail("fit.starts must be at least 1");
  if (!(c.fit.support_tol > 0.0 && c.fit.support_tol <= 0.1)) fail("fit.support_tol must lie in (0, 0.1]");
  if (c.fit.max_iterations < 1) fail("fit.max_iterations must be at least 1");
  if (c.monte_carlo.trials < 1000) fail("monte_carlo.trials must be at least 1000");
  if (c.monte_carlo.null_trial_factor < 1) fail("monte_carlo.null_trial_factor must be at least 1");
  for (double p : c.monte_carlo.p_fa) {
    if (!(p > 0.0 && p < 1.0)) fail("monte_carlo.p_fa values must lie in (0, 1)");
  }
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

// Rethrows the active exception with scenario/energy context, preserving its category.
[[noreturn]] void rethrow_with_context(const std::string& context) {
  try {
    throw;
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(context + e.what());
  } catch (const UnboundedAllocation& e) {
    throw UnboundedAllocation(context + e.what());
  } catch (const InfeasibleError& e) {
    throw InfeasibleError(context + e.what());
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(context + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(context + e.what());
  }
}

std::string context_for(const ExperimentConfig& c, double energy) {
  return fmt::format("scenario '{}', E = {}: ", c.scenario.name, energy);
}

DesignOptions design_options(const ExperimentConfig& c) {
  DesignOptions o;
  o.regularize_zero_channel = c.regularize_zero_channel;
  return o;
}

EnergyRecord design_record(const ExperimentConfig& c, double energy) {
  const Scenario scenario = build_scenario(c.scenario, energy);
  auto design = design_mi(scenario, design_options(c));
  EnergyRecord rec{.energy = energy, .design = std::move(design)};
  rec.mi_d_squared = detection_metric(rec.design.esd, scenario);
  rec.mi_rms_bandwidth = rms_bandwidth(rec.design.esd, energy);
  const auto target = solve_ofdm_coeffs(rec.design.esd, scenario.grid(), energy, c.fit.support_tol);
  rec.kappa = target.support_halfwidth;
  return rec;
}

ExperimentReport empty_report(const ExperimentConfig& c) {
  validate_config(c);
  return ExperimentReport{c, config_hash(c), MIWAVE_VERSION, {}};
}

void log_line(const RunOptions& o, const std::string& line) {
  if (o.log != nullptr) *o.log << line << '\n' << std::flush;
}

// Quantile of sorted data, type 7 (linear interpolation between order statistics).
double quantile7(const std::vector<double>& sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

json box_to_json(const BoxSummary& b) {
  return {{"min", b.min},           {"q1", b.q1},
          {"median", b.median},     {"q3", b.q3},
          {"max", b.max},           {"lower_whisker", b.lower_whisker},
          {"upper_whisker", b.upper_whisker}, {"outliers", b.outliers}};
}

const FrequencyGrid& report_grid(const ExperimentReport& r) {
  return r.records.front().design.esd.grid();
}

}  // namespace

// ---------------------------------------------------------------------------

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown_keys(j,
                      {"scenario", "energies", "fit", "monte_carlo", "seed", "output_dir",
                       "lfm_spectrum", "regularize_zero_channel"},
                      "config");

  ExperimentConfig c;
  try {
    if (!j.contains("scenario")) throw ConfigError("config: missing 'scenario'");
    const auto& s = j.at("scenario");
    reject_unknown_keys(s, {"name", "band_width", "duration", "target_variance", "noise", "channel"},
                        "scenario");
    c.scenario.name = get_or(s, "name", c.scenario.name);
    c.scenario.band_width = get_or(s, "band_width", c.scenario.band_width);
    c.scenario.duration = get_or(s, "duration", c.scenario.duration);
    c.scenario.target_variance = get_or(s, "target_variance", c.scenario.target_variance);
    if (!s.contains("noise") || !s.contains("channel")) {
      throw ConfigError("scenario: both 'noise' and 'channel' PSDs are required");
    }
    c.scenario.noise = parse_psd(s.at("noise"), base_dir, "scenario.noise");
    c.scenario.channel = parse_psd(s.at("channel"), base_dir, "scenario.channel");

    c.energies = get_or(j, "energies", c.energies);

    if (j.contains("fit")) {
      const auto& f = j.at("fit");
      reject_unknown_keys(f, {"harmonics", "delta", "starts", "support_tol", "max_iterations", "gradient"},
                          "fit");
      c.fit.harmonics = get_or(f, "harmonics", c.fit.harmonics);
      c.fit.delta = get_or(f, "delta", c.fit.delta);
      c.fit.starts = get_or(f, "starts", c.fit.starts);
      c.fit.support_tol = get_or(f, "support_tol", c.fit.support_tol);
      c.fit.max_iterations = get_or(f, "max_iterations", c.fit.max_iterations);
      const auto g = get_or<std::string>(f, "gradient", to_string(c.fit.gradient));
      if (g == "analytic") {
        c.fit.gradient = GradientMode::analytic;
      } else if (g == "finite_difference") {
        c.fit.gradient = GradientMode::finite_difference;
      } else {
        throw ConfigError("fit.gradient must be 'analytic' or 'finite_difference'");
      }
    }
    if (j.contains("monte_carlo")) {
      const auto& m = j.at("monte_carlo");
      reject_unknown_keys(m, {"trials", "p_fa", "null_trial_factor"}, "monte_carlo");
      c.monte_carlo.trials = get_or(m, "trials", c.monte_carlo.trials);
      c.monte_carlo.p_fa = get_or(m, "p_fa", c.monte_carlo.p_fa);
      c.monte_carlo.null_trial_factor = get_or(m, "null_trial_factor", c.monte_carlo.null_trial_factor);
    }
    c.seed = get_or(j, "seed", c.seed);
    c.output_dir = get_or(j, "output_dir", c.output_dir);
    const auto lfm = get_or<std::string>(j, "lfm_spectrum", to_string(c.lfm_spectrum));
    if (lfm == "sampled") {
      c.lfm_spectrum = LfmSpectrumMode::sampled;
    } else if (lfm == "idealized_flat") {
      c.lfm_spectrum = LfmSpectrumMode::idealized_flat;
    } else {
      throw ConfigError("lfm_spectrum must be 'sampled' or 'idealized_flat'");
    }
    c.regularize_zero_channel = get_or(j, "regularize_zero_channel", c.regularize_zero_channel);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path());
}

std::string serialize_config(const ExperimentConfig& config) {
  return config_to_json(config).dump(2) + "\n";
}

std::string config_hash(const ExperimentConfig& config) {
  // Where results are written does not change them.
  auto j = config_to_json(config);
  j.erase("output_dir");
  const std::string canonical = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return fmt::format("{:016x}", h);
}

Scenario build_scenario(const ScenarioSpec& spec, double energy) {
  const auto grid = make_grid(spec.band_width, spec.duration);
  return Scenario(build_parametric_psd(spec.noise, grid, PsdRole::noise),
                  build_parametric_psd(spec.channel, grid, PsdRole::channel), spec.target_variance,
                  energy);
}

BoxSummary summarize_boxplot(std::span<const double> samples) {
  if (samples.size() < 5) throw InvalidArgument("summarize_boxplot: need at least 5 samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  BoxSummary b;
  b.min = sorted.front();
  b.max = sorted.back();
  b.q1 = quantile7(sorted, 0.25);
  b.median = quantile7(sorted, 0.5);
  b.q3 = quantile7(sorted, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr;
  const double hi_fence = b.q3 + 1.5 * iqr;
  b.lower_whisker = b.max;
  b.upper_whisker = b.min;
  for (double v : sorted) {
    if (v < lo_fence || v > hi_fence) {
      b.outliers.push_back(v);
    } else {
      b.lower_whisker = std::min(b.lower_whisker, v);
      b.upper_whisker = std::max(b.upper_whisker, v);
    }
  }
  return b;
}

ExperimentReport run_design(const ExperimentConfig& config, const RunOptions& options) {
  auto report = empty_report(config);
  for (double energy : config.energies) {
    try {
      report.records.push_back(design_record(config, energy));
    } catch (...) {
      rethrow_with_context(context_for(config, energy));
    }
    const auto& rec = report.records.back();
    log_line(options, fmt::format("E = {}: lambda = {:.6g}, MI d^2 = {:.6g}, kappa = {}", energy,
                                  rec.design.lagrange_lambda, rec.mi_d_squared, rec.kappa));
  }
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  auto report = empty_report(config);
  for (std::size_t ei = 0; ei < config.energies.size(); ++ei) {
    const double energy = config.energies[ei];
    try {
      EnergyRecord rec = design_record(config, energy);
      const Scenario scenario = build_scenario(config.scenario, energy);
      const auto& grid = scenario.grid();

      const auto lfm = match_rms_bandwidth(rec.mi_rms_bandwidth, grid.duration(), energy, grid,
                                           config.lfm_spectrum);
      rec.lfm_esd = lfm_esd(lfm, grid, config.lfm_spectrum);
      rec.lfm_d_squared = detection_metric(*rec.lfm_esd, scenario);
      rec.lfm = lfm;

      const auto target = solve_ofdm_coeffs(rec.design.esd, grid, energy, config.fit.support_tol);
      FitOptions fo;
      fo.harmonics = config.fit.harmonics;
      fo.delta = config.fit.delta;
      fo.starts = config.fit.starts;
      fo.seed = mix_seed(config.seed, ei);
      fo.gradient = config.fit.gradient;
      fo.max_iterations = config.fit.max_iterations;
      fo.workers = options.workers;
      rec.fits = fit(target, scenario, fo);

      std::vector<double> d2;
      for (const auto& r : rec.fits) {
        d2.push_back(r.d_squared);
        if (r.converged) ++rec.converged;
      }
      if (d2.size() >= 5) rec.mtsfm_box = summarize_boxplot(d2);
      const MtsfmWaveform best(grid.duration(), energy, rec.fits.front().beta);
      rec.mtsfm_esd = esd_on_grid(best, grid);

      log_line(options, fmt::format("E = {}: MI d^2 = {:.6g}, LFM d^2 = {:.6g} (B = {:.4g} Hz), "
                                    "MTSFM best d^2 = {:.6g}, {}/{} converged",
                                    energy, rec.mi_d_squared, rec.lfm_d_squared, lfm.sweep_bandwidth,
                                    rec.fits.front().d_squared, rec.converged, rec.fits.size()));
      report.records.push_back(std::move(rec));
    } catch (...) {
      rethrow_with_context(context_for(config, energy));
    }
  }
  return report;
}

ExperimentReport run_roc(const ExperimentConfig& config, const RunOptions& options) {
  auto report = empty_report(config);
  for (std::size_t ei = 0; ei < config.energies.size(); ++ei) {
    const double energy = config.energies[ei];
    try {
      EnergyRecord rec = design_record(config, energy);
      const Scenario scenario = build_scenario(config.scenario, energy);
      MonteCarloOptions mc;
      mc.trials = config.monte_carlo.trials;
      mc.null_trial_factor = config.monte_carlo.null_trial_factor;
      mc.p_fa = config.monte_carlo.p_fa;
      mc.seed = mix_seed(config.seed, ei);
      mc.workers = options.workers;
      rec.roc = monte_carlo_roc(spectrum_from_esd(rec.design.esd), scenario, mc);
      for (const auto& p : rec.roc->points) {
        log_line(options, fmt::format("E = {}: p_fa = {:.4g}, p_d MC = {:.5f} +/- {:.5f}, analytic = {:.5f}",
                                      energy, p.p_fa_hat, p.p_d_hat, p.p_d_stderr,
                                      analytic_pd(rec.mi_d_squared, p.p_fa_hat)));
      }
      report.records.push_back(std::move(rec));
    } catch (...) {
      rethrow_with_context(context_for(config, energy));
    }
  }
  return report;
}

std::string energy_label(double energy) { return "E" + format_number(energy); }

void emit_esd_table(const ExperimentReport& report, const std::filesystem::path& path) {
  if (report.records.empty()) throw InvalidArgument("emit_esd_table: report has no designs");
  const auto& grid = report_grid(report);
  const auto scenario = build_scenario(report.config.scenario, report.records.front().energy);
  const bool with_mtsfm = std::all_of(report.records.begin(), report.records.end(),
                                      [](const EnergyRecord& r) { return r.mtsfm_esd.has_value(); });
  auto out = open_output(path);
  out << "f,P_n,P_h";
  for (const auto& r : report.records) out << ",mi_" << energy_label(r.energy);
  if (with_mtsfm) {
    for (const auto& r : report.records) out << ",mtsfm_" << energy_label(r.energy);
  }
  out << '\n';
  for (std::size_t i = 0; i < grid.num_bins(); ++i) {
    out << format_number(grid.freq(i)) << ',' << format_number(scenario.noise_psd()[i]) << ','
        << format_number(scenario.channel_psd()[i]);
    for (const auto& r : report.records) out << ',' << format_number(r.design.esd[i]);
    if (with_mtsfm) {
      for (const auto& r : report.records) out << ',' << format_number((*r.mtsfm_esd)[i]);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_fit_csv(const EnergyRecord& record, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "start_index,objective,constraint_value,d_squared,converged\n";
  for (const auto& r : record.fits) {
    out << r.start_index << ',' << format_number(r.objective) << ','
        << format_number(r.constraint_value) << ',' << format_number(r.d_squared) << ','
        << (r.converged ? 1 : 0) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_waveform_csv(const EnergyRecord& record, double duration,
                        const std::filesystem::path& path) {
  if (record.fits.empty()) throw InvalidArgument("write_waveform_csv: no fit results");
  const MtsfmWaveform w(duration, record.energy, record.fits.front().beta);
  const double rate = default_sample_rate(w);
  const auto samples = time_series(w, rate);
  const double dt = duration / static_cast<double>(samples.size());
  auto out = open_output(path);
  out << "t,real,imag\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out << format_number(-0.5 * duration + dt * static_cast<double>(i)) << ','
        << format_number(samples[i].real()) << ',' << format_number(samples[i].imag()) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_coefficient_csv(const EnergyRecord& record, double duration,
                           const std::filesystem::path& path) {
  if (record.fits.empty()) throw InvalidArgument("write_coefficient_csv: no fit results");
  const MtsfmWaveform w(duration, record.energy, record.fits.front().beta);
  const auto c = coefficients(w, default_order_bound(w));
  auto out = open_output(path);
  out << "m,real,imag\n";
  for (int m = -c.order_bound(); m <= c.order_bound(); ++m) {
    out << m << ',' << format_number(c(m).real()) << ',' << format_number(c(m).imag()) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_summary_json(const ExperimentReport& report, const std::filesystem::path& path) {
  json j;
  j["provenance"] = {{"config_hash", report.config_hash},
                     {"seed", report.config.seed},
                     {"tool_version", report.tool_version}};
  j["config"] = config_to_json(report.config);
  json records = json::array();
  for (const auto& r : report.records) {
    json rec = {{"energy", r.energy},
                {"lambda", r.design.lagrange_lambda},
                {"achieved_energy", r.design.achieved_energy},
                {"active_bins", r.design.active_set.size()},
                {"kappa", r.kappa},
                {"mi_d_squared", r.mi_d_squared},
                {"mi_rms_bandwidth", r.mi_rms_bandwidth}};
    if (r.lfm) {
      rec["lfm"] = {{"sweep_bandwidth", r.lfm->sweep_bandwidth}, {"d_squared", r.lfm_d_squared}};
    }
    if (!r.fits.empty()) {
      const auto& best = r.fits.front();
      rec["mtsfm"] = {{"starts", r.fits.size()},
                      {"converged", r.converged},
                      {"best_beta", best.beta},
                      {"best_objective", best.objective},
                      {"best_d_squared", best.d_squared},
                      {"best_constraint_value", best.constraint_value}};
      if (r.mtsfm_box) rec["mtsfm"]["d_squared_box"] = box_to_json(*r.mtsfm_box);
      std::size_t above_lfm = 0;
      for (const auto& f : r.fits) above_lfm += f.d_squared > r.lfm_d_squared ? 1 : 0;
      rec["mtsfm"]["fraction_above_lfm"] =
          static_cast<double>(above_lfm) / static_cast<double>(r.fits.size());
    }
    if (r.roc) {
      json pts = json::array();
      for (const auto& p : r.roc->points) {
        pts.push_back({{"p_fa", p.p_fa_hat},
                       {"p_d_empirical", p.p_d_hat},
                       {"p_d_analytic", analytic_pd(r.mi_d_squared, p.p_fa_hat)},
                       {"stderr", p.p_d_stderr}});
      }
      rec["monte_carlo"] = {{"trials", r.roc->trials},
                            {"null_trials", r.roc->null_trials},
                            {"rng_seed", r.roc->rng_seed},
                            {"points", pts}};
    }
    records.push_back(std::move(rec));
  }
  j["records"] = std::move(records);
  auto out = open_output(path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<std::filesystem::path> write_outputs(const ExperimentReport& report,
                                                 const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  if (report.records.empty()) return written;
  const double duration = report_grid(report).duration();

  written.push_back(dir / "esd_table.csv");
  emit_esd_table(report, written.back());
  for (const auto& r : report.records) {
    const auto label = energy_label(r.energy);
    if (!r.fits.empty()) {
      written.push_back(dir / ("fits_" + label + ".csv"));
      write_fit_csv(r, written.back());
      written.push_back(dir / ("waveform_" + label + ".csv"));
      write_waveform_csv(r, duration, written.back());
      written.push_back(dir / ("coefficients_" + label + ".csv"));
      write_coefficient_csv(r, duration, written.back());
    }
    if (r.roc) {
      written.push_back(dir / ("roc_" + label + ".csv"));
      auto out = open_output(written.back());
      write_roc_csv(out, r.mi_d_squared, *r.roc);
    }
  }
  written.push_back(dir / "summary.json");
  write_summary_json(report, written.back());
  return written;
}

void print_summary(const std::filesystem::path& summary_json, std::ostream& out) {
  std::ifstream in(summary_json);
  if (!in) throw ConfigError("cannot open " + summary_json.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(summary_json.string() + ": " + e.what());
  }
  const auto& prov = j.at("provenance");
  out << fmt::format("scenario: {}   config {}   seed {}   miwave {}\n",
                     j.at("config").at("scenario").at("name").get<std::string>(),
                     prov.at("config_hash").get<std::string>(), prov.at("seed").get<std::uint64_t>(),
                     prov.at("tool_version").get<std::string>());
  out << fmt::format("{:>8} {:>10} {:>6} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10} {:>8}\n", "E",
                     "lambda", "kappa", "MI d2", "LFM d2", "min", "Q1", "median", "Q3", ">LFM");
  for (const auto& r : j.at("records")) {
    std::string lfm = "-";
    std::string cols = fmt::format("{:>10} {:>10} {:>10} {:>10} {:>8}", "-", "-", "-", "-", "-");
    if (r.contains("lfm")) lfm = fmt::format("{:.4g}", r.at("lfm").at("d_squared").get<double>());
    if (r.contains("mtsfm") && r.at("mtsfm").contains("d_squared_box")) {
      const auto& b = r.at("mtsfm").at("d_squared_box");
      cols = fmt::format("{:>10.4g} {:>10.4g} {:>10.4g} {:>10.4g} {:>7.1f}%", b.at("min").get<double>(),
                         b.at("q1").get<double>(), b.at("median").get<double>(),
                         b.at("q3").get<double>(),
                         100.0 * r.at("mtsfm").at("fraction_above_lfm").get<double>());
    }
    out << fmt::format("{:>8.4g} {:>10.4g} {:>6} {:>10.4g} {:>10} {}\n", r.at("energy").get<double>(),
                       r.at("lambda").get<double>(), r.at("kappa").get<int>(),
                       r.at("mi_d_squared").get<double>(), lfm, cols);
    if (r.contains("monte_carlo")) {
      for (const auto& p : r.at("monte_carlo").at("points")) {
        out << fmt::format("{:>8} p_fa {:.4g}: p_d MC {:.5f} +/- {:.5f}, analytic {:.5f}\n", "",
                           p.at("p_fa").get<double>(), p.at("p_d_empirical").get<double>(),
                           p.at("stderr").get<double>(), p.at("p_d_analytic").get<double>());
      }
    }
  }
}

}  // namespace miwave
