// miwave: matched-illumination design, MTSFM synthesis and detection experiments.
//
//   miwave design --config cfg.json [--out DIR]
//   miwave fit    --config cfg.json [--out DIR] [--seed N] [--starts N]
//   miwave roc    --config cfg.json [--out DIR] [--seed N] [--trials N]
//   miwave report --out DIR            (or --config cfg.json to use its output_dir)
//
// Exit codes: 0 success, 2 configuration error, 3 numerical/convergence error.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

#include "miwave/errors.hpp"
#include "miwave/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> starts;
  std::optional<std::size_t> trials;
  unsigned workers = 0;
  bool quiet = false;
};

miwave::ExperimentConfig resolve(const CommonFlags& flags) {
  auto config = miwave::load_config(flags.config);
  if (flags.seed) config.seed = *flags.seed;
  if (flags.starts) config.fit.starts = *flags.starts;
  if (flags.trials) config.monte_carlo.trials = *flags.trials;
  if (!flags.out.empty()) config.output_dir = flags.out;
  // Re-validate after overrides.
  return miwave::parse_config(miwave::serialize_config(config));
}

int emit(const miwave::ExperimentReport& report, const CommonFlags& flags) {
  const auto written = miwave::write_outputs(report, report.config.output_dir);
  if (!flags.quiet) {
    for (const auto& p : written) std::cout << "wrote " << p.string() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matched-illumination waveform design with constant-modulus MTSFM synthesis"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* opt = cmd->add_option("--config,-c", flags.config, "Experiment config (JSON, comments allowed)");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    cmd->add_option("--out,-o", flags.out, "Output directory (overrides config output_dir)");
    cmd->add_option("--workers,-j", flags.workers, "Worker threads (0 = hardware concurrency)");
    cmd->add_flag("--quiet,-q", flags.quiet, "Suppress progress output");
  };

  auto* design = app.add_subcommand("design", "Optimal MI ESD per energy");
  add_common(design, true);

  auto* fit = app.add_subcommand("fit", "Full pipeline: MI design, MTSFM multistart fit, LFM baseline");
  add_common(fit, true);
  fit->add_option("--seed", flags.seed, "RNG seed (overrides config)");
  fit->add_option("--starts", flags.starts, "Multistart count (overrides config)");

  auto* roc = app.add_subcommand("roc", "Monte Carlo validation of the analytic ROC");
  add_common(roc, true);
  roc->add_option("--seed", flags.seed, "RNG seed (overrides config)");
  roc->add_option("--trials", flags.trials, "Monte Carlo H1 trials (overrides config)");

  auto* report = app.add_subcommand("report", "Print the summary of a previous run");
  add_common(report, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  miwave::RunOptions run;
  run.workers = flags.workers;
  run.log = flags.quiet ? nullptr : &std::cerr;

  try {
    if (*design) return emit(miwave::run_design(resolve(flags), run), flags);
    if (*fit) return emit(miwave::run_experiment(resolve(flags), run), flags);
    if (*roc) return emit(miwave::run_roc(resolve(flags), run), flags);
    if (*report) {
      std::filesystem::path dir = flags.out;
      if (dir.empty()) {
        if (flags.config.empty()) throw miwave::ConfigError("report: pass --out or --config");
        dir = miwave::load_config(flags.config).output_dir;
      }
      miwave::print_summary(dir / "summary.json", std::cout);
      return 0;
    }
  } catch (const miwave::ConfigError& e) {
    std::cerr << "miwave: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const miwave::InvalidArgument& e) {
    std::cerr << "miwave: invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const miwave::ConvergenceError& e) {
    std::cerr << "miwave: convergence error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const miwave::UnboundedAllocation& e) {
    std::cerr << "miwave: numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const miwave::InfeasibleError& e) {
    std::cerr << "miwave: numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "miwave: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
