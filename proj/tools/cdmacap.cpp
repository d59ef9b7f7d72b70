// cdmacap: two-tier CDMA uplink capacity experiments.
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "cdmacap/config.hpp"
#include "cdmacap/errors.hpp"
#include "cdmacap/experiment.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string budget;
  std::optional<double> outage;
  std::optional<unsigned> workers;
  std::string output;
  std::string power_factor;
  std::string profile;
  std::string cache;
  std::string axis;
  std::string values;
  std::optional<int> macro_side;
  std::optional<int> subgrid;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "Experiment config file");
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--budget", o.budget, "Monte Carlo budget: P, PxD or PxDxR");
  cmd->add_option("--outage", o.outage, "Target outage probability (default 0.05)");
  cmd->add_option("--workers", o.workers, "Worker threads");
  cmd->add_option("--output", o.output, "CSV output path (default stdout)");
  cmd->add_option("--cache", o.cache, "Mean-statistics cache file");
}

cdmacap::ExperimentConfig build_config(const CommonOptions& o) {
  using namespace cdmacap;
  ExperimentConfig config = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  if (o.seed) config.seed = *o.seed;
  if (!o.budget.empty()) apply_budget(config.budget, o.budget);
  if (o.outage) config.params.outage_target = *o.outage;
  if (o.workers) {
    config.budget.workers = *o.workers;
    config.stats.workers = *o.workers;
  }
  if (!o.output.empty()) config.output = o.output;
  if (!o.cache.empty()) config.stats_cache = o.cache;
  if (!o.power_factor.empty()) config.params.power_factor = parse_real(o.power_factor);
  if (!o.profile.empty()) {
    config.profile = ProfileSpec::parse(o.profile);
    config.base_dir.clear();
  }
  if (!o.axis.empty()) {
    std::istringstream in("[sweep]\naxis = " + o.axis + "\n");
    config.axis = parse_config(in, "--axis").axis;
  }
  if (!o.values.empty()) {
    std::istringstream in("[sweep]\nvalues = " + o.values + "\n");
    config.values = parse_config(in, "--values").values;
  }
  if (o.macro_side) config.macro_side = *o.macro_side;
  if (o.subgrid) config.subgrid = *o.subgrid;
  config.validate();
  return config;
}

template <class Fn>
void with_output(const cdmacap::ExperimentConfig& config, Fn&& fn) {
  if (config.output.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream out(config.output);
  if (!out) throw cdmacap::ConfigError("cannot write " + config.output.string());
  fn(out);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace cdmacap;
  CLI::App app{"Two-tier CDMA uplink capacity: Monte Carlo simulation and mean-method analysis"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string profile_file;

  auto* df = app.add_subcommand("df", "Print the diversity factor of a delay-profile file");
  df->add_option("profile", profile_file, "Profile file")->required();
  add_common(df, opts);

  auto* estimate = app.add_subcommand("estimate-v", "Estimate and cache mean interference statistics");
  add_common(estimate, opts);

  auto* capacity = app.add_subcommand("capacity", "Two-cell capacity at one operating point");
  add_common(capacity, opts);
  capacity->add_option("--F", opts.power_factor, "Power parameter F (number or inf)");
  capacity->add_option("--profile", opts.profile, "none | uniform:<L> | <profile file>");

  auto* sweep = app.add_subcommand("sweep", "Two-cell capacity swept over F or L_p");
  add_common(sweep, opts);
  sweep->add_option("--F", opts.power_factor, "Power parameter F (number or inf)");
  sweep->add_option("--profile", opts.profile, "none | uniform:<L> | <profile file>");
  sweep->add_option("--axis", opts.axis, "F or L_p");
  sweep->add_option("--values", opts.values, "Comma separated sweep values");

  auto* multi = app.add_subcommand("multicell-sweep", "Multicell capacity swept over L");
  add_common(multi, opts);
  multi->add_option("--profile", opts.profile, "none | uniform:<L> | <profile file>");
  multi->add_option("--values", opts.values, "Comma separated microcell counts");
  multi->add_option("--m", opts.macro_side, "Macro grid side (M = m^2)");
  multi->add_option("--n", opts.subgrid, "Hotspot sub-grid side per macrocell (odd)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (df->parsed()) {
      const ExperimentConfig config = build_config(opts);
      const DelayProfile profile = load_profile(profile_file);
      with_output(config, [&](std::ostream& out) { write_df_csv(out, profile); });
      return 0;
    }
    if (multi->parsed()) opts.axis = "L";
    ExperimentConfig config = build_config(opts);
    if (estimate->parsed() && config.stats_cache.empty()) config.stats_cache = "meanstats.txt";
    const MeanStats stats = obtain_mean_stats(config);

    if (estimate->parsed()) {
      with_output(config, [&](std::ostream& out) { write_stats_csv(out, stats); });
    } else if (capacity->parsed()) {
      const SweepRow row = run_capacity(config, stats);
      with_output(config, [&](std::ostream& out) {
        write_sweep_csv(out, SweepAxis::power_factor, {row});
      });
    } else if (sweep->parsed()) {
      const auto rows = run_sweep(config, stats);
      with_output(config, [&](std::ostream& out) { write_sweep_csv(out, config.axis, rows); });
    } else if (multi->parsed()) {
      const auto rows = run_multicell_sweep(config, stats);
      with_output(config, [&](std::ostream& out) {
        write_sweep_csv(out, SweepAxis::microcells, rows, true);
      });
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}
