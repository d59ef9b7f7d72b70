#pragma once

// Orchestration behind the command-line subcommands. Rows come back in sweep
// order; CSV text depends only on the config and seed.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cdmacap/analytic.hpp"
#include "cdmacap/config.hpp"

namespace cdmacap {

struct SweepRow {
  double axis_value = 0.0;
  std::optional<double> n_star_sim;
  std::optional<double> n_star_analytic;
  std::optional<double> outage_at_n_star;
  double v_product = 0.0;
  std::uint64_t seed = 0;
  std::optional<double> spread;  // multicell only
};

/// Loads `config.stats_cache` when it holds statistics for the same
/// parameters, sample counts and seed; otherwise estimates and (if a cache
/// path is set) writes them.
MeanStats obtain_mean_stats(const ExperimentConfig& config);

/// Identity line stored alongside cached statistics.
std::string stats_fingerprint(const ExperimentConfig& config);

/// Two-cell sweep over F or L_p: simulated and analytic capacity per point.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config, const MeanStats& stats);

/// One two-cell point at the configured F and profile.
SweepRow run_capacity(const ExperimentConfig& config, const MeanStats& stats);

/// Multicell sweep over L with M = m^2 macrocells.
std::vector<SweepRow> run_multicell_sweep(const ExperimentConfig& config, const MeanStats& stats);

/// Header `<axis>,N_star_sim,N_star_analytic,outage_at_N_star,v_product,seed`,
/// plus `N_star_sim_std` when `with_spread`.
void write_sweep_csv(std::ostream& out, SweepAxis axis, const std::vector<SweepRow>& rows,
                     bool with_spread = false);

/// `v_macro,v_micro,v_product,p_macro,N_tilde,N_tilde_over_K` for one stats set.
void write_stats_csv(std::ostream& out, const MeanStats& stats);

/// `profile,paths,diversity_factor`.
void write_df_csv(std::ostream& out, const DelayProfile& profile);

/// Fixed-format number: integers without decimals, `inf`, else 4 decimals.
std::string format_number(double x);

}  // namespace cdmacap
