#include "cdmacap/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cdmacap/errors.hpp"
#include "cdmacap/multicell.hpp"

namespace cdmacap {

std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == std::floor(x) && std::abs(x) < 1e15) {
    std::ostringstream out;
    out << static_cast<long long>(x);
    return out.str();
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

namespace {

std::string optional_cell(const std::optional<double>& x) { return x ? format_number(*x) : ""; }

std::string fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

}  // namespace

std::string stats_fingerprint(const ExperimentConfig& c) {
  const SystemParams& p = c.params;
  std::ostringstream out;
  out.precision(17);
  out << "W/R=" << p.processing_gain << " sinr_db=" << p.sinr_target_db << " delta=" << p.desensitivity
      << " H=" << p.gain_ratio << " b=" << p.breakpoint_m << " sigma=" << p.shadow_macro_db << '/'
      << p.shadow_micro_db << " h=" << p.height_macro_m << '/' << p.height_micro_m << '/'
      << p.height_terminal_m << " S=" << p.region_side_m << " s=" << p.hotspot_side_m
      << " D=" << p.hotspot_offset_m << " d_max=" << p.normalization_distance()
      << " samples=" << c.stats.samples << " resamples=" << c.stats.resamples << " seed=" << c.seed;
  return out.str();
}

MeanStats obtain_mean_stats(const ExperimentConfig& config) {
  const std::string fingerprint = stats_fingerprint(config);
  if (!config.stats_cache.empty()) {
    if (std::ifstream in(config.stats_cache); in) {
      MeanStats cached = load_mean_stats(in);
      if (cached.provenance == fingerprint) return cached;
    }
  }
  StatsOptions options = config.stats;
  options.workers = config.budget.workers;
  MeanStats stats = estimate_mean_stats(config.params, options, config.seed);
  stats.provenance = fingerprint;
  if (!config.stats_cache.empty()) {
    std::ofstream out(config.stats_cache);
    if (!out) throw ConfigError("cannot write stats cache " + config.stats_cache.string());
    save_mean_stats(stats, out);
  }
  return stats;
}

SweepRow run_capacity(const ExperimentConfig& config, const MeanStats& stats) {
  const auto profile = config.profile.resolve(config.base_dir);
  const DelayProfile* fading = profile ? &*profile : nullptr;
  const CapacityResult sim = capacity_search(config.params, fading, config.budget, config.seed);
  const CapacityResult approx = capacity_analytic(stats, config.params, fading);
  SweepRow row;
  row.axis_value = config.params.power_factor;
  row.n_star_sim = sim.n_star;
  row.n_star_analytic = approx.n_star;
  row.outage_at_n_star = sim.outage_at_n_star();
  row.v_product = stats.v_product();
  row.seed = config.seed;
  return row;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config, const MeanStats& stats) {
  config.validate();
  if (config.axis == SweepAxis::microcells)
    throw ConfigError("axis L belongs to multicell-sweep");
  std::vector<SweepRow> rows;
  for (double value : config.values) {
    ExperimentConfig point = config;
    if (config.axis == SweepAxis::power_factor) {
      point.params.power_factor = value;
      rows.push_back(run_capacity(point, stats));
      continue;
    }
    point.profile = std::isinf(value) ? ProfileSpec{}
                                      : ProfileSpec{ProfileSpec::Kind::uniform, static_cast<int>(value), {}};
    const auto profile = point.profile.resolve();
    const DelayProfile* fading = profile ? &*profile : nullptr;
    const CapacityResult sim = capacity_search(point.params, fading, point.budget, point.seed);
    SweepRow row;
    row.axis_value = value;
    row.n_star_sim = sim.n_star;
    row.outage_at_n_star = sim.outage_at_n_star();
    row.v_product = stats.v_product();
    row.seed = point.seed;
    if (std::isinf(point.params.power_factor)) {
      if (std::isinf(value))
        row.n_star_analytic = capacity_infinite(stats.pole_capacity, stats.v_product());
      else if (value >= 2)
        row.n_star_analytic =
            capacity_uniform(stats.pole_capacity, stats.v_product(), static_cast<int>(value));
    } else {
      row.n_star_analytic = capacity_analytic(stats, point.params, fading).n_star;
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<SweepRow> run_multicell_sweep(const ExperimentConfig& config, const MeanStats& stats) {
  config.validate();
  if (config.axis != SweepAxis::microcells) throw ConfigError("multicell-sweep needs axis = L");
  const auto profile = config.profile.resolve(config.base_dir);
  const DelayProfile* fading = profile ? &*profile : nullptr;
  const int macros = config.macro_side * config.macro_side;
  std::vector<SweepRow> rows;
  for (double value : config.values) {
    const int microcells = static_cast<int>(value);
    const MulticellCapacity sim = multicell_capacity_mc(config.params, config.macro_side,
                                                        config.subgrid, microcells, fading,
                                                        config.budget, config.seed);
    SweepRow row;
    row.axis_value = value;
    row.n_star_sim = sim.mean;
    row.spread = sim.spread;
    row.v_product = stats.v_product();
    row.seed = config.seed;
    row.n_star_analytic =
        fading ? capacity_multicell_df(stats.pole_capacity, stats.v_product(), microcells, macros,
                                       diversity_factor(*fading))
               : capacity_multicell_analytic(stats.pole_capacity, stats.v_product(), microcells,
                                             macros);
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, SweepAxis axis, const std::vector<SweepRow>& rows,
                     bool with_spread) {
  out << axis_name(axis) << ",N_star_sim,N_star_analytic,outage_at_N_star,v_product,seed";
  if (with_spread) out << ",N_star_sim_std";
  out << '\n';
  for (const auto& r : rows) {
    out << format_number(r.axis_value) << ',' << optional_cell(r.n_star_sim) << ','
        << optional_cell(r.n_star_analytic) << ',' << optional_cell(r.outage_at_n_star) << ','
        << fixed6(r.v_product) << ',' << r.seed;
    if (with_spread) out << ',' << optional_cell(r.spread);
    out << '\n';
  }
}

void write_stats_csv(std::ostream& out, const MeanStats& stats) {
  const double n_tilde = capacity_infinite(stats.pole_capacity, stats.v_product());
  out << "v_macro,v_micro,v_product,p_macro,N_tilde,N_tilde_over_K\n"
      << fixed6(stats.v_macro()) << ',' << fixed6(stats.v_micro()) << ','
      << fixed6(stats.v_product()) << ',' << fixed6(stats.macro_probability) << ','
      << format_number(n_tilde) << ',' << fixed6(n_tilde / stats.pole_capacity) << '\n';
}

void write_df_csv(std::ostream& out, const DelayProfile& profile) {
  out << "profile,paths,diversity_factor\n"
      << profile.label() << ',' << profile.paths() << ',' << fixed6(diversity_factor(profile))
      << '\n';
}

}  // namespace cdmacap
