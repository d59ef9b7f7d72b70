#pragma once

// Experiment configuration: flat `key = value` text with one level of
// `[section]` headers. `inf` encodes infinity. Unset keys keep the compiled-in
// reference values.
//
//   [system]     processing_gain sinr_db desensitivity gain_ratio breakpoint_m
//                shadow_macro_db shadow_micro_db height_macro_m height_micro_m
//                height_terminal_m region_side_m hotspot_side_m hotspot_offset_m
//                d_max_m F outage
//   [channel]    profile = none | uniform:<L> | <path to profile file>
//   [sweep]      axis = F | L_p | L ; values = comma separated list
//   [budget]     placements fading_draws selections stats_samples resamples workers
//   [multicell]  m n
//   [run]        seed output stats_cache

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "cdmacap/analytic.hpp"
#include "cdmacap/channel.hpp"
#include "cdmacap/params.hpp"
#include "cdmacap/twocell.hpp"

namespace cdmacap {

enum class SweepAxis : std::uint8_t { power_factor, paths, microcells };

const char* axis_name(SweepAxis axis);

struct ProfileSpec {
  enum class Kind : std::uint8_t { none, uniform, file };
  Kind kind = Kind::none;
  int paths = 0;
  std::filesystem::path file;

  /// Accepts `none`, `inf`, `uniform:<L>` or a file path.
  static ProfileSpec parse(const std::string& text);
  /// Loads file profiles relative to `base_dir`. Empty for `none`.
  std::optional<DelayProfile> resolve(const std::filesystem::path& base_dir = {}) const;
  std::string to_string() const;
};

struct ExperimentConfig {
  SystemParams params;
  ProfileSpec profile;
  SweepAxis axis = SweepAxis::power_factor;
  std::vector<double> values;
  McBudget budget;
  StatsOptions stats;
  std::uint64_t seed = 1;
  int macro_side = 1;
  int subgrid = 5;
  std::filesystem::path output;       // empty: stdout
  std::filesystem::path stats_cache;  // empty: no cache
  std::filesystem::path base_dir;     // relative paths resolve here

  /// Throws ConfigError for inconsistent values.
  void validate() const;
};

/// Throws ConfigError naming `origin` and the offending line.
ExperimentConfig parse_config(std::istream& in, const std::string& origin);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Parses a number or `inf`.
double parse_real(const std::string& text);

/// `P`, `PxD` or `PxDxR`: placements, fading draws, hotspot selections.
void apply_budget(McBudget& budget, const std::string& text);

}  // namespace cdmacap
