#pragma once

#include <cmath>
#include <limits>
#include <optional>

#include "cdmacap/channel.hpp"

namespace cdmacap {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// System parameters. Defaults are the reference two-cell deployment:
/// W/R = 128, 7 dB SINR target, H_M = 10 H_mu, b = 100 m, sigma 8/4 dB,
/// heights 60/9/1.5 m, S = 1 km, s = 200 m, D = 300 m.
///
/// Powers are normalized by the noise power eta*W, so the terminal power
/// limit enters only through the dimensionless F.
struct SystemParams {
  double processing_gain = 128.0;  // W/R
  double sinr_target_db = 7.0;     // Gamma
  double desensitivity = 1.0;      // delta
  double gain_ratio = 10.0;        // H = H_M / H_mu
  double breakpoint_m = 100.0;     // shared by both tiers
  double shadow_macro_db = 8.0;
  double shadow_micro_db = 4.0;
  double height_macro_m = 60.0;
  double height_micro_m = 9.0;
  double height_terminal_m = 1.5;
  double region_side_m = 1000.0;   // S
  double hotspot_side_m = 200.0;   // s
  double hotspot_offset_m = 300.0; // D, along +x from the macro base
  std::optional<double> d_max_m;   // defaults to S / sqrt(2)
  double power_factor = kInfinity; // F
  double outage_target = 0.05;     // alpha_out

  /// K = 1 + (W/R) / Gamma.
  double pole_capacity() const {
    return 1.0 + processing_gain / std::pow(10.0, sinr_target_db / 10.0);
  }
  double normalization_distance() const {
    return d_max_m.value_or(region_side_m / std::sqrt(2.0));
  }
  /// Largest integer count a single base can serve (N_b < K).
  int max_users_per_base() const { return static_cast<int>(std::ceil(pole_capacity())) - 1; }

  BasePropagation macro_base() const {
    return {breakpoint_m, gain_ratio, shadow_macro_db, height_macro_m};
  }
  BasePropagation micro_base() const {
    return {breakpoint_m, 1.0, shadow_micro_db, height_micro_m};
  }

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

}  // namespace cdmacap
