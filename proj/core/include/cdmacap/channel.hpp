#pragma once

// Path-gain model, shadow and multipath samplers, delay profiles, and the
// closed-form distributions of the RAKE output gain and its ratios.

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "cdmacap/rng.hpp"

namespace cdmacap {

/// Mean power per resolvable multipath tap, normalized to unit sum so the
/// combined gain has unit mean.
class DelayProfile {
 public:
  /// Normalizes `powers` (linear scale). Throws ConfigError if empty or if
  /// any tap is non-positive or non-finite.
  DelayProfile(std::vector<double> powers, std::string label);

  /// L equal taps of power 1/L.
  static DelayProfile uniform(int paths);

  const std::vector<double>& taps() const noexcept { return taps_; }
  const std::string& label() const noexcept { return label_; }
  int paths() const noexcept { return static_cast<int>(taps_.size()); }
  bool is_uniform() const noexcept { return uniform_; }

 private:
  std::vector<double> taps_;
  std::string label_;
  bool uniform_ = false;
};

/// Reads a profile: one tap per line, `<power_dB>` or `<delay_ns> <power_dB>`,
/// `#` starts a comment. Delays are accepted and discarded.
DelayProfile parse_profile(std::istream& in, std::string label);
DelayProfile load_profile(const std::filesystem::path& path);

struct BasePropagation {
  double breakpoint_m = 100.0;
  double gain_factor = 1.0;  // H_l; only ratios between bases matter
  double shadow_sigma_db = 0.0;
  double height_m = 10.0;

  /// Throws ConfigError unless b > 0, sigma >= 0, H > 0 and the antenna is
  /// above the terminal.
  void validate(double terminal_height_m) const;
};

/// Slant distance between a terminal and a base antenna.
double slant_distance(double dx, double dy, double base_height_m, double terminal_height_m);

/// Dual-slope gain normalized to d_max:
///   (d_max/d)^2 (d_max/b)^2 10^(z/10)  for d < b
///   (d_max/d)^4 10^(z/10)              for d >= b.
/// The full local-mean gain is H_l (b/d_max)^4 times this value.
double path_gain_normalized(const BasePropagation& base, double distance_m, double shadow_db,
                            double d_max_m);

/// Zero-mean Gaussian shadowing in dB.
double sample_shadow(double sigma_db, Rng& rng);

/// RAKE output gain: sum of independent exponential tap powers with the
/// profile's means. Unit mean.
double sample_rho(const DelayProfile& profile, Rng& rng);

/// Density of the RAKE output gain for L i.i.d. Rayleigh taps (unit-mean
/// Gamma with shape L).
double rho_pdf_uniform(double x, int paths);

/// Gamma CDF matching rho_pdf_uniform; exact finite sum for integer shape.
double rho_cdf_uniform(double x, int paths);

/// E{1/rho} = L/(L-1); throws DomainError for L <= 1, where it diverges.
double mean_inverse_rho(int paths);

/// Distribution of kappa = rho1/rho2 for i.i.d. unit-mean Gamma(L) gains.
/// Factorial ratios are evaluated in log space.
double kappa_pdf(double x, int paths);
double kappa_cdf(double x, int paths);

/// (sum E{r_n})^2 / sum E{r_n}^2, i.e. mean^2 / variance of rho.
double diversity_factor(const DelayProfile& profile);

}  // namespace cdmacap
