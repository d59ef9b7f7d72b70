#pragma once

// Mean-method approximations: capacity from mean single-term cross-tier
// interference, its uniform-channel and diversity-factor variants, and the
// outage model combining infeasibility with terminal power limits.
//
// The distributions of single interference terms and of per-user gains are
// estimated by sampling and kept as sorted tables. Infeasibility and the
// conditional mean received powers are then estimated by resampling those
// tables with an equal macro/micro split of the N users.

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "cdmacap/channel.hpp"
#include "cdmacap/params.hpp"
#include "cdmacap/twocell.hpp"

namespace cdmacap {

/// Sorted sample table with empirical quantile and tail lookups.
class EmpiricalTable {
 public:
  EmpiricalTable() = default;
  explicit EmpiricalTable(std::vector<double> samples);

  std::size_t size() const noexcept { return sorted_.size(); }
  bool empty() const noexcept { return sorted_.empty(); }
  const std::vector<double>& values() const noexcept { return sorted_; }
  double operator[](std::size_t i) const { return sorted_[i]; }

  double mean() const noexcept { return mean_; }
  /// Lower empirical quantile, q in [0, 1].
  double quantile(double q) const;
  /// Fraction of samples >= x.
  double fraction_at_least(double x) const;

 private:
  std::vector<double> sorted_;
  double mean_ = 0.0;
};

/// Infeasibility and mean normalized received powers over feasible
/// resamples, for one total user count.
struct PowerMoments {
  int users = 0;
  double infeasible = 1.0;
  double mean_power_macro = 0.0;
  double mean_power_micro = 0.0;
};

struct MeanStats {
  double pole_capacity = 0.0;
  double gain_ratio = 0.0;
  double macro_probability = 0.0;  // p
  /// Terms of I_M (macro/micro true-gain ratio of micro users) and of I_mu.
  EmpiricalTable terms_into_macro;
  EmpiricalTable terms_into_micro;
  /// Normalized serving gain T' of macro users and of micro users.
  EmpiricalTable gain_macro_users;
  EmpiricalTable gain_micro_users;
  std::size_t resamples = 0;
  std::uint64_t seed = 0;
  /// Free-text identity of the inputs (no newlines); used to validate caches.
  std::string provenance;
  /// Infinite-dispersion moments for N = 1 .. moments.size().
  std::vector<PowerMoments> moments;

  double v_macro() const noexcept { return terms_into_macro.mean(); }
  double v_micro() const noexcept { return terms_into_micro.mean(); }
  double v_product() const noexcept { return v_macro() * v_micro(); }
};

struct StatsOptions {
  std::size_t samples = 100000;
  std::size_t resamples = 100000;
  unsigned workers = 1;
};

/// Samples users with the two-cell placement law. Throws ConfigError for
/// fewer than 10^4 samples and EstimationError if either tier gets no users.
MeanStats estimate_mean_stats(const SystemParams& params, const StatsOptions& options,
                              std::uint64_t seed);

/// Resampled infeasibility and conditional mean powers for N users split
/// ceil(N/2) macro / floor(N/2) micro. When `fading_paths` > 0 every term is
/// multiplied by a ratio of i.i.d. unit-mean Gamma(fading_paths) gains.
PowerMoments estimate_power_moments(const MeanStats& stats, int users, int fading_paths,
                                    unsigned workers = 1);

/// 2K / (1 + sqrt(v)).
double capacity_infinite(double pole_capacity, double v_product);

/// 2K / (1 + L/(L-1) sqrt(v)); DomainError for L < 2, where it breaks down.
double capacity_uniform(double pole_capacity, double v_product, int paths);

/// capacity_uniform evaluated at a real-valued diversity order (> 1).
double capacity_at_diversity(double pole_capacity, double v_product, double diversity);

double capacity_by_df(double pole_capacity, double v_product, const DelayProfile& profile);

/// Probability that at least one of N feasible users exceeds its power limit
/// when each user is macro with probability p and then within its limit with
/// probability p_M (macro) or p_mu (micro). Binomial sum in log space.
double prob_power_exceeded(double p, double p_macro, double p_micro, int users);

/// Uniform path count standing in for `profile` on the finite-F path: the
/// integer closest to its diversity factor (at least 1).
int equivalent_paths(const DelayProfile& profile);

struct WithinLimitProbs {
  double macro = 1.0;
  double micro = 1.0;
};

/// Probability that a random macro (micro) user stays within its power limit
/// when its base receives the mean feasible power. With a profile the user's
/// gain carries an independent rho with the equivalent uniform path count.
WithinLimitProbs mean_method_probs(const MeanStats& stats, int users, double power_factor,
                                   double gain_ratio, const DelayProfile* profile = nullptr);
WithinLimitProbs mean_method_probs(const MeanStats& stats, const PowerMoments& moments,
                                   double power_factor, double gain_ratio,
                                   const DelayProfile* profile = nullptr);

/// P_out = P_inf + (1 - P_inf) Pr[P > P_max | N]; F = inf gives P_inf.
double outage_analytic(const MeanStats& stats, int users, double power_factor,
                       const DelayProfile* profile = nullptr);

/// Largest N with outage_analytic <= alpha_out, scanning upward from 1.
CapacityResult capacity_analytic(const MeanStats& stats, const SystemParams& params,
                                 const DelayProfile* profile = nullptr);

/// Plain-text cache: versioned header, scalars, then one section per table.
void save_mean_stats(const MeanStats& stats, std::ostream& out);
MeanStats load_mean_stats(std::istream& in);

}  // namespace cdmacap
