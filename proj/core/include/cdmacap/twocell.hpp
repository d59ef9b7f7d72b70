#pragma once

// One macrocell with one embedded hotspot microcell: scenario generation,
// base selection, cross-tier interference, power control feasibility and
// Monte Carlo outage / capacity estimation.

#include <cstdint>
#include <optional>
#include <vector>

#include "cdmacap/channel.hpp"
#include "cdmacap/params.hpp"
#include "cdmacap/rng.hpp"

namespace cdmacap {

enum class Tier : std::uint8_t { macro, micro };

struct UserRecord {
  double x_m = 0.0;  // macro base at the origin
  double y_m = 0.0;
  double shadow_macro_db = 0.0;
  double shadow_micro_db = 0.0;
  double gain_macro = 0.0;  // normalized local-mean gain, without H
  double gain_micro = 0.0;
  Tier serving = Tier::macro;
};

struct Scenario {
  std::vector<UserRecord> users;

  int macro_count() const;
  int micro_count() const;
};

/// Per-user RAKE gains toward each base for one time instant.
struct FadingDraw {
  std::vector<double> rho_macro;
  std::vector<double> rho_micro;
};

struct CrossTierInterference {
  double into_macro = 0.0;  // I_M, summed over micro users
  double into_micro = 0.0;  // I_mu, summed over macro users
};

/// Received powers at the two bases, normalized by the noise power.
struct ReceivedPowers {
  double macro = 0.0;
  double micro = 0.0;
};

struct OutageEstimate {
  int users = 0;
  std::int64_t trials = 0;
  double outage_fraction = 0.0;
  double infeasible_fraction = 0.0;
  double power_exceeded_fraction = 0.0;
};

struct McBudget {
  int placements = 200;
  int fading_draws = 200;
  int selections = 24;
  unsigned workers = 1;

  void validate() const;
};

enum class Method : std::uint8_t { simulation, analytic };

struct CapacityResult {
  struct Point {
    int users;
    double outage;
  };

  int n_star = 0;
  std::vector<Point> trace;  // ascending in users
  Method method = Method::simulation;
  std::uint64_t seed = 0;

  /// Outage recorded at n_star (0 when n_star is 0 or absent from the trace).
  double outage_at_n_star() const;
};

/// Draws one user: with probability 1/2 uniform in the hotspot square, else
/// uniform in the full region; independent shadowing toward each base.
UserRecord draw_user(const SystemParams& params, Rng& rng);

/// N users drawn in sequence from `rng`; the first k users do not depend on N.
Scenario generate_scenario(const SystemParams& params, int users, Rng& rng);

/// Macro iff macro_gain >= delta * micro_gain, with both gains on a common
/// scale (the macro side already carries H). Ties go to the macrocell.
Tier select_base(double macro_gain, double micro_gain, double desensitivity);

/// Sums of true-gain ratios across tiers. Without fading the channel is
/// infinitely dispersive (rho = 1).
CrossTierInterference cross_tier_interference(const Scenario& scenario, double gain_ratio,
                                              const FadingDraw* fading = nullptr);

/// Closed-form two-base power control. Empty when infeasible: a base at or
/// beyond pole capacity, or a non-positive common denominator.
std::optional<ReceivedPowers> solve_powers(int macro_users, int micro_users,
                                           const CrossTierInterference& interference,
                                           double pole_capacity);

/// True iff the user's required transmit power exceeds P_max:
/// S'/(rho T') > F for a micro user, > F H for a macro user.
bool user_power_exceeds(double received_power, double serving_gain, double rho,
                        double power_factor, double gain_ratio, Tier serving);

/// Outage over `placements` scenarios times `fading_draws` fading instants
/// (one instant when `profile` is null). Placement i uses streams derived from
/// (seed, i), so the result does not depend on the worker count.
OutageEstimate outage_probability_mc(const SystemParams& params, int users,
                                     const DelayProfile* profile, const McBudget& budget,
                                     std::uint64_t seed);

/// Linear scan over N from 1 with the same seed at every N; stops at the first
/// N whose outage exceeds alpha_out and returns the last N at or below it.
/// The scan never passes 2 * max_users_per_base, beyond which every
/// placement is infeasible.
CapacityResult capacity_search(const SystemParams& params, const DelayProfile* profile,
                               const McBudget& budget, std::uint64_t seed);

}  // namespace cdmacap
