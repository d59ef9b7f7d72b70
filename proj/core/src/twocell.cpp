#include "cdmacap/twocell.hpp"

#include <algorithm>

#include "cdmacap/errors.hpp"
#include "cdmacap/parallel.hpp"

namespace cdmacap {

int Scenario::macro_count() const {
  return static_cast<int>(std::count_if(users.begin(), users.end(),
                                        [](const UserRecord& u) { return u.serving == Tier::macro; }));
}

int Scenario::micro_count() const { return static_cast<int>(users.size()) - macro_count(); }

void McBudget::validate() const {
  if (placements < 1) throw ConfigError("placements must be >= 1");
  if (fading_draws < 1) throw ConfigError("fading draws must be >= 1");
  if (selections < 1) throw ConfigError("selections must be >= 1");
}

double CapacityResult::outage_at_n_star() const {
  for (const auto& point : trace)
    if (point.users == n_star) return point.outage;
  return 0.0;
}

UserRecord draw_user(const SystemParams& params, Rng& rng) {
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  UserRecord user;
  const bool in_hotspot = std::bernoulli_distribution(0.5)(rng);
  if (in_hotspot) {
    user.x_m = params.hotspot_offset_m + params.hotspot_side_m * unit(rng);
    user.y_m = params.hotspot_side_m * unit(rng);
  } else {
    user.x_m = params.region_side_m * unit(rng);
    user.y_m = params.region_side_m * unit(rng);
  }
  user.shadow_macro_db = sample_shadow(params.shadow_macro_db, rng);
  user.shadow_micro_db = sample_shadow(params.shadow_micro_db, rng);

  const double d_max = params.normalization_distance();
  const double to_macro =
      slant_distance(user.x_m, user.y_m, params.height_macro_m, params.height_terminal_m);
  const double to_micro = slant_distance(user.x_m - params.hotspot_offset_m, user.y_m,
                                         params.height_micro_m, params.height_terminal_m);
  user.gain_macro = path_gain_normalized(params.macro_base(), to_macro, user.shadow_macro_db, d_max);
  user.gain_micro = path_gain_normalized(params.micro_base(), to_micro, user.shadow_micro_db, d_max);
  user.serving = select_base(params.gain_ratio * user.gain_macro, user.gain_micro,
                             params.desensitivity);
  return user;
}

Scenario generate_scenario(const SystemParams& params, int users, Rng& rng) {
  Scenario scenario;
  scenario.users.reserve(static_cast<std::size_t>(std::max(users, 0)));
  for (int k = 0; k < users; ++k) scenario.users.push_back(draw_user(params, rng));
  return scenario;
}

Tier select_base(double macro_gain, double micro_gain, double desensitivity) {
  return macro_gain >= desensitivity * micro_gain ? Tier::macro : Tier::micro;
}

CrossTierInterference cross_tier_interference(const Scenario& scenario, double gain_ratio,
                                              const FadingDraw* fading) {
  CrossTierInterference total;
  for (std::size_t k = 0; k < scenario.users.size(); ++k) {
    const UserRecord& u = scenario.users[k];
    const double rho_ratio = fading ? fading->rho_macro[k] / fading->rho_micro[k] : 1.0;
    const double macro_over_micro = gain_ratio * u.gain_macro / u.gain_micro * rho_ratio;
    if (u.serving == Tier::micro)
      total.into_macro += macro_over_micro;
    else
      total.into_micro += 1.0 / macro_over_micro;
  }
  return total;
}

std::optional<ReceivedPowers> solve_powers(int macro_users, int micro_users,
                                           const CrossTierInterference& interference,
                                           double pole_capacity) {
  if (macro_users >= pole_capacity || micro_users >= pole_capacity) return std::nullopt;
  const double headroom_macro = pole_capacity - macro_users;
  const double headroom_micro = pole_capacity - micro_users;
  const double denominator =
      headroom_micro * headroom_macro - interference.into_macro * interference.into_micro;
  if (!(denominator > 0.0)) return std::nullopt;
  return ReceivedPowers{(headroom_micro + interference.into_macro) / denominator,
                        (headroom_macro + interference.into_micro) / denominator};
}

bool user_power_exceeds(double received_power, double serving_gain, double rho,
                        double power_factor, double gain_ratio, Tier serving) {
  const double limit = serving == Tier::macro ? power_factor * gain_ratio : power_factor;
  return received_power / (rho * serving_gain) > limit;
}

namespace {

struct PlacementCounts {
  std::int64_t infeasible = 0;
  std::int64_t power_exceeded = 0;
};

/// Outcome of one instant. Returns 0 ok, 1 infeasible, 2 power exceeded.
int classify_instant(const Scenario& scenario, int macro_users, const SystemParams& params,
                     const FadingDraw* fading) {
  const auto interference = cross_tier_interference(scenario, params.gain_ratio, fading);
  const int micro_users = static_cast<int>(scenario.users.size()) - macro_users;
  const auto powers =
      solve_powers(macro_users, micro_users, interference, params.pole_capacity());
  if (!powers) return 1;
  if (std::isinf(params.power_factor)) return 0;
  for (std::size_t k = 0; k < scenario.users.size(); ++k) {
    const UserRecord& u = scenario.users[k];
    const bool macro = u.serving == Tier::macro;
    const double rho = fading ? (macro ? fading->rho_macro[k] : fading->rho_micro[k]) : 1.0;
    if (user_power_exceeds(macro ? powers->macro : powers->micro,
                           macro ? u.gain_macro : u.gain_micro, rho, params.power_factor,
                           params.gain_ratio, u.serving))
      return 2;
  }
  return 0;
}

}  // namespace

OutageEstimate outage_probability_mc(const SystemParams& params, int users,
                                     const DelayProfile* profile, const McBudget& budget,
                                     std::uint64_t seed) {
  budget.validate();
  if (users < 1) throw ConfigError("user count must be >= 1");
  const int draws = profile ? budget.fading_draws : 1;
  std::vector<PlacementCounts> per_placement(static_cast<std::size_t>(budget.placements));

  parallel_for(per_placement.size(), budget.workers, [&](std::size_t i) {
    Rng placement_rng = derive_rng(seed, {stream::kPlacement, i});
    const Scenario scenario = generate_scenario(params, users, placement_rng);
    const int macro_users = scenario.macro_count();
    PlacementCounts counts;
    if (!profile) {
      const int outcome = classify_instant(scenario, macro_users, params, nullptr);
      counts.infeasible += outcome == 1;
      counts.power_exceeded += outcome == 2;
    } else {
      Rng fading_rng = derive_rng(seed, {stream::kFading, i});
      FadingDraw fading{std::vector<double>(scenario.users.size()),
                        std::vector<double>(scenario.users.size())};
      for (int d = 0; d < draws; ++d) {
        for (std::size_t k = 0; k < scenario.users.size(); ++k) {
          fading.rho_macro[k] = sample_rho(*profile, fading_rng);
          fading.rho_micro[k] = sample_rho(*profile, fading_rng);
        }
        const int outcome = classify_instant(scenario, macro_users, params, &fading);
        counts.infeasible += outcome == 1;
        counts.power_exceeded += outcome == 2;
      }
    }
    per_placement[i] = counts;
  });

  PlacementCounts total;
  for (const auto& c : per_placement) {
    total.infeasible += c.infeasible;
    total.power_exceeded += c.power_exceeded;
  }
  OutageEstimate estimate;
  estimate.users = users;
  estimate.trials = static_cast<std::int64_t>(budget.placements) * draws;
  const double trials = static_cast<double>(estimate.trials);
  estimate.infeasible_fraction = total.infeasible / trials;
  estimate.power_exceeded_fraction = total.power_exceeded / trials;
  estimate.outage_fraction = (total.infeasible + total.power_exceeded) / trials;
  return estimate;
}

CapacityResult capacity_search(const SystemParams& params, const DelayProfile* profile,
                               const McBudget& budget, std::uint64_t seed) {
  params.validate();
  CapacityResult result;
  result.method = Method::simulation;
  result.seed = seed;
  const int ceiling = 2 * params.max_users_per_base();
  for (int n = 1; n <= ceiling; ++n) {
    const double outage = outage_probability_mc(params, n, profile, budget, seed).outage_fraction;
    result.trace.push_back({n, outage});
    if (outage > params.outage_target) break;
    result.n_star = n;
  }
  return result;
}

}  // namespace cdmacap
