#include "cdmacap/multicell.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cdmacap/errors.hpp"
#include "cdmacap/parallel.hpp"

namespace cdmacap {

MulticellLayout::MulticellLayout(const SystemParams& params, int macro_side, int subgrid,
                                 std::vector<int> hotspots)
    : params_(params),
      macro_side_(macro_side),
      subgrid_(subgrid),
      cell_side_(params.region_side_m),
      hotspots_(std::move(hotspots)),
      macro_(params.macro_base()),
      micro_(params.micro_base()) {
  if (macro_side_ < 1) throw ConfigError("macro grid side must be >= 1");
  if (subgrid_ < 1 || subgrid_ % 2 == 0) throw ConfigError("hotspot sub-grid side must be odd");
  const int candidates = candidate_count(macro_side_, subgrid_);
  std::vector<int> sorted = hotspots_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ConfigError("hotspot indices must be distinct");
  for (int h : hotspots_)
    if (h < 0 || h >= candidates) throw ConfigError("hotspot index out of range");

  for (int row = 0; row < macro_side_; ++row)
    for (int col = 0; col < macro_side_; ++col)
      bases_.push_back({(col + 0.5) * cell_side_, (row + 0.5) * cell_side_, Tier::macro});

  const int per_macro = subgrid_ * subgrid_ - 1;
  const int center = subgrid_ * subgrid_ / 2;
  const double side = hotspot_side_m();
  for (int h : hotspots_) {
    const int cell = h / per_macro;
    int square = h % per_macro;
    if (square >= center) ++square;
    const double x0 = (cell % macro_side_) * cell_side_;
    const double y0 = (cell / macro_side_) * cell_side_;
    bases_.push_back({x0 + (square % subgrid_ + 0.5) * side, y0 + (square / subgrid_ + 0.5) * side,
                      Tier::micro});
  }
}

const BasePropagation& MulticellLayout::propagation(int base) const {
  return bases_.at(static_cast<std::size_t>(base)).tier == Tier::macro ? macro_ : micro_;
}

std::vector<int> choose_hotspots(int macro_side, int subgrid, int count, Rng& rng) {
  const int candidates = MulticellLayout::candidate_count(macro_side, subgrid);
  if (count < 0 || count > candidates)
    throw ConfigError("cannot place " + std::to_string(count) + " microcells in " +
                      std::to_string(candidates) + " candidate squares");
  std::vector<int> pool(static_cast<std::size_t>(candidates));
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < count; ++i) {
    std::uniform_int_distribution<int> pick(i, candidates - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
  }
  pool.resize(static_cast<std::size_t>(count));
  std::sort(pool.begin(), pool.end());
  return pool;
}

MulticellScenario generate_multicell_scenario(const MulticellLayout& layout, int users, Rng& rng) {
  const SystemParams& params = layout.params();
  const int bases = layout.base_count();
  const int macros = layout.macro_count();
  const int micros = layout.micro_count();
  const double d_max = params.normalization_distance();
  const double region = layout.region_side_m();
  const double hotspot = layout.hotspot_side_m();

  MulticellScenario scenario;
  scenario.base_count = bases;
  scenario.gains.resize(static_cast<std::size_t>(users) * bases);
  scenario.serving.resize(static_cast<std::size_t>(users));
  scenario.users_per_base.assign(static_cast<std::size_t>(bases), 0);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution spread_out(static_cast<double>(macros) / (macros + micros));
  std::uniform_int_distribution<int> pick_hotspot(0, std::max(0, micros - 1));

  for (int k = 0; k < users; ++k) {
    double x = 0.0;
    double y = 0.0;
    if (micros == 0 || spread_out(rng)) {
      x = region * unit(rng);
      y = region * unit(rng);
    } else {
      const BaseSite& site = layout.bases()[static_cast<std::size_t>(macros + pick_hotspot(rng))];
      x = site.x_m + hotspot * (unit(rng) - 0.5);
      y = site.y_m + hotspot * (unit(rng) - 0.5);
    }
    int best = 0;
    double best_score = -1.0;
    for (int b = 0; b < bases; ++b) {
      const BaseSite& site = layout.bases()[static_cast<std::size_t>(b)];
      const BasePropagation& prop = layout.propagation(b);
      const double d = slant_distance(x - site.x_m, y - site.y_m, prop.height_m,
                                      params.height_terminal_m);
      const double g =
          path_gain_normalized(prop, d, sample_shadow(prop.shadow_sigma_db, rng), d_max);
      scenario.gains[static_cast<std::size_t>(k) * bases + b] = g;
      const double score =
          site.tier == Tier::macro ? prop.gain_factor * g : params.desensitivity * g;
      if (score > best_score) {
        best = b;
        best_score = score;
      }
    }
    scenario.serving[static_cast<std::size_t>(k)] = best;
    ++scenario.users_per_base[static_cast<std::size_t>(best)];
  }
  return scenario;
}

PowerSolution solve_power_system(std::span<const int> users_per_base,
                                 const Eigen::MatrixXd& coupling, double pole_capacity) {
  const auto n = static_cast<Eigen::Index>(users_per_base.size());
  PowerSolution solution;
  if (coupling.rows() != n || coupling.cols() != n)
    throw ConfigError("coupling matrix size does not match the base count");
  for (int count : users_per_base)
    if (count >= pole_capacity) return solution;

  Eigen::MatrixXd system = -coupling;
  for (Eigen::Index b = 0; b < n; ++b)
    system(b, b) = pole_capacity - users_per_base[static_cast<std::size_t>(b)];
  Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) return solution;
  solution.received = lu.solve(Eigen::VectorXd::Ones(n));
  solution.feasible = (solution.received.array() > 0.0).all();
  return solution;
}

namespace {

/// True-gain ratio T_bk / T_sk to every base b for user k served by s.
std::vector<double> static_ratios(const MulticellLayout& layout, const MulticellScenario& s) {
  const int bases = s.base_count;
  std::vector<double> ratios(s.gains.size());
  for (int k = 0; k < s.users(); ++k) {
    const int serving = s.serving[static_cast<std::size_t>(k)];
    const double own = layout.propagation(serving).gain_factor * s.gain(k, serving);
    for (int b = 0; b < bases; ++b)
      ratios[static_cast<std::size_t>(k) * bases + b] =
          layout.propagation(b).gain_factor * s.gain(k, b) / own;
  }
  return ratios;
}

Eigen::MatrixXd accumulate_coupling(const MulticellScenario& s, const std::vector<double>& ratios,
                                    const std::vector<double>* rho) {
  const int bases = s.base_count;
  Eigen::MatrixXd coupling = Eigen::MatrixXd::Zero(bases, bases);
  for (int k = 0; k < s.users(); ++k) {
    const int serving = s.serving[static_cast<std::size_t>(k)];
    const std::size_t row = static_cast<std::size_t>(k) * bases;
    const double own_rho = rho ? (*rho)[row + serving] : 1.0;
    for (int b = 0; b < bases; ++b) {
      if (b == serving) continue;
      const double fade = rho ? (*rho)[row + b] / own_rho : 1.0;
      coupling(b, serving) += ratios[row + b] * fade;
    }
  }
  return coupling;
}

}  // namespace

Eigen::MatrixXd coupling_matrix(const MulticellLayout& layout, const MulticellScenario& scenario,
                                const std::vector<double>* rho) {
  return accumulate_coupling(scenario, static_ratios(layout, scenario), rho);
}

PowerSolution solve_powers_general(const MulticellLayout& layout,
                                   const MulticellScenario& scenario, double pole_capacity,
                                   const std::vector<double>* rho) {
  return solve_power_system(scenario.users_per_base, coupling_matrix(layout, scenario, rho),
                            pole_capacity);
}

OutageEstimate multicell_outage_mc(const MulticellLayout& layout, int users,
                                   const DelayProfile* profile, const McBudget& budget,
                                   std::uint64_t seed) {
  budget.validate();
  if (users < 1) throw ConfigError("user count must be >= 1");
  const double k = layout.params().pole_capacity();
  const int draws = profile ? budget.fading_draws : 1;
  std::vector<std::int64_t> infeasible(static_cast<std::size_t>(budget.placements), 0);

  parallel_for(infeasible.size(), budget.workers, [&](std::size_t i) {
    Rng rng = derive_rng(seed, {stream::kPlacement, i});
    const MulticellScenario scenario = generate_multicell_scenario(layout, users, rng);
    if (std::any_of(scenario.users_per_base.begin(), scenario.users_per_base.end(),
                    [k](int n) { return n >= k; })) {
      infeasible[i] = draws;
      return;
    }
    const std::vector<double> ratios = static_ratios(layout, scenario);
    if (!profile) {
      infeasible[i] =
          !solve_power_system(scenario.users_per_base, accumulate_coupling(scenario, ratios, nullptr), k)
               .feasible;
      return;
    }
    Rng fading_rng = derive_rng(seed, {stream::kFading, i});
    std::vector<double> rho(scenario.gains.size());
    std::int64_t count = 0;
    for (int d = 0; d < draws; ++d) {
      for (double& r : rho) r = sample_rho(*profile, fading_rng);
      count += !solve_power_system(scenario.users_per_base,
                                   accumulate_coupling(scenario, ratios, &rho), k)
                    .feasible;
    }
    infeasible[i] = count;
  });

  const std::int64_t total = std::accumulate(infeasible.begin(), infeasible.end(), std::int64_t{0});
  OutageEstimate estimate;
  estimate.users = users;
  estimate.trials = static_cast<std::int64_t>(budget.placements) * draws;
  estimate.infeasible_fraction = static_cast<double>(total) / static_cast<double>(estimate.trials);
  estimate.outage_fraction = estimate.infeasible_fraction;
  return estimate;
}

CapacityResult multicell_capacity_search(const MulticellLayout& layout,
                                         const DelayProfile* profile, const McBudget& budget,
                                         std::uint64_t seed) {
  const SystemParams& params = layout.params();
  CapacityResult result;
  result.method = Method::simulation;
  result.seed = seed;
  const int ceiling = layout.base_count() * params.max_users_per_base();
  if (params.outage_target >= 1.0) {
    result.n_star = ceiling;
    return result;
  }
  // Invariant: outage(lo) <= alpha (lo = 0 by convention), outage(hi) > alpha.
  int lo = 0;
  int hi = ceiling + 1;
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    const double outage = multicell_outage_mc(layout, mid, profile, budget, seed).outage_fraction;
    result.trace.push_back({mid, outage});
    if (outage <= params.outage_target)
      lo = mid;
    else
      hi = mid;
  }
  std::sort(result.trace.begin(), result.trace.end(),
            [](const auto& a, const auto& b) { return a.users < b.users; });
  result.n_star = lo;
  return result;
}

MulticellCapacity multicell_capacity_mc(const SystemParams& params, int macro_side, int subgrid,
                                        int microcells, const DelayProfile* profile,
                                        const McBudget& budget, std::uint64_t seed) {
  params.validate();
  budget.validate();
  MulticellCapacity capacity;
  for (int r = 0; r < budget.selections; ++r) {
    const auto sel = static_cast<std::uint64_t>(r);
    Rng selection_rng = derive_rng(seed, {stream::kSelection, sel});
    MulticellLayout layout(params, macro_side, subgrid,
                           choose_hotspots(macro_side, subgrid, microcells, selection_rng));
    capacity.n_star.push_back(
        multicell_capacity_search(layout, profile, budget, derive_seed(seed, {stream::kSelection, sel, 1}))
            .n_star);
  }
  const double n = static_cast<double>(capacity.n_star.size());
  capacity.mean = std::accumulate(capacity.n_star.begin(), capacity.n_star.end(), 0.0) / n;
  double squares = 0.0;
  for (int v : capacity.n_star) squares += (v - capacity.mean) * (v - capacity.mean);
  capacity.spread = std::sqrt(squares / n);
  return capacity;
}

double capacity_multicell_analytic(double pole_capacity, double v_product, int microcells,
                                   int macrocells) {
  if (microcells < 0 || macrocells < 1) throw DomainError("need L >= 0 and M >= 1");
  if (!(v_product >= 0.0)) throw DomainError("v product must be non-negative");
  const double l = microcells;
  const double m = macrocells;
  return pole_capacity * (l + m) / (1.0 + std::sqrt((l / m + m - 1.0) * v_product));
}

double p_loss(double diversity, double v_product) {
  if (!(diversity > 1.0)) throw DomainError("diversity factor must exceed 1");
  if (!(v_product >= 0.0)) throw DomainError("v product must be non-negative");
  const double root = std::sqrt(v_product);
  const double penalty = std::isinf(diversity) ? 1.0 : diversity / (diversity - 1.0);
  return (1.0 + root) / (1.0 + penalty * root);
}

double capacity_multicell_df(double pole_capacity, double v_product, int microcells,
                             int macrocells, double diversity) {
  return p_loss(diversity, v_product) *
         capacity_multicell_analytic(pole_capacity, v_product, microcells, macrocells);
}

}  // namespace cdmacap
