#pragma once

// Grids of M = m^2 macrocells, each split into n x n candidate hotspot
// squares, with L microcells placed at the centers of selected squares.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cdmacap/channel.hpp"
#include "cdmacap/params.hpp"
#include "cdmacap/rng.hpp"
#include "cdmacap/twocell.hpp"

namespace cdmacap {

struct BaseSite {
  double x_m = 0.0;
  double y_m = 0.0;
  Tier tier = Tier::macro;
};

/// Region [0, m S]^2 of abutting S x S macrocell squares. Bases are ordered
/// macros first (row-major), then micros in hotspot-index order.
class MulticellLayout {
 public:
  /// `hotspots` indexes candidate squares, 0 .. m^2 (n^2 - 1) - 1, macro by
  /// macro; each macro's center square is never a candidate. n must be odd.
  MulticellLayout(const SystemParams& params, int macro_side, int subgrid,
                  std::vector<int> hotspots);

  int macro_side() const noexcept { return macro_side_; }
  int subgrid() const noexcept { return subgrid_; }
  int macro_count() const noexcept { return macro_side_ * macro_side_; }
  int micro_count() const noexcept { return static_cast<int>(hotspots_.size()); }
  int base_count() const noexcept { return static_cast<int>(bases_.size()); }
  double region_side_m() const noexcept { return macro_side_ * cell_side_; }
  double hotspot_side_m() const noexcept { return cell_side_ / subgrid_; }

  const std::vector<int>& hotspots() const noexcept { return hotspots_; }
  const std::vector<BaseSite>& bases() const noexcept { return bases_; }
  const BasePropagation& propagation(int base) const;
  const SystemParams& params() const noexcept { return params_; }

  static int candidate_count(int macro_side, int subgrid) {
    return macro_side * macro_side * (subgrid * subgrid - 1);
  }

 private:
  SystemParams params_;
  int macro_side_;
  int subgrid_;
  double cell_side_;
  std::vector<int> hotspots_;
  std::vector<BaseSite> bases_;
  BasePropagation macro_;
  BasePropagation micro_;
};

/// L distinct candidate squares chosen uniformly, in ascending order.
std::vector<int> choose_hotspots(int macro_side, int subgrid, int count, Rng& rng);

/// Users with per-base normalized local-mean gains (row-major, user x base,
/// without H) and the serving base index.
struct MulticellScenario {
  int base_count = 0;
  std::vector<double> gains;
  std::vector<int> serving;
  std::vector<int> users_per_base;

  int users() const noexcept { return static_cast<int>(serving.size()); }
  double gain(int user, int base) const {
    return gains[static_cast<std::size_t>(user) * base_count + base];
  }
};

/// Each user: with probability M/(L+M) uniform over the region, else uniform
/// in one of the L hotspots chosen uniformly. Assignment maximizes the
/// H-weighted (macro) or delta-weighted (micro) mean gain; ties favor the
/// lowest base index.
MulticellScenario generate_multicell_scenario(const MulticellLayout& layout, int users, Rng& rng);

struct PowerSolution {
  Eigen::VectorXd received;  // normalized by noise power
  bool feasible = false;
};

/// Solves (K - N_b) S_b - sum_{b' != b} G_{bb'} S_{b'} = 1. Feasible iff every
/// N_b < K, the system is non-singular and all S_b > 0.
PowerSolution solve_power_system(std::span<const int> users_per_base,
                                 const Eigen::MatrixXd& coupling, double pole_capacity);

/// Coupling G_{bb'} = sum over users k served by b' of T_bk / T_b'k, using true
/// gains (H applied) times rho when `rho` (user x base, row-major) is given.
Eigen::MatrixXd coupling_matrix(const MulticellLayout& layout, const MulticellScenario& scenario,
                                const std::vector<double>* rho = nullptr);

PowerSolution solve_powers_general(const MulticellLayout& layout,
                                   const MulticellScenario& scenario, double pole_capacity,
                                   const std::vector<double>* rho = nullptr);

/// Feasibility-only outage over placements x fading draws for one layout.
OutageEstimate multicell_outage_mc(const MulticellLayout& layout, int users,
                                   const DelayProfile* profile, const McBudget& budget,
                                   std::uint64_t seed);

/// Capacity for one layout. Outage is treated as nondecreasing in N, and the
/// first N above alpha_out is located by bisection over
/// [1, bases * max_users_per_base + 1].
CapacityResult multicell_capacity_search(const MulticellLayout& layout,
                                         const DelayProfile* profile, const McBudget& budget,
                                         std::uint64_t seed);

struct MulticellCapacity {
  std::vector<int> n_star;  // per hotspot selection
  double mean = 0.0;
  double spread = 0.0;  // population standard deviation
};

/// Capacity averaged over `budget.selections` random hotspot selections.
MulticellCapacity multicell_capacity_mc(const SystemParams& params, int macro_side, int subgrid,
                                        int microcells, const DelayProfile* profile,
                                        const McBudget& budget, std::uint64_t seed);

/// K (L+M) / (1 + sqrt((L/M + M - 1) v)).
double capacity_multicell_analytic(double pole_capacity, double v_product, int microcells,
                                   int macrocells);

/// (1 + sqrt(v)) / (1 + DF/(DF-1) sqrt(v)).
double p_loss(double diversity, double v_product);

double capacity_multicell_df(double pole_capacity, double v_product, int microcells,
                             int macrocells, double diversity);

}  // namespace cdmacap
