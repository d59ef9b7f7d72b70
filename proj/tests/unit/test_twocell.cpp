#include <cmath>
#include <random>

#include "cdmacap/channel.hpp"
#include "cdmacap/errors.hpp"
#include "cdmacap/params.hpp"
#include "cdmacap/rng.hpp"
#include "cdmacap/twocell.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cdmacap;

namespace {

const double kK = SystemParams{}.pole_capacity();

bool in_hotspot(const SystemParams& p, const UserRecord& u) {
  const double h = p.hotspot_side_m / 2;
  return std::abs(u.x_m - p.hotspot_offset_m) <= h && std::abs(u.y_m) <= h;
}

}  // namespace

TEST_CASE("pole capacity of the reference system") {
  CHECK(kK == doctest::Approx(26.539).epsilon(1e-4));
  CHECK(SystemParams{}.max_users_per_base() == 26);
  CHECK(SystemParams{}.normalization_distance() == doctest::Approx(1000 / std::sqrt(2.0)));
}

TEST_CASE("params validation") {
  SystemParams p;
  CHECK_NOTHROW(p.validate());
  p.outage_target = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.hotspot_offset_m = 450.0;  // square pokes out of the region
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.height_micro_m = 1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("base selection") {
  CHECK(select_base(2.0, 1.0, 1.0) == Tier::macro);
  CHECK(select_base(1.0, 2.0, 1.0) == Tier::micro);
  CHECK(select_base(1.0, 1.0, 1.0) == Tier::macro);
  CHECK(select_base(1.5, 1.0, 2.0) == Tier::micro);
}

TEST_CASE("scenario generation") {
  SystemParams p;
  Rng rng(1);
  const Scenario one = generate_scenario(p, 1, rng);
  CHECK(one.users.size() == 1);

  Rng big(2);
  const Scenario s = generate_scenario(p, 100000, big);
  int inside = 0;
  for (const auto& u : s.users) inside += in_hotspot(p, u);
  const double expected = 0.5 + p.hotspot_side_m * p.hotspot_side_m / (2 * p.region_side_m * p.region_side_m);
  CHECK(std::abs(inside / 1e5 - expected) < 0.01);
  CHECK(s.macro_count() + s.micro_count() == 100000);

  // every user lies in the region and the stored gains reproduce the model
  const double half = p.region_side_m / 2, dmax = p.normalization_distance();
  for (int i = 0; i < 1000; ++i) {
    const auto& u = s.users[i];
    CHECK(std::abs(u.x_m) <= half);
    CHECK(std::abs(u.y_m) <= half);
    const double dm = slant_distance(u.x_m, u.y_m, p.height_macro_m, p.height_terminal_m);
    const double du = slant_distance(u.x_m - p.hotspot_offset_m, u.y_m, p.height_micro_m, p.height_terminal_m);
    CHECK(u.gain_macro == doctest::Approx(path_gain_normalized(p.macro_base(), dm, u.shadow_macro_db, dmax)));
    CHECK(u.gain_micro == doctest::Approx(path_gain_normalized(p.micro_base(), du, u.shadow_micro_db, dmax)));
    CHECK(u.serving == select_base(p.gain_ratio * u.gain_macro, u.gain_micro, p.desensitivity));
  }

  // prefix property: fewer users, same leading records
  Rng a(9), b(9);
  const Scenario s5 = generate_scenario(p, 5, a), s8 = generate_scenario(p, 8, b);
  for (int i = 0; i < 5; ++i) CHECK(s5.users[i].x_m == s8.users[i].x_m);
}

TEST_CASE("user at the macro foot is served by the macro without shadowing") {
  SystemParams p;
  const double dmax = p.normalization_distance();
  const double gm = path_gain_normalized(p.macro_base(), slant_distance(0, 0, 60, 1.5), 0, dmax);
  const double gu = path_gain_normalized(p.micro_base(), slant_distance(-300, 0, 9, 1.5), 0, dmax);
  CHECK(select_base(p.gain_ratio * gm, gu, 1.0) == Tier::macro);
}

TEST_CASE("cross-tier interference sums") {
  Scenario empty;
  const auto zero = cross_tier_interference(empty, 10.0);
  CHECK(zero.into_macro == 0.0);
  CHECK(zero.into_micro == 0.0);

  // one micro user with true-gain ratio H gM / gu = 0.04
  Scenario one;
  UserRecord u;
  u.gain_macro = 0.004;
  u.gain_micro = 1.0;
  u.serving = Tier::micro;
  one.users.push_back(u);
  auto i1 = cross_tier_interference(one, 10.0);
  CHECK(i1.into_macro == doctest::Approx(0.04));
  CHECK(i1.into_micro == 0.0);
  FadingDraw f{{2.0}, {1.0}};
  CHECK(cross_tier_interference(one, 10.0, &f).into_macro == doctest::Approx(0.08));

  // a macro user contributes gu / (H gM) toward the micro base
  UserRecord m;
  m.gain_macro = 2.0;
  m.gain_micro = 1.0;
  m.serving = Tier::macro;
  one.users.push_back(m);
  FadingDraw g{{2.0, 0.5}, {1.0, 3.0}};
  auto i2 = cross_tier_interference(one, 10.0, &g);
  CHECK(i2.into_macro == doctest::Approx(0.08));
  CHECK(i2.into_micro == doctest::Approx(3.0 * 1.0 / (0.5 * 20.0)));
}

TEST_CASE("two-base power solution") {
  auto zero = solve_powers(13, 13, {}, kK);
  REQUIRE(zero);
  CHECK(zero->macro == doctest::Approx(1 / (kK - 13)));
  CHECK(zero->micro == doctest::Approx(1 / (kK - 13)));

  const auto r = solve_powers(13, 13, {1.0, 1.0}, 26.539);
  REQUIRE(r);
  CHECK(r->macro == doctest::Approx(14.539 / (13.539 * 13.539 - 1)).epsilon(1e-12));
  CHECK(r->macro == doctest::Approx(0.0797).epsilon(1e-3));
  CHECK(r->micro == doctest::Approx(r->macro));

  // boundary: denominator exactly zero
  CHECK_FALSE(solve_powers(10, 10, {16.0, 16.0}, 26.0));
  CHECK_FALSE(solve_powers(27, 0, {}, kK));
  CHECK_FALSE(solve_powers(0, 27, {}, kK));
  CHECK_FALSE(solve_powers(26, 26, {}, 26.0));

  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> n(0, 30);
  std::uniform_real_distribution<double> i(0.0, 3.0);
  for (int t = 0; t < 2000; ++t) {
    const int nm = n(rng), nu = n(rng);
    const double im = i(rng), iu = i(rng);
    const auto got = solve_powers(nm, nu, {im, iu}, kK);
    const auto want = oracle::cramer_two_base(kK, nm, nu, im, iu);
    REQUIRE(got.has_value() == want.ok);
    if (!got) continue;
    CHECK(got->macro > 0);
    CHECK(got->micro > 0);
    CHECK(got->macro == doctest::Approx(want.macro).epsilon(1e-12));
    CHECK(got->micro == doctest::Approx(want.micro).epsilon(1e-12));
    // more interference into the macro base never lowers either power
    const auto more = solve_powers(nm, nu, {im + 0.01, iu}, kK);
    if (more) {
      CHECK(more->macro >= got->macro);
      CHECK(more->micro >= got->micro);
    }
  }
}

TEST_CASE("terminal power limit") {
  const double F = 0.7, H = 10.0;
  CHECK_FALSE(user_power_exceeds(F * 2.0, 2.0, 1.0, F, H, Tier::micro));
  CHECK(user_power_exceeds(F * 2.0 * 1.0001, 2.0, 1.0, F, H, Tier::micro));
  CHECK(user_power_exceeds(1.5 * F * H, 1.0, 1.0, F, H, Tier::macro));
  CHECK_FALSE(user_power_exceeds(1.5 * F, 1.0, 2.0, F, H, Tier::micro));
  CHECK_FALSE(user_power_exceeds(1e9, 1e-9, 1.0, kInfinity, H, Tier::micro));
}

TEST_CASE("budget validation") {
  McBudget b;
  CHECK_NOTHROW(b.validate());
  b.placements = 0;
  CHECK_THROWS_AS(b.validate(), ConfigError);
  b = {};
  b.fading_draws = 0;
  CHECK_THROWS_AS(b.validate(), ConfigError);
  b = {};
  b.selections = 0;
  CHECK_THROWS_AS(b.validate(), ConfigError);
}

TEST_CASE("Monte Carlo outage: limits and structure") {
  SystemParams p;
  McBudget b;
  b.placements = 100;
  b.fading_draws = 10;
  CHECK(outage_probability_mc(p, 1, nullptr, b, 7).outage_fraction == 0.0);
  CHECK(outage_probability_mc(p, 54, nullptr, b, 7).outage_fraction == 1.0);

  const auto L2 = DelayProfile::uniform(2);
  for (const DelayProfile* prof : {static_cast<const DelayProfile*>(nullptr), &L2}) {
    for (int n : {20, 35, 45}) {
      const auto inf = outage_probability_mc(p, n, prof, b, 3);
      CHECK(inf.power_exceeded_fraction == 0.0);
      CHECK(inf.outage_fraction == inf.infeasible_fraction);
      SystemParams lim = p;
      lim.power_factor = 0.2;
      const auto fin = outage_probability_mc(lim, n, prof, b, 3);
      CHECK(fin.outage_fraction >= inf.outage_fraction);
      CHECK(fin.infeasible_fraction == inf.infeasible_fraction);
      CHECK(fin.outage_fraction == doctest::Approx(fin.infeasible_fraction + fin.power_exceeded_fraction));
      CHECK(fin.trials == (prof ? 1000 : 100));
    }
  }
}

TEST_CASE("Monte Carlo outage brackets the reference capacity" * doctest::test_suite("reference")) {
  SystemParams p;
  McBudget b;
  b.placements = 200;
  double lo = 0, hi = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    lo += outage_probability_mc(p, 40, nullptr, b, seed).outage_fraction / 5;
    hi += outage_probability_mc(p, 46, nullptr, b, seed).outage_fraction / 5;
  }
  CAPTURE(lo);
  CAPTURE(hi);
  CHECK(lo <= 0.05);
  CHECK(hi > 0.05);
}

TEST_CASE("fading multiplier has the 1/rho mean") {
  // the ratio rho_M/rho_mu of one term averages L/(L-1)
  Rng rng(77);
  const auto p = DelayProfile::uniform(4);
  double sum = 0;
  const int n = 2000000;
  for (int i = 0; i < n; ++i) sum += sample_rho(p, rng) / sample_rho(p, rng);
  CHECK(sum / n == doctest::Approx(mean_inverse_rho(4)).epsilon(0.01));
}

TEST_CASE("outage is independent of the worker count") {
  SystemParams p;
  p.power_factor = 0.5;
  McBudget b;
  b.placements = 60;
  b.fading_draws = 5;
  const auto prof = DelayProfile::uniform(2);
  b.workers = 1;
  const auto one = outage_probability_mc(p, 38, &prof, b, 99);
  for (unsigned w : {2u, 4u, 8u}) {
    b.workers = w;
    const auto many = outage_probability_mc(p, 38, &prof, b, 99);
    CHECK(many.outage_fraction == one.outage_fraction);
    CHECK(many.infeasible_fraction == one.infeasible_fraction);
  }
}

TEST_CASE("capacity search") {
  SystemParams p;
  McBudget b;
  b.placements = 100;

  SystemParams loose = p;
  loose.outage_target = 1.0;
  CHECK(capacity_search(loose, nullptr, b, 1).n_star == 2 * p.max_users_per_base());

  const auto r = capacity_search(p, nullptr, b, 1);
  CHECK(r.method == Method::simulation);
  REQUIRE_FALSE(r.trace.empty());
  CHECK(r.trace.front().users == 1);
  CHECK(r.outage_at_n_star() <= p.outage_target);
  CHECK(r.trace.back().outage > p.outage_target);
  CHECK(r.n_star == r.trace.back().users - 1);

  // tighter target, lower F and less diversity each never help
  SystemParams tight = p;
  tight.outage_target = 0.01;
  CHECK(capacity_search(tight, nullptr, b, 1).n_star <= r.n_star);
  SystemParams weak = p;
  weak.power_factor = 0.1;
  CHECK(capacity_search(weak, nullptr, b, 1).n_star <= r.n_star);

  b.fading_draws = 20;
  const auto L2 = DelayProfile::uniform(2), L4 = DelayProfile::uniform(4);
  const int n2 = capacity_search(p, &L2, b, 1).n_star;
  const int n4 = capacity_search(p, &L4, b, 1).n_star;
  CHECK(n2 <= n4);
  CHECK(n4 <= r.n_star + 1);

  b.workers = 4;
  const auto again = capacity_search(p, nullptr, b, 1);
  CHECK(again.n_star == r.n_star);
  CHECK(again.trace.size() == r.trace.size());
}
