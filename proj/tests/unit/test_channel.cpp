#include <cmath>
#include <sstream>
#include <vector>

#include "cdmacap/channel.hpp"
#include "cdmacap/errors.hpp"
#include "cdmacap/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cdmacap;

TEST_CASE("path gain: reference points of the dual-slope law") {
  const BasePropagation base{100.0, 1.0, 0.0, 10.0};
  const double dmax = 707.0;
  CHECK(path_gain_normalized(base, dmax, 0.0, dmax) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(path_gain_normalized(base, dmax / 2, 0.0, dmax) == doctest::Approx(16.0).epsilon(1e-14));
  const double at_b = std::pow(dmax / 100.0, 4);
  CHECK(path_gain_normalized(base, 100.0, 0.0, dmax) == doctest::Approx(at_b).epsilon(1e-14));
  // near side of the breakpoint joins continuously
  CHECK(path_gain_normalized(base, 100.0 - 1e-9, 0.0, dmax) == doctest::Approx(at_b).epsilon(1e-9));
  // shadowing is a plain dB multiplier
  CHECK(path_gain_normalized(base, dmax, 10.0, dmax) == doctest::Approx(10.0));
  CHECK(path_gain_normalized(base, 50.0, -3.0, dmax) ==
        doctest::Approx(std::pow(dmax / 50, 2) * std::pow(dmax / 100, 2) * std::pow(10.0, -0.3)));
}

TEST_CASE("path gain: strictly decreasing, rejects bad distances") {
  const BasePropagation base{100.0, 1.0, 0.0, 10.0};
  double prev = path_gain_normalized(base, 1.0, 2.0, 700.0);
  for (double d = 1.5; d < 2000.0; d *= 1.07) {
    const double g = path_gain_normalized(base, d, 2.0, 700.0);
    CHECK(g < prev);
    prev = g;
  }
  CHECK_THROWS_AS(path_gain_normalized(base, 0.0, 0.0, 700.0), DomainError);
  CHECK_THROWS_AS(path_gain_normalized(base, -1.0, 0.0, 700.0), DomainError);
  CHECK_THROWS_AS(path_gain_normalized(base, 10.0, 0.0, 0.0), DomainError);
}

TEST_CASE("slant distance includes antenna height") {
  CHECK(slant_distance(3.0, 4.0, 13.5, 1.5) == doctest::Approx(13.0));
  CHECK(slant_distance(0.0, 0.0, 9.0, 1.5) == doctest::Approx(7.5));
}

TEST_CASE("base propagation validation") {
  CHECK_NOTHROW(BasePropagation{100, 1, 4, 9}.validate(1.5));
  CHECK_THROWS_AS(BasePropagation({0, 1, 4, 9}).validate(1.5), ConfigError);
  CHECK_THROWS_AS(BasePropagation({100, 0, 4, 9}).validate(1.5), ConfigError);
  CHECK_THROWS_AS(BasePropagation({100, 1, -1, 9}).validate(1.5), ConfigError);
  CHECK_THROWS_AS(BasePropagation({100, 1, 4, 1.0}).validate(1.5), ConfigError);
}

TEST_CASE("shadow sampler moments") {
  Rng zero(3);
  for (int i = 0; i < 100; ++i) CHECK(sample_shadow(0.0, zero) == 0.0);

  Rng rng(11);
  const int n = 1000000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double z = sample_shadow(8.0, rng);
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  CHECK(std::abs(mean) < 0.05);
  CHECK(sd > 7.97);
  CHECK(sd < 8.03);
}

TEST_CASE("rho sampler: unit mean and Gamma variance") {
  Rng rng(5);
  const int n = 1000000;
  for (const DelayProfile& p : {DelayProfile::uniform(1), DelayProfile({0.5, 0.3, 0.2}, "x")}) {
    double sum = 0;
    for (int i = 0; i < n; ++i) sum += sample_rho(p, rng);
    CHECK(sum / n > 0.995);
    CHECK(sum / n < 1.005);
  }
  const auto p64 = DelayProfile::uniform(64);
  double sum = 0, sq = 0;
  for (int i = 0; i < 200000; ++i) {
    const double r = sample_rho(p64, rng);
    sum += r;
    sq += r * r;
  }
  const double var = sq / 200000 - std::pow(sum / 200000, 2);
  CHECK(var == doctest::Approx(1.0 / 64).epsilon(0.10));
}

TEST_CASE("rho sampler matches the Gamma law (KS)") {
  Rng rng(17);
  for (int L : {1, 2, 4, 8}) {
    const auto p = DelayProfile::uniform(L);
    std::vector<double> xs(100000);
    for (auto& x : xs) x = sample_rho(p, rng);
    const double ks = oracle::ks_distance(xs, [L](double x) { return rho_cdf_uniform(x, L); });
    CAPTURE(L);
    CHECK(ks < 0.01);
  }
}

TEST_CASE("rho density") {
  CHECK(rho_pdf_uniform(0.5, 1) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  for (int L : {1, 2, 4, 8}) {
    const double area = oracle::simpson([L](double x) { return rho_pdf_uniform(x, L); }, 1e-12, 40.0, 200000);
    CAPTURE(L);
    CHECK(std::abs(area - 1.0) < 1e-8);
    for (double x : {0.1, 0.7, 1.0, 2.5})
      CHECK(rho_pdf_uniform(x, L) == doctest::Approx(oracle::gamma_pdf(x, L)).epsilon(1e-10));
    for (double x : {0.2, 1.0, 3.0})
      CHECK(rho_cdf_uniform(x, L) == doctest::Approx(oracle::gamma_cdf(x, L)).epsilon(1e-8));
  }
  // mode of 4x e^{-2x} at x = 1/2
  CHECK(rho_pdf_uniform(0.5, 2) > rho_pdf_uniform(0.49, 2));
  CHECK(rho_pdf_uniform(0.5, 2) > rho_pdf_uniform(0.51, 2));
  CHECK_THROWS_AS(rho_pdf_uniform(0.0, 2), DomainError);
  CHECK_THROWS_AS(rho_pdf_uniform(-1.0, 2), DomainError);
}

TEST_CASE("mean of 1/rho") {
  CHECK(mean_inverse_rho(2) == 2.0);
  CHECK(mean_inverse_rho(11) == doctest::Approx(1.1));
  CHECK_THROWS_AS(mean_inverse_rho(1), DomainError);
  CHECK_THROWS_AS(mean_inverse_rho(0), DomainError);

  Rng rng(23);
  const auto p = DelayProfile::uniform(2);
  double sum = 0;
  const int n = 10000000;
  for (int i = 0; i < n; ++i) sum += 1.0 / sample_rho(p, rng);
  CHECK(sum / n > 1.98);
  CHECK(sum / n < 2.02);
}

TEST_CASE("kappa distribution") {
  for (int L : {1, 2, 3, 4, 8, 16, 64}) {
    CAPTURE(L);
    CHECK(kappa_cdf(1.0, L) == doctest::Approx(0.5).epsilon(1e-14));
  }
  CHECK(kappa_cdf(3.0, 1) == doctest::Approx(0.75).epsilon(1e-14));
  for (double x : {0.01, 0.3, 1.7, 20.0}) CHECK(kappa_cdf(x, 1) == doctest::Approx(x / (x + 1)));

  for (int L : {1, 2, 4, 8}) {
    for (double x : {0.1, 0.5, 0.9, 1.3, 4.0, 10.0}) {
      CAPTURE(L);
      CAPTURE(x);
      CHECK(kappa_cdf(x, L) == doctest::Approx(oracle::kappa_cdf_beta(x, L)).epsilon(1e-8));
      const double h = 1e-5 * x;
      const double deriv = (kappa_cdf(x + h, L) - kappa_cdf(x - h, L)) / (2 * h);
      CHECK(std::abs(kappa_pdf(x, L) - deriv) < 1e-4 * kappa_pdf(x, L));
    }
  }
  // large L stays finite
  CHECK(std::isfinite(kappa_pdf(1.0, 64)));
  CHECK(kappa_cdf(1.2, 64) > 0.5);
  CHECK(kappa_cdf(1.2, 64) < 1.0);
  CHECK_THROWS_AS(kappa_cdf(0.0, 2), DomainError);
  CHECK_THROWS_AS(kappa_pdf(-1.0, 2), DomainError);
}

TEST_CASE("diversity factor") {
  CHECK(diversity_factor(DelayProfile::uniform(4)) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(diversity_factor(DelayProfile({1.0}, "one")) == doctest::Approx(1.0));
  CHECK(diversity_factor(DelayProfile({0.8, 0.2}, "two")) == doctest::Approx(1.0 / 0.68).epsilon(1e-12));
  // scale invariance
  CHECK(diversity_factor(DelayProfile({8.0, 2.0}, "two")) == doctest::Approx(1.0 / 0.68).epsilon(1e-12));
  // Cauchy-Schwarz: non-uniform strictly below L
  const DelayProfile skewed({0.4, 0.3, 0.2, 0.1}, "s");
  CHECK(diversity_factor(skewed) < 4.0);
  CHECK(diversity_factor(skewed) >= 1.0);

  // DF equals mean^2/variance of the sampled gain
  Rng rng(29);
  double sum = 0, sq = 0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    const double r = sample_rho(skewed, rng);
    sum += r;
    sq += r * r;
  }
  const double m = sum / n;
  CHECK(m * m / (sq / n - m * m) == doctest::Approx(diversity_factor(skewed)).epsilon(0.02));
}

TEST_CASE("delay profile construction and parsing") {
  const DelayProfile p({2.0, 1.0, 1.0}, "p");
  double total = 0;
  for (double t : p.taps()) total += t;
  CHECK(std::abs(total - 1.0) < 1e-12);
  CHECK(p.taps()[0] == doctest::Approx(0.5));
  CHECK_FALSE(p.is_uniform());
  CHECK(DelayProfile::uniform(3).is_uniform());

  CHECK_THROWS_AS(DelayProfile({}, "e"), ConfigError);
  CHECK_THROWS_AS(DelayProfile({1.0, 0.0}, "z"), ConfigError);
  CHECK_THROWS_AS(DelayProfile({1.0, -2.0}, "n"), ConfigError);
  CHECK_THROWS_AS(DelayProfile({1.0, NAN}, "nan"), ConfigError);

  std::istringstream text("# header\n0 0\n\n100 -3.0103  # half power\n-6.0206\n");
  const DelayProfile q = parse_profile(text, "q");
  REQUIRE(q.paths() == 3);
  CHECK(q.taps()[0] == doctest::Approx(1.0 / 1.75).epsilon(1e-4));
  CHECK(q.taps()[2] == doctest::Approx(0.25 / 1.75).epsilon(1e-4));

  std::istringstream bad("0 0\n1 2 3\n");
  try {
    parse_profile(bad, "bad");
    FAIL("expected a parse error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
  std::istringstream empty("# nothing\n");
  CHECK_THROWS_AS(parse_profile(empty, "empty"), ConfigError);
  CHECK_THROWS_AS(load_profile("/nonexistent/profile.txt"), ConfigError);
}

TEST_CASE("shipped profiles hit their diversity targets") {
  const std::string dir = CDMACAP_DATA_DIR "/profiles/";
  CHECK(diversity_factor(load_profile(dir + "ra.txt")) == doctest::Approx(1.6).epsilon(0.05 / 1.6));
  CHECK(diversity_factor(load_profile(dir + "ht.txt")) == doctest::Approx(3.3).epsilon(0.05 / 3.3));
  CHECK(diversity_factor(load_profile(dir + "tu.txt")) == doctest::Approx(4.0).epsilon(0.05 / 4.0));
  CHECK(load_profile(dir + "tu.txt").label() == "tu");
}
