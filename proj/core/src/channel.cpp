#include "cdmacap/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "cdmacap/errors.hpp"

namespace cdmacap {

namespace {

void require_paths(int paths) {
  if (paths < 1) throw DomainError("path count must be >= 1");
}

void require_positive(double x, const char* what) {
  if (!(x > 0.0)) throw DomainError(std::string(what) + " requires x > 0");
}

}  // namespace

DelayProfile::DelayProfile(std::vector<double> powers, std::string label)
    : taps_(std::move(powers)), label_(std::move(label)) {
  if (taps_.empty()) throw ConfigError("delay profile '" + label_ + "' has no taps");
  for (double p : taps_) {
    if (!std::isfinite(p) || p <= 0.0)
      throw ConfigError("delay profile '" + label_ + "' has a non-positive tap power");
  }
  const double total = std::accumulate(taps_.begin(), taps_.end(), 0.0);
  for (double& p : taps_) p /= total;
  uniform_ = std::all_of(taps_.begin(), taps_.end(),
                         [&](double p) { return p == taps_.front(); });
}

DelayProfile DelayProfile::uniform(int paths) {
  if (paths < 1) throw ConfigError("uniform profile needs at least one path");
  DelayProfile profile(std::vector<double>(static_cast<std::size_t>(paths), 1.0),
                       "uniform:" + std::to_string(paths));
  profile.uniform_ = true;
  return profile;
}

DelayProfile parse_profile(std::istream& in, std::string label) {
  std::vector<double> powers;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<double> values;
    std::string token;
    while (fields >> token) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(token, &used));
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw ConfigError(label + ":" + std::to_string(line_no) + ": bad number '" + token + "'");
      }
    }
    if (values.empty()) continue;
    if (values.size() > 2)
      throw ConfigError(label + ":" + std::to_string(line_no) +
                        ": expected '<power_dB>' or '<delay_ns> <power_dB>'");
    powers.push_back(std::pow(10.0, values.back() / 10.0));
  }
  return DelayProfile(std::move(powers), std::move(label));
}

DelayProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open profile file " + path.string());
  return parse_profile(in, path.stem().string());
}

void BasePropagation::validate(double terminal_height_m) const {
  if (!(breakpoint_m > 0.0)) throw ConfigError("breakpoint must be positive");
  if (!(shadow_sigma_db >= 0.0)) throw ConfigError("shadow sigma must be non-negative");
  if (!(gain_factor > 0.0)) throw ConfigError("antenna gain factor must be positive");
  if (!(height_m > terminal_height_m))
    throw ConfigError("base antenna must be higher than the terminal");
}

double slant_distance(double dx, double dy, double base_height_m, double terminal_height_m) {
  const double dz = base_height_m - terminal_height_m;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double path_gain_normalized(const BasePropagation& base, double distance_m, double shadow_db,
                            double d_max_m) {
  if (!(distance_m > 0.0) || !(d_max_m > 0.0))
    throw DomainError("path gain needs positive distances");
  const double shadow = std::pow(10.0, shadow_db / 10.0);
  const double r = d_max_m / distance_m;
  if (distance_m < base.breakpoint_m) {
    const double rb = d_max_m / base.breakpoint_m;
    return r * r * rb * rb * shadow;
  }
  return r * r * r * r * shadow;
}

double sample_shadow(double sigma_db, Rng& rng) {
  if (sigma_db == 0.0) return 0.0;
  return std::normal_distribution<double>(0.0, sigma_db)(rng);
}

double sample_rho(const DelayProfile& profile, Rng& rng) {
  std::exponential_distribution<double> unit(1.0);
  double rho = 0.0;
  for (double mean : profile.taps()) rho += mean * unit(rng);
  return rho;
}

double rho_pdf_uniform(double x, int paths) {
  require_positive(x, "rho_pdf_uniform");
  require_paths(paths);
  const double l = paths;
  return std::exp(std::log(l) + (l - 1.0) * std::log(x * l) - x * l - std::lgamma(l));
}

double rho_cdf_uniform(double x, int paths) {
  require_paths(paths);
  if (x < 0.0) throw DomainError("rho_cdf_uniform requires x >= 0");
  if (x == 0.0) return 0.0;
  const double lx = paths * x;
  const double log_lx = std::log(lx);
  double tail = 0.0;
  for (int i = 0; i < paths; ++i) tail += std::exp(i * log_lx - lx - std::lgamma(i + 1.0));
  return std::clamp(1.0 - tail, 0.0, 1.0);
}

double mean_inverse_rho(int paths) {
  if (paths <= 1) throw DomainError("E{1/rho} is undefined for a single path (diverges)");
  return static_cast<double>(paths) / (paths - 1);
}

double kappa_cdf(double x, int paths) {
  require_positive(x, "kappa_cdf");
  require_paths(paths);
  // kappa and 1/kappa share a law, so F(x) = 1 - F(1/x) and F(1) = 1/2.
  if (x == 1.0) return 0.5;
  if (x > 1.0) return 1.0 - kappa_cdf(1.0 / x, paths);
  // u = x/(1+x) is Beta(L, L); its CDF is a binomial tail with 2L-1 trials.
  const int n = 2 * paths - 1;
  const double log_u = std::log(x) - std::log1p(x);
  const double log_w = -std::log1p(x);
  double sum = 0.0;
  for (int j = paths; j <= n; ++j) {
    sum += std::exp(std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) +
                    j * log_u + (n - j) * log_w);
  }
  return sum;
}

double kappa_pdf(double x, int paths) {
  require_positive(x, "kappa_pdf");
  require_paths(paths);
  const double l = paths;
  const double log_x = std::log(x);
  const double log_x1 = std::log1p(x);
  double density = 0.0;
  for (int i = 0; i < paths; ++i) {
    const double magnitude = std::exp(std::lgamma(l + i) - std::lgamma(i + 1.0) -
                                      std::lgamma(l) + (i - 1.0) * log_x -
                                      (l + 1.0 + i) * log_x1);
    density += magnitude * (l * x - i);
  }
  return density;
}

double diversity_factor(const DelayProfile& profile) {
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double p : profile.taps()) {
    sum += p;
    sum_sq += p * p;
  }
  return sum * sum / sum_sq;
}

}  // namespace cdmacap
