#include "cdmacap/analytic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <string>

#include "cdmacap/errors.hpp"
#include "cdmacap/parallel.hpp"

namespace cdmacap {

namespace {

constexpr std::size_t kChunk = 4096;
constexpr std::size_t kMinStatsSamples = 10000;

std::size_t chunk_count(std::size_t n) { return (n + kChunk - 1) / kChunk; }

double xlogy(int k, double prob) { return k == 0 ? 0.0 : k * std::log(prob); }

void require_probability(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError(std::string(name) + " must lie in [0, 1]");
}

}  // namespace

EmpiricalTable::EmpiricalTable(std::vector<double> samples) : sorted_(std::move(samples)) {
  std::sort(sorted_.begin(), sorted_.end());
  if (!sorted_.empty())
    mean_ = std::accumulate(sorted_.begin(), sorted_.end(), 0.0) / static_cast<double>(sorted_.size());
}

double EmpiricalTable::quantile(double q) const {
  if (sorted_.empty()) throw EstimationError("quantile of an empty table");
  require_probability(q, "quantile level");
  const auto last = static_cast<double>(sorted_.size() - 1);
  return sorted_[static_cast<std::size_t>(std::floor(q * last))];
}

double EmpiricalTable::fraction_at_least(double x) const {
  if (sorted_.empty()) throw EstimationError("lookup in an empty table");
  const auto first = std::lower_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(sorted_.end() - first) / static_cast<double>(sorted_.size());
}

MeanStats estimate_mean_stats(const SystemParams& params, const StatsOptions& options,
                              std::uint64_t seed) {
  params.validate();
  if (options.samples < kMinStatsSamples)
    throw ConfigError("mean statistics need at least 10000 samples");
  if (options.resamples < 1) throw ConfigError("resample count must be >= 1");

  struct Chunk {
    std::vector<double> into_macro, into_micro, gain_macro, gain_micro;
  };
  std::vector<Chunk> chunks(chunk_count(options.samples));
  parallel_for(chunks.size(), options.workers, [&](std::size_t c) {
    Rng rng = derive_rng(seed, {stream::kStats, c});
    const std::size_t n = std::min(kChunk, options.samples - c * kChunk);
    Chunk& out = chunks[c];
    for (std::size_t k = 0; k < n; ++k) {
      const UserRecord u = draw_user(params, rng);
      const double macro_over_micro = params.gain_ratio * u.gain_macro / u.gain_micro;
      if (u.serving == Tier::micro) {
        out.into_macro.push_back(macro_over_micro);
        out.gain_micro.push_back(u.gain_micro);
      } else {
        out.into_micro.push_back(1.0 / macro_over_micro);
        out.gain_macro.push_back(u.gain_macro);
      }
    }
  });

  std::vector<double> into_macro, into_micro, gain_macro, gain_micro;
  for (auto& c : chunks) {
    into_macro.insert(into_macro.end(), c.into_macro.begin(), c.into_macro.end());
    into_micro.insert(into_micro.end(), c.into_micro.begin(), c.into_micro.end());
    gain_macro.insert(gain_macro.end(), c.gain_macro.begin(), c.gain_macro.end());
    gain_micro.insert(gain_micro.end(), c.gain_micro.begin(), c.gain_micro.end());
  }
  if (into_macro.empty() || into_micro.empty())
    throw EstimationError("degenerate geometry: one tier received no users in the sample");

  MeanStats stats;
  stats.pole_capacity = params.pole_capacity();
  stats.gain_ratio = params.gain_ratio;
  stats.macro_probability =
      static_cast<double>(gain_macro.size()) / static_cast<double>(options.samples);
  stats.terms_into_macro = EmpiricalTable(std::move(into_macro));
  stats.terms_into_micro = EmpiricalTable(std::move(into_micro));
  stats.gain_macro_users = EmpiricalTable(std::move(gain_macro));
  stats.gain_micro_users = EmpiricalTable(std::move(gain_micro));
  stats.resamples = options.resamples;
  stats.seed = seed;

  const int ceiling = 2 * params.max_users_per_base();
  stats.moments.resize(static_cast<std::size_t>(ceiling));
  for (int n = 1; n <= ceiling; ++n)
    stats.moments[static_cast<std::size_t>(n - 1)] =
        estimate_power_moments(stats, n, 0, options.workers);
  return stats;
}

PowerMoments estimate_power_moments(const MeanStats& stats, int users, int fading_paths,
                                    unsigned workers) {
  if (users < 1) throw ConfigError("user count must be >= 1");
  if (stats.terms_into_macro.empty() || stats.terms_into_micro.empty())
    throw EstimationError("mean statistics have not been estimated");
  const int macro_users = (users + 1) / 2;
  const int micro_users = users / 2;
  const double k = stats.pole_capacity;
  PowerMoments moments;
  moments.users = users;
  if (macro_users >= k) return moments;

  struct Partial {
    std::int64_t feasible = 0;
    double sum_macro = 0.0;
    double sum_micro = 0.0;
  };
  std::vector<Partial> partials(chunk_count(stats.resamples));
  const auto fading = fading_paths > 0 ? std::optional(DelayProfile::uniform(fading_paths))
                                       : std::nullopt;
  parallel_for(partials.size(), workers, [&](std::size_t c) {
    Rng rng = derive_rng(stats.seed, {stream::kResample, static_cast<std::uint64_t>(users),
                                      static_cast<std::uint64_t>(fading_paths), c});
    std::uniform_int_distribution<std::size_t> pick_macro(0, stats.terms_into_macro.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_micro(0, stats.terms_into_micro.size() - 1);
    auto kappa = [&] {
      if (!fading) return 1.0;
      const double num = sample_rho(*fading, rng);
      return num / sample_rho(*fading, rng);
    };
    const std::size_t n = std::min(kChunk, stats.resamples - c * kChunk);
    Partial& out = partials[c];
    for (std::size_t r = 0; r < n; ++r) {
      CrossTierInterference i;
      for (int j = 0; j < micro_users; ++j)
        i.into_macro += stats.terms_into_macro[pick_macro(rng)] * kappa();
      for (int j = 0; j < macro_users; ++j)
        i.into_micro += stats.terms_into_micro[pick_micro(rng)] * kappa();
      if (const auto powers = solve_powers(macro_users, micro_users, i, k)) {
        ++out.feasible;
        out.sum_macro += powers->macro;
        out.sum_micro += powers->micro;
      }
    }
  });

  Partial total;
  for (const auto& p : partials) {
    total.feasible += p.feasible;
    total.sum_macro += p.sum_macro;
    total.sum_micro += p.sum_micro;
  }
  moments.infeasible = 1.0 - static_cast<double>(total.feasible) / static_cast<double>(stats.resamples);
  if (total.feasible > 0) {
    moments.mean_power_macro = total.sum_macro / static_cast<double>(total.feasible);
    moments.mean_power_micro = total.sum_micro / static_cast<double>(total.feasible);
  }
  return moments;
}

double capacity_infinite(double pole_capacity, double v_product) {
  if (!(v_product >= 0.0)) throw DomainError("v product must be non-negative");
  return 2.0 * pole_capacity / (1.0 + std::sqrt(v_product));
}

double capacity_uniform(double pole_capacity, double v_product, int paths) {
  if (paths < 2)
    throw DomainError("uniform-channel capacity approximation is unsupported below 2 paths");
  return capacity_at_diversity(pole_capacity, v_product, paths);
}

double capacity_at_diversity(double pole_capacity, double v_product, double diversity) {
  if (!(v_product >= 0.0)) throw DomainError("v product must be non-negative");
  if (!(diversity > 1.0)) throw DomainError("diversity order must exceed 1");
  const double penalty = std::isinf(diversity) ? 1.0 : diversity / (diversity - 1.0);
  return 2.0 * pole_capacity / (1.0 + penalty * std::sqrt(v_product));
}

double capacity_by_df(double pole_capacity, double v_product, const DelayProfile& profile) {
  return capacity_at_diversity(pole_capacity, v_product, diversity_factor(profile));
}

double prob_power_exceeded(double p, double p_macro, double p_micro, int users) {
  require_probability(p, "p");
  require_probability(p_macro, "p_M");
  require_probability(p_micro, "p_mu");
  if (users < 0) throw DomainError("user count must be non-negative");
  const double q = 1.0 - p;
  const double log_n_fact = std::lgamma(users + 1.0);
  double total = 0.0;
  for (int n = 0; n <= users; ++n) {
    const int m = users - n;
    const double log_weight = log_n_fact - std::lgamma(n + 1.0) - std::lgamma(m + 1.0) +
                              xlogy(n, p) + xlogy(m, q);
    const double log_all_within = xlogy(n, p_macro) + xlogy(m, p_micro);
    total += std::exp(log_weight) * -std::expm1(log_all_within);
  }
  return std::clamp(total, 0.0, 1.0);
}

int equivalent_paths(const DelayProfile& profile) {
  return std::max(1, static_cast<int>(std::lround(diversity_factor(profile))));
}

WithinLimitProbs mean_method_probs(const MeanStats& stats, const PowerMoments& moments,
                                   double power_factor, double gain_ratio,
                                   const DelayProfile* profile) {
  if (std::isinf(power_factor)) return {1.0, 1.0};
  if (!(power_factor > 0.0)) throw DomainError("F must be positive");
  if (stats.gain_macro_users.empty() || stats.gain_micro_users.empty())
    throw EstimationError("mean statistics have not been estimated");
  if (moments.infeasible >= 1.0) return {0.0, 0.0};

  const double need_macro = moments.mean_power_macro / (power_factor * gain_ratio);
  const double need_micro = moments.mean_power_micro / power_factor;
  if (!profile)
    return {stats.gain_macro_users.fraction_at_least(need_macro),
            stats.gain_micro_users.fraction_at_least(need_micro)};

  // Pr[rho T' >= need] averaged over the empirical T' table.
  const int paths = equivalent_paths(*profile);
  auto average_tail = [paths](const EmpiricalTable& gains, double need) {
    double sum = 0.0;
    for (double g : gains.values()) sum += 1.0 - rho_cdf_uniform(need / g, paths);
    return sum / static_cast<double>(gains.size());
  };
  return {average_tail(stats.gain_macro_users, need_macro),
          average_tail(stats.gain_micro_users, need_micro)};
}

namespace {

PowerMoments moments_for(const MeanStats& stats, int users, const DelayProfile* profile) {
  if (!profile) {
    if (users >= 1 && static_cast<std::size_t>(users) <= stats.moments.size())
      return stats.moments[static_cast<std::size_t>(users - 1)];
    return estimate_power_moments(stats, users, 0);
  }
  return estimate_power_moments(stats, users, equivalent_paths(*profile));
}

}  // namespace

WithinLimitProbs mean_method_probs(const MeanStats& stats, int users, double power_factor,
                                   double gain_ratio, const DelayProfile* profile) {
  if (std::isinf(power_factor)) return {1.0, 1.0};
  return mean_method_probs(stats, moments_for(stats, users, profile), power_factor, gain_ratio,
                           profile);
}

double outage_analytic(const MeanStats& stats, int users, double power_factor,
                       const DelayProfile* profile) {
  const PowerMoments moments = moments_for(stats, users, profile);
  if (std::isinf(power_factor) || moments.infeasible >= 1.0) return moments.infeasible;
  const auto within = mean_method_probs(stats, moments, power_factor, stats.gain_ratio, profile);
  const double exceeded =
      prob_power_exceeded(stats.macro_probability, within.macro, within.micro, users);
  return moments.infeasible + (1.0 - moments.infeasible) * exceeded;
}

CapacityResult capacity_analytic(const MeanStats& stats, const SystemParams& params,
                                 const DelayProfile* profile) {
  if (std::abs(stats.pole_capacity - params.pole_capacity()) > 1e-9)
    throw EstimationError("mean statistics were estimated for a different pole capacity");
  CapacityResult result;
  result.method = Method::analytic;
  result.seed = stats.seed;
  const int ceiling = 2 * params.max_users_per_base();
  for (int n = 1; n <= ceiling; ++n) {
    const double outage = outage_analytic(stats, n, params.power_factor, profile);
    result.trace.push_back({n, outage});
    if (outage > params.outage_target) break;
    result.n_star = n;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Cache file

namespace {

constexpr const char* kMagic = "cdmacap-meanstats";
constexpr int kVersion = 1;

std::string format_double(double x) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

void write_table(std::ostream& out, const char* name, const EmpiricalTable& table) {
  out << '[' << name << "] " << table.size() << '\n';
  for (double v : table.values()) out << format_double(v) << '\n';
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string line() {
    std::string text;
    if (!std::getline(in_, text)) fail("unexpected end of file");
    ++line_no_;
    return text;
  }

  double number(const std::string& token) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) fail("bad number '" + token + "'");
    return value;
  }

  double scalar(const std::string& key) {
    const std::string text = line();
    const auto space = text.find(' ');
    if (space == std::string::npos || text.substr(0, space) != key) fail("expected '" + key + "'");
    return number(text.substr(space + 1));
  }

  std::size_t section(const std::string& name) {
    const std::string text = line();
    const std::string head = '[' + name + "] ";
    if (text.rfind(head, 0) != 0) fail("expected section [" + name + "]");
    return static_cast<std::size_t>(number(text.substr(head.size())));
  }

  EmpiricalTable table(const std::string& name) {
    const std::size_t n = section(name);
    std::vector<double> values(n);
    for (auto& v : values) v = number(line());
    if (!std::is_sorted(values.begin(), values.end())) fail("table [" + name + "] is not sorted");
    return EmpiricalTable(std::move(values));
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("mean-stats cache line " + std::to_string(line_no_) + ": " + what);
  }

 private:
  std::istream& in_;
  int line_no_ = 0;
};

}  // namespace

void save_mean_stats(const MeanStats& stats, std::ostream& out) {
  out << kMagic << ' ' << kVersion << '\n';
  out << "pole_capacity " << format_double(stats.pole_capacity) << '\n';
  out << "gain_ratio " << format_double(stats.gain_ratio) << '\n';
  out << "macro_probability " << format_double(stats.macro_probability) << '\n';
  out << "resamples " << stats.resamples << '\n';
  out << "seed " << stats.seed << '\n';
  out << "provenance " << stats.provenance << '\n';
  write_table(out, "terms_into_macro", stats.terms_into_macro);
  write_table(out, "terms_into_micro", stats.terms_into_micro);
  write_table(out, "gain_macro_users", stats.gain_macro_users);
  write_table(out, "gain_micro_users", stats.gain_micro_users);
  out << "[moments] " << stats.moments.size() << '\n';
  for (const auto& m : stats.moments)
    out << m.users << ' ' << format_double(m.infeasible) << ' ' << format_double(m.mean_power_macro)
        << ' ' << format_double(m.mean_power_micro) << '\n';
}

MeanStats load_mean_stats(std::istream& in) {
  Reader reader(in);
  if (reader.line() != std::string(kMagic) + ' ' + std::to_string(kVersion))
    reader.fail("not a version 1 mean-stats cache");
  MeanStats stats;
  stats.pole_capacity = reader.scalar("pole_capacity");
  stats.gain_ratio = reader.scalar("gain_ratio");
  stats.macro_probability = reader.scalar("macro_probability");
  stats.resamples = static_cast<std::size_t>(reader.scalar("resamples"));
  {
    // Seeds use the full 64-bit range; parse as an integer.
    const std::string text = reader.line();
    if (text.rfind("seed ", 0) != 0) reader.fail("expected 'seed'");
    const auto digits = text.substr(5);
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), stats.seed);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) reader.fail("bad seed");
  }
  {
    const std::string text = reader.line();
    if (text.rfind("provenance ", 0) != 0) reader.fail("expected 'provenance'");
    stats.provenance = text.substr(11);
  }
  stats.terms_into_macro = reader.table("terms_into_macro");
  stats.terms_into_micro = reader.table("terms_into_micro");
  stats.gain_macro_users = reader.table("gain_macro_users");
  stats.gain_micro_users = reader.table("gain_micro_users");
  const std::size_t n = reader.section("moments");
  stats.moments.resize(n);
  for (auto& m : stats.moments) {
    const std::string text = reader.line();
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (start <= text.size()) {
      const auto space = text.find(' ', start);
      fields.push_back(text.substr(start, space - start));
      if (space == std::string::npos) break;
      start = space + 1;
    }
    if (fields.size() != 4) reader.fail("moments row needs 4 fields");
    m.users = static_cast<int>(reader.number(fields[0]));
    m.infeasible = reader.number(fields[1]);
    m.mean_power_macro = reader.number(fields[2]);
    m.mean_power_micro = reader.number(fields[3]);
  }
  return stats;
}

}  // namespace cdmacap
