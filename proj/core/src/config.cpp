#include "cdmacap/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>

#include "cdmacap/errors.hpp"

namespace cdmacap {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

int parse_int(const std::string& text) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw ConfigError("expected an integer, got '" + text + "'");
  return value;
}

std::uint64_t parse_u64(const std::string& text) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw ConfigError("expected a non-negative integer, got '" + text + "'");
  return value;
}

std::size_t parse_count(const std::string& text) {
  return static_cast<std::size_t>(parse_u64(text));
}

SweepAxis parse_axis(const std::string& text) {
  if (text == "F") return SweepAxis::power_factor;
  if (text == "L_p") return SweepAxis::paths;
  if (text == "L") return SweepAxis::microcells;
  throw ConfigError("unknown sweep axis '" + text + "' (expected F, L_p or L)");
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto real = [&t](const char* key, double SystemParams::*field) {
      t[key] = [field](ExperimentConfig& c, const std::string& v) { c.params.*field = parse_real(v); };
    };
    real("system.processing_gain", &SystemParams::processing_gain);
    real("system.sinr_db", &SystemParams::sinr_target_db);
    real("system.desensitivity", &SystemParams::desensitivity);
    real("system.gain_ratio", &SystemParams::gain_ratio);
    real("system.breakpoint_m", &SystemParams::breakpoint_m);
    real("system.shadow_macro_db", &SystemParams::shadow_macro_db);
    real("system.shadow_micro_db", &SystemParams::shadow_micro_db);
    real("system.height_macro_m", &SystemParams::height_macro_m);
    real("system.height_micro_m", &SystemParams::height_micro_m);
    real("system.height_terminal_m", &SystemParams::height_terminal_m);
    real("system.region_side_m", &SystemParams::region_side_m);
    real("system.hotspot_side_m", &SystemParams::hotspot_side_m);
    real("system.hotspot_offset_m", &SystemParams::hotspot_offset_m);
    real("system.F", &SystemParams::power_factor);
    real("system.outage", &SystemParams::outage_target);
    t["system.d_max_m"] = [](ExperimentConfig& c, const std::string& v) {
      c.params.d_max_m = parse_real(v);
    };
    t["channel.profile"] = [](ExperimentConfig& c, const std::string& v) {
      c.profile = ProfileSpec::parse(v);
    };
    t["sweep.axis"] = [](ExperimentConfig& c, const std::string& v) { c.axis = parse_axis(v); };
    t["sweep.values"] = [](ExperimentConfig& c, const std::string& v) {
      c.values.clear();
      for (const auto& item : split(v, ',')) c.values.push_back(parse_real(item));
    };
    t["budget.placements"] = [](ExperimentConfig& c, const std::string& v) {
      c.budget.placements = parse_int(v);
    };
    t["budget.fading_draws"] = [](ExperimentConfig& c, const std::string& v) {
      c.budget.fading_draws = parse_int(v);
    };
    t["budget.selections"] = [](ExperimentConfig& c, const std::string& v) {
      c.budget.selections = parse_int(v);
    };
    t["budget.workers"] = [](ExperimentConfig& c, const std::string& v) {
      c.budget.workers = static_cast<unsigned>(parse_u64(v));
      c.stats.workers = c.budget.workers;
    };
    t["budget.stats_samples"] = [](ExperimentConfig& c, const std::string& v) {
      c.stats.samples = parse_count(v);
    };
    t["budget.resamples"] = [](ExperimentConfig& c, const std::string& v) {
      c.stats.resamples = parse_count(v);
    };
    t["multicell.m"] = [](ExperimentConfig& c, const std::string& v) { c.macro_side = parse_int(v); };
    t["multicell.n"] = [](ExperimentConfig& c, const std::string& v) { c.subgrid = parse_int(v); };
    t["run.seed"] = [](ExperimentConfig& c, const std::string& v) { c.seed = parse_u64(v); };
    t["run.output"] = [](ExperimentConfig& c, const std::string& v) { c.output = v; };
    t["run.stats_cache"] = [](ExperimentConfig& c, const std::string& v) { c.stats_cache = v; };
    return t;
  }();
  return table;
}

}  // namespace

const char* axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::power_factor: return "F";
    case SweepAxis::paths: return "L_p";
    case SweepAxis::microcells: return "L";
  }
  return "?";
}

double parse_real(const std::string& raw) {
  const std::string text = trim(raw);
  if (text == "inf" || text == "+inf") return kInfinity;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty() || std::isnan(value))
    throw ConfigError("expected a number or 'inf', got '" + text + "'");
  return value;
}

void apply_budget(McBudget& budget, const std::string& text) {
  const auto parts = split(text, 'x');
  if (parts.empty() || parts.size() > 3) throw ConfigError("budget must be P, PxD or PxDxR");
  budget.placements = parse_int(parts[0]);
  if (parts.size() > 1) budget.fading_draws = parse_int(parts[1]);
  if (parts.size() > 2) budget.selections = parse_int(parts[2]);
  budget.validate();
}

ProfileSpec ProfileSpec::parse(const std::string& raw) {
  const std::string text = trim(raw);
  ProfileSpec spec;
  if (text.empty() || text == "none" || text == "inf") return spec;
  if (text.rfind("uniform:", 0) == 0) {
    const std::string count = text.substr(8);
    spec.kind = Kind::uniform;
    if (count == "inf") {
      spec.kind = Kind::none;
      return spec;
    }
    spec.paths = parse_int(count);
    if (spec.paths < 1) throw ConfigError("uniform profile needs at least one path");
    return spec;
  }
  spec.kind = Kind::file;
  spec.file = text;
  return spec;
}

std::optional<DelayProfile> ProfileSpec::resolve(const std::filesystem::path& base_dir) const {
  switch (kind) {
    case Kind::none: return std::nullopt;
    case Kind::uniform: return DelayProfile::uniform(paths);
    case Kind::file:
      return load_profile(file.is_absolute() || base_dir.empty() ? file : base_dir / file);
  }
  return std::nullopt;
}

std::string ProfileSpec::to_string() const {
  switch (kind) {
    case Kind::none: return "none";
    case Kind::uniform: return "uniform:" + std::to_string(paths);
    case Kind::file: return file.string();
  }
  return "none";
}

void ExperimentConfig::validate() const {
  params.validate();
  budget.validate();
  if (stats.samples < 10000) throw ConfigError("stats_samples must be >= 10000");
  if (stats.resamples < 1) throw ConfigError("resamples must be >= 1");
  if (macro_side < 1) throw ConfigError("multicell m must be >= 1");
  if (subgrid < 1 || subgrid % 2 == 0) throw ConfigError("multicell n must be odd");
  for (double v : values) {
    if (!(v > 0.0)) throw ConfigError("sweep values must be positive");
    if (axis != SweepAxis::power_factor && std::isfinite(v) && v != std::floor(v))
      throw ConfigError(std::string("sweep values for ") + axis_name(axis) + " must be integers");
    if (axis == SweepAxis::microcells && std::isinf(v))
      throw ConfigError("sweep values for L must be finite");
  }
}

ExperimentConfig parse_config(std::istream& in, const std::string& origin) {
  ExperimentConfig config;
  std::string section;
  std::string line;
  int line_no = 0;
  bool axis_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto where = [&] { return origin + ":" + std::to_string(line_no) + ": "; };
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where() + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where() + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(section + "." + key);
    if (it == setters().end())
      throw ConfigError(where() + "unknown key '" + key + "' in section [" + section + "]");
    if (section + "." + key == "sweep.axis") {
      if (axis_seen) throw ConfigError(where() + "only one sweep axis is allowed");
      axis_seen = true;
    }
    try {
      it->second(config, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where() + e.what());
    }
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  ExperimentConfig config = parse_config(in, path.string());
  config.base_dir = path.parent_path();
  return config;
}

}  // namespace cdmacap
