#pragma once

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dla/dataset.hpp"
#include "dla/engine.hpp"
#include "dla/htm.hpp"

namespace dla {

// Full effective configuration of a run: engine knobs, baseline knobs, and
// the two dataset-handling switches.
struct RunConfig {
  DlaConfig dla;
  HtmParams htm;
  bool htm_min_overlap_auto = true;  // resolve per named dataset when true
  bool quant_explicit = false;       // user set quant_* keys; dataset defaults stand down
  bool exclude_class_column = false;
};

namespace detail {

inline long long parse_int(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key '" + key + "': not an integer: '" + value + "'");
  }
  if (pos != value.size()) {
    throw std::invalid_argument("config: key '" + key + "': not an integer: '" + value + "'");
  }
  return v;
}

inline double parse_real(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key '" + key + "': not a number: '" + value + "'");
  }
  if (pos != value.size()) {
    throw std::invalid_argument("config: key '" + key + "': not a number: '" + value + "'");
  }
  return v;
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  throw std::invalid_argument("config: key '" + key + "': not a boolean: '" + value + "'");
}

inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

// Every recognized config key, in canonical serialization order.
inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "learning_extent", "time_limit", "initial_permanence", "store_threshold",
      "tolerance", "winner_threshold", "rho2", "rho2_lim", "noise_scale",
      "seed", "shuffle", "quant_mode", "quant_scale", "quant_offset",
      "quant_minmax_upper", "exclude_class_column",
      "htm_desired_local_activity", "htm_minimum_overlap",
      "htm_initial_permanence", "htm_mc_runs", "htm_tolerance", "htm_columns",
      "htm_potential_fraction", "htm_active_bits", "htm_bits_per_active",
      "htm_permanence_increment", "htm_permanence_decrement"};
  return keys;
}

inline void apply_config_value(RunConfig& cfg, const std::string& key,
                               const std::string& value) {
  using detail::parse_bool;
  using detail::parse_int;
  using detail::parse_real;
  if (key == "learning_extent") {
    cfg.dla.learning_extent = static_cast<int>(parse_int(key, value));
  } else if (key == "time_limit") {
    cfg.dla.time_limit = parse_int(key, value);
  } else if (key == "initial_permanence") {
    cfg.dla.initial_permanence = parse_real(key, value);
  } else if (key == "store_threshold") {
    cfg.dla.store_threshold = parse_int(key, value);
  } else if (key == "tolerance") {
    cfg.dla.tolerance = parse_real(key, value);
  } else if (key == "winner_threshold") {
    if (value == "auto") {
      cfg.dla.winner_threshold = WinnerThreshold::automatic();
    } else {
      cfg.dla.winner_threshold = WinnerThreshold::fixed(parse_int(key, value));
    }
  } else if (key == "rho2") {
    cfg.dla.rho2 = parse_real(key, value);
  } else if (key == "rho2_lim") {
    cfg.dla.rho2_lim = parse_real(key, value);
  } else if (key == "noise_scale") {
    cfg.dla.noise_scale = parse_real(key, value);
  } else if (key == "seed") {
    cfg.dla.seed = static_cast<std::uint64_t>(parse_int(key, value));
    cfg.htm.seed = cfg.dla.seed;
  } else if (key == "shuffle") {
    cfg.dla.shuffle = parse_bool(key, value);
  } else if (key == "quant_mode") {
    if (value == "scale") {
      cfg.dla.quantization.mode = QuantizationSpec::Mode::FixedScale;
    } else if (value == "minmax") {
      cfg.dla.quantization.mode = QuantizationSpec::Mode::MinMax;
    } else {
      throw std::invalid_argument("config: quant_mode must be 'scale' or 'minmax'");
    }
    cfg.quant_explicit = true;
  } else if (key == "quant_scale") {
    cfg.dla.quantization.scale = parse_real(key, value);
    cfg.quant_explicit = true;
  } else if (key == "quant_offset") {
    cfg.dla.quantization.offset = parse_real(key, value);
    cfg.quant_explicit = true;
  } else if (key == "quant_minmax_upper") {
    cfg.dla.quantization.minmax_upper = static_cast<int>(parse_int(key, value));
    cfg.quant_explicit = true;
  } else if (key == "exclude_class_column") {
    cfg.exclude_class_column = parse_bool(key, value);
  } else if (key == "htm_desired_local_activity") {
    cfg.htm.desired_local_activity = static_cast<int>(parse_int(key, value));
  } else if (key == "htm_minimum_overlap") {
    if (value == "auto") {
      cfg.htm_min_overlap_auto = true;
    } else {
      cfg.htm.minimum_overlap = parse_int(key, value);
      cfg.htm_min_overlap_auto = false;
    }
  } else if (key == "htm_initial_permanence") {
    cfg.htm.initial_permanence = parse_real(key, value);
  } else if (key == "htm_mc_runs") {
    cfg.htm.mc_runs = static_cast<int>(parse_int(key, value));
  } else if (key == "htm_tolerance") {
    cfg.htm.tolerance = parse_real(key, value);
  } else if (key == "htm_columns") {
    cfg.htm.columns = static_cast<int>(parse_int(key, value));
  } else if (key == "htm_potential_fraction") {
    cfg.htm.potential_fraction = parse_real(key, value);
  } else if (key == "htm_active_bits") {
    cfg.htm.active_bits = static_cast<int>(parse_int(key, value));
  } else if (key == "htm_bits_per_active") {
    cfg.htm.bits_per_active = static_cast<int>(parse_int(key, value));
  } else if (key == "htm_permanence_increment") {
    cfg.htm.permanence_increment = parse_real(key, value);
  } else if (key == "htm_permanence_decrement") {
    cfg.htm.permanence_decrement = parse_real(key, value);
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

inline std::string config_value(const RunConfig& cfg, const std::string& key) {
  using detail::format_real;
  if (key == "learning_extent") return std::to_string(cfg.dla.learning_extent);
  if (key == "time_limit") return std::to_string(cfg.dla.time_limit);
  if (key == "initial_permanence") return format_real(cfg.dla.initial_permanence);
  if (key == "store_threshold") return std::to_string(cfg.dla.store_threshold);
  if (key == "tolerance") return format_real(cfg.dla.tolerance);
  if (key == "winner_threshold") {
    return cfg.dla.winner_threshold.is_auto
               ? "auto"
               : std::to_string(cfg.dla.winner_threshold.value);
  }
  if (key == "rho2") return format_real(cfg.dla.rho2);
  if (key == "rho2_lim") return format_real(cfg.dla.rho2_lim);
  if (key == "noise_scale") return format_real(cfg.dla.noise_scale);
  if (key == "seed") return std::to_string(cfg.dla.seed);
  if (key == "shuffle") return cfg.dla.shuffle ? "true" : "false";
  if (key == "quant_mode") {
    return cfg.dla.quantization.mode == QuantizationSpec::Mode::FixedScale
               ? "scale"
               : "minmax";
  }
  if (key == "quant_scale") return format_real(cfg.dla.quantization.scale);
  if (key == "quant_offset") return format_real(cfg.dla.quantization.offset);
  if (key == "quant_minmax_upper") {
    return std::to_string(cfg.dla.quantization.minmax_upper);
  }
  if (key == "exclude_class_column") return cfg.exclude_class_column ? "true" : "false";
  if (key == "htm_desired_local_activity") {
    return std::to_string(cfg.htm.desired_local_activity);
  }
  if (key == "htm_minimum_overlap") {
    return cfg.htm_min_overlap_auto ? "auto" : std::to_string(cfg.htm.minimum_overlap);
  }
  if (key == "htm_initial_permanence") return format_real(cfg.htm.initial_permanence);
  if (key == "htm_mc_runs") return std::to_string(cfg.htm.mc_runs);
  if (key == "htm_tolerance") return format_real(cfg.htm.tolerance);
  if (key == "htm_columns") return std::to_string(cfg.htm.columns);
  if (key == "htm_potential_fraction") return format_real(cfg.htm.potential_fraction);
  if (key == "htm_active_bits") return std::to_string(cfg.htm.active_bits);
  if (key == "htm_bits_per_active") return std::to_string(cfg.htm.bits_per_active);
  if (key == "htm_permanence_increment") {
    return format_real(cfg.htm.permanence_increment);
  }
  if (key == "htm_permanence_decrement") {
    return format_real(cfg.htm.permanence_decrement);
  }
  throw std::invalid_argument("config: unknown key '" + key + "'");
}

// Parses line-oriented `key = value` text. Blank lines and lines starting
// with '#' are skipped; unknown keys are errors.
inline void parse_config_text(RunConfig& cfg, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  ": expected 'key = value'");
    }
    const std::string key = detail::trim(t.substr(0, eq));
    const std::string value = detail::trim(t.substr(eq + 1));
    apply_config_value(cfg, key, value);
  }
}

inline void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw io_error("config: cannot open '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  parse_config_text(cfg, ss.str());
}

// Environment overrides: DLA_<KEY> (uppercased) mirrors each config key.
inline void apply_env_overrides(RunConfig& cfg, const std::string& prefix = "DLA_") {
  for (const auto& key : config_keys()) {
    std::string env_name = prefix;
    for (char c : key) {
      env_name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    if (const char* v = std::getenv(env_name.c_str())) {
      apply_config_value(cfg, key, v);
    }
  }
}

// Canonical `key = value` rendering of the full effective config.
inline std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  for (const auto& key : config_keys()) {
    out << key << " = " << config_value(cfg, key) << "\n";
  }
  return out.str();
}

inline std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Deterministic hash of the full effective config.
inline std::uint64_t config_hash(const RunConfig& cfg) {
  return fnv1a64(serialize_config(cfg));
}

inline std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace dla
