#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "drugsim/energy.hpp"
#include "drugsim/topology.hpp"

namespace drugsim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ProtocolKind { Drug, Spin, Flooding };

inline const char* protocol_name(ProtocolKind p) {
  switch (p) {
    case ProtocolKind::Drug:
      return "drug";
    case ProtocolKind::Spin:
      return "spin";
    case ProtocolKind::Flooding:
      return "flooding";
  }
  return "?";
}

inline ProtocolKind parse_protocol(const std::string& text) {
  if (text == "drug") return ProtocolKind::Drug;
  if (text == "spin") return ProtocolKind::Spin;
  if (text == "flooding") return ProtocolKind::Flooding;
  throw ConfigError("protocol: expected one of drug|spin|flooding, got '" +
                    text + "'");
}

enum class SinkPlacement { Center, Corner, Explicit };

/// Full description of one simulation run. Every field has a default; a run
/// is a pure function of this struct.
struct RunConfig {
  int node_count = 100;       // sensor nodes; the sink is an extra node
  double area_w_m = 1000.0;
  double area_h_m = 1000.0;
  double radio_range_m = 150.0;
  SinkPlacement sink_placement = SinkPlacement::Center;
  double sink_x_m = 0.0;      // used when sink_placement == Explicit
  double sink_y_m = 0.0;
  ProtocolKind protocol = ProtocolKind::Drug;

  EnergyModel energy;

  std::int64_t data_bits = 2000;
  std::int64_t control_bits = 64;

  double per_hop_latency_s = 0.010;
  double ack_wait_s = 0.050;
  int max_retries = 2;

  double event_rate_hz = 1.0;
  double duration_s = 500.0;
  double snapshot_s = 5.0;

  std::uint64_t seed = 0;
  double reinit_period_s = 0.0;  // 0 disables periodic gradient refresh
  bool trace = false;

  /// Bits on the wire for a DATA message: payload plus descriptor header.
  std::int64_t data_message_bits() const { return data_bits + control_bits; }

  Position sink_position() const {
    switch (sink_placement) {
      case SinkPlacement::Center:
        return {area_w_m / 2.0, area_h_m / 2.0};
      case SinkPlacement::Corner:
        return {0.0, 0.0};
      case SinkPlacement::Explicit:
        return {sink_x_m, sink_y_m};
    }
    return {0.0, 0.0};
  }
};

inline void validate(const RunConfig& cfg) {
  if (cfg.node_count < 1) throw ConfigError("node_count: must be at least 1");
  if (cfg.area_w_m <= 0.0) throw ConfigError("area_w_m: must be positive");
  if (cfg.area_h_m <= 0.0) throw ConfigError("area_h_m: must be positive");
  if (cfg.radio_range_m <= 0.0)
    throw ConfigError("radio_range_m: must be positive");
  if (cfg.energy.e_elec <= 0.0)
    throw ConfigError("e_elec_j_per_bit: must be positive");
  if (cfg.energy.eps_amp <= 0.0)
    throw ConfigError("eps_amp_j_per_bit_m2: must be positive");
  if (cfg.energy.initial_energy <= 0.0)
    throw ConfigError("initial_energy_j: must be positive");
  if (cfg.energy.participation_threshold <= 0.0)
    throw ConfigError("threshold_j: must be positive");
  if (cfg.energy.participation_threshold >= cfg.energy.initial_energy)
    throw ConfigError("threshold_j: must be below initial_energy_j");
  if (cfg.data_bits <= 0) throw ConfigError("data_bits: must be positive");
  if (cfg.control_bits < 0)
    throw ConfigError("control_bits: must be non-negative");
  if (cfg.control_bits >= cfg.data_bits)
    throw ConfigError("control_bits: must be smaller than data_bits");
  if (cfg.per_hop_latency_s <= 0.0)
    throw ConfigError("per_hop_latency_s: must be positive");
  if (cfg.ack_wait_s <= 0.0) throw ConfigError("ack_wait_s: must be positive");
  if (cfg.max_retries < 0)
    throw ConfigError("max_retries: must be non-negative");
  if (cfg.event_rate_hz < 0.0)
    throw ConfigError("event_rate_hz: must be non-negative");
  if (cfg.duration_s <= 0.0) throw ConfigError("duration_s: must be positive");
  if (cfg.snapshot_s <= 0.0) throw ConfigError("snapshot_s: must be positive");
  if (cfg.reinit_period_s < 0.0)
    throw ConfigError("reinit_period_s: must be non-negative");
  if (cfg.sink_placement == SinkPlacement::Explicit) {
    if (cfg.sink_x_m < 0.0 || cfg.sink_x_m > cfg.area_w_m ||
        cfg.sink_y_m < 0.0 || cfg.sink_y_m > cfg.area_h_m) {
      throw ConfigError("sink: explicit coordinates outside service area");
    }
  }
}

namespace detail {

inline double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  }
}

inline std::int64_t parse_int(const std::string& key, const std::string& text) {
  std::int64_t v = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  }
  return v;
}

inline std::uint64_t parse_uint(const std::string& key,
                                const std::string& text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(key + ": expected an unsigned integer, got '" + text +
                      "'");
  }
  return v;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "1" || text == "true") return true;
  if (text == "0" || text == "false") return false;
  throw ConfigError(key + ": expected 0|1|true|false, got '" + text + "'");
}

inline void apply_sink(RunConfig& cfg, const std::string& text) {
  if (text == "center") {
    cfg.sink_placement = SinkPlacement::Center;
    return;
  }
  if (text == "corner") {
    cfg.sink_placement = SinkPlacement::Corner;
    return;
  }
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw ConfigError("sink: expected center|corner|<x>,<y>, got '" + text +
                      "'");
  }
  cfg.sink_placement = SinkPlacement::Explicit;
  cfg.sink_x_m = parse_double("sink", text.substr(0, comma));
  cfg.sink_y_m = parse_double("sink", text.substr(comma + 1));
}

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace detail

/// Applies one `key = value` pair. Unknown keys and malformed values raise
/// ConfigError naming the key.
inline void apply_config_entry(RunConfig& cfg, const std::string& key,
                               const std::string& value) {
  using namespace detail;
  if (key == "node_count") {
    cfg.node_count = static_cast<int>(parse_int(key, value));
  } else if (key == "area_w_m") {
    cfg.area_w_m = parse_double(key, value);
  } else if (key == "area_h_m") {
    cfg.area_h_m = parse_double(key, value);
  } else if (key == "radio_range_m") {
    cfg.radio_range_m = parse_double(key, value);
  } else if (key == "sink") {
    apply_sink(cfg, value);
  } else if (key == "protocol") {
    cfg.protocol = parse_protocol(value);
  } else if (key == "e_elec_j_per_bit") {
    cfg.energy.e_elec = parse_double(key, value);
  } else if (key == "eps_amp_j_per_bit_m2") {
    cfg.energy.eps_amp = parse_double(key, value);
  } else if (key == "initial_energy_j") {
    cfg.energy.initial_energy = parse_double(key, value);
  } else if (key == "threshold_j") {
    cfg.energy.participation_threshold = parse_double(key, value);
  } else if (key == "data_bits") {
    cfg.data_bits = parse_int(key, value);
  } else if (key == "control_bits") {
    cfg.control_bits = parse_int(key, value);
  } else if (key == "per_hop_latency_s") {
    cfg.per_hop_latency_s = parse_double(key, value);
  } else if (key == "ack_wait_s") {
    cfg.ack_wait_s = parse_double(key, value);
  } else if (key == "max_retries") {
    cfg.max_retries = static_cast<int>(parse_int(key, value));
  } else if (key == "event_rate_hz") {
    cfg.event_rate_hz = parse_double(key, value);
  } else if (key == "duration_s") {
    cfg.duration_s = parse_double(key, value);
  } else if (key == "snapshot_s") {
    cfg.snapshot_s = parse_double(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_uint(key, value);
  } else if (key == "reinit_period_s") {
    cfg.reinit_period_s = parse_double(key, value);
  } else if (key == "trace") {
    cfg.trace = parse_bool(key, value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

/// Parses the flat `key = value` config format. '#' starts a comment; blank
/// lines are ignored. Keys not present keep their defaults.
inline RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    }
    apply_config_entry(cfg, key, value);
  }
  return cfg;
}

inline RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  return parse_config(in);
}

}  // namespace drugsim
