#pragma once

#include <charconv>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "swarmform/sim.hpp"

namespace swarmform {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr int kTraceFormat = 1;

/// Malformed trace text (bad header, bad event line, wrong field count).
class TraceFormatError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);  // shortest round-trip form
}

template <class T>
inline T parse_number(std::string_view s, std::string_view what) {
  T value{};
  const char* end = s.data() + s.size();
  auto res = std::from_chars(s.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    throw TraceFormatError("bad " + std::string(what) + " value '" +
                           std::string(s) + "'");
  }
  return value;
}

inline bool parse_bool(std::string_view s, std::string_view what) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw TraceFormatError("bad " + std::string(what) + " value '" +
                         std::string(s) + "'");
}

inline std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    std::size_t j = line.find(' ', i);
    if (j == std::string_view::npos) j = line.size();
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j + 1;
  }
  return out;
}

}  // namespace detail

/// The resolved config as "key=value ..." in fixed key order.
inline std::string format_config_kv(const SimConfig& c) {
  std::string out;
  auto add = [&out](std::string_view key, const std::string& value) {
    if (!out.empty()) out += ' ';
    out += key;
    out += '=';
    out += value;
  };
  add("bounds.minX", std::to_string(c.bounds.min_x));
  add("bounds.maxX", std::to_string(c.bounds.max_x));
  add("bounds.minY", std::to_string(c.bounds.min_y));
  add("bounds.maxY", std::to_string(c.bounds.max_y));
  add("bounds.minZ", std::to_string(c.bounds.min_z));
  add("bounds.maxZ", std::to_string(c.bounds.max_z));
  add("shape.p", std::to_string(c.shape_p));
  add("shape.q", std::to_string(c.shape_q));
  add("shape.anchor.x", std::to_string(c.shape_anchor.x));
  add("shape.anchor.y", std::to_string(c.shape_anchor.y));
  add("shape.anchor.z", std::to_string(c.shape_anchor.z));
  add("numRobots", std::to_string(c.num_robots));
  add("numSeeds", std::to_string(c.num_seeds));
  add("faultProbability", detail::format_double(c.fault_probability));
  add("rngSeed", std::to_string(c.rng_seed));
  add("maxTicks", std::to_string(c.max_ticks));
  add("restartAfterFault", c.restart_after_fault ? "true" : "false");
  return out;
}

inline std::string format_trace_header(const SimConfig& c) {
  return "#swarmform-trace format=" + std::to_string(kTraceFormat) +
         " version=" + std::string(kVersion) + " " + format_config_kv(c);
}

/// `<tick> <kind> <robotId|-> <report> <x|-> <y|-> <z|->` plus a trailing
/// termination kind on terminated lines.
inline std::string format_event(const TraceEvent& e) {
  std::string out = std::to_string(e.tick);
  out += ' ';
  out += to_string(e.kind);
  out += ' ';
  out += e.robot_id.has_value() ? std::to_string(*e.robot_id) : "-";
  out += ' ';
  out += to_string(e.report);
  if (e.location.has_value()) {
    out += ' ';
    out += std::to_string(e.location->x);
    out += ' ';
    out += std::to_string(e.location->y);
    out += ' ';
    out += std::to_string(e.location->z);
  } else {
    out += " - - -";
  }
  if (e.termination.has_value()) {
    out += ' ';
    out += to_string(*e.termination);
  }
  return out;
}

inline SimConfig parse_trace_header(std::string_view line) {
  const auto tokens = detail::split_spaces(line);
  if (tokens.size() < 3 || tokens[0] != "#swarmform-trace") {
    throw TraceFormatError("missing #swarmform-trace header");
  }
  if (tokens[1] != "format=" + std::to_string(kTraceFormat)) {
    throw TraceFormatError("unsupported trace format token '" +
                           std::string(tokens[1]) + "'");
  }
  if (tokens[2].substr(0, 8) != "version=") {
    throw TraceFormatError("missing version token");
  }

  SimConfig c;
  bool seen[17] = {};
  static constexpr std::string_view kKeys[17] = {
      "bounds.minX",    "bounds.maxX",      "bounds.minY",
      "bounds.maxY",    "bounds.minZ",      "bounds.maxZ",
      "shape.p",        "shape.q",          "shape.anchor.x",
      "shape.anchor.y", "shape.anchor.z",   "numRobots",
      "numSeeds",       "faultProbability", "rngSeed",
      "maxTicks",       "restartAfterFault"};
  int* const int_slots[13] = {
      &c.bounds.min_x,    &c.bounds.max_x,  &c.bounds.min_y,
      &c.bounds.max_y,    &c.bounds.min_z,  &c.bounds.max_z,
      &c.shape_p,         &c.shape_q,       &c.shape_anchor.x,
      &c.shape_anchor.y,  &c.shape_anchor.z, &c.num_robots,
      &c.num_seeds};

  for (std::size_t t = 3; t < tokens.size(); ++t) {
    const std::string_view tok = tokens[t];
    const std::size_t eq = tok.find('=');
    if (eq == std::string_view::npos) {
      throw TraceFormatError("header token '" + std::string(tok) +
                             "' is not key=value");
    }
    const std::string_view key = tok.substr(0, eq);
    const std::string_view value = tok.substr(eq + 1);
    std::size_t k = 0;
    while (k < 17 && kKeys[k] != key) ++k;
    if (k == 17) {
      throw TraceFormatError("unknown header key '" + std::string(key) + "'");
    }
    if (seen[k]) {
      throw TraceFormatError("duplicate header key '" + std::string(key) +
                             "'");
    }
    seen[k] = true;
    if (k < 13) {
      *int_slots[k] = detail::parse_number<int>(value, key);
    } else if (key == "faultProbability") {
      c.fault_probability = detail::parse_number<double>(value, key);
    } else if (key == "rngSeed") {
      c.rng_seed = detail::parse_number<std::uint64_t>(value, key);
    } else if (key == "maxTicks") {
      c.max_ticks = detail::parse_number<std::int64_t>(value, key);
    } else {
      c.restart_after_fault = detail::parse_bool(value, key);
    }
  }
  for (std::size_t k = 0; k < 17; ++k) {
    if (!seen[k]) {
      throw TraceFormatError("header misses key '" + std::string(kKeys[k]) +
                             "'");
    }
  }
  return c;
}

inline TraceEvent parse_event(std::string_view line) {
  const auto tokens = detail::split_spaces(line);
  if (tokens.size() != 7 && tokens.size() != 8) {
    throw TraceFormatError("event line has " + std::to_string(tokens.size()) +
                           " fields, want 7 or 8");
  }
  TraceEvent e;
  e.tick = detail::parse_number<std::int64_t>(tokens[0], "tick");
  const auto kind = parse_event_kind(tokens[1]);
  if (!kind.has_value()) {
    throw TraceFormatError("unknown event kind '" + std::string(tokens[1]) +
                           "'");
  }
  e.kind = *kind;
  if (tokens[2] != "-") {
    e.robot_id = detail::parse_number<int>(tokens[2], "robotId");
  }
  const auto report = parse_report(tokens[3]);
  if (!report.has_value()) {
    throw TraceFormatError("unknown report '" + std::string(tokens[3]) + "'");
  }
  e.report = *report;
  const bool has_location = tokens[4] != "-";
  if (has_location != (tokens[5] != "-") || has_location != (tokens[6] != "-")) {
    throw TraceFormatError("location fields must all be set or all be '-'");
  }
  if (has_location) {
    e.location = Location{detail::parse_number<int>(tokens[4], "x"),
                          detail::parse_number<int>(tokens[5], "y"),
                          detail::parse_number<int>(tokens[6], "z")};
  }
  if (e.kind == EventKind::Terminated) {
    if (tokens.size() != 8) {
      throw TraceFormatError("terminated event misses termination kind");
    }
    const auto term = parse_termination(tokens[7]);
    if (!term.has_value()) {
      throw TraceFormatError("unknown termination kind '" +
                             std::string(tokens[7]) + "'");
    }
    e.termination = term;
  } else if (tokens.size() == 8) {
    throw TraceFormatError("unexpected 8th field on non-terminated event");
  }
  return e;
}

inline void write_trace(std::ostream& os, const SimConfig& config,
                        const std::vector<TraceEvent>& events) {
  os << format_trace_header(config) << '\n';
  for (const TraceEvent& e : events) {
    os << format_event(e) << '\n';
  }
}

}  // namespace swarmform
