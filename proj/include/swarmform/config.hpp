#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "swarmform/sim.hpp"

namespace swarmform {

/// Filesystem failure (missing or unreadable file), distinct from ConfigError
/// so callers can map the two to different exit codes.
class IoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A SimConfig plus the verifier knobs that share the config file.
struct FileConfig {
  SimConfig sim;
  int verify_depth_limit = 12;
  int verify_branch_depth_limit = 32;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <class T>
inline std::optional<T> try_number(std::string_view s) {
  T value{};
  const char* end = s.data() + s.size();
  auto res = std::from_chars(s.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end) return std::nullopt;
  return value;
}

}  // namespace detail

/// Parses `key = value` lines (dotted camelCase keys, '#' comments). Unknown
/// keys, duplicates, type mismatches, and missing required keys all throw
/// ConfigError naming the key and line.
inline FileConfig parse_config_text(std::string_view text) {
  FileConfig cfg;
  SimConfig& c = cfg.sim;

  struct Key {
    std::string_view name;
    enum { Int, I64, U64, Double, Bool } type;
    void* slot;
    bool required;
    bool seen = false;
  };
  Key keys[] = {
      {"bounds.minX", Key::Int, &c.bounds.min_x, false},
      {"bounds.maxX", Key::Int, &c.bounds.max_x, false},
      {"bounds.minY", Key::Int, &c.bounds.min_y, false},
      {"bounds.maxY", Key::Int, &c.bounds.max_y, false},
      {"bounds.minZ", Key::Int, &c.bounds.min_z, false},
      {"bounds.maxZ", Key::Int, &c.bounds.max_z, false},
      {"shape.p", Key::Int, &c.shape_p, true},
      {"shape.q", Key::Int, &c.shape_q, true},
      {"shape.anchor.x", Key::Int, &c.shape_anchor.x, false},
      {"shape.anchor.y", Key::Int, &c.shape_anchor.y, false},
      {"shape.anchor.z", Key::Int, &c.shape_anchor.z, false},
      {"numRobots", Key::Int, &c.num_robots, true},
      {"numSeeds", Key::Int, &c.num_seeds, false},
      {"faultProbability", Key::Double, &c.fault_probability, false},
      {"rngSeed", Key::U64, &c.rng_seed, true},
      {"maxTicks", Key::I64, &c.max_ticks, true},
      {"restartAfterFault", Key::Bool, &c.restart_after_fault, false},
      {"verify.depthLimit", Key::Int, &cfg.verify_depth_limit, false},
      {"verify.branchDepthLimit", Key::Int, &cfg.verify_branch_depth_limit,
       false},
  };

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = detail::trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    const std::string_view key = detail::trim(line.substr(0, eq));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected key = value");
    }

    Key* entry = nullptr;
    for (Key& k : keys) {
      if (k.name == key) {
        entry = &k;
        break;
      }
    }
    if (entry == nullptr) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": unknown key '" + std::string(key) + "'");
    }
    if (entry->seen) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": duplicate key '" + std::string(key) + "'");
    }
    entry->seen = true;

    const auto bad_value = [&]() {
      return ConfigError("line " + std::to_string(line_no) +
                         ": bad value '" + std::string(value) +
                         "' for key '" + std::string(key) + "'");
    };
    switch (entry->type) {
      case Key::Int: {
        auto v = detail::try_number<int>(value);
        if (!v) throw bad_value();
        *static_cast<int*>(entry->slot) = *v;
        break;
      }
      case Key::I64: {
        auto v = detail::try_number<std::int64_t>(value);
        if (!v) throw bad_value();
        *static_cast<std::int64_t*>(entry->slot) = *v;
        break;
      }
      case Key::U64: {
        auto v = detail::try_number<std::uint64_t>(value);
        if (!v) throw bad_value();
        *static_cast<std::uint64_t*>(entry->slot) = *v;
        break;
      }
      case Key::Double: {
        auto v = detail::try_number<double>(value);
        if (!v) throw bad_value();
        *static_cast<double*>(entry->slot) = *v;
        break;
      }
      case Key::Bool: {
        if (value == "true") {
          *static_cast<bool*>(entry->slot) = true;
        } else if (value == "false") {
          *static_cast<bool*>(entry->slot) = false;
        } else {
          throw bad_value();
        }
        break;
      }
    }
  }

  for (const Key& k : keys) {
    if (k.required && !k.seen) {
      throw ConfigError("required key '" + std::string(k.name) +
                        "' is missing");
    }
  }
  return cfg;
}

/// Reads and parses a config file. Throws IoError when the file cannot be
/// read, ConfigError when its content is invalid.
inline FileConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open config file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) {
    throw IoError("cannot read config file '" + path + "'");
  }
  return parse_config_text(buf.str());
}

}  // namespace swarmform
