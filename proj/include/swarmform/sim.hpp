#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "swarmform/rng.hpp"
#include "swarmform/statemachine.hpp"
#include "swarmform/world.hpp"

namespace swarmform {

/// Invalid configuration (bad value, impossible geometry, guard violation).
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SimConfig {
  WorldBounds bounds;
  int shape_p = 0;
  int shape_q = 0;
  Location shape_anchor{0, 0, 0};
  int num_robots = 0;
  int num_seeds = 1;
  double fault_probability = 0.0;
  std::uint64_t rng_seed = 0;
  std::int64_t max_ticks = 0;
  bool restart_after_fault = false;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

/// Checks every SimConfig invariant and returns the resolved target shape.
/// Error messages name the offending config key.
inline ShapeSpec validate_config(const SimConfig& c) {
  if (!c.bounds.valid()) {
    throw ConfigError("bounds: min exceeds max on some axis");
  }
  if (c.shape_p < 1) throw ConfigError("shape.p must be >= 1");
  if (c.shape_q < 1) throw ConfigError("shape.q must be >= 1");
  ShapeSpec spec;
  try {
    spec = make_shape_spec(c.shape_p, c.shape_q, c.shape_anchor, c.bounds);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("shape.anchor/shape.p/shape.q: ") + e.what());
  }
  if (c.num_robots < 1) throw ConfigError("numRobots must be >= 1");
  if (c.num_seeds < 1) throw ConfigError("numSeeds must be >= 1");
  if (c.num_seeds > spec.dimension()) {
    throw ConfigError("numSeeds " + std::to_string(c.num_seeds) +
                      " exceeds shape dimension " +
                      std::to_string(spec.dimension()));
  }
  if (c.num_seeds > c.num_robots) {
    throw ConfigError("numSeeds " + std::to_string(c.num_seeds) +
                      " exceeds numRobots " + std::to_string(c.num_robots));
  }
  if (!(c.fault_probability >= 0.0 && c.fault_probability <= 1.0)) {
    throw ConfigError("faultProbability must lie in [0, 1]");
  }
  if (c.max_ticks < 1) throw ConfigError("maxTicks must be >= 1");
  if (static_cast<std::int64_t>(c.num_robots) > c.bounds.plane_cells()) {
    throw ConfigError("numRobots " + std::to_string(c.num_robots) +
                      " exceeds " + std::to_string(c.bounds.plane_cells()) +
                      " cells in the z=0 plane");
  }
  return spec;
}

/// The three run-ending conditions.
enum class TerminationKind : std::uint8_t {
  CompleteAllLocalized,  // shape complete, no mover left
  StalledIncomplete,     // shape incomplete, no mover left
  CompleteWithMovers,    // shape complete, movers still roaming
};

enum class EventKind : std::uint8_t {
  StartMove,
  Step,
  Fault,
  Join,
  ShapePartial,
  ShapeComplete,
  Terminated,
};

inline std::string_view to_string(TerminationKind k) {
  switch (k) {
    case TerminationKind::CompleteAllLocalized: return "complete_all_localized";
    case TerminationKind::StalledIncomplete: return "stalled_incomplete";
    case TerminationKind::CompleteWithMovers: return "complete_with_movers";
  }
  return "?";
}

inline std::optional<TerminationKind> parse_termination(std::string_view s) {
  if (s == "complete_all_localized") return TerminationKind::CompleteAllLocalized;
  if (s == "stalled_incomplete") return TerminationKind::StalledIncomplete;
  if (s == "complete_with_movers") return TerminationKind::CompleteWithMovers;
  return std::nullopt;
}

inline std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::StartMove: return "start_move";
    case EventKind::Step: return "step";
    case EventKind::Fault: return "fault";
    case EventKind::Join: return "join";
    case EventKind::ShapePartial: return "shape_partial";
    case EventKind::ShapeComplete: return "shape_complete";
    case EventKind::Terminated: return "terminated";
  }
  return "?";
}

inline std::optional<EventKind> parse_event_kind(std::string_view s) {
  if (s == "start_move") return EventKind::StartMove;
  if (s == "step") return EventKind::Step;
  if (s == "fault") return EventKind::Fault;
  if (s == "join") return EventKind::Join;
  if (s == "shape_partial") return EventKind::ShapePartial;
  if (s == "shape_complete") return EventKind::ShapeComplete;
  if (s == "terminated") return EventKind::Terminated;
  return std::nullopt;
}

/// One serialized record of the per-tick event stream.
struct TraceEvent {
  std::int64_t tick = 0;
  EventKind kind = EventKind::Step;
  std::optional<int> robot_id;
  Report report = Report::Success;
  std::optional<Location> location;
  std::optional<TerminationKind> termination;  // Terminated events only

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

/// Full joint simulation state. A value: copy it to fork a run.
struct SimState {
  SimConfig config;
  std::int64_t tick = 0;
  std::vector<RobotRecord> robots;  // index == robot id
  ShapeRecord shape;
  std::map<Location, int> occupancy;  // cell -> occupying robot id
  DeterministicRng rng;
  std::optional<TerminationKind> terminated;
};

namespace engine {

/// True when the robot may localize here: it is moving, stands on a target
/// cell (occupancy exclusivity means no one else holds it), and a localized
/// robot sits in its 4-neighborhood.
inline bool join_eligible(const SimState& s, int id) {
  const RobotRecord& r = s.robots[static_cast<std::size_t>(id)];
  if (r.state != RobotState::UnLocalize) return false;
  if (!s.shape.spec.is_target(r.location)) return false;
  for (const Location& n : neighbors(r.location, s.config.bounds)) {
    auto it = s.occupancy.find(n);
    if (it != s.occupancy.end() &&
        s.robots[static_cast<std::size_t>(it->second)].state ==
            RobotState::Localize) {
      return true;
    }
  }
  return false;
}

/// Occupancy restricted to target cells, counting only localized members.
inline TargetOccupancy target_occupancy(const SimState& s) {
  TargetOccupancy occ;
  for (const Location& cell : s.shape.spec.cells) {
    std::optional<int> holder;
    auto it = s.occupancy.find(cell);
    if (it != s.occupancy.end()) {
      const RobotRecord& r = s.robots[static_cast<std::size_t>(it->second)];
      if (r.state == RobotState::Localize &&
          s.shape.members.count(r.id) != 0) {
        holder = r.id;
      }
    }
    occ.emplace(cell, holder);
  }
  return occ;
}

inline void apply_start_move(SimState& s, int id,
                             std::vector<TraceEvent>& events) {
  RobotRecord& r = s.robots[static_cast<std::size_t>(id)];
  auto res = start_move(r);
  r = res.robot;
  events.push_back(TraceEvent{s.tick, EventKind::StartMove, id, res.report,
                              r.location, std::nullopt});
}

inline void apply_fault(SimState& s, int id, std::vector<TraceEvent>& events) {
  RobotRecord& r = s.robots[static_cast<std::size_t>(id)];
  auto res = fault_occur(r);
  r = res.robot;
  events.push_back(TraceEvent{s.tick, EventKind::Fault, id, res.report,
                              r.location, std::nullopt});
}

/// Localizes the robot, attributes it to the shape, and certifies
/// completion when the last slot fills.
inline void apply_join(SimState& s, int id, std::vector<TraceEvent>& events) {
  RobotRecord& r = s.robots[static_cast<std::size_t>(id)];
  auto res = join_shape(r);
  r = res.robot;
  events.push_back(TraceEvent{s.tick, EventKind::Join, id, res.report,
                              r.location, std::nullopt});

  auto joined = robot_joins(s.shape, id);
  s.shape = joined.shape;
  events.push_back(TraceEvent{s.tick, EventKind::ShapePartial, id,
                              joined.report, r.location, std::nullopt});

  auto checked = swarm_join_check(s.shape, target_occupancy(s));
  if (checked.shape.state == ShapeState::Complete &&
      s.shape.state != ShapeState::Complete) {
    s.shape = checked.shape;
    events.push_back(TraceEvent{s.tick, EventKind::ShapeComplete, id,
                                checked.report, r.location, std::nullopt});
  }
}

/// Moves the robot to its in-bounds neighbor choices[index]; a destination
/// held by any robot blocks the move, consumed as a no-op step.
inline void apply_step(SimState& s, int id,
                       const std::vector<Location>& choices, std::size_t index,
                       std::vector<TraceEvent>& events) {
  RobotRecord& r = s.robots[static_cast<std::size_t>(id)];
  const Location dest = choices[index];
  if (s.occupancy.find(dest) == s.occupancy.end()) {
    s.occupancy.erase(r.location);
    s.occupancy.emplace(dest, id);
    r.location = dest;
  }
  events.push_back(TraceEvent{s.tick, EventKind::Step, id, Report::Success,
                              r.location, std::nullopt});
}

/// No-op step for a robot with no admissible destination.
inline void apply_step_stay(SimState& s, int id,
                            std::vector<TraceEvent>& events) {
  const RobotRecord& r = s.robots[static_cast<std::size_t>(id)];
  events.push_back(TraceEvent{s.tick, EventKind::Step, id, Report::Success,
                              r.location, std::nullopt});
}

/// Tick-0 state holding only the seeds: pre-localized on the cells nearest
/// the origin, registered as members, shape checked once.
inline SimState seed_state(const SimConfig& config, const ShapeSpec& spec) {
  SimState s{config, 0,  {}, shape_init(spec),
             {},     DeterministicRng(config.rng_seed), std::nullopt};
  s.robots.reserve(static_cast<std::size_t>(config.num_robots));
  const std::vector<Location> seeds = seed_cells(spec, config.num_seeds);
  for (int id = 0; id < config.num_seeds; ++id) {
    RobotRecord r = robot_init(id, seeds[static_cast<std::size_t>(id)]);
    r = start_move(r).robot;
    r = join_shape(r).robot;
    s.robots.push_back(r);
    s.occupancy.emplace(r.location, id);
    s.shape = robot_joins(s.shape, id).shape;
  }
  s.shape = swarm_join_check(s.shape, target_occupancy(s)).shape;
  return s;
}

/// Unoccupied z=0 cells in ascending Location order.
inline std::vector<Location> free_plane_cells(const SimState& s) {
  std::vector<Location> cells;
  cells.reserve(static_cast<std::size_t>(s.config.bounds.plane_cells()));
  for (int x = s.config.bounds.min_x; x <= s.config.bounds.max_x; ++x) {
    for (int y = s.config.bounds.min_y; y <= s.config.bounds.max_y; ++y) {
      Location cell{x, y, 0};
      if (s.occupancy.find(cell) == s.occupancy.end()) {
        cells.push_back(cell);
      }
    }
  }
  return cells;
}

}  // namespace engine

/// Builds tick-0 state with the non-seed robots at the given cells
/// (ascending id order). Cells must be distinct free z=0 cells in bounds.
inline SimState init_sim_placed(const SimConfig& config,
                                const std::vector<Location>& cells) {
  ShapeSpec spec = validate_config(config);
  SimState s = engine::seed_state(config, spec);
  if (static_cast<int>(cells.size()) != config.num_robots - config.num_seeds) {
    throw ConfigError("placement needs " +
                      std::to_string(config.num_robots - config.num_seeds) +
                      " cells, got " + std::to_string(cells.size()));
  }
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const Location& cell = cells[k];
    if (cell.z != 0 || !config.bounds.contains(cell.x, cell.y, cell.z)) {
      throw ConfigError("placement cell outside the z=0 plane");
    }
    if (s.occupancy.find(cell) != s.occupancy.end()) {
      throw ConfigError("placement cell occupied twice");
    }
    const int id = config.num_seeds + static_cast<int>(k);
    s.robots.push_back(robot_init(id, cell));
    s.occupancy.emplace(cell, id);
  }
  return s;
}

/// Builds tick-0 state: seeds pre-localized on the cells nearest the origin
/// and registered as members, remaining robots Stationary on distinct
/// uniformly drawn free cells of the z=0 plane.
inline SimState init_sim(const SimConfig& config) {
  ShapeSpec spec = validate_config(config);
  SimState s = engine::seed_state(config, spec);
  std::vector<Location> free_cells = engine::free_plane_cells(s);
  for (int id = config.num_seeds; id < config.num_robots; ++id) {
    const std::size_t idx = s.rng.pick_index(free_cells.size());
    const Location cell = free_cells[idx];
    free_cells.erase(free_cells.begin() + static_cast<std::ptrdiff_t>(idx));
    s.robots.push_back(robot_init(id, cell));
    s.occupancy.emplace(cell, id);
  }
  return s;
}

/// Advances one synchronous sweep in ascending robot id and returns its
/// events, stamped with the pre-increment tick.
///
/// Tick 0 broadcasts start_move to every stationary robot. Later ticks, per
/// moving robot: fault with faultProbability, else join when eligible, else
/// one uniform random step (blocked by occupied destinations). Stationary
/// robots restart only when restartAfterFault is set.
inline std::vector<TraceEvent> advance(SimState& s) {
  if (s.terminated.has_value()) {
    throw std::logic_error("tick applied after termination");
  }
  std::vector<TraceEvent> events;
  if (s.tick == 0) {
    for (int id = 0; id < s.config.num_robots; ++id) {
      if (s.robots[static_cast<std::size_t>(id)].state ==
          RobotState::Stationary) {
        engine::apply_start_move(s, id, events);
      }
    }
    s.tick += 1;
    return events;
  }
  for (int id = 0; id < s.config.num_robots; ++id) {
    switch (s.robots[static_cast<std::size_t>(id)].state) {
      case RobotState::Localize:
        break;
      case RobotState::Stationary:
        if (s.config.restart_after_fault) {
          engine::apply_start_move(s, id, events);
        }
        break;
      case RobotState::UnLocalize: {
        if (s.config.fault_probability > 0.0 &&
            s.rng.unit_draw() < s.config.fault_probability) {
          engine::apply_fault(s, id, events);
          break;
        }
        if (engine::join_eligible(s, id)) {
          engine::apply_join(s, id, events);
          break;
        }
        const auto choices = neighbors(
            s.robots[static_cast<std::size_t>(id)].location, s.config.bounds);
        if (choices.empty()) {
          engine::apply_step_stay(s, id, events);
        } else {
          engine::apply_step(s, id, choices, s.rng.pick_index(choices.size()),
                             events);
        }
        break;
      }
    }
  }
  s.tick += 1;
  return events;
}

/// Evaluates the three termination conditions. A stationary robot counts as
/// a waiting mover while restartAfterFault is set, since it resumes next
/// tick; without restart, faults are permanent.
inline std::optional<TerminationKind> check_termination(const SimState& s) {
  int movers = 0;
  int stationary = 0;
  for (const RobotRecord& r : s.robots) {
    if (r.state == RobotState::UnLocalize) ++movers;
    if (r.state == RobotState::Stationary) ++stationary;
  }
  const bool pending_restart = s.config.restart_after_fault && stationary > 0;
  const bool waiting = movers > 0 || pending_restart;
  const bool complete = s.shape.state == ShapeState::Complete;
  if (complete && !waiting) return TerminationKind::CompleteAllLocalized;
  if (!complete && !waiting) return TerminationKind::StalledIncomplete;
  if (complete) return TerminationKind::CompleteWithMovers;
  return std::nullopt;
}

struct RunSummary {
  std::optional<TerminationKind> termination;  // nullopt = tick budget hit
  std::int64_t final_tick = 0;
  std::array<std::int64_t, 5> report_counts{};  // indexed by Report
  std::vector<TraceEvent> trace;
  SimState final_state;
};

/// Runs tick sweeps until a termination condition fires or maxTicks sweeps
/// elapse. Identical configs produce identical traces byte for byte.
inline RunSummary run(const SimConfig& config) {
  SimState state = init_sim(config);
  RunSummary summary{std::nullopt, 0, {}, {}, state};
  for (std::int64_t i = 0; i < config.max_ticks; ++i) {
    std::vector<TraceEvent> events = advance(state);
    for (const TraceEvent& e : events) {
      summary.report_counts[static_cast<std::size_t>(e.report)] += 1;
    }
    summary.trace.insert(summary.trace.end(), events.begin(), events.end());
    if (auto kind = check_termination(state)) {
      state.terminated = kind;
      summary.termination = kind;
      summary.final_tick = state.tick - 1;
      summary.trace.push_back(TraceEvent{summary.final_tick,
                                         EventKind::Terminated, std::nullopt,
                                         Report::Success, std::nullopt, kind});
      break;
    }
  }
  if (!summary.termination.has_value()) {
    summary.final_tick = state.tick - 1;
  }
  summary.final_state = state;
  return summary;
}

}  // namespace swarmform
