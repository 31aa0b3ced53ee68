#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

#include "swarmform/world.hpp"

namespace swarmform {

/// Robot lifecycle: Stationary (not moving, initial or faulted),
/// UnLocalize (random walk), Localize (permanently part of the shape).
enum class RobotState : std::uint8_t { Stationary, UnLocalize, Localize };

/// Shape lifecycle, totally ordered Empty < Partial < Complete.
enum class ShapeState : std::uint8_t { Empty, Partial, Complete };

/// Outcome of every total operation. Non-Success reports always leave the
/// record unchanged.
enum class Report : std::uint8_t {
  Success,
  AlreadyMoving,
  AlreadyFaulted,
  AlreadyJoined,
  ShapeCompleted,
};

inline std::string_view to_string(RobotState s) {
  switch (s) {
    case RobotState::Stationary: return "stationary";
    case RobotState::UnLocalize: return "unlocalize";
    case RobotState::Localize: return "localize";
  }
  return "?";
}

inline std::string_view to_string(ShapeState s) {
  switch (s) {
    case ShapeState::Empty: return "empty";
    case ShapeState::Partial: return "partial";
    case ShapeState::Complete: return "complete";
  }
  return "?";
}

inline std::string_view to_string(Report r) {
  switch (r) {
    case Report::Success: return "success";
    case Report::AlreadyMoving: return "already_moving";
    case Report::AlreadyFaulted: return "already_faulted";
    case Report::AlreadyJoined: return "already_joined";
    case Report::ShapeCompleted: return "shape_completed";
  }
  return "?";
}

inline std::optional<Report> parse_report(std::string_view s) {
  if (s == "success") return Report::Success;
  if (s == "already_moving") return Report::AlreadyMoving;
  if (s == "already_faulted") return Report::AlreadyFaulted;
  if (s == "already_joined") return Report::AlreadyJoined;
  if (s == "shape_completed") return Report::ShapeCompleted;
  return std::nullopt;
}

/// One robot of the swarm. Ids are unique within a swarm; locations are
/// produced by make_location and therefore always in bounds.
struct RobotRecord {
  int id = 0;
  RobotState state = RobotState::Stationary;
  Location location;

  friend auto operator<=>(const RobotRecord&, const RobotRecord&) = default;
};

/// Target shape plus runtime membership. members holds ids of localized
/// robots attributed to the shape, at most one per target cell.
struct ShapeRecord {
  ShapeSpec spec;
  ShapeState state = ShapeState::Empty;
  std::set<int> members;

  friend bool operator==(const ShapeRecord&, const ShapeRecord&) = default;
};

struct RobotTransition {
  RobotRecord robot;
  Report report = Report::Success;
};

struct ShapeTransition {
  ShapeRecord shape;
  Report report = Report::Success;
};

/// Fresh robot, always Stationary.
inline RobotRecord robot_init(int id, const Location& location) {
  if (id < 0) {
    throw std::invalid_argument("robot id must be non-negative, got " +
                                std::to_string(id));
  }
  return RobotRecord{id, RobotState::Stationary, location};
}

/// Stationary -> UnLocalize. Moving robots report AlreadyMoving, localized
/// robots AlreadyJoined; both are left unchanged.
inline RobotTransition start_move(const RobotRecord& r) {
  switch (r.state) {
    case RobotState::Stationary:
      return {RobotRecord{r.id, RobotState::UnLocalize, r.location},
              Report::Success};
    case RobotState::UnLocalize:
      return {r, Report::AlreadyMoving};
    case RobotState::Localize:
      return {r, Report::AlreadyJoined};
  }
  return {r, Report::AlreadyJoined};
}

/// UnLocalize -> Stationary. Stationary robots report AlreadyFaulted,
/// localized robots AlreadyJoined; both unchanged.
inline RobotTransition fault_occur(const RobotRecord& r) {
  switch (r.state) {
    case RobotState::UnLocalize:
      return {RobotRecord{r.id, RobotState::Stationary, r.location},
              Report::Success};
    case RobotState::Stationary:
      return {r, Report::AlreadyFaulted};
    case RobotState::Localize:
      return {r, Report::AlreadyJoined};
  }
  return {r, Report::AlreadyJoined};
}

/// UnLocalize -> Localize. Spatial eligibility (standing on an unfilled
/// target cell next to a localized robot) is the caller's responsibility;
/// this is the pure state transition. Localize is absorbing.
inline RobotTransition join_shape(const RobotRecord& r) {
  switch (r.state) {
    case RobotState::UnLocalize:
      return {RobotRecord{r.id, RobotState::Localize, r.location},
              Report::Success};
    case RobotState::Localize:
      return {r, Report::AlreadyJoined};
    case RobotState::Stationary:
      return {r, Report::AlreadyFaulted};
  }
  return {r, Report::AlreadyFaulted};
}

/// Fresh shape: Empty state, no members. Rejects degenerate geometry that
/// make_shape_spec would not have produced.
inline ShapeRecord shape_init(const ShapeSpec& spec) {
  if (spec.p < 1 || spec.q < 1 ||
      spec.cells.size() != static_cast<std::size_t>(spec.dimension())) {
    throw std::invalid_argument("invalid shape spec: dimension " +
                                std::to_string(spec.dimension()) + " with " +
                                std::to_string(spec.cells.size()) + " cells");
  }
  return ShapeRecord{spec, ShapeState::Empty, {}};
}

/// Attribute a localized robot to the shape. Empty -> Partial on the first
/// member; later distinct members keep Partial. Duplicates report
/// AlreadyJoined, a complete (or already full) shape reports ShapeCompleted.
inline ShapeTransition robot_joins(const ShapeRecord& s, int robot_id) {
  if (robot_id < 0) {
    throw std::invalid_argument("robot id must be non-negative, got " +
                                std::to_string(robot_id));
  }
  if (s.state == ShapeState::Complete) {
    return {s, Report::ShapeCompleted};
  }
  if (s.members.count(robot_id) != 0) {
    return {s, Report::AlreadyJoined};
  }
  if (s.members.size() >= static_cast<std::size_t>(s.spec.dimension())) {
    // Every slot is taken but swarm_join_check has not yet certified the
    // shape; refusing keeps |members| <= dimension.
    return {s, Report::ShapeCompleted};
  }
  ShapeRecord next = s;
  next.members.insert(robot_id);
  next.state = ShapeState::Partial;
  return {next, Report::Success};
}

/// Occupancy restricted to the target cells: absent value = unfilled slot.
using TargetOccupancy = std::map<Location, std::optional<int>>;

/// Partial -> Complete once every target cell holds a member. A shape that
/// is not yet full reports Success without change; a complete shape reports
/// ShapeCompleted.
inline ShapeTransition swarm_join_check(const ShapeRecord& s,
                                        const TargetOccupancy& occupancy) {
  if (occupancy.size() != s.spec.cells.size()) {
    throw std::invalid_argument(
        "occupancy must cover exactly the target cells");
  }
  for (const Location& cell : s.spec.cells) {
    if (occupancy.find(cell) == occupancy.end()) {
      throw std::invalid_argument(
          "occupancy must cover exactly the target cells");
    }
  }
  if (s.state == ShapeState::Complete) {
    return {s, Report::ShapeCompleted};
  }
  bool all_filled = true;
  for (const auto& [cell, occupant] : occupancy) {
    if (!occupant.has_value() || s.members.count(*occupant) == 0) {
      all_filled = false;
      break;
    }
  }
  if (all_filled && s.state == ShapeState::Partial) {
    ShapeRecord next = s;
    next.state = ShapeState::Complete;
    return {next, Report::Success};
  }
  return {s, Report::Success};
}

}  // namespace swarmform
