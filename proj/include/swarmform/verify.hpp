#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "swarmform/sim.hpp"
#include "swarmform/trace.hpp"

namespace swarmform {

/// Exploration produced a state beyond the depth limit: the result would be
/// a silent truncation, so it is refused instead.
class BoundError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One property failure, with a replayable action path from the initial
/// state to the offending state or edge.
struct Violation {
  std::string kind;    // snake_case property name
  std::string detail;  // human-readable description
  std::vector<std::string> witness;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Observable projection of an exploration state: per-robot control states,
/// shape phase, and how many robots the shape has absorbed.
struct JointState {
  std::vector<RobotState> robot_states;
  ShapeState shape_state = ShapeState::Empty;
  int member_count = 0;

  friend bool operator==(const JointState&, const JointState&) = default;
};

// ---------------------------------------------------------------------------
// Pluggable robot operations (mutation testing)
// ---------------------------------------------------------------------------

using RobotOp = RobotTransition (*)(const RobotRecord&);

struct RobotOpTable {
  RobotOp move = &start_move;
  RobotOp fault = &fault_occur;
  RobotOp join = &join_shape;
};

namespace verify_detail {

inline RobotTransition mutant_move_to_localize(const RobotRecord& r) {
  if (r.state == RobotState::Stationary) {
    RobotRecord next = r;
    next.state = RobotState::Localize;
    return {next, Report::Success};
  }
  return start_move(r);
}

inline RobotTransition mutant_fault_keeps_moving(const RobotRecord& r) {
  if (r.state == RobotState::UnLocalize) {
    return {r, Report::Success};
  }
  return fault_occur(r);
}

inline RobotTransition mutant_join_keeps_moving(const RobotRecord& r) {
  if (r.state == RobotState::UnLocalize) {
    return {r, Report::Success};
  }
  return join_shape(r);
}

inline RobotTransition mutant_join_evicts_member(const RobotRecord& r) {
  if (r.state == RobotState::Localize) {
    RobotRecord next = r;
    next.state = RobotState::UnLocalize;
    return {next, Report::AlreadyJoined};
  }
  return join_shape(r);
}

}  // namespace verify_detail

inline const std::vector<std::string>& mutant_names() {
  static const std::vector<std::string> names = {"m1", "m2", "m3", "m4"};
  return names;
}

/// m1: move drives Stationary straight to Localize.
/// m2: fault leaves UnLocalize in place yet reports success.
/// m3: join leaves UnLocalize in place yet reports success.
/// m4: join evicts a Localize robot back to UnLocalize.
inline std::optional<RobotOpTable> mutant_ops(std::string_view name) {
  RobotOpTable t;
  if (name == "m1") {
    t.move = &verify_detail::mutant_move_to_localize;
  } else if (name == "m2") {
    t.fault = &verify_detail::mutant_fault_keeps_moving;
  } else if (name == "m3") {
    t.join = &verify_detail::mutant_join_keeps_moving;
  } else if (name == "m4") {
    t.join = &verify_detail::mutant_join_evicts_member;
  } else {
    return std::nullopt;
  }
  return t;
}

// ---------------------------------------------------------------------------
// State-machine enumeration
// ---------------------------------------------------------------------------

/// One explored action: a robot operation applied to one robot, a shape
/// attribution for one robot, or the global completion check.
struct FsmAction {
  enum class Kind : std::uint8_t {
    Move,
    Fault,
    Join,
    ShapePartial,
    ShapeComplete,
  };
  Kind kind = Kind::Move;
  int robot = -1;  // -1 for ShapeComplete

  friend bool operator==(const FsmAction&, const FsmAction&) = default;
};

inline std::string label(const FsmAction& a) {
  switch (a.kind) {
    case FsmAction::Kind::Move: return "move(" + std::to_string(a.robot) + ")";
    case FsmAction::Kind::Fault:
      return "fault(" + std::to_string(a.robot) + ")";
    case FsmAction::Kind::Join: return "join(" + std::to_string(a.robot) + ")";
    case FsmAction::Kind::ShapePartial:
      return "shape_partial(" + std::to_string(a.robot) + ")";
    case FsmAction::Kind::ShapeComplete: return "shape_complete";
  }
  return "?";
}

inline FsmAction parse_fsm_action(std::string_view text) {
  if (text == "shape_complete") {
    return FsmAction{FsmAction::Kind::ShapeComplete, -1};
  }
  const std::size_t open = text.find('(');
  if (open == std::string_view::npos || text.back() != ')') {
    throw std::invalid_argument("bad action label '" + std::string(text) +
                                "'");
  }
  const std::string_view name = text.substr(0, open);
  const std::string_view arg = text.substr(open + 1, text.size() - open - 2);
  int robot = -1;
  try {
    robot = std::stoi(std::string(arg));
  } catch (...) {
    throw std::invalid_argument("bad action label '" + std::string(text) +
                                "'");
  }
  FsmAction a;
  a.robot = robot;
  if (name == "move") {
    a.kind = FsmAction::Kind::Move;
  } else if (name == "fault") {
    a.kind = FsmAction::Kind::Fault;
  } else if (name == "join") {
    a.kind = FsmAction::Kind::Join;
  } else if (name == "shape_partial") {
    a.kind = FsmAction::Kind::ShapePartial;
  } else {
    throw std::invalid_argument("bad action label '" + std::string(text) +
                                "'");
  }
  return a;
}

/// Underlying exploration state: locations are irrelevant here, membership
/// identity is not.
struct FsmState {
  std::vector<RobotState> robots;
  ShapeState shape = ShapeState::Empty;
  std::vector<int> members;  // sorted ascending

  friend bool operator==(const FsmState&, const FsmState&) = default;
};

inline JointState project(const FsmState& s) {
  return JointState{s.robots, s.shape, static_cast<int>(s.members.size())};
}

namespace verify_detail {

inline std::string encode_fsm(const FsmState& s) {
  std::string key;
  for (RobotState r : s.robots) {
    key += static_cast<char>('0' + static_cast<int>(r));
  }
  key += '|';
  key += static_cast<char>('0' + static_cast<int>(s.shape));
  key += '|';
  for (int m : s.members) {
    key += std::to_string(m);
    key += ',';
  }
  return key;
}

inline std::string display_fsm(const FsmState& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.robots.size(); ++i) {
    if (i > 0) out += ',';
    out += "SUL"[static_cast<int>(s.robots[i])];
  }
  out += " | ";
  out += to_string(s.shape);
  out += " | {";
  bool first = true;
  for (int m : s.members) {
    if (!first) out += ',';
    first = false;
    out += std::to_string(m);
  }
  out += "})";
  return out;
}

}  // namespace verify_detail

struct FsmOptions {
  int num_robots = 1;
  int shape_dimension = -1;  // -1: one target cell per robot; 0: no shape
  int depth_limit = 12;
  RobotOpTable ops;
};

struct FsmEdge {
  int from = 0;
  FsmAction action;
  Report report = Report::Success;
  int to = 0;
};

struct FsmExploration {
  int num_robots = 0;
  int shape_dimension = 0;
  int depth_limit = 0;
  int max_depth = 0;
  ShapeSpec spec;  // dimension x 1 at the origin; unused when dimension 0
  std::vector<FsmState> states;  // index = node id, breadth-first order
  std::vector<int> depth;
  std::vector<int> parent_edge;  // edge that discovered the node, -1 at root
  std::vector<FsmEdge> edges;
};

/// Applies one action through the (possibly mutated) operation table. Shape
/// actions animate the shape records directly; the completion check sees a
/// synthetic occupancy placing the k-th member on the k-th target cell.
inline std::pair<FsmState, Report> apply_fsm_action(const FsmState& s,
                                                    const FsmAction& a,
                                                    const RobotOpTable& ops,
                                                    const ShapeSpec& spec) {
  FsmState next = s;
  switch (a.kind) {
    case FsmAction::Kind::Move:
    case FsmAction::Kind::Fault:
    case FsmAction::Kind::Join: {
      const RobotRecord rec{a.robot,
                            s.robots[static_cast<std::size_t>(a.robot)],
                            Location{0, 0, 0}};
      const RobotOp op = a.kind == FsmAction::Kind::Move    ? ops.move
                         : a.kind == FsmAction::Kind::Fault ? ops.fault
                                                            : ops.join;
      const RobotTransition res = op(rec);
      next.robots[static_cast<std::size_t>(a.robot)] = res.robot.state;
      return {next, res.report};
    }
    case FsmAction::Kind::ShapePartial: {
      const ShapeRecord rec{spec, s.shape,
                            std::set<int>(s.members.begin(), s.members.end())};
      const ShapeTransition res = robot_joins(rec, a.robot);
      next.shape = res.shape.state;
      next.members.assign(res.shape.members.begin(), res.shape.members.end());
      return {next, res.report};
    }
    case FsmAction::Kind::ShapeComplete: {
      const ShapeRecord rec{spec, s.shape,
                            std::set<int>(s.members.begin(), s.members.end())};
      TargetOccupancy occ;
      for (std::size_t k = 0; k < spec.cells.size(); ++k) {
        std::optional<int> holder;
        if (k < s.members.size()) holder = s.members[k];
        occ.emplace(spec.cells[k], holder);
      }
      const ShapeTransition res = swarm_join_check(rec, occ);
      next.shape = res.shape.state;
      return {next, res.report};
    }
  }
  return {next, Report::Success};
}

/// Robot operations are total; shape attribution is offered per localized
/// robot, the completion check whenever a shape exists.
inline std::vector<FsmAction> available_fsm_actions(const FsmState& s,
                                                    int shape_dimension) {
  std::vector<FsmAction> actions;
  const int n = static_cast<int>(s.robots.size());
  for (int i = 0; i < n; ++i) {
    actions.push_back(FsmAction{FsmAction::Kind::Move, i});
    actions.push_back(FsmAction{FsmAction::Kind::Fault, i});
    actions.push_back(FsmAction{FsmAction::Kind::Join, i});
  }
  if (shape_dimension > 0) {
    for (int i = 0; i < n; ++i) {
      if (s.robots[static_cast<std::size_t>(i)] == RobotState::Localize) {
        actions.push_back(FsmAction{FsmAction::Kind::ShapePartial, i});
      }
    }
    actions.push_back(FsmAction{FsmAction::Kind::ShapeComplete, -1});
  }
  return actions;
}

/// Breadth-first closure of the joint machine from (all Stationary, empty
/// shape). Throws BoundError when a fresh state would exceed depth_limit.
inline FsmExploration enumerate_fsm(const FsmOptions& options) {
  if (options.num_robots < 1 || options.num_robots > 4) {
    throw ConfigError("fsm verification needs between 1 and 4 robots");
  }
  if (options.depth_limit < 0) {
    throw ConfigError("verify.depthLimit must be >= 0");
  }
  FsmExploration ex;
  ex.num_robots = options.num_robots;
  ex.shape_dimension = options.shape_dimension < 0 ? options.num_robots
                                                   : options.shape_dimension;
  ex.depth_limit = options.depth_limit;
  if (ex.shape_dimension > 0) {
    try {
      ex.spec = make_shape_spec(ex.shape_dimension, 1, Location{0, 0, 0},
                                WorldBounds{});
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("fsm shape dimension: ") + e.what());
    }
  }

  std::map<std::string, int> index;
  const FsmState init{
      std::vector<RobotState>(static_cast<std::size_t>(options.num_robots),
                              RobotState::Stationary),
      ShapeState::Empty,
      {}};
  ex.states.push_back(init);
  ex.depth.push_back(0);
  ex.parent_edge.push_back(-1);
  index.emplace(verify_detail::encode_fsm(init), 0);

  std::deque<int> queue = {0};
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    const FsmState cur = ex.states[static_cast<std::size_t>(u)];
    for (const FsmAction& action :
         available_fsm_actions(cur, ex.shape_dimension)) {
      auto [next, report] = apply_fsm_action(cur, action, options.ops, ex.spec);
      const std::string key = verify_detail::encode_fsm(next);
      auto it = index.find(key);
      int v = 0;
      if (it == index.end()) {
        const int d = ex.depth[static_cast<std::size_t>(u)] + 1;
        if (d > ex.depth_limit) {
          throw BoundError("fsm state " + verify_detail::display_fsm(next) +
                           " lies beyond depth limit " +
                           std::to_string(ex.depth_limit));
        }
        v = static_cast<int>(ex.states.size());
        ex.states.push_back(next);
        ex.depth.push_back(d);
        ex.parent_edge.push_back(static_cast<int>(ex.edges.size()));
        index.emplace(key, v);
        queue.push_back(v);
        ex.max_depth = std::max(ex.max_depth, d);
      } else {
        v = it->second;
      }
      ex.edges.push_back(FsmEdge{u, action, report, v});
    }
  }
  return ex;
}

/// Action labels from the initial state to the given node.
inline std::vector<std::string> fsm_witness_path(const FsmExploration& ex,
                                                 int node) {
  std::vector<std::string> labels;
  int cur = node;
  while (ex.parent_edge[static_cast<std::size_t>(cur)] >= 0) {
    const FsmEdge& e =
        ex.edges[static_cast<std::size_t>(
            ex.parent_edge[static_cast<std::size_t>(cur)])];
    labels.push_back(label(e.action));
    cur = e.from;
  }
  std::reverse(labels.begin(), labels.end());
  return labels;
}

/// Distinct observable projections over the explored states.
inline std::size_t joint_state_count(const FsmExploration& ex) {
  std::set<std::string> seen;
  for (const FsmState& s : ex.states) {
    std::string key;
    for (RobotState r : s.robots) {
      key += static_cast<char>('0' + static_cast<int>(r));
    }
    key += static_cast<char>('0' + static_cast<int>(s.shape));
    key += std::to_string(s.members.size());
    seen.insert(key);
  }
  return seen.size();
}

/// Checks every explored node and edge against the machine's invariants:
///  - illegal_transition: an edge changes anything but its legal target
///    (move S->U, fault U->S, join U->L, attribution adds one fresh member
///    while the shape turns or stays partial, completion closes a full
///    partial shape), or breaks the frame of untouched components;
///  - report_mismatch: success without effect (completion check excepted)
///    or an error report alongside an effect;
///  - non_monotone_shape: shape phase or membership moves backwards;
///  - inconsistent_membership: members not localized, phase/membership
///    disagreement, membership overflow;
///  - unreachable_termination: a state from which no state satisfying
///    "no robot moving, or shape complete" is reachable.
inline std::vector<Violation> check_invariants(const FsmExploration& ex) {
  std::vector<Violation> out;
  const int dim = ex.shape_dimension;

  for (std::size_t n = 0; n < ex.states.size(); ++n) {
    const FsmState& s = ex.states[n];
    const std::string where = verify_detail::display_fsm(s);
    auto node_violation = [&](std::string kind, std::string what) {
      out.push_back(Violation{std::move(kind), "state " + where + ": " + what,
                              fsm_witness_path(ex, static_cast<int>(n))});
    };
    for (int m : s.members) {
      if (m < 0 || m >= ex.num_robots ||
          s.robots[static_cast<std::size_t>(m)] != RobotState::Localize) {
        node_violation("inconsistent_membership",
                       "member " + std::to_string(m) + " is not localized");
      }
    }
    if (dim > 0) {
      if ((s.shape == ShapeState::Empty) != s.members.empty()) {
        node_violation("inconsistent_membership",
                       "empty phase disagrees with membership");
      }
      if (static_cast<int>(s.members.size()) > dim) {
        node_violation("inconsistent_membership",
                       "membership exceeds shape dimension");
      }
      if (s.shape == ShapeState::Complete &&
          static_cast<int>(s.members.size()) != dim) {
        node_violation("inconsistent_membership",
                       "complete shape lacks a full membership");
      }
    }
  }

  for (const FsmEdge& e : ex.edges) {
    const FsmState& from = ex.states[static_cast<std::size_t>(e.from)];
    const FsmState& to = ex.states[static_cast<std::size_t>(e.to)];
    const bool changed = !(from == to);
    const std::string where = "edge " + label(e.action) + ": " +
                              verify_detail::display_fsm(from) + " -> " +
                              verify_detail::display_fsm(to) +
                              " report=" + std::string(to_string(e.report));
    auto edge_violation = [&](std::string kind, std::string what) {
      std::vector<std::string> witness = fsm_witness_path(ex, e.from);
      witness.push_back(label(e.action));
      out.push_back(
          Violation{std::move(kind), where + ": " + what, std::move(witness)});
    };

    if (e.report != Report::Success && changed) {
      edge_violation("report_mismatch", "error report with an effect");
    }
    if (e.report == Report::Success && !changed &&
        e.action.kind != FsmAction::Kind::ShapeComplete) {
      edge_violation("report_mismatch", "success report without an effect");
    }
    if (static_cast<int>(to.shape) < static_cast<int>(from.shape)) {
      edge_violation("non_monotone_shape", "shape phase went backwards");
    }
    if (!std::includes(to.members.begin(), to.members.end(),
                       from.members.begin(), from.members.end())) {
      edge_violation("non_monotone_shape", "membership shrank");
    }

    switch (e.action.kind) {
      case FsmAction::Kind::Move:
      case FsmAction::Kind::Fault:
      case FsmAction::Kind::Join: {
        const std::size_t i = static_cast<std::size_t>(e.action.robot);
        bool frame = to.shape == from.shape && to.members == from.members;
        for (std::size_t j = 0; frame && j < from.robots.size(); ++j) {
          if (j != i && to.robots[j] != from.robots[j]) frame = false;
        }
        if (!frame) {
          edge_violation("illegal_transition",
                         "components beyond the acting robot changed");
          break;
        }
        const RobotState a = from.robots[i];
        const RobotState b = to.robots[i];
        if (a == b) break;
        const bool legal =
            (e.action.kind == FsmAction::Kind::Move &&
             a == RobotState::Stationary && b == RobotState::UnLocalize) ||
            (e.action.kind == FsmAction::Kind::Fault &&
             a == RobotState::UnLocalize && b == RobotState::Stationary) ||
            (e.action.kind == FsmAction::Kind::Join &&
             a == RobotState::UnLocalize && b == RobotState::Localize);
        if (!legal) {
          edge_violation("illegal_transition",
                         "robot pair is not this operation's transition");
        }
        break;
      }
      case FsmAction::Kind::ShapePartial: {
        if (to.robots != from.robots) {
          edge_violation("illegal_transition",
                         "attribution changed a robot state");
          break;
        }
        if (!changed) break;
        std::vector<int> expected = from.members;
        expected.push_back(e.action.robot);
        std::sort(expected.begin(), expected.end());
        const bool fresh =
            !std::binary_search(from.members.begin(), from.members.end(),
                                e.action.robot);
        if (!(fresh && from.shape != ShapeState::Complete &&
              to.shape == ShapeState::Partial && to.members == expected)) {
          edge_violation("illegal_transition",
                         "attribution must add one fresh member to a "
                         "partial shape");
        }
        break;
      }
      case FsmAction::Kind::ShapeComplete: {
        if (to.robots != from.robots || to.members != from.members) {
          edge_violation("illegal_transition",
                         "completion check changed robots or membership");
          break;
        }
        if (!changed) break;
        if (!(from.shape == ShapeState::Partial &&
              to.shape == ShapeState::Complete &&
              static_cast<int>(from.members.size()) == dim)) {
          edge_violation("illegal_transition",
                         "completion requires a full partial shape");
        }
        break;
      }
    }
  }

  // Terminal predicate: no robot still moving, or the shape is complete.
  std::vector<std::vector<int>> rev(ex.states.size());
  for (const FsmEdge& e : ex.edges) {
    if (e.from != e.to) rev[static_cast<std::size_t>(e.to)].push_back(e.from);
  }
  std::vector<char> reaches(ex.states.size(), 0);
  std::deque<int> queue;
  for (std::size_t n = 0; n < ex.states.size(); ++n) {
    const FsmState& s = ex.states[n];
    const bool no_mover =
        std::none_of(s.robots.begin(), s.robots.end(), [](RobotState r) {
          return r == RobotState::UnLocalize;
        });
    if (no_mover || s.shape == ShapeState::Complete) {
      reaches[n] = 1;
      queue.push_back(static_cast<int>(n));
    }
  }
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int u : rev[static_cast<std::size_t>(v)]) {
      if (!reaches[static_cast<std::size_t>(u)]) {
        reaches[static_cast<std::size_t>(u)] = 1;
        queue.push_back(u);
      }
    }
  }
  for (std::size_t n = 0; n < ex.states.size(); ++n) {
    if (!reaches[n]) {
      out.push_back(Violation{
          "unreachable_termination",
          "state " + verify_detail::display_fsm(ex.states[n]) +
              ": no terminal state reachable",
          fsm_witness_path(ex, static_cast<int>(n))});
    }
  }
  return out;
}

/// Re-applies a witness's action labels from the initial state, enforcing
/// the same availability rules the enumeration used.
inline FsmState replay_fsm_witness(const FsmOptions& options,
                                   const std::vector<std::string>& witness) {
  const int dim = options.shape_dimension < 0 ? options.num_robots
                                              : options.shape_dimension;
  ShapeSpec spec;
  if (dim > 0) {
    spec = make_shape_spec(dim, 1, Location{0, 0, 0}, WorldBounds{});
  }
  FsmState state{
      std::vector<RobotState>(static_cast<std::size_t>(options.num_robots),
                              RobotState::Stationary),
      ShapeState::Empty,
      {}};
  for (const std::string& step : witness) {
    const FsmAction action = parse_fsm_action(step);
    const auto offered = available_fsm_actions(state, dim);
    if (std::find(offered.begin(), offered.end(), action) == offered.end()) {
      throw std::invalid_argument("action '" + step +
                                  "' is not available in state " +
                                  verify_detail::display_fsm(state));
    }
    state = apply_fsm_action(state, action, options.ops, spec).first;
  }
  return state;
}

// ---------------------------------------------------------------------------
// Branching simulation verification
// ---------------------------------------------------------------------------

struct BranchingOptions {
  SimConfig config;
  int depth_limit = 32;
};

struct BranchingResult {
  std::size_t state_count = 0;
  std::size_t edge_count = 0;
  std::size_t initial_count = 0;
  int max_depth = 0;
  std::array<std::int64_t, 3> terminal_counts{};  // indexed by TerminationKind
  std::vector<Violation> violations;
};

namespace verify_detail {

/// Dynamics depend on the tick only through "before/after the start
/// broadcast", so states collapse on that phase bit.
inline std::string encode_branch_state(const SimState& s) {
  std::string key = s.tick == 0 ? "0|" : "1|";
  for (const RobotRecord& r : s.robots) {
    key += static_cast<char>('0' + static_cast<int>(r.state));
    key += ',';
    key += std::to_string(r.location.x);
    key += ',';
    key += std::to_string(r.location.y);
    key += ',';
    key += std::to_string(r.location.z);
    key += ';';
  }
  key += '|';
  key += static_cast<char>('0' + static_cast<int>(s.shape.state));
  key += '|';
  for (int m : s.shape.members) {
    key += std::to_string(m);
    key += ',';
  }
  return key;
}

inline std::string display_branch_state(const SimState& s) {
  std::string out;
  for (const RobotRecord& r : s.robots) {
    if (!out.empty()) out += ' ';
    out += 'r';
    out += std::to_string(r.id);
    out += '=';
    out += "SUL"[static_cast<int>(r.state)];
    out += '@';
    out += std::to_string(r.location.x);
    out += ',';
    out += std::to_string(r.location.y);
  }
  out += " shape=";
  out += to_string(s.shape.state);
  out += " members={";
  bool first = true;
  for (int m : s.shape.members) {
    if (!first) out += ',';
    first = false;
    out += std::to_string(m);
  }
  out += '}';
  return out;
}

/// Forks the sweep over every decision open to robots id.. of cur; complete
/// sweeps (tick already advanced) reach the sink with their decision label
/// and event list.
template <class Sink>
inline void expand_robot(SimState cur, int id, std::string labels,
                         std::vector<TraceEvent> events, Sink& sink) {
  const SimConfig& cfg = cur.config;
  while (id < cfg.num_robots) {
    const RobotState st = cur.robots[static_cast<std::size_t>(id)].state;
    if (st == RobotState::Localize) {
      ++id;
      continue;
    }
    if (st == RobotState::Stationary) {
      if (cfg.restart_after_fault) {
        engine::apply_start_move(cur, id, events);
        labels += " r" + std::to_string(id) + ":start";
      }
      ++id;
      continue;
    }
    // UnLocalize: the branch points.
    if (cfg.fault_probability > 0.0) {
      SimState forked = cur;
      std::vector<TraceEvent> ev = events;
      engine::apply_fault(forked, id, ev);
      expand_robot(std::move(forked), id + 1,
                   labels + " r" + std::to_string(id) + ":fault",
                   std::move(ev), sink);
    }
    if (cfg.fault_probability >= 1.0) return;
    if (engine::join_eligible(cur, id)) {
      engine::apply_join(cur, id, events);
      labels += " r" + std::to_string(id) + ":join";
      ++id;
      continue;
    }
    const std::vector<Location> choices =
        neighbors(cur.robots[static_cast<std::size_t>(id)].location,
                  cfg.bounds);
    if (choices.empty()) {
      engine::apply_step_stay(cur, id, events);
      labels += " r" + std::to_string(id) + ":stay";
      ++id;
      continue;
    }
    for (std::size_t k = 0; k + 1 < choices.size(); ++k) {
      SimState forked = cur;
      std::vector<TraceEvent> ev = events;
      engine::apply_step(forked, id, choices, k, ev);
      expand_robot(std::move(forked), id + 1,
                   labels + " r" + std::to_string(id) + ":step@" +
                       std::to_string(choices[k].x) + "," +
                       std::to_string(choices[k].y),
                   std::move(ev), sink);
    }
    const std::size_t last = choices.size() - 1;
    engine::apply_step(cur, id, choices, last, events);
    labels += " r" + std::to_string(id) + ":step@" +
              std::to_string(choices[last].x) + "," +
              std::to_string(choices[last].y);
    ++id;
  }
  cur.tick += 1;
  sink(std::move(cur), std::move(labels), std::move(events));
}

template <class Sink>
inline void expand_sweep(const SimState& base, Sink& sink) {
  if (base.tick == 0) {
    SimState next = base;
    std::vector<TraceEvent> events = advance(next);  // broadcast draws nothing
    sink(std::move(next), std::string("t0 broadcast"), std::move(events));
    return;
  }
  expand_robot(base, 0, "t" + std::to_string(base.tick), {}, sink);
}

}  // namespace verify_detail

/// Explores every run of the configuration: all initial placements of the
/// non-seed robots, all fault outcomes, all step directions, with the joins
/// and restarts the engine forces. Checks per-state soundness (occupancy,
/// membership, shape connectivity to the seeds, termination classification),
/// per-edge soundness (localized robots pinned, monotone membership, success
/// reports only), and that every state can still reach a terminal one.
inline BranchingResult verify_sim_branching(const BranchingOptions& options) {
  const SimConfig& config = options.config;
  const ShapeSpec spec = validate_config(config);
  if (config.bounds.plane_cells() > 16) {
    throw ConfigError("branching verification needs a z=0 plane of at most "
                      "16 cells, got " +
                      std::to_string(config.bounds.plane_cells()));
  }
  if (config.num_robots > 3) {
    throw ConfigError("branching verification needs numRobots <= 3, got " +
                      std::to_string(config.num_robots));
  }
  if (options.depth_limit < 1) {
    throw ConfigError("verify.branchDepthLimit must be >= 1");
  }

  struct Node {
    SimState state;
    int depth = 0;
    int parent = -1;
    std::string label;
    std::optional<TerminationKind> terminal;
  };
  std::vector<Node> nodes;
  std::map<std::string, int> index;
  std::vector<std::pair<int, int>> edges;
  BranchingResult result;

  const std::vector<Location> seeds = seed_cells(spec, config.num_seeds);
  auto witness_to = [&](int node) {
    std::vector<std::string> labels;
    for (int cur = node; cur >= 0; cur = nodes[static_cast<std::size_t>(cur)].parent) {
      labels.push_back(nodes[static_cast<std::size_t>(cur)].label);
    }
    std::reverse(labels.begin(), labels.end());
    return labels;
  };
  auto node_violation = [&](int node, std::string kind, std::string what) {
    result.violations.push_back(Violation{
        std::move(kind),
        "state [" +
            verify_detail::display_branch_state(
                nodes[static_cast<std::size_t>(node)].state) +
            "]: " + what,
        witness_to(node)});
  };

  // Holds exactly the soundness conditions init_sim_placed and the sweep are
  // supposed to preserve; violations indicate engine bugs.
  auto check_node = [&](int n) {
    const SimState& s = nodes[static_cast<std::size_t>(n)].state;
    std::set<Location> cells;
    for (const RobotRecord& r : s.robots) {
      if (r.location.z != 0 ||
          !s.config.bounds.contains(r.location.x, r.location.y,
                                    r.location.z)) {
        node_violation(n, "occupancy_violation",
                       "robot " + std::to_string(r.id) +
                           " left the z=0 plane");
      }
      if (!cells.insert(r.location).second) {
        node_violation(n, "occupancy_violation",
                       "two robots share a cell");
      }
      auto it = s.occupancy.find(r.location);
      if (it == s.occupancy.end() || it->second != r.id) {
        node_violation(n, "occupancy_violation",
                       "occupancy map disagrees with robot " +
                           std::to_string(r.id));
      }
    }
    if (s.occupancy.size() != s.robots.size()) {
      node_violation(n, "occupancy_violation",
                     "occupancy map has stale entries");
    }

    std::set<int> localized;
    for (const RobotRecord& r : s.robots) {
      if (r.state == RobotState::Localize) localized.insert(r.id);
    }
    if (localized != s.shape.members) {
      node_violation(n, "inconsistent_membership",
                     "members differ from the localized robots");
    }
    for (int m : s.shape.members) {
      const RobotRecord& r = s.robots[static_cast<std::size_t>(m)];
      if (!s.shape.spec.is_target(r.location)) {
        node_violation(n, "inconsistent_membership",
                       "member " + std::to_string(m) +
                           " sits outside the target shape");
      }
    }
    if ((s.shape.state == ShapeState::Complete) !=
        (static_cast<int>(s.shape.members.size()) == spec.dimension())) {
      node_violation(n, "inconsistent_membership",
                     "complete phase disagrees with membership size");
    }
    if ((s.shape.state == ShapeState::Empty) != s.shape.members.empty()) {
      node_violation(n, "inconsistent_membership",
                     "empty phase disagrees with membership");
    }

    // Every member cell must reach a seed cell through member cells.
    std::set<Location> filled;
    for (int m : s.shape.members) {
      filled.insert(s.robots[static_cast<std::size_t>(m)].location);
    }
    std::set<Location> reached;
    std::deque<Location> frontier;
    for (const Location& cell : seeds) {
      if (filled.count(cell) != 0) {
        reached.insert(cell);
        frontier.push_back(cell);
      }
    }
    while (!frontier.empty()) {
      const Location cell = frontier.front();
      frontier.pop_front();
      for (const Location& next : neighbors(cell, s.config.bounds)) {
        if (filled.count(next) != 0 && reached.insert(next).second) {
          frontier.push_back(next);
        }
      }
    }
    for (const Location& cell : filled) {
      if (reached.count(cell) == 0) {
        node_violation(n, "disconnected_shape",
                       "filled cell is cut off from the seeds");
      }
    }

    // Independent re-derivation of the termination classification.
    if (s.tick > 0) {
      int movers = 0;
      int stationary = 0;
      for (const RobotRecord& r : s.robots) {
        if (r.state == RobotState::UnLocalize) ++movers;
        if (r.state == RobotState::Stationary) ++stationary;
      }
      const bool waiting =
          movers > 0 || (s.config.restart_after_fault && stationary > 0);
      const bool complete = s.shape.state == ShapeState::Complete;
      std::optional<TerminationKind> expected;
      if (!waiting) {
        expected = complete ? TerminationKind::CompleteAllLocalized
                            : TerminationKind::StalledIncomplete;
      } else if (complete) {
        expected = TerminationKind::CompleteWithMovers;
      }
      if (expected != nodes[static_cast<std::size_t>(n)].terminal) {
        node_violation(n, "termination_mismatch",
                       "stored terminal class disagrees with the state");
      }
    }
  };

  auto add_node = [&](SimState&& state, int parent, std::string&& label_text,
                      int depth) {
    const std::string key = verify_detail::encode_branch_state(state);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    if (depth > options.depth_limit) {
      throw BoundError("branching state [" +
                       verify_detail::display_branch_state(state) +
                       "] lies beyond depth limit " +
                       std::to_string(options.depth_limit));
    }
    const int id = static_cast<int>(nodes.size());
    Node node{std::move(state), depth, parent, std::move(label_text),
              std::nullopt};
    if (node.state.tick > 0) node.terminal = check_termination(node.state);
    nodes.push_back(std::move(node));
    index.emplace(key, id);
    result.max_depth = std::max(result.max_depth, depth);
    check_node(id);
    if (nodes.back().terminal.has_value()) {
      result.terminal_counts[static_cast<std::size_t>(
          *nodes.back().terminal)] += 1;
    }
    return id;
  };

  // Roots: every ordered placement of the non-seed robots on free cells.
  {
    const SimState skeleton = engine::seed_state(config, spec);
    const std::vector<Location> free_cells = engine::free_plane_cells(skeleton);
    const int extras = config.num_robots - config.num_seeds;
    std::vector<Location> chosen;
    std::vector<char> used(free_cells.size(), 0);
    auto place = [&](auto&& self, int next_id) -> void {
      if (next_id == extras) {
        std::string label_text = "init";
        for (std::size_t k = 0; k < chosen.size(); ++k) {
          label_text += " r" +
                        std::to_string(config.num_seeds + static_cast<int>(k)) +
                        "@" + std::to_string(chosen[k].x) + "," +
                        std::to_string(chosen[k].y);
        }
        add_node(init_sim_placed(config, chosen), -1, std::move(label_text),
                 0);
        return;
      }
      for (std::size_t c = 0; c < free_cells.size(); ++c) {
        if (used[c]) continue;
        used[c] = 1;
        chosen.push_back(free_cells[c]);
        self(self, next_id + 1);
        chosen.pop_back();
        used[c] = 0;
      }
    };
    place(place, 0);
    result.initial_count = nodes.size();
  }

  for (int u = 0; u < static_cast<int>(nodes.size()); ++u) {
    if (nodes[static_cast<std::size_t>(u)].terminal.has_value()) continue;
    const SimState pre = nodes[static_cast<std::size_t>(u)].state;
    const int depth = nodes[static_cast<std::size_t>(u)].depth;
    auto sink = [&](SimState&& post, std::string&& label_text,
                    std::vector<TraceEvent>&& events) {
      auto edge_violation = [&](std::string kind, std::string what) {
        std::vector<std::string> witness = witness_to(u);
        witness.push_back(label_text);
        result.violations.push_back(Violation{
            std::move(kind), "sweep [" + label_text + "] from [" +
                                 verify_detail::display_branch_state(pre) +
                                 "]: " + what,
            std::move(witness)});
      };
      for (const TraceEvent& e : events) {
        if (e.report != Report::Success) {
          edge_violation("report_mismatch",
                         "engine emitted a non-success report: " +
                             format_event(e));
        }
      }
      for (const RobotRecord& r : pre.robots) {
        if (r.state != RobotState::Localize) continue;
        const RobotRecord& after =
            post.robots[static_cast<std::size_t>(r.id)];
        if (after.state != RobotState::Localize ||
            !(after.location == r.location)) {
          edge_violation("localized_moved",
                         "localized robot " + std::to_string(r.id) +
                             " changed state or cell");
        }
      }
      if (static_cast<int>(post.shape.state) <
          static_cast<int>(pre.shape.state)) {
        edge_violation("non_monotone_shape", "shape phase went backwards");
      }
      if (!std::includes(post.shape.members.begin(), post.shape.members.end(),
                         pre.shape.members.begin(), pre.shape.members.end())) {
        edge_violation("non_monotone_shape", "membership shrank");
      }
      const int v =
          add_node(std::move(post), u, std::move(label_text), depth + 1);
      edges.emplace_back(u, v);
    };
    verify_detail::expand_sweep(pre, sink);
  }

  result.state_count = nodes.size();
  result.edge_count = edges.size();

  std::vector<std::vector<int>> rev(nodes.size());
  for (const auto& [from, to] : edges) {
    if (from != to) rev[static_cast<std::size_t>(to)].push_back(from);
  }
  std::vector<char> reaches(nodes.size(), 0);
  std::deque<int> queue;
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    if (nodes[n].terminal.has_value()) {
      reaches[n] = 1;
      queue.push_back(static_cast<int>(n));
    }
  }
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int u : rev[static_cast<std::size_t>(v)]) {
      if (!reaches[static_cast<std::size_t>(u)]) {
        reaches[static_cast<std::size_t>(u)] = 1;
        queue.push_back(u);
      }
    }
  }
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    if (!reaches[n]) {
      node_violation(static_cast<int>(n), "unreachable_termination",
                     "no terminal state reachable");
    }
  }
  return result;
}

/// Re-drives one branching witness: an "init ..." placement label followed
/// by per-sweep decision labels. Enforces that each decision was actually
/// open to the engine at that point.
inline SimState replay_branch_witness(const SimConfig& config,
                                      const std::vector<std::string>& witness) {
  if (witness.empty()) {
    throw std::invalid_argument("empty witness");
  }
  const auto head = detail::split_spaces(witness[0]);
  if (head.empty() || head[0] != "init") {
    throw std::invalid_argument("witness must start with an init label");
  }
  std::vector<Location> cells;
  for (std::size_t t = 1; t < head.size(); ++t) {
    const std::string_view tok = head[t];
    const std::size_t at = tok.find('@');
    const std::size_t comma = tok.find(',', at);
    if (tok.front() != 'r' || at == std::string_view::npos ||
        comma == std::string_view::npos) {
      throw std::invalid_argument("bad init token '" + std::string(tok) + "'");
    }
    cells.push_back(Location{
        detail::parse_number<int>(tok.substr(at + 1, comma - at - 1), "x"),
        detail::parse_number<int>(tok.substr(comma + 1), "y"), 0});
  }
  SimState s = init_sim_placed(config, cells);

  for (std::size_t w = 1; w < witness.size(); ++w) {
    const auto tokens = detail::split_spaces(witness[w]);
    if (tokens.empty() || tokens[0].front() != 't') {
      throw std::invalid_argument("bad sweep label '" + witness[w] + "'");
    }
    const auto tick =
        detail::parse_number<std::int64_t>(tokens[0].substr(1), "tick");
    if (tick != s.tick) {
      throw std::invalid_argument("sweep label out of order: '" + witness[w] +
                                  "' at tick " + std::to_string(s.tick));
    }
    if (s.tick == 0) {
      if (tokens.size() != 2 || tokens[1] != "broadcast") {
        throw std::invalid_argument("tick 0 must be the broadcast");
      }
      advance(s);
      continue;
    }
    std::vector<TraceEvent> events;
    int prev_robot = -1;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const std::string_view tok = tokens[t];
      const std::size_t colon = tok.find(':');
      if (tok.front() != 'r' || colon == std::string_view::npos) {
        throw std::invalid_argument("bad decision token '" + std::string(tok) +
                                    "'");
      }
      const int id =
          detail::parse_number<int>(tok.substr(1, colon - 1), "robot");
      if (id <= prev_robot || id >= config.num_robots) {
        throw std::invalid_argument("decision robots must ascend");
      }
      prev_robot = id;
      const std::string_view act = tok.substr(colon + 1);
      const RobotState st = s.robots[static_cast<std::size_t>(id)].state;
      if (act == "start") {
        if (st != RobotState::Stationary || !config.restart_after_fault) {
          throw std::invalid_argument("restart not open to robot " +
                                      std::to_string(id));
        }
        engine::apply_start_move(s, id, events);
      } else if (act == "fault") {
        if (st != RobotState::UnLocalize || config.fault_probability <= 0.0) {
          throw std::invalid_argument("fault not open to robot " +
                                      std::to_string(id));
        }
        engine::apply_fault(s, id, events);
      } else if (act == "join") {
        if (config.fault_probability >= 1.0 || !engine::join_eligible(s, id)) {
          throw std::invalid_argument("join not open to robot " +
                                      std::to_string(id));
        }
        engine::apply_join(s, id, events);
      } else if (act == "stay") {
        if (st != RobotState::UnLocalize || engine::join_eligible(s, id) ||
            !neighbors(s.robots[static_cast<std::size_t>(id)].location,
                       config.bounds)
                 .empty()) {
          throw std::invalid_argument("stay not open to robot " +
                                      std::to_string(id));
        }
        engine::apply_step_stay(s, id, events);
      } else if (act.substr(0, 5) == "step@") {
        const std::string_view coords = act.substr(5);
        const std::size_t comma = coords.find(',');
        if (comma == std::string_view::npos) {
          throw std::invalid_argument("bad step token '" + std::string(tok) +
                                      "'");
        }
        const int x = detail::parse_number<int>(coords.substr(0, comma), "x");
        const int y = detail::parse_number<int>(coords.substr(comma + 1), "y");
        if (st != RobotState::UnLocalize || config.fault_probability >= 1.0 ||
            engine::join_eligible(s, id)) {
          throw std::invalid_argument("step not open to robot " +
                                      std::to_string(id));
        }
        const std::vector<Location> choices = neighbors(
            s.robots[static_cast<std::size_t>(id)].location, config.bounds);
        std::size_t k = 0;
        while (k < choices.size() &&
               !(choices[k] == Location{x, y, 0})) {
          ++k;
        }
        if (k == choices.size()) {
          throw std::invalid_argument("step destination is not a neighbor");
        }
        engine::apply_step(s, id, choices, k, events);
      } else {
        throw std::invalid_argument("bad decision token '" + std::string(tok) +
                                    "'");
      }
    }
    s.tick += 1;
  }
  return s;
}

}  // namespace swarmform
