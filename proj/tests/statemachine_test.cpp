#include "swarmform/statemachine.hpp"

#include <gtest/gtest.h>

#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace swarmform {
namespace {

RobotRecord robot_in(RobotState state) {
  return RobotRecord{7, state, Location{3, -2, 0}};
}

ShapeSpec column2() {
  return make_shape_spec(1, 2, Location{0, 0, 0}, WorldBounds{});
}

TEST(Enums, NamesRoundTrip) {
  EXPECT_EQ(to_string(RobotState::Stationary), "stationary");
  EXPECT_EQ(to_string(RobotState::UnLocalize), "unlocalize");
  EXPECT_EQ(to_string(RobotState::Localize), "localize");
  EXPECT_EQ(to_string(ShapeState::Empty), "empty");
  EXPECT_EQ(to_string(ShapeState::Partial), "partial");
  EXPECT_EQ(to_string(ShapeState::Complete), "complete");
  for (int k = 0; k < 5; ++k) {
    const Report r = static_cast<Report>(k);
    EXPECT_EQ(parse_report(to_string(r)), r);
  }
  EXPECT_EQ(parse_report("nonsense"), std::nullopt);
}

TEST(RobotInit, StartsStationaryAtTheGivenCell) {
  const RobotRecord r = robot_init(3, Location{1, 2, 0});
  EXPECT_EQ(r.id, 3);
  EXPECT_EQ(r.state, RobotState::Stationary);
  EXPECT_EQ(r.location, (Location{1, 2, 0}));
  EXPECT_THROW(robot_init(-1, Location{0, 0, 0}), std::invalid_argument);
}

// The full operation/state matrix: reports are exact and every non-success
// operation leaves the record untouched.
TEST(RobotOps, ConformanceMatrix) {
  struct Case {
    RobotTransition (*op)(const RobotRecord&);
    RobotState from;
    RobotState to;
    Report report;
  };
  const Case cases[] = {
      {&start_move, RobotState::Stationary, RobotState::UnLocalize,
       Report::Success},
      {&start_move, RobotState::UnLocalize, RobotState::UnLocalize,
       Report::AlreadyMoving},
      {&start_move, RobotState::Localize, RobotState::Localize,
       Report::AlreadyJoined},
      {&fault_occur, RobotState::UnLocalize, RobotState::Stationary,
       Report::Success},
      {&fault_occur, RobotState::Stationary, RobotState::Stationary,
       Report::AlreadyFaulted},
      {&fault_occur, RobotState::Localize, RobotState::Localize,
       Report::AlreadyJoined},
      {&join_shape, RobotState::UnLocalize, RobotState::Localize,
       Report::Success},
      {&join_shape, RobotState::Localize, RobotState::Localize,
       Report::AlreadyJoined},
      {&join_shape, RobotState::Stationary, RobotState::Stationary,
       Report::AlreadyFaulted},
  };
  for (const Case& c : cases) {
    const RobotRecord before = robot_in(c.from);
    const RobotTransition res = c.op(before);
    EXPECT_EQ(res.robot.state, c.to);
    EXPECT_EQ(res.report, c.report);
    EXPECT_EQ(res.robot.id, before.id);
    EXPECT_EQ(res.robot.location, before.location);
    if (c.report != Report::Success) {
      EXPECT_EQ(res.robot, before);
    }
  }
}

TEST(ShapeInit, StartsEmptyWithNoMembers) {
  const ShapeRecord s = shape_init(column2());
  EXPECT_EQ(s.state, ShapeState::Empty);
  EXPECT_TRUE(s.members.empty());
  EXPECT_EQ(s.spec, column2());
}

TEST(ShapeInit, RejectsInconsistentSpecs) {
  ShapeSpec broken = column2();
  broken.cells.pop_back();
  EXPECT_THROW(shape_init(broken), std::invalid_argument);
  ShapeSpec degenerate;
  EXPECT_THROW(shape_init(degenerate), std::invalid_argument);
}

TEST(RobotJoins, FirstMemberTurnsTheShapePartial) {
  const ShapeRecord empty = shape_init(column2());
  const ShapeTransition res = robot_joins(empty, 4);
  EXPECT_EQ(res.report, Report::Success);
  EXPECT_EQ(res.shape.state, ShapeState::Partial);
  EXPECT_EQ(res.shape.members, std::set<int>{4});
}

TEST(RobotJoins, DuplicateMemberIsRejectedUnchanged) {
  ShapeRecord s = robot_joins(shape_init(column2()), 4).shape;
  const ShapeTransition res = robot_joins(s, 4);
  EXPECT_EQ(res.report, Report::AlreadyJoined);
  EXPECT_EQ(res.shape, s);
}

TEST(RobotJoins, CompleteShapeTurnsJoinersAway) {
  ShapeRecord s = shape_init(column2());
  s = robot_joins(s, 0).shape;
  s = robot_joins(s, 1).shape;
  TargetOccupancy occ;
  occ.emplace(Location{0, 0, 0}, 0);
  occ.emplace(Location{0, 1, 0}, 1);
  s = swarm_join_check(s, occ).shape;
  ASSERT_EQ(s.state, ShapeState::Complete);
  const ShapeTransition res = robot_joins(s, 2);
  EXPECT_EQ(res.report, Report::ShapeCompleted);
  EXPECT_EQ(res.shape, s);
}

TEST(RobotJoins, FullMembershipTurnsJoinersAwayEvenBeforeTheCheck) {
  ShapeRecord s = shape_init(column2());
  s = robot_joins(s, 0).shape;
  s = robot_joins(s, 1).shape;
  ASSERT_EQ(s.state, ShapeState::Partial);
  const ShapeTransition res = robot_joins(s, 2);
  EXPECT_EQ(res.report, Report::ShapeCompleted);
  EXPECT_EQ(res.shape, s);
}

TEST(RobotJoins, RejectsNegativeIds) {
  EXPECT_THROW(robot_joins(shape_init(column2()), -1), std::invalid_argument);
}

TEST(SwarmJoinCheck, RequiresOccupancyOverExactlyTheTargetCells) {
  const ShapeRecord s = shape_init(column2());
  TargetOccupancy missing;
  missing.emplace(Location{0, 0, 0}, std::nullopt);
  EXPECT_THROW(swarm_join_check(s, missing), std::invalid_argument);

  TargetOccupancy wrong_cell;
  wrong_cell.emplace(Location{0, 0, 0}, std::nullopt);
  wrong_cell.emplace(Location{5, 5, 0}, std::nullopt);
  EXPECT_THROW(swarm_join_check(s, wrong_cell), std::invalid_argument);
}

TEST(SwarmJoinCheck, CompletesOnlyAFullPartialShape) {
  ShapeRecord s = shape_init(column2());
  TargetOccupancy empty_occ;
  empty_occ.emplace(Location{0, 0, 0}, std::nullopt);
  empty_occ.emplace(Location{0, 1, 0}, std::nullopt);

  // Empty shape: no change.
  ShapeTransition res = swarm_join_check(s, empty_occ);
  EXPECT_EQ(res.report, Report::Success);
  EXPECT_EQ(res.shape, s);

  // One hole left: still partial.
  s = robot_joins(s, 0).shape;
  TargetOccupancy hole = empty_occ;
  hole[Location{0, 0, 0}] = 0;
  res = swarm_join_check(s, hole);
  EXPECT_EQ(res.report, Report::Success);
  EXPECT_EQ(res.shape.state, ShapeState::Partial);

  // A cell held by a non-member does not count as filled.
  s = robot_joins(s, 1).shape;
  TargetOccupancy stranger = hole;
  stranger[Location{0, 1, 0}] = 9;
  res = swarm_join_check(s, stranger);
  EXPECT_EQ(res.report, Report::Success);
  EXPECT_EQ(res.shape.state, ShapeState::Partial);

  // Every cell held by a member: complete.
  TargetOccupancy full = hole;
  full[Location{0, 1, 0}] = 1;
  res = swarm_join_check(s, full);
  EXPECT_EQ(res.report, Report::Success);
  EXPECT_EQ(res.shape.state, ShapeState::Complete);

  // Checking a complete shape reports ShapeCompleted and changes nothing.
  const ShapeRecord complete = res.shape;
  res = swarm_join_check(complete, full);
  EXPECT_EQ(res.report, Report::ShapeCompleted);
  EXPECT_EQ(res.shape, complete);
}

// Randomized closure: arbitrary operation interleavings keep every record
// inside the legal transition system.
TEST(RandomizedOps, TransitionsStayInsideTheClosure) {
  std::mt19937_64 gen(20240817);
  const ShapeSpec spec = make_shape_spec(3, 1, Location{0, 0, 0},
                                         WorldBounds{});
  for (int seq = 0; seq < 1000; ++seq) {
    std::vector<RobotRecord> robots;
    for (int id = 0; id < 3; ++id) {
      robots.push_back(robot_init(id, Location{id, 0, 0}));
    }
    ShapeRecord shape = shape_init(spec);
    for (int step = 0; step < 24; ++step) {
      const int pick = static_cast<int>(gen() % 5);
      const int id = static_cast<int>(gen() % 3);
      const RobotRecord before = robots[static_cast<std::size_t>(id)];
      const ShapeRecord shape_before = shape;
      Report report = Report::Success;
      if (pick <= 2) {
        const RobotTransition res = pick == 0   ? start_move(before)
                                    : pick == 1 ? fault_occur(before)
                                                : join_shape(before);
        report = res.report;
        robots[static_cast<std::size_t>(id)] = res.robot;
        const RobotState a = before.state;
        const RobotState b = res.robot.state;
        const bool legal_pair =
            a == b ||
            (pick == 0 && a == RobotState::Stationary &&
             b == RobotState::UnLocalize) ||
            (pick == 1 && a == RobotState::UnLocalize &&
             b == RobotState::Stationary) ||
            (pick == 2 && a == RobotState::UnLocalize &&
             b == RobotState::Localize);
        ASSERT_TRUE(legal_pair) << "seq " << seq << " step " << step;
        if (a == RobotState::Localize) {
          ASSERT_EQ(b, RobotState::Localize);  // absorbing
        }
        if (report != Report::Success) {
          ASSERT_EQ(res.robot, before);
        }
      } else if (pick == 3) {
        const ShapeTransition res = robot_joins(shape, id);
        report = res.report;
        shape = res.shape;
      } else {
        TargetOccupancy occ;
        std::vector<int> members(shape.members.begin(), shape.members.end());
        for (std::size_t k = 0; k < spec.cells.size(); ++k) {
          std::optional<int> holder;
          if (k < members.size()) holder = members[k];
          occ.emplace(spec.cells[k], holder);
        }
        const ShapeTransition res = swarm_join_check(shape, occ);
        report = res.report;
        shape = res.shape;
      }
      ASSERT_GE(static_cast<int>(shape.state),
                static_cast<int>(shape_before.state));
      ASSERT_TRUE(std::includes(shape.members.begin(), shape.members.end(),
                                shape_before.members.begin(),
                                shape_before.members.end()));
      ASSERT_LE(shape.members.size(),
                static_cast<std::size_t>(spec.dimension()));
      if (report != Report::Success && pick >= 3) {
        ASSERT_EQ(shape, shape_before);
      }
    }
  }
}

}  // namespace
}  // namespace swarmform
