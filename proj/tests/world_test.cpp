#include "swarmform/world.hpp"

#include <gtest/gtest.h>

#include <set>
#include <stdexcept>

namespace swarmform {
namespace {

TEST(WorldBounds, DefaultsSpanSixtyFiveCellsPerAxis) {
  WorldBounds b;
  EXPECT_EQ(b.min_x, -32);
  EXPECT_EQ(b.max_x, 32);
  EXPECT_EQ(b.min_z, -32);
  EXPECT_EQ(b.max_z, 32);
  EXPECT_TRUE(b.valid());
  EXPECT_EQ(b.width(), 65);
  EXPECT_EQ(b.height(), 65);
  EXPECT_EQ(b.plane_cells(), 65 * 65);
}

TEST(WorldBounds, InvertedAxisIsInvalid) {
  WorldBounds b;
  b.min_y = 5;
  b.max_y = 4;
  EXPECT_FALSE(b.valid());
}

TEST(WorldBounds, ContainsChecksEveryAxis) {
  WorldBounds b;
  EXPECT_TRUE(b.contains(0, 0, 0));
  EXPECT_TRUE(b.contains(-32, 32, -32));
  EXPECT_FALSE(b.contains(33, 0, 0));
  EXPECT_FALSE(b.contains(0, -33, 0));
  EXPECT_FALSE(b.contains(0, 0, 33));
}

TEST(Location, OrderingIsLexicographic) {
  EXPECT_LT((Location{0, 0, 0}), (Location{0, 0, 1}));
  EXPECT_LT((Location{0, 0, 1}), (Location{0, 1, 0}));
  EXPECT_LT((Location{0, 1, 0}), (Location{1, 0, 0}));
  EXPECT_EQ((Location{1, 2, 3}), (Location{1, 2, 3}));
}

TEST(Location, MakeLocationValidatesAndNamesTheAxis) {
  WorldBounds b;
  const Location loc = make_location(-32, 32, 0, b);
  EXPECT_EQ(loc, (Location{-32, 32, 0}));
  try {
    make_location(33, 0, 0, b);
    FAIL() << "expected std::invalid_argument";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find('x'), std::string::npos);
  }
  try {
    make_location(0, 0, -40, b);
    FAIL() << "expected std::invalid_argument";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find('z'), std::string::npos);
  }
}

TEST(ShapeSpec, RectangleCellsAreSortedAndComplete) {
  const ShapeSpec spec = make_shape_spec(4, 3, Location{0, 0, 0},
                                         WorldBounds{});
  EXPECT_EQ(spec.dimension(), 12);
  ASSERT_EQ(spec.cells.size(), 12u);
  std::set<Location> expected;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 3; ++j) {
      expected.insert(Location{i, j, 0});
    }
  }
  EXPECT_EQ(std::set<Location>(spec.cells.begin(), spec.cells.end()),
            expected);
  EXPECT_TRUE(std::is_sorted(spec.cells.begin(), spec.cells.end()));
  EXPECT_EQ(spec.cells.front(), (Location{0, 0, 0}));
  EXPECT_EQ(spec.cells.back(), (Location{3, 2, 0}));
}

TEST(ShapeSpec, IsTargetMatchesTheCellSet) {
  const ShapeSpec spec = make_shape_spec(2, 2, Location{-1, -1, 0},
                                         WorldBounds{});
  EXPECT_TRUE(spec.is_target(Location{-1, -1, 0}));
  EXPECT_TRUE(spec.is_target(Location{0, 0, 0}));
  EXPECT_FALSE(spec.is_target(Location{1, 0, 0}));
  EXPECT_FALSE(spec.is_target(Location{0, 0, 1}));
}

TEST(ShapeSpec, RejectsDegenerateAndOffPlaneShapes) {
  EXPECT_THROW(make_shape_spec(0, 3, Location{0, 0, 0}, WorldBounds{}),
               std::invalid_argument);
  EXPECT_THROW(make_shape_spec(3, 0, Location{0, 0, 0}, WorldBounds{}),
               std::invalid_argument);
  EXPECT_THROW(make_shape_spec(2, 2, Location{0, 0, 1}, WorldBounds{}),
               std::invalid_argument);
}

TEST(ShapeSpec, RejectsRectanglesThatOverflowTheBounds) {
  // The x axis holds 65 cells: a 65x1 strip fits only when anchored at the
  // minimum, and nothing wider fits at all.
  EXPECT_NO_THROW(make_shape_spec(65, 1, Location{-32, 0, 0}, WorldBounds{}));
  EXPECT_THROW(make_shape_spec(66, 1, Location{-32, 0, 0}, WorldBounds{}),
               std::invalid_argument);
  EXPECT_THROW(make_shape_spec(34, 1, Location{0, 0, 0}, WorldBounds{}),
               std::invalid_argument);
  EXPECT_THROW(make_shape_spec(2, 2, Location{32, 32, 0}, WorldBounds{}),
               std::invalid_argument);
}

TEST(Neighbors, FixedOrderPlusXMinusXPlusYMinusY) {
  const auto n = neighbors(Location{0, 0, 0}, WorldBounds{});
  ASSERT_EQ(n.size(), 4u);
  EXPECT_EQ(n[0], (Location{1, 0, 0}));
  EXPECT_EQ(n[1], (Location{-1, 0, 0}));
  EXPECT_EQ(n[2], (Location{0, 1, 0}));
  EXPECT_EQ(n[3], (Location{0, -1, 0}));
}

TEST(Neighbors, OutOfBoundsCellsAreFilteredKeepingOrder) {
  const auto corner = neighbors(Location{32, 32, 0}, WorldBounds{});
  ASSERT_EQ(corner.size(), 2u);
  EXPECT_EQ(corner[0], (Location{31, 32, 0}));
  EXPECT_EQ(corner[1], (Location{32, 31, 0}));

  WorldBounds point;
  point.min_x = point.max_x = 0;
  point.min_y = point.max_y = 0;
  EXPECT_TRUE(neighbors(Location{0, 0, 0}, point).empty());
}

TEST(SeedCells, NearestOriginWithDistanceThenXThenYTieBreak) {
  const ShapeSpec spec = make_shape_spec(4, 3, Location{0, 0, 0},
                                         WorldBounds{});
  const auto one = seed_cells(spec, 1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0], (Location{0, 0, 0}));

  // dist^2: (0,0)=0, then (0,1) and (1,0) tie at 1; x breaks the tie.
  const auto three = seed_cells(spec, 3);
  ASSERT_EQ(three.size(), 3u);
  EXPECT_EQ(three[0], (Location{0, 0, 0}));
  EXPECT_EQ(three[1], (Location{0, 1, 0}));
  EXPECT_EQ(three[2], (Location{1, 0, 0}));
}

TEST(SeedCells, FullShapeUsesEveryCellOnce) {
  const ShapeSpec spec = make_shape_spec(4, 3, Location{0, 0, 0},
                                         WorldBounds{});
  const auto all = seed_cells(spec, spec.dimension());
  EXPECT_EQ(std::set<Location>(all.begin(), all.end()),
            std::set<Location>(spec.cells.begin(), spec.cells.end()));
}

TEST(SeedCells, RejectsCountsOutsideTheShape) {
  const ShapeSpec spec = make_shape_spec(2, 2, Location{0, 0, 0},
                                         WorldBounds{});
  EXPECT_THROW(seed_cells(spec, 0), std::invalid_argument);
  EXPECT_THROW(seed_cells(spec, 5), std::invalid_argument);
}

TEST(SeedCells, OffsetAnchorStillSortsByDistanceToOrigin) {
  // Shape spanning x in [-2,-1], y in [0,1]: distances 1,2,4,5.
  const ShapeSpec spec = make_shape_spec(2, 2, Location{-2, 0, 0},
                                         WorldBounds{});
  const auto cells = seed_cells(spec, 4);
  ASSERT_EQ(cells.size(), 4u);
  EXPECT_EQ(cells[0], (Location{-1, 0, 0}));
  EXPECT_EQ(cells[1], (Location{-1, 1, 0}));
  EXPECT_EQ(cells[2], (Location{-2, 0, 0}));
  EXPECT_EQ(cells[3], (Location{-2, 1, 0}));
}

}  // namespace
}  // namespace swarmform
