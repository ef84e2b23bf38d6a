#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "roomopt/geometry.hpp"
#include "support.hpp"

using namespace roomopt;
using std::numbers::pi;

namespace {

ConvexPolygon square(double cx, double cy, double side = 1.0) {
  return ConvexPolygon(OrientedBox{{cx, cy}, side, side, 0.0});
}

OrientedBox random_box(std::mt19937_64& rng, double span = 3.0) {
  std::uniform_real_distribution<double> pos(0.0, span);
  std::uniform_real_distribution<double> size(0.2, 2.0);
  std::uniform_real_distribution<double> ang(-pi, pi);
  return {{pos(rng), pos(rng)}, size(rng), size(rng), ang(rng)};
}

std::vector<oracle::P> oracle_corners(const OrientedBox& b) {
  return oracle::as_vec(oracle::corners({b.center.x, b.center.y, b.width, b.length, b.theta}));
}

}  // namespace

TEST(WrapAngle, StaysInHalfOpenRange) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-50.0, 50.0);
  for (int i = 0; i < 10000; ++i) {
    const double a = d(rng);
    const double w = wrap_angle(a);
    EXPECT_GE(w, -pi);
    EXPECT_LT(w, pi);
    EXPECT_NEAR(std::sin(w), std::sin(a), 1e-9);
    EXPECT_NEAR(std::cos(w), std::cos(a), 1e-9);
  }
  EXPECT_DOUBLE_EQ(wrap_angle(pi), -pi);
}

TEST(OrientedBox, FrontAndRightFollowConvention) {
  const OrientedBox b{{0, 0}, 1, 1, 0.0};
  EXPECT_NEAR(b.front().x, 0.0, 1e-15);
  EXPECT_NEAR(b.front().y, 1.0, 1e-15);
  EXPECT_NEAR(b.right().x, 1.0, 1e-15);
  const OrientedBox q{{0, 0}, 1, 1, pi / 2};
  EXPECT_NEAR(q.front().x, -1.0, 1e-15);  // counterclockwise turn: +y becomes -x
  EXPECT_NEAR(q.back_mid().x, 0.5, 1e-15);
}

TEST(ObbCorners, AxisAlignedUnitBox) {
  const auto c = obb_corners({{0.5, 0.5}, 1, 1, 0.0});
  const std::array<Point2, 4> want{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  for (int k = 0; k < 4; ++k) {
    EXPECT_EQ(c[k].x, want[k].x);
    EXPECT_EQ(c[k].y, want[k].y);
  }
}

TEST(ObbCorners, QuarterTurnOfSquareGivesSameSet) {
  const auto a = obb_corners({{0, 0}, 1, 1, 0.0});
  const auto b = obb_corners({{0, 0}, 1, 1, pi / 2});
  for (const auto& p : a) {
    bool found = false;
    for (const auto& q : b) found = found || distance(p, q) < 1e-12;
    EXPECT_TRUE(found);
  }
}

TEST(ObbCorners, MatchesRotationMatrixOracle) {
  const OrientedBox box{{0, 0}, 2, 1, pi / 4};
  const auto got = obb_corners(box);
  const auto want = oracle_corners(box);
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(got[k].x, want[k].x, 1e-12);
    EXPECT_NEAR(got[k].y, want[k].y, 1e-12);
  }
  std::mt19937_64 rng(2);
  for (int i = 0; i < 500; ++i) {
    const auto b = random_box(rng);
    const auto g = obb_corners(b);
    const auto w = oracle_corners(b);
    for (int k = 0; k < 4; ++k) {
      EXPECT_NEAR(g[k].x, w[k].x, 1e-12);
      EXPECT_NEAR(g[k].y, w[k].y, 1e-12);
    }
  }
}

TEST(ObbCorners, RoundTripRecoversBox) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    const auto b = random_box(rng);
    const auto c = obb_corners(b);
    const Point2 center = 0.25 * (c[0] + c[1] + c[2] + c[3]);
    const double w = distance(c[0], c[1]);
    const double l = distance(c[1], c[2]);
    const Point2 fwd = c[3] - c[0];
    const double theta = std::atan2(-fwd.x, fwd.y);
    EXPECT_NEAR(center.x, b.center.x, 1e-9);
    EXPECT_NEAR(center.y, b.center.y, 1e-9);
    EXPECT_NEAR(w, b.width, 1e-9);
    EXPECT_NEAR(l, b.length, 1e-9);
    EXPECT_NEAR(wrap_angle(theta - b.theta), 0.0, 1e-9);
    EXPECT_GT(signed_area(std::span<const Point2>(c.data(), 4)), 0.0);  // counterclockwise
  }
}

TEST(ConvexClip, DisjointSquaresAreEmpty) {
  const auto c = convex_clip(square(0.5, 0.5), square(3.5, 0.5));
  EXPECT_TRUE(c.is_degenerate());
  EXPECT_EQ(side_cost(c), 0.0);
}

TEST(ConvexClip, SelfClipIsIdentity) {
  const auto s = square(0.5, 0.5);
  const auto c = convex_clip(s, s);
  EXPECT_NEAR(c.area(), 1.0, 1e-12);
  EXPECT_NEAR(side_cost(c), 4.0, 1e-12);
}

TEST(ConvexClip, OffsetSquaresGiveStrip) {
  const auto c = convex_clip(square(0.5, 0.5), square(1.25, 0.5));
  const auto b = c.bounds();
  EXPECT_NEAR(b.min_x, 0.75, 1e-12);
  EXPECT_NEAR(b.max_x, 1.0, 1e-12);
  EXPECT_NEAR(b.min_y, 0.0, 1e-12);
  EXPECT_NEAR(b.max_y, 1.0, 1e-12);
  EXPECT_NEAR(c.area(), 0.25, 1e-12);
}

TEST(ConvexClip, MatchesVertexEnumerationOracle) {
  std::mt19937_64 rng(4);
  int overlapping = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto a = random_box(rng);
    const auto b = random_box(rng);
    const auto got = convex_clip(ConvexPolygon(a), ConvexPolygon(b));
    const auto want = oracle::intersect(oracle_corners(a), oracle_corners(b));
    const double area = got.is_degenerate() ? 0.0 : got.area();
    EXPECT_NEAR(area, want.area, 1e-6);
    EXPECT_NEAR(side_cost(got), want.side_cost, 1e-6);
    overlapping += want.area > 0.0;
  }
  EXPECT_GT(overlapping, 200);
}

TEST(ConvexClip, CommutativeAndBoundedByInputs) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    const ConvexPolygon a(random_box(rng));
    const ConvexPolygon b(random_box(rng));
    const auto ab = convex_clip(a, b);
    const auto ba = convex_clip(b, a);
    EXPECT_NEAR(overlap_area(a, b), overlap_area(b, a), 1e-9);
    EXPECT_NEAR(side_cost(ab), side_cost(ba), 1e-9);
    EXPECT_LE(overlap_area(a, b), std::min(a.area(), b.area()) + 1e-12);
  }
}

TEST(ConvexClip, TouchingEdgeAndCornerAreDegenerate) {
  EXPECT_EQ(side_cost(convex_clip(square(0.5, 0.5), square(1.5, 0.5))), 0.0);
  EXPECT_EQ(side_cost(convex_clip(square(0.5, 0.5), square(1.5, 1.5))), 0.0);
}

TEST(SideCost, Examples) {
  EXPECT_EQ(side_cost(ConvexPolygon()), 0.0);
  EXPECT_DOUBLE_EQ(side_cost(ConvexPolygon(OrientedBox{{0.125, 0.5}, 0.25, 1.0, 0.0})), 2.125);
  EXPECT_DOUBLE_EQ(side_cost(square(0.5, 0.5)), 4.0);
}

TEST(SideCost, ZeroExactlyWhenAreaIsZero) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 1000; ++i) {
    const auto c = convex_clip(ConvexPolygon(random_box(rng)), ConvexPolygon(random_box(rng)));
    EXPECT_EQ(side_cost(c) == 0.0, c.is_degenerate());
  }
}

TEST(DistPointBoundary, Examples) {
  const RoomExtent room{4, 5};
  EXPECT_NEAR(dist_point_boundary({-0.75, 0.5}, room), oracle::dist_to_room_outline(-0.75, 0.5, 4, 5), 1e-12);
  EXPECT_DOUBLE_EQ(dist_point_boundary({-0.75, 0.5}, room), 0.75);
  EXPECT_EQ(dist_point_boundary({0.0, 2.0}, room), 0.0);
  EXPECT_EQ(dist_point_boundary({2.0, 2.5}, room), 2.0);
}

TEST(DistPointBoundary, MatchesSegmentProjectionOracle) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-3.0, 8.0);
  for (int i = 0; i < 5000; ++i) {
    const double x = d(rng);
    const double y = d(rng);
    EXPECT_NEAR(dist_point_boundary({x, y}, {4, 5}), oracle::dist_to_room_outline(x, y, 4, 5), 1e-12);
  }
}

TEST(PolygonGap, SeparatedAndOverlapping) {
  EXPECT_NEAR(polygon_gap(square(0.5, 0.5), square(2.0, 0.5)), 0.5, 1e-12);
  EXPECT_NEAR(polygon_gap(square(0.5, 0.5), square(2.5, 2.5)), std::sqrt(2.0), 1e-12);
  EXPECT_EQ(polygon_gap(square(0.5, 0.5), square(0.9, 0.5)), 0.0);
  EXPECT_EQ(polygon_gap(square(0.5, 0.5), square(0.5, 0.5, 0.2)), 0.0);  // contained
}

TEST(Voronoi, SingleCentroidAndTies) {
  const std::vector<Point2> one{{1, 1}};
  EXPECT_EQ(voronoi_assign({3, 4}, one), 0u);
  const std::vector<Point2> two{{0, 0}, {2, 0}};
  EXPECT_EQ(voronoi_assign({1, 5}, two), 0u);
  EXPECT_THROW(voronoi_assign({0, 0}, std::vector<Point2>{}), ZoningError);
}

TEST(Voronoi, AgreesWithBruteForceScan) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> d(0.0, 5.0);
  const std::vector<Point2> c{{d(rng), d(rng)}, {d(rng), d(rng)}, {d(rng), d(rng)}};
  for (int i = 0; i < 10000; ++i) {
    const Point2 p{d(rng), d(rng)};
    std::size_t best = 0;
    for (std::size_t k = 1; k < c.size(); ++k)
      if (std::hypot(p.x - c[k].x, p.y - c[k].y) < std::hypot(p.x - c[best].x, p.y - c[best].y)) best = k;
    EXPECT_EQ(voronoi_assign(p, c), best);
  }
}

TEST(Voronoi, CellsPartitionTheRoom) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(0.0, 4.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Point2> c;
    for (int k = 0; k < 4; ++k) c.push_back({d(rng), 1.25 * d(rng)});
    double total = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      const auto cell = voronoi_cell(k, c, {4, 5});
      total += cell.empty() ? 0.0 : cell.area();
      // The centroid owns its own cell.
      EXPECT_TRUE(cell.contains(c[k], 1e-9));
    }
    EXPECT_NEAR(total, 20.0, 1e-9);
  }
}

TEST(MedialAxis, EmptySquareContainsCenter) {
  const auto m = medial_axis({4, 4}, {});
  bool center = false;
  for (const auto& p : m.skeleton) center = center || distance(p, {2, 2}) <= 0.05;
  EXPECT_TRUE(center);
}

TEST(MedialAxis, FullyCoveredRoomIsEmpty) {
  const std::vector<OrientedBox> cover{{{1, 1}, 3, 3, 0.0}};
  const auto m = medial_axis({2, 2}, cover);
  EXPECT_TRUE(m.skeleton.empty());
  EXPECT_TRUE(m.pathway.empty());
}

TEST(MedialAxis, CorridorFollowsCenterLine) {
  const auto m = medial_axis({1, 5}, {});
  ASSERT_FALSE(m.skeleton.empty());
  int on_line = 0;
  for (const auto& p : m.skeleton) on_line += std::abs(p.x - 0.5) <= 0.05 + 1e-12;
  // Ridge oracle: along the long axis the clearance peaks at x = 0.5.
  EXPECT_GE(on_line, 60);
  for (const auto& p : m.skeleton) {
    if (p.y < 0.5 || p.y > 4.5) continue;
    EXPECT_LE(std::abs(p.x - 0.5), 0.05 + 1e-12);
  }
}

TEST(MedialAxis, SkeletonKeepsHalfWalkwayClearance) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<OrientedBox> obs;
    for (int k = 0; k < 3; ++k) {
      auto b = random_box(rng, 4.0);
      b.width = std::min(b.width, 1.2);
      b.length = std::min(b.length, 1.2);
      obs.push_back(b);
    }
    const RoomExtent room{5, 5};
    const auto m = medial_axis(room, obs);
    for (const auto& p : m.skeleton) {
      double d = dist_point_boundary(p, room);
      for (const auto& b : obs) d = std::min(d, dist_point_polygon(p, ConvexPolygon(b)));
      EXPECT_GE(d, 0.3 - 0.05);
    }
  }
}
