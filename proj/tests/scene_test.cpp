#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "roomopt/scene.hpp"
#include "support.hpp"

using namespace roomopt;
using support::object;

namespace {

LayoutGraph small_graph() {
  LayoutGraph g;
  g.room = support::bedroom_shell();
  g.zones = {{0, "sleeping", {1, 1}, 0}, {1, "storage", {3, 4}, 1}};
  auto bed = object("bed", 1.6, 2.0);
  bed.zone = 0;
  auto wardrobe = object("wardrobe", 1.2, 0.6);
  wardrobe.zone = 1;
  auto ns = object("nightstand_1", 0.5, 0.4, Tier::secondary);
  ns.zone = 0;
  ns.count_group = "nightstand";
  auto lamp = object("lamp", 0.3, 0.3, Tier::tertiary, Attach::surface);
  lamp.raw_constraints = {"Place the lamp on the nightstand."};
  g.objects = {bed, wardrobe, ns, lamp};
  ConstraintCall c;
  c.function_id = "ind_next_to_wall";
  c.subject = 0;
  c.source = "The bed should have its headboard against a wall.";
  ConstraintCall t;
  t.function_id = "ter_on_surface_of";
  t.subject = 3;
  t.object2 = 2;
  t.stage = TranslationStage::tertiary;
  ConstraintCall b;
  b.function_id = "pair_between";
  b.subject = 0;
  b.params = {{"other_a", 2}, {"other_b", 1}};
  b.stage = TranslationStage::inter;
  g.calls = {c, t, b};
  return g;
}

}  // namespace

TEST(Room, WallGeometry) {
  const Room r = support::bedroom_shell();
  EXPECT_EQ(r.height, 3.0);
  EXPECT_EQ(r.wall_length(Wall::south), 4.0);
  EXPECT_EQ(r.wall_length(Wall::east), 5.0);
  EXPECT_EQ(r.wall_point(Wall::north, 2.0).y, 5.0);
  EXPECT_EQ(r.dist_to_wall({1.0, 1.5}, Wall::east), 3.0);
}

TEST(Room, FacingAnglePointsIntoRoom) {
  for (Wall w : kWalls) {
    const OrientedBox b{{0, 0}, 1, 1, wall_facing_angle(w)};
    const Point2 n = wall_inward_normal(w);
    EXPECT_NEAR(dot(b.front(), n), 1.0, 1e-12) << wall_name(w);
  }
}

TEST(Room, DoorSwingIsQuarterDiscIntoRoom) {
  const Room r = support::bedroom_shell();
  const auto swing = door_swing(r, r.doors[0]);
  EXPECT_EQ(swing.size(), 8u);
  // Inscribed polygon of a quarter disc of radius 0.9.
  EXPECT_LT(swing.area(), 0.25 * std::numbers::pi * 0.81);
  EXPECT_GT(swing.area(), 0.6);
  for (const auto& v : swing.vertices()) EXPECT_GE(v.y, 0.0);
  EXPECT_NEAR(swing.vertices()[0].x, 3.35 - 0.45, 1e-12);  // hinge at the low-offset jamb
}

TEST(ZoneCentroidUpdate, SinglePrimaryAndMean) {
  LayoutGraph g = small_graph();
  PlacementSet p(g.objects.size());
  p[0] = Placement{1, 1, 0};
  p[1] = Placement{3, 4, 0};
  auto z = zone_centroid_update(g, p);
  EXPECT_EQ(z[0].centroid.x, 1.0);
  EXPECT_EQ(z[1].centroid.y, 4.0);
  p[2] = Placement{3, 3, 0};
  z = zone_centroid_update(g, p);
  EXPECT_EQ(z[0].centroid.x, 2.0);
  EXPECT_EQ(z[0].centroid.y, 2.0);
}

TEST(ZoneCentroidUpdate, UnplacedZoneKeepsCentroid) {
  LayoutGraph g = small_graph();
  PlacementSet p(g.objects.size());
  p[0] = Placement{1.5, 2.5, 0};
  const auto z = zone_centroid_update(g, p);
  EXPECT_EQ(z[1].centroid, g.zones[1].centroid);
}

TEST(ZoneCentroidUpdate, MatchesSummationAndIsPermutationInvariant) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(0.0, 4.0);
  LayoutGraph g;
  g.room = support::plain_room(4, 5);
  g.zones = {{0, "a", {0, 0}, 0}};
  PlacementSet p;
  for (int k = 0; k < 3; ++k) {
    auto o = object("o" + std::to_string(k), 0.5, 0.5, k ? Tier::secondary : Tier::primary);
    o.zone = 0;
    g.objects.push_back(o);
    p.push_back(Placement{d(rng), d(rng), 0});
  }
  double sx = 0;
  double sy = 0;
  for (const auto& q : p) {
    sx += q->x;
    sy += q->y;
  }
  const auto z = zone_centroid_update(g, p);
  EXPECT_NEAR(z[0].centroid.x, sx / 3, 1e-12);
  EXPECT_NEAR(z[0].centroid.y, sy / 3, 1e-12);

  std::vector<std::size_t> perm{2, 0, 1};
  LayoutGraph g2 = g;
  PlacementSet p2;
  for (std::size_t k = 0; k < 3; ++k) {
    g2.objects[k] = g.objects[perm[k]];
    p2.push_back(p[perm[k]]);
  }
  const auto z2 = zone_centroid_update(g2, p2);
  EXPECT_NEAR(z2[0].centroid.x, z[0].centroid.x, 1e-12);
  EXPECT_NEAR(z2[0].centroid.y, z[0].centroid.y, 1e-12);
}

TEST(ValidateGraph, WellFormedGraphIsClean) { EXPECT_TRUE(validate_graph(small_graph()).empty()); }

TEST(ValidateGraph, OrphanCallReference) {
  LayoutGraph g = small_graph();
  g.objects.push_back(object("chair", 0.5, 0.5, Tier::secondary));
  g.objects.back().zone = 0;
  ConstraintCall c;
  c.function_id = "pair_near";
  c.subject = 0;
  c.object2 = 99;
  g.calls.push_back(c);
  const auto d = validate_graph(g);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].category, Category::validation);
  EXPECT_NE(d[0].message.find("99"), std::string::npos);
}

TEST(ValidateGraph, TertiaryNeedsExactlyOneConstraint) {
  LayoutGraph g = small_graph();
  g.objects[3].raw_constraints = {"a", "b", "c"};
  EXPECT_EQ(validate_graph(g).size(), 1u);
}

TEST(ValidateGraph, OtherViolations) {
  LayoutGraph g = small_graph();
  g.room.doors[0].offset = 3.9;  // sticks past the east corner
  g.zones[0].rank = 1;           // primary order no longer matches zone ranks
  g.objects[2].zone = 7;
  EXPECT_EQ(validate_graph(g).size(), 3u);
}

TEST(CallReferences, IncludesObjectParams) {
  const auto g = small_graph();
  EXPECT_EQ(call_references(g.calls[2]), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(call_references(g.calls[1]), (std::vector<std::size_t>{2, 3}));
}

TEST(Serialization, GraphRoundTripIsIdentity) {
  LayoutGraph g = small_graph();
  g.room.style = "oak floor";
  g.objects[0].style = "linen";
  g.objects[0].raw_constraints = {"x"};
  const json j = g;
  EXPECT_EQ(j["schema"], "roomopt.graph/1");
  EXPECT_EQ(j.get<LayoutGraph>(), g);
  EXPECT_EQ(json::parse(j.dump()).get<LayoutGraph>(), g);
}

TEST(Serialization, LayoutRoundTrip) {
  const LayoutGraph g = small_graph();
  PlacementSet p(g.objects.size());
  p[0] = Placement{1.25, 2.5, -std::numbers::pi / 2};
  p[3] = Placement{0.5, 0.5, 0};
  const json j = layout_to_json(g, p);
  EXPECT_EQ(j["schema"], "roomopt.layout/1");
  const auto [g2, p2] = layout_from_json(json::parse(j.dump()));
  EXPECT_EQ(g2, g);
  EXPECT_EQ(p2, p);
}

TEST(Serialization, UnknownPlacementObjectIsRejected) {
  json j = layout_to_json(small_graph(), {});
  j["placements"] = json::array({{{"object", "ghost"}, {"x", 0}, {"y", 0}, {"theta", 0}}});
  EXPECT_THROW(layout_from_json(j), std::invalid_argument);
}
