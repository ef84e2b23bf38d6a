#pragma once

// Default layout costs: overlap, bounds, alignment, balance, wall
// attraction, zone keeping and wall mounting.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "roomopt/geometry.hpp"
#include "roomopt/scene.hpp"

namespace roomopt {

/// Scaling factors of the staged objectives.
struct SolverWeights {
  double lambda1 = 100.0;  // door term inside the overlap cost
  double lambda2 = 20.0;   // wall-attraction divisor
  double lambda3 = 5.0;    // overlap, primary and secondary stages
  double lambda4 = 10.0;   // balance, primary stage
  double lambda5 = 10.0;   // bounds, primary and secondary stages
  double lambda6 = 10.0;   // zone keeping, secondary stage
  double lambda7 = 500.0;  // bounds, tertiary stage
  double lambda8 = 500.0;  // door/window avoidance for wall-mounted objects
  double wall_threshold = 1.0;  // T, meters

  bool valid() const {
    return lambda1 > 0 && lambda2 > 0 && lambda3 > 0 && lambda4 > 0 && lambda5 > 0 &&
           lambda6 > 0 && lambda7 > 0 && lambda8 > 0 && wall_threshold > 0;
  }
  friend bool operator==(const SolverWeights&, const SolverWeights&) = default;
};

inline void to_json(json& j, const SolverWeights& w) {
  j = {{"lambda1", w.lambda1}, {"lambda2", w.lambda2}, {"lambda3", w.lambda3},
       {"lambda4", w.lambda4}, {"lambda5", w.lambda5}, {"lambda6", w.lambda6},
       {"lambda7", w.lambda7}, {"lambda8", w.lambda8}, {"T", w.wall_threshold}};
}

/// Placements and footprints of every object at one evaluation point.
///
/// Objects that are not yet placed have `present[i] == 0`; their entries are
/// ignored by every cost.
class SceneState {
 public:
  SceneState(const Room& room, const RoomFeatures& features, std::span<const ObjectSpec> objects)
      : room_(&room),
        features_(&features),
        objects_(objects),
        placements_(objects.size()),
        footprints_(objects.size()),
        present_(objects.size(), 0) {}

  const Room& room() const { return *room_; }
  const RoomFeatures& features() const { return *features_; }
  std::span<const ObjectSpec> objects() const { return objects_; }
  std::size_t size() const { return objects_.size(); }

  void place(std::size_t i, const Placement& p) {
    placements_[i] = p;
    footprints_[i] = ConvexPolygon(footprint_box(objects_[i], p));
    present_[i] = 1;
  }
  void remove(std::size_t i) { present_[i] = 0; }

  bool present(std::size_t i) const { return present_[i] != 0; }
  const Placement& placement(std::size_t i) const { return placements_[i]; }
  const ConvexPolygon& footprint(std::size_t i) const { return footprints_[i]; }
  OrientedBox box(std::size_t i) const { return footprint_box(objects_[i], placements_[i]); }

 private:
  const Room* room_;
  const RoomFeatures* features_;
  std::span<const ObjectSpec> objects_;
  std::vector<Placement> placements_;
  std::vector<ConvexPolygon> footprints_;
  std::vector<char> present_;
};

inline double hinge_sq(double v) { return v > 0.0 ? v * v : 0.0; }

/// Overlap cost between two footprints: side_cost of their intersection.
inline double pair_overlap(const ConvexPolygon& a, const ConvexPolygon& b) {
  return side_cost(convex_clip(a, b));
}

/// Pairwise overlap among `active` objects plus lambda1-scaled overlap with
/// door swings. When `is_free` is given, terms involving only fixed objects
/// are skipped (they are constant during a solve).
inline double no_overlap(const SceneState& s, std::span<const std::size_t> active, double lambda1,
                         std::span<const char> is_free = {}) {
  const auto fixed = [&](std::size_t i) { return !is_free.empty() && !is_free[i]; };
  double acc = 0.0;
  for (std::size_t a = 0; a < active.size(); ++a) {
    const std::size_t i = active[a];
    for (std::size_t b = a + 1; b < active.size(); ++b) {
      const std::size_t j = active[b];
      if (fixed(i) && fixed(j)) continue;
      acc += pair_overlap(s.footprint(i), s.footprint(j));
    }
    if (fixed(i)) continue;
    for (const auto& swing : s.features().door_swings) acc += lambda1 * pair_overlap(s.footprint(i), swing);
  }
  return acc;
}

/// Sum over corners outside the room of their squared distance to the room.
inline double in_bounds(const OrientedBox& box, RoomExtent room) {
  double acc = 0.0;
  for (const auto& c : obb_corners(box)) {
    if (!inside_room(c, room)) {
      const double d = dist_point_boundary(c, room);
      acc += d * d;
    }
  }
  return acc;
}

/// sin^2(2 theta) / 5. The argument is reduced modulo pi first so the four
/// cardinal angles give exact zeros.
inline double aligned(double theta) {
  const double s = std::sin(std::remainder(2.0 * theta, std::numbers::pi));
  return s * s / 5.0;
}

/// Squared deviation of the area-weighted centroid from the room center.
inline double balanced(const SceneState& s, std::span<const std::size_t> active) {
  double total = 0.0;
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t i : active) {
    const double a = s.objects()[i].area();
    total += a;
    sx += a * s.placement(i).x;
    sy += a * s.placement(i).y;
  }
  if (total <= 0.0) return 0.0;
  const double dx = sx / total - 0.5 * s.room().width;
  const double dy = sy / total - 0.5 * s.room().length;
  return dx * dx + dy * dy;
}

/// Penalty once the centroid is farther than `threshold` from every wall.
inline double wall_attraction(Point2 centroid, RoomExtent room, double threshold, double lambda2) {
  const double d = dist_point_boundary(centroid, room);
  const double v = std::min(threshold - d, 0.0);
  return v * v / lambda2;
}

/// Penalty for being closer to a foreign zone centroid than to the own one.
inline double zone_keep(Point2 p, std::span<const Point2> centroids, std::size_t own) {
  if (own >= centroids.size()) return 0.0;
  const double d_own = distance(p, centroids[own]);
  double acc = 0.0;
  for (std::size_t j = 0; j < centroids.size(); ++j) {
    if (j == own) continue;
    const double v = std::min(distance(p, centroids[j]) - d_own, 0.0);
    acc += v * v;
  }
  return acc;
}

/// Wall mounting cost: lambda8-scaled overlap with door swings and window
/// bands, plus a product over walls of (distance + squared angle error).
///
/// The distance is measured from the midpoint of the object's back edge, so
/// the product vanishes when the object hangs flush on a wall facing into
/// the room.
inline double on_wall(const OrientedBox& box, const Room& room, const RoomFeatures& features,
                      double lambda8) {
  const ConvexPolygon fp(box);
  double acc = 0.0;
  for (const auto& swing : features.door_swings) acc += lambda8 * pair_overlap(fp, swing);
  for (const auto& band : features.window_bands) acc += lambda8 * pair_overlap(fp, band);
  const Point2 back = box.back_mid();
  double prod = 1.0;
  for (Wall w : kWalls) {
    const double dtheta = wrap_angle(box.theta - wall_facing_angle(w));
    prod *= room.dist_to_wall(back, w) + dtheta * dtheta;
  }
  return acc + prod;
}

}  // namespace roomopt
