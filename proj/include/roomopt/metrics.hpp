#pragma once

// Layout evaluation: pathway cost, object overlap rate and out-of-bounds rate.

#include <cstdio>
#include <string>
#include <vector>

#include "roomopt/geometry.hpp"
#include "roomopt/scene.hpp"

namespace roomopt {

struct ObjectMetrics {
  std::string name;
  double pathway_cost = 0.0;   // m^2
  double overlap_area = 0.0;   // m^2, every counted overlap involving the object
  double outside_area = 0.0;   // m^2
};

struct MetricsReport {
  double pathway_cost = 0.0;
  double oor_fraction = 0.0;
  double oob_fraction = 0.0;
  double overlap_area = 0.0;
  double outside_area = 0.0;
  double door_overlap_area = 0.0;  // footprint area inside door swings (pri/sec only)
  std::size_t pathway_points = 0;
  std::vector<ObjectMetrics> per_object;

  double oor_percent() const { return 100.0 * oor_fraction; }
  double oob_percent() const { return 100.0 * oob_fraction; }
};

inline void to_json(json& j, const ObjectMetrics& m) {
  j = {{"object", m.name},
       {"pathway_cost", m.pathway_cost},
       {"overlap_area", m.overlap_area},
       {"outside_area", m.outside_area}};
}

inline void to_json(json& j, const MetricsReport& r) {
  j = {{"schema", "roomopt.metrics/" + std::to_string(kSchemaVersion)},
       {"pathway_cost", r.pathway_cost},
       {"oor_fraction", r.oor_fraction},
       {"oob_fraction", r.oob_fraction},
       {"oor_percent", r.oor_percent()},
       {"oob_percent", r.oob_percent()},
       {"overlap_area", r.overlap_area},
       {"outside_area", r.outside_area},
       {"door_overlap_area", r.door_overlap_area},
       {"pathway_points", r.pathway_points},
       {"per_object", r.per_object}};
}

namespace detail {

inline std::vector<std::size_t> placed_floor_objects(const LayoutGraph& g, const PlacementSet& p) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < g.objects.size(); ++i)
    if (g.objects[i].floor_standing() && i < p.size() && p[i]) out.push_back(i);
  return out;
}

}  // namespace detail

/// Pathway points of the room (the walkway around the medial axis of the
/// empty room).
inline std::vector<Point2> pathway_points(const Room& room, double cell = 0.05) {
  return medial_axis(room.extent(), {}, cell).pathway;
}

/// Sum over primary and secondary footprints of the squared distance from
/// every pathway point inside the footprint to the footprint boundary.
inline double pathway_cost(const LayoutGraph& g, const PlacementSet& placements,
                           std::span<const Point2> pathway, std::vector<double>* per_object = nullptr) {
  double total = 0.0;
  for (std::size_t i : detail::placed_floor_objects(g, placements)) {
    const ConvexPolygon fp(footprint_box(g.objects[i], *placements[i]));
    double acc = 0.0;
    for (const auto& p : pathway) {
      if (!fp.contains(p)) continue;
      const double d = dist_point_polygon_boundary(p, fp);
      acc += d * d;
    }
    if (per_object) (*per_object)[i] += acc;
    total += acc;
  }
  return total;
}

/// Overlapped area divided by room area: pairwise primary/secondary
/// overlaps, primary/secondary overlap with door swings, and overlaps
/// between tertiary objects sharing an attachment type.
inline double oor(const LayoutGraph& g, const PlacementSet& placements, std::vector<double>* per_object = nullptr,
                  double* door_area = nullptr) {
  const RoomFeatures features(g.room);
  std::vector<std::optional<ConvexPolygon>> fps(g.objects.size());
  for (std::size_t i = 0; i < g.objects.size(); ++i)
    if (i < placements.size() && placements[i]) fps[i] = ConvexPolygon(footprint_box(g.objects[i], *placements[i]));
  double total = 0.0;
  double doors = 0.0;
  const auto add = [&](std::size_t i, std::optional<std::size_t> j, double a) {
    total += a;
    if (!per_object) return;
    (*per_object)[i] += a;
    if (j) (*per_object)[*j] += a;
  };
  for (std::size_t i = 0; i < g.objects.size(); ++i) {
    if (!fps[i]) continue;
    const auto& oi = g.objects[i];
    for (std::size_t j = i + 1; j < g.objects.size(); ++j) {
      if (!fps[j]) continue;
      const auto& oj = g.objects[j];
      const bool floor_pair = oi.floor_standing() && oj.floor_standing();
      const bool same_tertiary = !oi.floor_standing() && !oj.floor_standing() && oi.attach == oj.attach;
      if (floor_pair || same_tertiary) add(i, j, overlap_area(*fps[i], *fps[j]));
    }
    if (!oi.floor_standing()) continue;
    for (const auto& swing : features.door_swings) {
      const double a = overlap_area(*fps[i], swing);
      doors += a;
      add(i, std::nullopt, a);
    }
  }
  if (door_area) *door_area = doors;
  return total / (g.room.width * g.room.length);
}

/// Footprint area outside the room divided by room area, over every placed object.
inline double oob(const LayoutGraph& g, const PlacementSet& placements, std::vector<double>* per_object = nullptr) {
  const ConvexPolygon room = room_polygon(g.room.extent());
  double total = 0.0;
  for (std::size_t i = 0; i < g.objects.size(); ++i) {
    if (i >= placements.size() || !placements[i]) continue;
    const ConvexPolygon fp(footprint_box(g.objects[i], *placements[i]));
    const double out = std::max(0.0, fp.area() - overlap_area(fp, room));
    if (per_object) (*per_object)[i] += out;
    total += out;
  }
  return total / (g.room.width * g.room.length);
}

inline MetricsReport evaluate(const LayoutGraph& g, const PlacementSet& placements) {
  MetricsReport r;
  const double room_area = g.room.width * g.room.length;
  const auto pathway = pathway_points(g.room);
  r.pathway_points = pathway.size();
  std::vector<double> path(g.objects.size(), 0.0);
  std::vector<double> over(g.objects.size(), 0.0);
  std::vector<double> out(g.objects.size(), 0.0);
  r.pathway_cost = pathway_cost(g, placements, pathway, &path);
  r.oor_fraction = oor(g, placements, &over, &r.door_overlap_area);
  r.oob_fraction = oob(g, placements, &out);
  r.overlap_area = r.oor_fraction * room_area;
  r.outside_area = r.oob_fraction * room_area;
  for (std::size_t i = 0; i < g.objects.size(); ++i)
    r.per_object.push_back({g.objects[i].name, path[i], over[i], out[i]});
  return r;
}

/// Human-readable summary table.
inline std::string metrics_table(const MetricsReport& r) {
  std::string s;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-12s %14s %10s\n", "metric", "value", "percent");
  s += buf;
  std::snprintf(buf, sizeof buf, "%-12s %14.6f %10s\n", "pathway", r.pathway_cost, "-");
  s += buf;
  std::snprintf(buf, sizeof buf, "%-12s %14.6f %9.4f%%\n", "OOR", r.oor_fraction, r.oor_percent());
  s += buf;
  std::snprintf(buf, sizeof buf, "%-12s %14.6f %9.4f%%\n", "OOB", r.oob_fraction, r.oob_percent());
  s += buf;
  std::snprintf(buf, sizeof buf, "pathway points: %zu\n\n", r.pathway_points);
  s += buf;
  std::snprintf(buf, sizeof buf, "%-24s %12s %12s %12s\n", "object", "pathway", "overlap m2", "outside m2");
  s += buf;
  for (const auto& o : r.per_object) {
    std::snprintf(buf, sizeof buf, "%-24s %12.6f %12.6f %12.6f\n", o.name.c_str(), o.pathway_cost, o.overlap_area,
                  o.outside_area);
    s += buf;
  }
  return s;
}

}  // namespace roomopt
