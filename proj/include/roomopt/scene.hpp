#pragma once

// Domain model shared by every other module: rooms, objects, zones,
// placements, constraint calls and the layout graph, with their JSON form.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "roomopt/diagnostics.hpp"
#include "roomopt/geometry.hpp"

namespace roomopt {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

enum class Wall { south, north, west, east };
enum class OpeningKind { door, window };
enum class Tier { primary, secondary, tertiary };
enum class Attach { floor, wall, ceiling, surface };

NLOHMANN_JSON_SERIALIZE_ENUM(Wall, {{Wall::south, "south"},
                                    {Wall::north, "north"},
                                    {Wall::west, "west"},
                                    {Wall::east, "east"}})
NLOHMANN_JSON_SERIALIZE_ENUM(OpeningKind, {{OpeningKind::door, "door"}, {OpeningKind::window, "window"}})
NLOHMANN_JSON_SERIALIZE_ENUM(Tier, {{Tier::primary, "primary"},
                                    {Tier::secondary, "secondary"},
                                    {Tier::tertiary, "tertiary"}})
NLOHMANN_JSON_SERIALIZE_ENUM(Attach, {{Attach::floor, "floor"},
                                      {Attach::wall, "wall"},
                                      {Attach::ceiling, "ceiling"},
                                      {Attach::surface, "surface"}})

inline constexpr std::array<Wall, 4> kWalls{Wall::south, Wall::north, Wall::west, Wall::east};

inline std::optional<Wall> parse_wall(std::string_view s) {
  if (s == "south") return Wall::south;
  if (s == "north") return Wall::north;
  if (s == "west") return Wall::west;
  if (s == "east") return Wall::east;
  return std::nullopt;
}

inline std::string_view wall_name(Wall w) {
  switch (w) {
    case Wall::south: return "south";
    case Wall::north: return "north";
    case Wall::west: return "west";
    case Wall::east: return "east";
  }
  return "south";
}

struct Opening {
  Wall wall = Wall::south;
  double offset = 0.0;  // along the wall from its low-coordinate end to the opening center
  double width = 0.0;
  OpeningKind kind = OpeningKind::door;
  std::string style;

  friend bool operator==(const Opening&, const Opening&) = default;
};

struct WallPoint {
  Wall wall = Wall::south;
  double offset = 0.0;

  friend bool operator==(const WallPoint&, const WallPoint&) = default;
};

struct Room {
  double width = 0.0;   // w, along x
  double length = 0.0;  // l, along y
  double height = 3.0;
  std::vector<Opening> doors;
  std::vector<Opening> windows;
  std::vector<WallPoint> sockets;
  std::string style;

  RoomExtent extent() const { return {width, length}; }

  double wall_length(Wall w) const {
    return (w == Wall::south || w == Wall::north) ? width : length;
  }

  Point2 wall_point(Wall w, double offset) const {
    switch (w) {
      case Wall::south: return {offset, 0.0};
      case Wall::north: return {offset, length};
      case Wall::west: return {0.0, offset};
      case Wall::east: return {width, offset};
    }
    return {};
  }

  /// Distance from p to the infinite line carrying wall w.
  double dist_to_wall(Point2 p, Wall w) const {
    switch (w) {
      case Wall::south: return std::abs(p.y);
      case Wall::north: return std::abs(length - p.y);
      case Wall::west: return std::abs(p.x);
      case Wall::east: return std::abs(width - p.x);
    }
    return 0.0;
  }

  friend bool operator==(const Room&, const Room&) = default;
};

/// Unit vector along the wall, pointing toward increasing offset.
inline Point2 wall_tangent(Wall w) {
  return (w == Wall::south || w == Wall::north) ? Point2{1.0, 0.0} : Point2{0.0, 1.0};
}

/// Unit normal pointing from the wall into the room.
inline Point2 wall_inward_normal(Wall w) {
  switch (w) {
    case Wall::south: return {0.0, 1.0};
    case Wall::north: return {0.0, -1.0};
    case Wall::west: return {1.0, 0.0};
    case Wall::east: return {-1.0, 0.0};
  }
  return {};
}

/// Orientation at which an object's front faces into the room from wall w.
inline double wall_facing_angle(Wall w) {
  switch (w) {
    case Wall::south: return 0.0;
    case Wall::north: return -std::numbers::pi;  // pi, normalized
    case Wall::west: return -0.5 * std::numbers::pi;
    case Wall::east: return 0.5 * std::numbers::pi;
  }
  return 0.0;
}

/// Door swing buffer: a quarter disc of radius equal to the door width,
/// hinged at the jamb nearer the wall's low-coordinate end and opening into
/// the room, sampled as an 8-vertex convex polygon.
inline ConvexPolygon door_swing(const Room& room, const Opening& door) {
  const Point2 t = wall_tangent(door.wall);
  const Point2 n = wall_inward_normal(door.wall);
  const Point2 hinge = room.wall_point(door.wall, door.offset - 0.5 * door.width);
  std::vector<Point2> pts{hinge};
  for (int k = 0; k <= 6; ++k) {
    const double phi = 0.5 * std::numbers::pi * k / 6.0;
    pts.push_back(hinge + door.width * (std::cos(phi) * t + std::sin(phi) * n));
  }
  return ConvexPolygon(std::move(pts));
}

/// Rectangle of the given depth in front of an opening or wall point.
inline ConvexPolygon wall_band(const Room& room, Wall wall, double offset, double width,
                               double depth) {
  const Point2 t = wall_tangent(wall);
  const Point2 n = wall_inward_normal(wall);
  const Point2 c = room.wall_point(wall, offset);
  const Point2 a = c - (0.5 * width) * t;
  const Point2 b = c + (0.5 * width) * t;
  return ConvexPolygon(std::vector<Point2>{a, b, b + depth * n, a + depth * n});
}

inline constexpr double kWindowBandDepth = 0.3;
inline constexpr double kSocketBufferSize = 0.3;

inline ConvexPolygon window_band(const Room& room, const Opening& window) {
  return wall_band(room, window.wall, window.offset, window.width, kWindowBandDepth);
}

inline ConvexPolygon socket_buffer(const Room& room, const WallPoint& socket) {
  return wall_band(room, socket.wall, socket.offset, kSocketBufferSize, kSocketBufferSize);
}

/// Fixed room features in polygon form, computed once per room.
struct RoomFeatures {
  std::vector<ConvexPolygon> door_swings;
  std::vector<ConvexPolygon> window_bands;
  std::vector<ConvexPolygon> socket_buffers;
  std::vector<Point2> door_points;
  std::vector<Point2> window_points;
  std::vector<Point2> socket_points;

  explicit RoomFeatures(const Room& room) {
    for (const auto& d : room.doors) {
      door_swings.push_back(door_swing(room, d));
      door_points.push_back(room.wall_point(d.wall, d.offset));
    }
    for (const auto& w : room.windows) {
      window_bands.push_back(window_band(room, w));
      window_points.push_back(room.wall_point(w.wall, w.offset));
    }
    for (const auto& s : room.sockets) {
      socket_buffers.push_back(socket_buffer(room, s));
      socket_points.push_back(room.wall_point(s.wall, s.offset));
    }
  }
};

struct ObjectSpec {
  std::string name;
  Tier tier = Tier::primary;
  double width = 1.0;   // left-right extent
  double length = 1.0;  // front-back extent
  std::optional<int> zone;
  std::string style;
  Attach attach = Attach::floor;
  std::optional<std::string> count_group;
  std::vector<std::string> raw_constraints;

  double area() const { return width * length; }
  bool floor_standing() const { return tier != Tier::tertiary; }

  friend bool operator==(const ObjectSpec&, const ObjectSpec&) = default;
};

struct Placement {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Point2 position() const { return {x, y}; }
  friend bool operator==(const Placement&, const Placement&) = default;
};

inline OrientedBox footprint_box(const ObjectSpec& obj, const Placement& p) {
  return {{p.x, p.y}, obj.width, obj.length, p.theta};
}

struct Zone {
  int id = 0;
  std::string label;
  Point2 centroid;
  int rank = 0;  // 0 is the most significant zone

  friend bool operator==(const Zone&, const Zone&) = default;
};

enum class TranslationStage { intra, inter, tertiary };
NLOHMANN_JSON_SERIALIZE_ENUM(TranslationStage, {{TranslationStage::intra, "intra"},
                                                {TranslationStage::inter, "inter"},
                                                {TranslationStage::tertiary, "tertiary"}})

/// A bound invocation of a library cost function.
///
/// `params` keeps the arguments exactly as translated; parameters whose
/// schema type is an object reference hold object indices.
struct ConstraintCall {
  std::string function_id;
  std::size_t subject = 0;
  std::optional<std::size_t> object2;
  json params = json::object();
  double weight = 1.0;
  std::string source;  // the language constraint this call came from
  TranslationStage stage = TranslationStage::intra;

  friend bool operator==(const ConstraintCall&, const ConstraintCall&) = default;
};

struct LayoutGraph {
  Room room;
  std::vector<ObjectSpec> objects;
  std::vector<ConstraintCall> calls;
  std::vector<Zone> zones;

  std::vector<std::size_t> tier_indices(Tier t) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < objects.size(); ++i)
      if (objects[i].tier == t) out.push_back(i);
    return out;
  }

  std::optional<std::size_t> find(std::string_view name) const {
    for (std::size_t i = 0; i < objects.size(); ++i)
      if (objects[i].name == name) return i;
    return std::nullopt;
  }

  friend bool operator==(const LayoutGraph&, const LayoutGraph&) = default;
};

/// One optional placement per object, aligned with LayoutGraph::objects.
using PlacementSet = std::vector<std::optional<Placement>>;

// ---------------------------------------------------------------- JSON ----

inline void to_json(json& j, const Point2& p) { j = json::array({p.x, p.y}); }
inline void from_json(const json& j, Point2& p) {
  p.x = j.at(0).get<double>();
  p.y = j.at(1).get<double>();
}

inline void to_json(json& j, const Opening& o) {
  j = {{"wall", o.wall}, {"offset", o.offset}, {"width", o.width}, {"kind", o.kind}};
  if (!o.style.empty()) j["style"] = o.style;
}
inline void from_json(const json& j, Opening& o) {
  j.at("wall").get_to(o.wall);
  j.at("offset").get_to(o.offset);
  j.at("width").get_to(o.width);
  o.kind = j.value("kind", OpeningKind::door);
  o.style = j.value("style", "");
}

inline void to_json(json& j, const WallPoint& s) { j = {{"wall", s.wall}, {"offset", s.offset}}; }
inline void from_json(const json& j, WallPoint& s) {
  j.at("wall").get_to(s.wall);
  j.at("offset").get_to(s.offset);
}

inline void to_json(json& j, const Room& r) {
  j = {{"width", r.width},   {"length", r.length},   {"height", r.height},
       {"doors", r.doors},   {"windows", r.windows}, {"sockets", r.sockets},
       {"style", r.style}};
}
inline void from_json(const json& j, Room& r) {
  j.at("width").get_to(r.width);
  j.at("length").get_to(r.length);
  r.height = j.value("height", 3.0);
  r.doors = j.value("doors", std::vector<Opening>{});
  r.windows = j.value("windows", std::vector<Opening>{});
  for (auto& d : r.doors) d.kind = OpeningKind::door;
  for (auto& w : r.windows) w.kind = OpeningKind::window;
  r.sockets = j.value("sockets", std::vector<WallPoint>{});
  r.style = j.value("style", "");
}

inline void to_json(json& j, const ObjectSpec& o) {
  j = {{"name", o.name},   {"tier", o.tier},     {"width", o.width},
       {"length", o.length}, {"style", o.style}, {"attach", o.attach},
       {"raw_constraints", o.raw_constraints}};
  j["zone"] = o.zone ? json(*o.zone) : json(nullptr);
  j["count_group"] = o.count_group ? json(*o.count_group) : json(nullptr);
}
inline void from_json(const json& j, ObjectSpec& o) {
  j.at("name").get_to(o.name);
  j.at("tier").get_to(o.tier);
  j.at("width").get_to(o.width);
  j.at("length").get_to(o.length);
  o.style = j.value("style", "");
  o.attach = j.value("attach", Attach::floor);
  o.raw_constraints = j.value("raw_constraints", std::vector<std::string>{});
  o.zone = (j.contains("zone") && !j["zone"].is_null()) ? std::optional<int>(j["zone"].get<int>())
                                                         : std::nullopt;
  o.count_group = (j.contains("count_group") && !j["count_group"].is_null())
                      ? std::optional<std::string>(j["count_group"].get<std::string>())
                      : std::nullopt;
}

inline void to_json(json& j, const Zone& z) {
  j = {{"id", z.id}, {"label", z.label}, {"centroid", z.centroid}, {"rank", z.rank}};
}
inline void from_json(const json& j, Zone& z) {
  j.at("id").get_to(z.id);
  j.at("label").get_to(z.label);
  j.at("centroid").get_to(z.centroid);
  j.at("rank").get_to(z.rank);
}

inline void to_json(json& j, const ConstraintCall& c) {
  j = {{"function", c.function_id}, {"subject", c.subject}, {"params", c.params},
       {"weight", c.weight},        {"source", c.source},   {"stage", c.stage}};
  j["object"] = c.object2 ? json(*c.object2) : json(nullptr);
}
inline void from_json(const json& j, ConstraintCall& c) {
  j.at("function").get_to(c.function_id);
  j.at("subject").get_to(c.subject);
  c.params = j.value("params", json::object());
  c.weight = j.value("weight", 1.0);
  c.source = j.value("source", "");
  c.stage = j.value("stage", TranslationStage::intra);
  c.object2 = (j.contains("object") && !j["object"].is_null())
                  ? std::optional<std::size_t>(j["object"].get<std::size_t>())
                  : std::nullopt;
}

inline void to_json(json& j, const Placement& p) {
  j = {{"x", p.x}, {"y", p.y}, {"theta", p.theta}};
}
inline void from_json(const json& j, Placement& p) {
  j.at("x").get_to(p.x);
  j.at("y").get_to(p.y);
  j.at("theta").get_to(p.theta);
}

inline void to_json(json& j, const LayoutGraph& g) {
  j = {{"schema", "roomopt.graph/" + std::to_string(kSchemaVersion)},
       {"room", g.room},
       {"objects", g.objects},
       {"calls", g.calls},
       {"zones", g.zones}};
}
inline void from_json(const json& j, LayoutGraph& g) {
  j.at("room").get_to(g.room);
  j.at("objects").get_to(g.objects);
  g.calls = j.value("calls", std::vector<ConstraintCall>{});
  g.zones = j.value("zones", std::vector<Zone>{});
}

/// graph plus placements; this is the layout.json document.
inline json layout_to_json(const LayoutGraph& g, const PlacementSet& placements) {
  json j = g;
  j["schema"] = "roomopt.layout/" + std::to_string(kSchemaVersion);
  json arr = json::array();
  for (std::size_t i = 0; i < g.objects.size(); ++i) {
    if (i >= placements.size() || !placements[i]) continue;
    json p = *placements[i];
    p["object"] = g.objects[i].name;
    arr.push_back(std::move(p));
  }
  j["placements"] = std::move(arr);
  return j;
}

inline std::pair<LayoutGraph, PlacementSet> layout_from_json(const json& j) {
  LayoutGraph g = j.get<LayoutGraph>();
  PlacementSet placements(g.objects.size());
  for (const auto& pj : j.value("placements", json::array())) {
    const auto name = pj.at("object").get<std::string>();
    const auto idx = g.find(name);
    if (!idx) throw std::invalid_argument("placement for unknown object '" + name + "'");
    placements[*idx] = pj.get<Placement>();
  }
  return {std::move(g), std::move(placements)};
}

// ----------------------------------------------------------- operations ----

/// Each zone centroid becomes the mean position of the placed objects
/// assigned to it. Zones without placed objects keep their previous centroid.
inline std::vector<Zone> zone_centroid_update(const LayoutGraph& graph, const PlacementSet& placements) {
  std::vector<Zone> zones = graph.zones;
  for (auto& z : zones) {
    double sx = 0.0;
    double sy = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < graph.objects.size(); ++i) {
      const auto& o = graph.objects[i];
      if (!o.zone || *o.zone != z.id || o.tier == Tier::tertiary) continue;
      if (i >= placements.size() || !placements[i]) continue;
      sx += placements[i]->x;
      sy += placements[i]->y;
      ++n;
    }
    if (n > 0) z.centroid = {sx / n, sy / n};
  }
  return zones;
}

inline std::vector<std::size_t> call_references(const ConstraintCall& call);

/// Structural checks on a layout graph; an empty result means well-formed.
inline std::vector<Diagnostic> validate_graph(const LayoutGraph& g) {
  std::vector<Diagnostic> out;
  const auto report = [&](std::string msg) {
    out.push_back({Category::validation, "graph", std::move(msg)});
  };
  const Room& r = g.room;
  if (!(r.width > 0.0) || !(r.length > 0.0)) report("room dimensions must be positive");
  const auto check_opening = [&](const Opening& o, std::string_view what) {
    const double lo = o.offset - 0.5 * o.width;
    const double hi = o.offset + 0.5 * o.width;
    if (!(o.width > 0.0) || lo < -1e-9 || hi > r.wall_length(o.wall) + 1e-9)
      report(std::string(what) + " on " + std::string(wall_name(o.wall)) + " wall does not fit the wall");
  };
  for (const auto& d : r.doors) check_opening(d, "door");
  for (const auto& w : r.windows) check_opening(w, "window");
  for (const auto& s : r.sockets)
    if (s.offset < 0.0 || s.offset > r.wall_length(s.wall))
      report("socket on " + std::string(wall_name(s.wall)) + " wall is outside the wall extent");

  const auto zone_exists = [&](int id) {
    return std::any_of(g.zones.begin(), g.zones.end(), [&](const Zone& z) { return z.id == id; });
  };
  std::size_t primary_rank = 0;
  for (std::size_t i = 0; i < g.objects.size(); ++i) {
    const auto& o = g.objects[i];
    const std::string who = "object '" + o.name + "'";
    if (!(o.width > 0.0) || !(o.length > 0.0)) report(who + " has non-positive dimensions");
    if (o.tier != Tier::tertiary && o.attach != Attach::floor)
      report(who + " is primary/secondary but not floor-standing");
    if (o.tier == Tier::tertiary && o.raw_constraints.size() != 1)
      report(who + " is tertiary with " + std::to_string(o.raw_constraints.size()) +
             " raw constraints (expected exactly one)");
    if (o.tier == Tier::primary) {
      const auto it = std::find_if(g.zones.begin(), g.zones.end(), [&](const Zone& z) {
        return o.zone && z.id == *o.zone;
      });
      if (it == g.zones.end() || it->rank != static_cast<int>(primary_rank))
        report(who + " is primary #" + std::to_string(primary_rank) + " without a zone of matching rank");
      ++primary_rank;
    }
    if (o.tier == Tier::secondary && (!o.zone || !zone_exists(*o.zone)))
      report(who + " is secondary without a valid zone");
  }
  for (std::size_t c = 0; c < g.calls.size(); ++c) {
    for (std::size_t idx : call_references(g.calls[c])) {
      if (idx >= g.objects.size())
        report("call #" + std::to_string(c) + " (" + g.calls[c].function_id + ") references object index " +
               std::to_string(idx) + " of " + std::to_string(g.objects.size()));
    }
  }
  return out;
}

/// Parameter keys whose values name other objects by index.
inline constexpr std::array<std::string_view, 2> kObjectParamKeys{"other_a", "other_b"};

/// Every object index a call touches: subject, second object and object-typed params.
inline std::vector<std::size_t> call_references(const ConstraintCall& call) {
  std::vector<std::size_t> refs{call.subject};
  if (call.object2) refs.push_back(*call.object2);
  if (call.params.is_object()) {
    for (auto key : kObjectParamKeys) {
      const auto it = call.params.find(std::string(key));
      if (it != call.params.end() && it->is_number_integer() && it->get<std::int64_t>() >= 0)
        refs.push_back(it->get<std::size_t>());
    }
  }
  std::sort(refs.begin(), refs.end());
  refs.erase(std::unique(refs.begin(), refs.end()), refs.end());
  return refs;
}

}  // namespace roomopt
