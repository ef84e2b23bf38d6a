#pragma once

// Library of language-constraint cost functions. Each entry declares a
// parameter schema and a docstring; the schema and docstrings (without the
// implementations) form the manifest shown to the translator.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "roomopt/costlib.hpp"
#include "roomopt/scene.hpp"

namespace roomopt {

enum class FunctionKind { individual, pairwise, tertiary };

inline std::string_view to_string(FunctionKind k) {
  switch (k) {
    case FunctionKind::individual: return "individual";
    case FunctionKind::pairwise: return "pairwise";
    case FunctionKind::tertiary: return "tertiary";
  }
  return "individual";
}

enum class ParamType { number, choice, sides, object };

struct ParamSpec {
  std::string name;
  ParamType type = ParamType::number;
  bool required = false;
  json default_value;  // null when required
  std::vector<std::string> choices;
  std::string doc;
};

/// Arguments after schema validation, defaults filled in.
struct BoundArgs {
  std::size_t subject = 0;
  std::optional<std::size_t> other;
  json params = json::object();

  double number(const std::string& key) const { return params.at(key).get<double>(); }
  std::string text(const std::string& key) const { return params.at(key).get<std::string>(); }
  std::size_t object(const std::string& key) const { return params.at(key).get<std::size_t>(); }
};

using Evaluator = std::function<double(const SceneState&)>;

struct FunctionSpec {
  std::string id;
  FunctionKind kind = FunctionKind::individual;
  std::string other_role;  // name of the second object argument; empty when none
  std::vector<ParamSpec> params;
  std::string doc;
  std::string example;
  bool scene_dependent = false;  // reads other present objects beyond its arguments
  std::function<Evaluator(const BoundArgs&)> make;
};

namespace sides {

/// Object-frame side names; "top"/"bottom" are accepted as front/back.
inline std::optional<std::string> canonical(std::string_view s) {
  if (s == "front" || s == "top") return "front";
  if (s == "back" || s == "bottom") return "back";
  if (s == "left") return "left";
  if (s == "right") return "right";
  return std::nullopt;
}

inline Point2 direction(const OrientedBox& box, std::string_view side) {
  if (side == "front") return box.front();
  if (side == "back") return -1.0 * box.front();
  if (side == "right") return box.right();
  return -1.0 * box.right();
}

/// Clearance strip of the given depth along one side of a box.
inline OrientedBox clearance_strip(const OrientedBox& box, std::string_view side, double depth) {
  const bool lengthwise = side == "front" || side == "back";
  const double extent = lengthwise ? box.length : box.width;
  OrientedBox strip = box;
  strip.center = box.center + (0.5 * extent + 0.5 * depth) * direction(box, side);
  if (lengthwise) {
    strip.length = depth;
  } else {
    strip.width = depth;
  }
  return strip;
}

}  // namespace sides

namespace detail {

inline Point2 room_center(const Room& r) { return {0.5 * r.width, 0.5 * r.length}; }

inline const std::vector<Point2>& fixed_points(const SceneState& s, std::string_view type) {
  const auto& f = s.features();
  if (type == "door") return f.door_points;
  if (type == "window") return f.window_points;
  return f.socket_points;
}

inline const std::vector<ConvexPolygon>& fixed_buffers(const SceneState& s, std::string_view type) {
  const auto& f = s.features();
  if (type == "door") return f.door_swings;
  if (type == "window") return f.window_bands;
  return f.socket_buffers;
}

// (1 - cos)^2 / 4 of the angle between the object's front and a target direction.
inline double facing_error(const OrientedBox& box, Point2 target) {
  const Point2 v = target - box.center;
  const double n = norm(v);
  if (n <= 1e-12) return 0.0;
  const double c = dot(box.front(), (1.0 / n) * v);
  return 0.25 * (1.0 - c) * (1.0 - c);
}

inline double sq_dist(Point2 a, Point2 b) {
  const Point2 d = a - b;
  return dot(d, d);
}

inline ParamSpec number_param(std::string name, double def, std::string doc) {
  return {std::move(name), ParamType::number, false, json(def), {}, std::move(doc)};
}

inline ParamSpec fixed_type_param() {
  return {"fixed_object_type", ParamType::choice, true, json(nullptr), {"door", "window", "socket"},
          "Kind of fixed room feature: 'door', 'window' or 'socket'."};
}

inline std::vector<FunctionSpec> build_functions() {
  std::vector<FunctionSpec> fns;

  fns.push_back({"ind_next_to_wall", FunctionKind::individual, "", {},
                 "Pulls the back of the object flush against the nearest wall. Use for headboards, "
                 "wardrobes, desks and anything that should stand with its back to a wall.",
                 "ind_next_to_wall(bed)", false, [](const BoundArgs& a) -> Evaluator {
                   return [s = a.subject](const SceneState& st) {
                     const Point2 back = st.box(s).back_mid();
                     double best = std::numeric_limits<double>::infinity();
                     for (Wall w : kWalls) best = std::min(best, st.room().dist_to_wall(back, w));
                     return best * best;
                   };
                 }});

  fns.push_back({"ind_away_from_fixed_object", FunctionKind::individual, "",
                 {fixed_type_param(), number_param("min_dist", 1.0, "Minimum centroid distance in meters.")},
                 "Keeps the object's center at least min_dist meters from every door, window or "
                 "socket of the given type.",
                 "ind_away_from_fixed_object(bed, fixed_object_type='socket', min_dist=2.0)", false,
                 [](const BoundArgs& a) -> Evaluator {
                   return [s = a.subject, type = a.text("fixed_object_type"),
                           d = a.number("min_dist")](const SceneState& st) {
                     double acc = 0.0;
                     for (const auto& p : fixed_points(st, type))
                       acc += hinge_sq(d - distance(st.placement(s).position(), p));
                     return acc;
                   };
                 }});

  fns.push_back({"ind_close_to_fixed_object", FunctionKind::individual, "",
                 {fixed_type_param(), number_param("max_dist", 1.0, "Maximum centroid distance in meters.")},
                 "Brings the object's center within max_dist meters of the closest door, window or "
                 "socket of the given type.",
                 "ind_close_to_fixed_object(desk, fixed_object_type='window', max_dist=1.5)", false,
                 [](const BoundArgs& a) -> Evaluator {
                   return [s = a.subject, type = a.text("fixed_object_type"),
                           d = a.number("max_dist")](const SceneState& st) {
                     const auto& pts = fixed_points(st, type);
                     if (pts.empty()) return 0.0;
                     double best = std::numeric_limits<double>::infinity();
                     for (const auto& p : pts) best = std::min(best, distance(st.placement(s).position(), p));
                     return hinge_sq(best - d);
                   };
                 }});

  fns.push_back({"ind_not_block", FunctionKind::individual, "", {fixed_type_param()},
                 "Keeps the object's footprint out of the clearance area of doors (the swing), "
                 "windows (a 0.3 m band in front) or sockets (a 0.3 m square).",
                 "ind_not_block(wardrobe, fixed_object_type='window')", false,
                 [](const BoundArgs& a) -> Evaluator {
                   return [s = a.subject, type = a.text("fixed_object_type")](const SceneState& st) {
                     double acc = 0.0;
                     for (const auto& buf : fixed_buffers(st, type)) acc += pair_overlap(st.footprint(s), buf);
                     return acc;
                   };
                 }});

  fns.push_back({"ind_accessible", FunctionKind::individual, "",
                 {{"sides", ParamType::sides, true, json(nullptr), {"front", "back", "left", "right"},
                   "List of sides that must stay clear: 'front', 'back', 'left', 'right'."},
                  number_param("clearance", 0.6, "Depth of the clear strip in meters.")},
                 "Keeps a strip of `clearance` meters free of other furniture and inside the room "
                 "along each listed side of the object.",
                 "ind_accessible(bed, sides=['left', 'right'])", true,
                 [](const BoundArgs& a) -> Evaluator {
                   std::vector<std::string> list;
                   for (const auto& v : a.params.at("sides")) list.push_back(v.get<std::string>());
                   return [s = a.subject, list, depth = a.number("clearance")](const SceneState& st) {
                     const OrientedBox box = st.box(s);
                     double acc = 0.0;
                     for (const auto& side : list) {
                       const OrientedBox strip = sides::clearance_strip(box, side, depth);
                       const ConvexPolygon poly(strip);
                       for (std::size_t j = 0; j < st.size(); ++j) {
                         if (j == s || !st.present(j) || !st.objects()[j].floor_standing()) continue;
                         acc += pair_overlap(poly, st.footprint(j));
                       }
                       acc += in_bounds(strip, st.room().extent());
                     }
                     return acc;
                   };
                 }});

  fns.push_back({"ind_face_into_room", FunctionKind::individual, "", {},
                 "Turns the object's front toward the center of the room.", "ind_face_into_room(sofa)",
                 false, [](const BoundArgs& a) -> Evaluator {
                   return [s = a.subject](const SceneState& st) {
                     return facing_error(st.box(s), room_center(st.room()));
                   };
                 }});

  fns.push_back({"ind_central", FunctionKind::individual, "", {},
                 "Pulls the object toward the center of the room.", "ind_central(rug)", false,
                 [](const BoundArgs& a) -> Evaluator {
                   return [s = a.subject](const SceneState& st) {
                     return sq_dist(st.placement(s).position(), room_center(st.room()));
                   };
                 }});

  fns.push_back({"ind_under_window", FunctionKind::individual, "", {},
                 "Places the back of the object against the wall directly below the nearest window.",
                 "ind_under_window(desk)", false, [](const BoundArgs& a) -> Evaluator {
                   return [s = a.subject](const SceneState& st) {
                     const auto& pts = st.features().window_points;
                     if (pts.empty()) return 0.0;
                     const Point2 back = st.box(s).back_mid();
                     double best = std::numeric_limits<double>::infinity();
                     for (const auto& p : pts) best = std::min(best, sq_dist(back, p));
                     return best;
                   };
                 }});

  fns.push_back({"pair_near", FunctionKind::pairwise, "other",
                 {number_param("max_dist", 1.0, "Largest allowed gap between footprints in meters.")},
                 "Keeps the gap between the two footprints at most max_dist meters.",
                 "pair_near(nightstand, other=bed, max_dist=0.2)", false,
                 [](const BoundArgs& a) -> Evaluator {
                   return [s = a.subject, o = *a.other, d = a.number("max_dist")](const SceneState& st) {
                     return hinge_sq(polygon_gap(st.footprint(s), st.footprint(o)) - d);
                   };
                 }});

  fns.push_back({"pair_far", FunctionKind::pairwise, "other",
                 {number_param("min_dist", 2.0, "Smallest allowed gap between footprints in meters.")},
                 "Keeps the gap between the two footprints at least min_dist meters.",
                 "pair_far(desk, other=bed, min_dist=1.5)", false, [](const BoundArgs& a) -> Evaluator {
                   return [s = a.subject, o = *a.other, d = a.number("min_dist")](const SceneState& st) {
                     return hinge_sq(d - polygon_gap(st.footprint(s), st.footprint(o)));
                   };
                 }});

  fns.push_back({"pair_adjacent", FunctionKind::pairwise, "other",
                 {{"side", ParamType::choice, true, json(nullptr), {"front", "back", "left", "right"},
                   "Side of the other object to stand against: 'front', 'back', 'left', 'right'."}},
                 "Places the object touching the given side of the other object; it may slide along "
                 "that side.",
                 "pair_adjacent(nightstand, other=bed, side='left')", false,
                 [](const BoundArgs& a) -> Evaluator {
                   return [s = a.subject, o = *a.other, side = a.text("side")](const SceneState& st) {
                     const OrientedBox ob = st.box(o);
                     const OrientedBox sb = st.box(s);
                     const Point2 d = sides::direction(ob, side);
                     const bool lengthwise = side == "front" || side == "back";
                     const double reach = 0.5 * (lengthwise ? ob.length : ob.width);
                     const double run = 0.5 * (lengthwise ? ob.width : ob.length);
                     const Point2 t = lengthwise ? ob.right() : ob.front();
                     const double own = std::abs(0.5 * sb.width * dot(sb.right(), d)) +
                                        std::abs(0.5 * sb.length * dot(sb.front(), d));
                     const Point2 mid = ob.center + (reach + own) * d;
                     const double gap = dist_point_segment(sb.center, mid - run * t, mid + run * t);
                     return gap * gap;
                   };
                 }});

  fns.push_back({"pair_facing", FunctionKind::pairwise, "other", {},
                 "Turns the object's front toward the other object.", "pair_facing(armchair, other=tv)",
                 false, [](const BoundArgs& a) -> Evaluator {
                   return [s = a.subject, o = *a.other](const SceneState& st) {
                     return facing_error(st.box(s), st.placement(o).position());
                   };
                 }});

  fns.push_back({"pair_not_facing", FunctionKind::pairwise, "other", {},
                 "Keeps the object's front turned more than 45 degrees away from the other object.",
                 "pair_not_facing(mirror, other=bed)", false, [](const BoundArgs& a) -> Evaluator {
                   return [s = a.subject, o = *a.other](const SceneState& st) {
                     const OrientedBox sb = st.box(s);
                     const Point2 v = st.placement(o).position() - sb.center;
                     const double n = norm(v);
                     if (n <= 1e-12) return 0.0;
                     return hinge_sq(dot(sb.front(), (1.0 / n) * v) - std::cos(std::numbers::pi / 4.0));
                   };
                 }});

  fns.push_back({"pair_between", FunctionKind::pairwise, "",
                 {{"other_a", ParamType::object, true, json(nullptr), {}, "First flanking object."},
                  {"other_b", ParamType::object, true, json(nullptr), {}, "Second flanking object."}},
                 "Centers the object halfway between two other objects.",
                 "pair_between(bed, other_a=nightstand_1, other_b=nightstand_2)", false,
                 [](const BoundArgs& a) -> Evaluator {
                   return [s = a.subject, oa = a.object("other_a"), ob = a.object("other_b")](const SceneState& st) {
                     const Point2 mid = 0.5 * (st.placement(oa).position() + st.placement(ob).position());
                     return sq_dist(st.placement(s).position(), mid);
                   };
                 }});

  fns.push_back({"pair_aligned_with", FunctionKind::pairwise, "other", {},
                 "Keeps the object parallel to the other object.", "pair_aligned_with(chair, other=desk)",
                 false, [](const BoundArgs& a) -> Evaluator {
                   return [s = a.subject, o = *a.other](const SceneState& st) {
                     const double v = std::sin(st.placement(s).theta - st.placement(o).theta);
                     return v * v;
                   };
                 }});

  fns.push_back({"ter_on_surface_of", FunctionKind::tertiary, "parent", {},
                 "Keeps the whole footprint of a surface object on top of its parent object.",
                 "ter_on_surface_of(table_lamp, parent=nightstand)", false,
                 [](const BoundArgs& a) -> Evaluator {
                   return [s = a.subject, p = *a.other](const SceneState& st) {
                     double acc = 0.0;
                     for (const auto& c : st.footprint(s).vertices()) {
                       const double d = dist_point_polygon(c, st.footprint(p));
                       acc += d * d;
                     }
                     return acc;
                   };
                 }});

  fns.push_back({"ter_above", FunctionKind::tertiary, "parent", {},
                 "Hangs a wall-mounted object on the wall directly above its parent (matching the "
                 "back edges).",
                 "ter_above(painting, parent=bed)", false, [](const BoundArgs& a) -> Evaluator {
                   return [s = a.subject, p = *a.other](const SceneState& st) {
                     return sq_dist(st.box(s).back_mid(), st.box(p).back_mid());
                   };
                 }});

  fns.push_back({"ter_under", FunctionKind::tertiary, "parent", {},
                 "Centers a rug-like object underneath its parent.", "ter_under(rug, parent=bed)", false,
                 [](const BoundArgs& a) -> Evaluator {
                   return [s = a.subject, p = *a.other](const SceneState& st) {
                     return sq_dist(st.placement(s).position(), st.placement(p).position());
                   };
                 }});

  fns.push_back({"ter_on_ceiling_near", FunctionKind::tertiary, "anchor", {},
                 "Hangs a ceiling object above the anchor object.",
                 "ter_on_ceiling_near(pendant_light, anchor=bed)", false,
                 [](const BoundArgs& a) -> Evaluator {
                   return [s = a.subject, p = *a.other](const SceneState& st) {
                     return sq_dist(st.placement(s).position(), st.placement(p).position());
                   };
                 }});
  return fns;
}

}  // namespace detail

/// A constraint call bound against the registry. Calls whose arguments do
/// not match the schema stay in the graph but evaluate to zero.
struct BoundTerm {
  ConstraintCall call;
  bool valid = false;
  std::string error;
  bool scene_dependent = false;
  std::vector<std::size_t> refs;
  Evaluator eval;

  double operator()(const SceneState& s) const { return valid ? call.weight * eval(s) : 0.0; }
};

class Registry {
 public:
  static const Registry& instance() {
    static const Registry registry;
    return registry;
  }

  const std::vector<FunctionSpec>& functions() const { return functions_; }

  const FunctionSpec* find(std::string_view id) const {
    for (const auto& f : functions_)
      if (f.id == id) return &f;
    return nullptr;
  }

  bool contains(std::string_view id) const { return find(id) != nullptr; }

  /// Function names, parameter schemas and docstrings, without implementations.
  json manifest(std::optional<FunctionKind> kind = std::nullopt) const {
    json arr = json::array();
    for (const auto& f : functions_) {
      if (kind && f.kind != *kind) continue;
      json params = json::array();
      for (const auto& p : f.params) {
        json pj = {{"name", p.name}, {"required", p.required}, {"doc", p.doc}};
        switch (p.type) {
          case ParamType::number: pj["type"] = "number"; break;
          case ParamType::choice: pj["type"] = "choice"; break;
          case ParamType::sides: pj["type"] = "list of sides"; break;
          case ParamType::object: pj["type"] = "object name"; break;
        }
        if (!p.required) pj["default"] = p.default_value;
        if (!p.choices.empty()) pj["choices"] = p.choices;
        params.push_back(std::move(pj));
      }
      json entry = {{"function_id", f.id}, {"kind", std::string(to_string(f.kind))},
                    {"params", std::move(params)}, {"docstring", f.doc}, {"example", f.example}};
      entry["object_argument"] = f.other_role.empty() ? json(nullptr) : json(f.other_role);
      arr.push_back(std::move(entry));
    }
    return json{{"schema", "roomopt.registry/" + std::to_string(kSchemaVersion)}, {"functions", std::move(arr)}};
  }

  /// Validates a call against its function's schema and builds the evaluator.
  BoundTerm bind(const ConstraintCall& call, std::size_t object_count) const {
    BoundTerm term;
    term.call = call;
    term.refs = call_references(call);
    const FunctionSpec* fn = find(call.function_id);
    if (!fn) {
      term.error = "unknown function '" + call.function_id + "'";
      return term;
    }
    term.scene_dependent = fn->scene_dependent;
    auto args = check(*fn, call, object_count, term.error);
    if (!args) return term;
    term.eval = fn->make(*args);
    term.valid = true;
    return term;
  }

 private:
  Registry() : functions_(detail::build_functions()) {}

  static std::optional<BoundArgs> check(const FunctionSpec& fn, const ConstraintCall& call,
                                        std::size_t object_count, std::string& error) {
    BoundArgs args;
    args.subject = call.subject;
    if (call.subject >= object_count) {
      error = "subject index out of range";
      return std::nullopt;
    }
    if (!fn.other_role.empty()) {
      if (!call.object2 || *call.object2 >= object_count || *call.object2 == call.subject) {
        error = "missing or invalid '" + fn.other_role + "' object";
        return std::nullopt;
      }
      args.other = call.object2;
    }
    const json& given = call.params.is_null() ? json::object() : call.params;
    if (!given.is_object()) {
      error = "params must be an object";
      return std::nullopt;
    }
    for (const auto& [key, _] : given.items()) {
      const bool known = std::any_of(fn.params.begin(), fn.params.end(),
                                     [&](const ParamSpec& p) { return p.name == key; });
      if (!known) {
        error = "unexpected parameter '" + key + "'";
        return std::nullopt;
      }
    }
    for (const auto& p : fn.params) {
      const auto it = given.find(p.name);
      if (it == given.end()) {
        if (p.required) {
          error = "missing parameter '" + p.name + "'";
          return std::nullopt;
        }
        args.params[p.name] = p.default_value;
        continue;
      }
      const json& v = *it;
      switch (p.type) {
        case ParamType::number:
          if (!v.is_number() || !std::isfinite(v.get<double>()) || v.get<double>() < 0.0) {
            error = "parameter '" + p.name + "' must be a non-negative number";
            return std::nullopt;
          }
          args.params[p.name] = v.get<double>();
          break;
        case ParamType::choice: {
          if (!v.is_string()) {
            error = "parameter '" + p.name + "' must be a string";
            return std::nullopt;
          }
          std::string s = v.get<std::string>();
          if (p.name == "side") s = sides::canonical(s).value_or(s);
          if (std::find(p.choices.begin(), p.choices.end(), s) == p.choices.end()) {
            error = "parameter '" + p.name + "' has unsupported value '" + v.get<std::string>() + "'";
            return std::nullopt;
          }
          args.params[p.name] = s;
          break;
        }
        case ParamType::sides: {
          if (!v.is_array() || v.empty()) {
            error = "parameter '" + p.name + "' must be a non-empty list of sides";
            return std::nullopt;
          }
          json list = json::array();
          for (const auto& e : v) {
            const auto c = e.is_string() ? sides::canonical(e.get<std::string>()) : std::nullopt;
            if (!c) {
              error = "parameter '" + p.name + "' has unsupported side " + e.dump();
              return std::nullopt;
            }
            if (std::find(list.begin(), list.end(), json(*c)) == list.end()) list.push_back(*c);
          }
          args.params[p.name] = std::move(list);
          break;
        }
        case ParamType::object:
          if (!v.is_number_integer() || v.get<std::int64_t>() < 0 || v.get<std::size_t>() >= object_count ||
              v.get<std::size_t>() == call.subject) {
            error = "parameter '" + p.name + "' must reference another object";
            return std::nullopt;
          }
          args.params[p.name] = v.get<std::size_t>();
          break;
      }
    }
    return args;
  }

  std::vector<FunctionSpec> functions_;
};

inline std::vector<BoundTerm> bind_calls(const LayoutGraph& g) {
  std::vector<BoundTerm> out;
  out.reserve(g.calls.size());
  for (const auto& c : g.calls) out.push_back(Registry::instance().bind(c, g.objects.size()));
  return out;
}

}  // namespace roomopt
