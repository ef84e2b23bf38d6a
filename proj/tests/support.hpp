#pragma once

// Scene builders shared by the unit tests and the acceptance runner.

#include <memory>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "roomopt/costlib.hpp"
#include "roomopt/registry.hpp"
#include "roomopt/scene.hpp"
#include "roomopt/solver/stages.hpp"

namespace support {

using namespace roomopt;

inline Room plain_room(double w, double l) {
  Room r;
  r.width = w;
  r.length = l;
  return r;
}

/// The 4 x 5 m bedroom shell used throughout: one door, one window, two sockets.
inline Room bedroom_shell() {
  Room r = plain_room(4.0, 5.0);
  r.doors.push_back({Wall::south, 3.35, 0.9, OpeningKind::door, ""});
  r.windows.push_back({Wall::north, 2.0, 1.2, OpeningKind::window, ""});
  r.sockets.push_back({Wall::south, 1.0});
  r.sockets.push_back({Wall::east, 2.5});
  return r;
}

inline ObjectSpec object(std::string name, double w, double l, Tier tier = Tier::primary,
                         Attach attach = Attach::floor) {
  ObjectSpec o;
  o.name = std::move(name);
  o.width = w;
  o.length = l;
  o.tier = tier;
  o.attach = attach;
  return o;
}

/// Owns everything a SceneState points to, so it can be passed around safely.
struct Scene {
  Room room;
  std::vector<ObjectSpec> objects;
  std::unique_ptr<RoomFeatures> features;
  std::unique_ptr<SceneState> state;

  Scene(Room r, std::vector<ObjectSpec> objs) : room(std::move(r)), objects(std::move(objs)) {
    features = std::make_unique<RoomFeatures>(room);
    state = std::make_unique<SceneState>(room, *features, objects);
  }
  Scene(const Scene&) = delete;
  Scene& operator=(const Scene&) = delete;

  Scene& place(std::size_t i, double x, double y, double theta = 0.0) {
    state->place(i, {x, y, theta});
    return *this;
  }
  SceneState& s() { return *state; }
};

inline oracle::Box to_oracle(const ObjectSpec& o, const Placement& p) { return {p.x, p.y, o.width, o.length, p.theta}; }

inline std::vector<oracle::P> to_oracle(const ConvexPolygon& poly) {
  std::vector<oracle::P> out;
  for (const auto& v : poly.vertices()) out.push_back({v.x, v.y});
  return out;
}

/// A stage over `free` objects of `sc` with uniform starts in the room and
/// cardinal starting angles. With lock_theta, `thetas` pins each free
/// object's angle instead.
inline StageProblem uniform_problem(Scene& sc, std::vector<std::size_t> free,
                                    std::function<double(const SceneState&)> objective, bool lock_theta = false,
                                    std::vector<double> thetas = {}) {
  StageProblem p{"test", std::move(free), sc.s(), std::move(objective), {}, {}, lock_theta, {}};
  set_room_bounds(p, sc.room);
  const std::size_t n = p.free.size();
  const double w = sc.room.width;
  const double l = sc.room.length;
  p.initializer = [n, w, l, lock_theta, thetas](Rng& rng, std::size_t) {
    std::vector<Placement> out;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = rng.uniform(0.0, w);
      const double y = rng.uniform(0.0, l);
      const double t = lock_theta && i < thetas.size() ? thetas[i] : cardinal_angle(rng.below(4));
      out.push_back({x, y, t});
    }
    return out;
  };
  return p;
}

/// A call to `fn` that passes schema checks: defaults for numbers, the first
/// choice for enums, and objects other than the subject in index order.
inline ConstraintCall sample_call(const FunctionSpec& fn, std::size_t subject, std::size_t object_count) {
  ConstraintCall c;
  c.function_id = fn.id;
  c.subject = subject;
  std::size_t next = 0;
  const auto another = [&] {
    while (next == subject) ++next;
    return next++ % object_count;
  };
  if (!fn.other_role.empty()) c.object2 = another();
  for (const auto& p : fn.params) {
    switch (p.type) {
      case ParamType::number:
        c.params[p.name] = p.default_value;
        break;
      case ParamType::choice:
        c.params[p.name] = p.choices.front();
        break;
      case ParamType::sides:
        c.params[p.name] = json::array({"front", "left"});
        break;
      case ParamType::object:
        c.params[p.name] = another();
        break;
    }
  }
  return c;
}

}  // namespace support
