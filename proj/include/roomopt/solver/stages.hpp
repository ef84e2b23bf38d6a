#pragma once

// Staged multi-start layout optimization: primaries first, then secondaries
// zone by zone with re-zoning after each zone, then all tertiaries at once.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "roomopt/costlib.hpp"
#include "roomopt/diagnostics.hpp"
#include "roomopt/registry.hpp"
#include "roomopt/rng.hpp"
#include "roomopt/scene.hpp"
#include "roomopt/solver/sqp.hpp"

namespace roomopt {

inline constexpr std::array<std::string_view, 5> kDroppableCosts{"bound", "over", "align", "bal", "wall"};

struct Ablation {
  bool no_hierarchy = false;
  bool no_cleaning = false;
  std::set<std::string> drop;  // subset of kDroppableCosts

  bool drops(std::string_view cost) const { return drop.count(std::string(cost)) > 0; }
};

struct SolveConfig {
  SolverWeights weights;
  int restarts = 8;
  std::uint64_t seed = 7;
  Ablation ablation;
  sqp::Options local;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct RestartRecord {
  std::uint64_t seed = 0;
  std::vector<Placement> init;
  double final_cost = 0.0;
  int iterations = 0;
  bool converged = false;
  bool failed_at_start = false;
};

struct SolveReport {
  std::string stage;
  std::vector<std::size_t> free;
  double best_cost = 0.0;
  std::vector<Placement> best_placements;  // aligned with `free`
  std::size_t best_restart = 0;
  std::vector<RestartRecord> restarts;

  bool all_failed() const {
    return !restarts.empty() &&
           std::all_of(restarts.begin(), restarts.end(), [](const RestartRecord& r) { return r.failed_at_start; });
  }
};

inline void to_json(json& j, const RestartRecord& r) {
  j = {{"seed", r.seed},           {"init", r.init},           {"final_cost", r.final_cost},
       {"iterations", r.iterations}, {"converged", r.converged}, {"failed_at_start", r.failed_at_start}};
}

inline void to_json(json& j, const SolveReport& r) {
  j = {{"stage", r.stage},
       {"free", r.free},
       {"best_cost", r.best_cost},
       {"best_placements", r.best_placements},
       {"best_restart", r.best_restart},
       {"restarts", r.restarts}};
}

/// One optimization step over a subset of objects.
struct StageProblem {
  std::string name;                 // also the RNG substream key
  std::vector<std::size_t> free;    // object indices being optimized
  SceneState base;                  // fixed objects already placed
  std::function<double(const SceneState&)> objective;
  std::vector<double> lower;        // per variable
  std::vector<double> upper;
  bool lock_theta = false;          // optimize (x, y) only; theta stays at its initial value
  std::function<std::vector<Placement>(Rng&, std::size_t restart)> initializer;

  std::size_t vars_per_object() const { return lock_theta ? 2 : 3; }
};

/// Variable boxes x in [0, w], y in [0, l], theta in [-pi, pi] for every free object.
inline void set_room_bounds(StageProblem& p, const Room& room) {
  p.lower.clear();
  p.upper.clear();
  for (std::size_t k = 0; k < p.free.size(); ++k) {
    p.lower.insert(p.lower.end(), {0.0, 0.0});
    p.upper.insert(p.upper.end(), {room.width, room.length});
    if (!p.lock_theta) {
      p.lower.push_back(-std::numbers::pi);
      p.upper.push_back(std::numbers::pi);
    }
  }
}

inline double cardinal_angle(std::uint64_t k) {
  static constexpr std::array<double, 4> kAngles{0.0, 0.5 * std::numbers::pi, std::numbers::pi,
                                                 -0.5 * std::numbers::pi};
  return kAngles[k % 4];
}

namespace detail {

inline void apply(SceneState& s, const StageProblem& p, std::span<const double> x,
                  const std::vector<Placement>& init) {
  const std::size_t k = p.vars_per_object();
  for (std::size_t i = 0; i < p.free.size(); ++i) {
    Placement pl{x[k * i], x[k * i + 1], p.lock_theta ? init[i].theta : x[k * i + 2]};
    s.place(p.free[i], pl);
  }
}

inline void run_parallel(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& job) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) job(i);
    });
  }
}

}  // namespace detail

/// Multi-start local minimization. Restarts are independent and merged by
/// (cost, restart index), so serial and parallel runs agree bit-for-bit.
inline SolveReport minimize(const StageProblem& problem, int restarts, std::uint64_t master_seed,
                            const sqp::Options& local = {}, unsigned threads = 0) {
  if (restarts < 1) throw std::invalid_argument("minimize: restarts must be >= 1");
  SolveReport report;
  report.stage = problem.name;
  report.free = problem.free;
  report.restarts.resize(static_cast<std::size_t>(restarts));
  std::vector<std::vector<double>> finals(static_cast<std::size_t>(restarts));
  const std::size_t k = problem.vars_per_object();

  detail::run_parallel(static_cast<std::size_t>(restarts), threads, [&](std::size_t r) {
    RestartRecord& rec = report.restarts[r];
    rec.seed = substream_seed(master_seed, "init." + problem.name, r);
    Rng rng(rec.seed);
    rec.init = problem.initializer(rng, r);
    std::vector<double> x0;
    for (const auto& p : rec.init) {
      x0.push_back(p.x);
      x0.push_back(p.y);
      if (!problem.lock_theta) x0.push_back(p.theta);
    }
    SceneState state = problem.base;
    const sqp::Objective f = [&](std::span<const double> x) {
      detail::apply(state, problem, x, rec.init);
      return problem.objective(state);
    };
    const auto res = sqp::minimize(f, std::move(x0), problem.lower, problem.upper, local);
    rec.final_cost = res.value;
    rec.iterations = res.iterations;
    rec.converged = res.converged;
    rec.failed_at_start = res.failed_at_start;
    finals[r] = res.x;
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < report.restarts.size(); ++r)
    if (report.restarts[r].final_cost < report.restarts[best].final_cost) best = r;
  report.best_restart = best;
  report.best_cost = report.restarts[best].final_cost;
  const auto& x = finals[best];
  for (std::size_t i = 0; i < problem.free.size(); ++i) {
    const double theta = problem.lock_theta ? report.restarts[best].init[i].theta : x[k * i + 2];
    report.best_placements.push_back({x[k * i], x[k * i + 1], wrap_angle(theta)});
  }
  return report;
}

struct StageOutcome {
  SolveReport report;
  double seconds = 0.0;
};

struct PipelineResult {
  PlacementSet placements;
  std::vector<Zone> zones;
  std::vector<StageOutcome> stages;
  std::vector<Diagnostic> diagnostics;
  bool single_stage = false;
};

/// Shared state while the stages of one layout run.
class LayoutPipeline {
 public:
  LayoutPipeline(const LayoutGraph& graph, SolveConfig config)
      : graph_(graph),
        config_(std::move(config)),
        features_(graph.room),
        terms_(bind_calls(graph)),
        placements_(graph.objects.size()),
        zones_(graph.zones) {
    for (const auto& t : terms_) {
      if (!t.valid)
        diagnostics_.push_back({Category::translation, "bind",
                                t.call.function_id + " on '" + object_name(t.call.subject) +
                                    "' evaluates to zero: " + t.error});
    }
  }

  const std::vector<BoundTerm>& terms() const { return terms_; }
  const PlacementSet& placements() const { return placements_; }
  const std::vector<Zone>& zones() const { return zones_; }
  const std::vector<StageOutcome>& stages() const { return stages_; }
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

  /// Places all primaries, then seeds one zone per primary at its position.
  void place_primary() {
    const auto free = graph_.tier_indices(Tier::primary);
    if (!free.empty()) {
      auto problem = make_problem("primary", free);
      problem.objective = floor_objective(free, /*balance=*/true, /*zoning=*/false);
      problem.initializer = uniform_initializer(free.size(), std::nullopt);
      run(std::move(problem));
    }
    for (std::size_t i : free) {
      const auto& o = graph_.objects[i];
      if (!o.zone) continue;
      for (auto& z : zones_)
        if (z.id == *o.zone) z.centroid = placements_[i]->position();
    }
  }

  /// Places the secondaries of one zone and re-centers every zone afterwards.
  void place_secondary(int zone_id) {
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < graph_.objects.size(); ++i) {
      const auto& o = graph_.objects[i];
      if (o.tier == Tier::secondary && o.zone && *o.zone == zone_id) free.push_back(i);
    }
    if (!free.empty()) {
      auto problem = make_problem("zone." + std::to_string(zone_id), free);
      problem.objective = floor_objective(free, /*balance=*/false, /*zoning=*/true);
      problem.initializer = uniform_initializer(free.size(), zone_index(zone_id));
      run(std::move(problem));
    }
    LayoutGraph view = graph_;
    view.zones = zones_;
    zones_ = zone_centroid_update(view, placements_);
  }

  /// Places every tertiary object in one solve.
  void place_tertiary() {
    const auto free = graph_.tier_indices(Tier::tertiary);
    if (free.empty()) return;
    auto problem = make_problem("tertiary", free);
    problem.objective = tertiary_objective(free);
    problem.initializer = uniform_initializer(free.size(), std::nullopt);
    run(std::move(problem));
  }

  /// Every object in one solve, without staging or zoning.
  void place_all_at_once() {
    std::vector<std::size_t> free(graph_.objects.size());
    for (std::size_t i = 0; i < free.size(); ++i) free[i] = i;
    if (!free.empty()) {
      std::vector<std::size_t> floor_objs;
      std::vector<std::size_t> ters;
      for (std::size_t i : free) (graph_.objects[i].floor_standing() ? floor_objs : ters).push_back(i);
      auto problem = make_problem("joint", free);
      auto floor_part = floor_objective(floor_objs, /*balance=*/true, /*zoning=*/false, /*with_terms=*/false);
      auto ter_part = tertiary_objective(ters, /*with_terms=*/false);
      auto terms = select_terms(problem);
      problem.objective = [floor_part, ter_part, terms](const SceneState& s) {
        double acc = floor_part(s) + ter_part(s);
        for (const auto* t : terms) acc += (*t)(s);
        return acc;
      };
      problem.initializer = uniform_initializer(free.size(), std::nullopt);
      run(std::move(problem));
    }
    LayoutGraph view = graph_;
    view.zones = zones_;
    zones_ = zone_centroid_update(view, placements_);
  }

  PipelineResult finish(bool single_stage) && {
    return {std::move(placements_), std::move(zones_), std::move(stages_), std::move(diagnostics_), single_stage};
  }

 private:
  std::string object_name(std::size_t i) const {
    return i < graph_.objects.size() ? graph_.objects[i].name : "#" + std::to_string(i);
  }

  std::optional<std::size_t> zone_index(int zone_id) const {
    for (std::size_t z = 0; z < zones_.size(); ++z)
      if (zones_[z].id == zone_id) return z;
    return std::nullopt;
  }

  std::vector<Point2> centroids() const {
    std::vector<Point2> c;
    for (const auto& z : zones_) c.push_back(z.centroid);
    return c;
  }

  SceneState current_state() const {
    SceneState s(graph_.room, features_, graph_.objects);
    for (std::size_t i = 0; i < placements_.size(); ++i)
      if (placements_[i]) s.place(i, *placements_[i]);
    return s;
  }

  StageProblem make_problem(std::string name, std::vector<std::size_t> free) const {
    StageProblem p{std::move(name), std::move(free), current_state(), {}, {}, {}, false, {}};
    // Free objects count as present from the first evaluation on.
    for (std::size_t i : p.free) p.base.place(i, Placement{});
    set_room_bounds(p, graph_.room);
    return p;
  }

  /// Terms whose objects are all present and that touch a free object, plus
  /// scene-dependent terms (accessibility) carried forward from earlier stages.
  std::vector<const BoundTerm*> select_terms(const StageProblem& p) const {
    std::vector<char> is_free(graph_.objects.size(), 0);
    bool free_floor = false;
    for (std::size_t i : p.free) {
      is_free[i] = 1;
      free_floor = free_floor || graph_.objects[i].floor_standing();
    }
    std::vector<const BoundTerm*> out;
    for (const auto& t : terms_) {
      if (!t.valid) continue;
      bool all_present = true;
      bool touches_free = false;
      for (std::size_t r : t.refs) {
        all_present = all_present && p.base.present(r);
        touches_free = touches_free || is_free[r];
      }
      if (all_present && (touches_free || (t.scene_dependent && free_floor))) out.push_back(&t);
    }
    return out;
  }

  std::function<double(const SceneState&)> floor_objective(const std::vector<std::size_t>& free, bool balance,
                                                           bool zoning, bool with_terms = true) const {
    const SolverWeights w = config_.weights;
    const Ablation ab = config_.ablation;
    std::vector<std::size_t> active;
    std::vector<char> is_free(graph_.objects.size(), 0);
    for (std::size_t i : free) is_free[i] = 1;
    for (std::size_t i = 0; i < graph_.objects.size(); ++i) {
      if (!graph_.objects[i].floor_standing()) continue;
      if (is_free[i] || placements_[i]) active.push_back(i);
    }
    std::vector<const BoundTerm*> terms;
    if (with_terms) {
      StageProblem probe = make_problem("probe", free);
      terms = select_terms(probe);
    }
    std::vector<std::pair<std::size_t, std::size_t>> zone_of;  // (object, zone index)
    if (zoning) {
      for (std::size_t i : free) {
        const auto& o = graph_.objects[i];
        if (o.zone)
          if (auto zi = zone_index(*o.zone)) zone_of.emplace_back(i, *zi);
      }
    }
    const auto cents = centroids();
    return [w, ab, free, active, is_free, terms, balance, zone_of, cents](const SceneState& s) {
      double acc = 0.0;
      if (!ab.drops("over")) acc += w.lambda3 * no_overlap(s, active, w.lambda1, is_free);
      if (balance && !ab.drops("bal")) acc += w.lambda4 * balanced(s, free);
      const RoomExtent ext = s.room().extent();
      for (std::size_t i : free) {
        const Placement& p = s.placement(i);
        if (!ab.drops("bound")) acc += w.lambda5 * in_bounds(s.box(i), ext);
        if (!ab.drops("align")) acc += aligned(p.theta);
        if (!ab.drops("wall")) acc += wall_attraction(p.position(), ext, w.wall_threshold, w.lambda2);
      }
      for (const auto& [i, zi] : zone_of) acc += w.lambda6 * zone_keep(s.placement(i).position(), cents, zi);
      for (const auto* t : terms) acc += (*t)(s);
      return acc;
    };
  }

  std::function<double(const SceneState&)> tertiary_objective(const std::vector<std::size_t>& free,
                                                               bool with_terms = true) const {
    const SolverWeights w = config_.weights;
    const Ablation ab = config_.ablation;
    std::vector<const BoundTerm*> terms;
    if (with_terms) {
      StageProblem probe = make_problem("probe", free);
      terms = select_terms(probe);
    }
    std::vector<char> wall_mounted;
    std::vector<Attach> attach;
    for (std::size_t i : free) {
      attach.push_back(graph_.objects[i].attach);
      wall_mounted.push_back(graph_.objects[i].attach == Attach::wall);
    }
    return [w, ab, free, terms, wall_mounted, attach](const SceneState& s) {
      double acc = 0.0;
      const RoomExtent ext = s.room().extent();
      for (std::size_t a = 0; a < free.size(); ++a) {
        const std::size_t i = free[a];
        if (!ab.drops("bound")) acc += w.lambda7 * in_bounds(s.box(i), ext);
        if (!ab.drops("align")) acc += aligned(s.placement(i).theta);
        if (wall_mounted[a]) acc += on_wall(s.box(i), s.room(), s.features(), w.lambda8);
        if (ab.drops("over")) continue;
        for (std::size_t b = a + 1; b < free.size(); ++b)
          if (attach[a] == attach[b]) acc += pair_overlap(s.footprint(i), s.footprint(free[b]));
      }
      for (const auto* t : terms) acc += (*t)(s);
      return acc;
    };
  }

  /// Positions uniform in the room (or in one zone's Voronoi cell), theta
  /// drawn from the four cardinal angles.
  std::function<std::vector<Placement>(Rng&, std::size_t)> uniform_initializer(
      std::size_t count, std::optional<std::size_t> zone) const {
    const Room room = graph_.room;
    const auto cents = centroids();
    return [room, cents, count, zone](Rng& rng, std::size_t) {
      std::vector<Placement> out;
      for (std::size_t k = 0; k < count; ++k) {
        Placement p{rng.uniform(0.0, room.width), rng.uniform(0.0, room.length), 0.0};
        if (zone && cents.size() > 1) {
          for (int tries = 0; tries < 1000 && voronoi_assign(p.position(), cents) != *zone; ++tries) {
            p.x = rng.uniform(0.0, room.width);
            p.y = rng.uniform(0.0, room.length);
          }
        }
        p.theta = cardinal_angle(rng.below(4));
        out.push_back(p);
      }
      return out;
    };
  }

  void run(StageProblem problem) {
    const auto t0 = std::chrono::steady_clock::now();
    SolveReport report = minimize(problem, config_.restarts, config_.seed, config_.local, config_.threads);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (std::size_t k = 0; k < problem.free.size(); ++k) placements_[problem.free[k]] = report.best_placements[k];
    if (report.all_failed())
      diagnostics_.push_back({Category::optimization, problem.name,
                              "every restart failed its first line search; keeping the best initialization"});
    const SceneState s = current_state();
    for (const auto* t : select_terms(problem)) {
      const double residual = (*t)(s);
      if (residual > kResidualThreshold)
        diagnostics_.push_back({Category::contradiction, problem.name,
                                t->call.function_id + " on '" + object_name(t->call.subject) +
                                    "' left unsatisfied (residual " + std::to_string(residual) + ")"});
    }
    stages_.push_back({std::move(report), secs});
  }

  static constexpr double kResidualThreshold = 1e-2;

  const LayoutGraph& graph_;
  SolveConfig config_;
  RoomFeatures features_;
  std::vector<BoundTerm> terms_;
  PlacementSet placements_;
  std::vector<Zone> zones_;
  std::vector<StageOutcome> stages_;
  std::vector<Diagnostic> diagnostics_;
};

/// Full optimization phase. Zones are processed by rank, most significant first.
inline PipelineResult run_pipeline(const LayoutGraph& graph, const SolveConfig& config) {
  LayoutPipeline pipe(graph, config);
  if (config.ablation.no_hierarchy) {
    pipe.place_all_at_once();
    return std::move(pipe).finish(true);
  }
  pipe.place_primary();
  std::vector<Zone> order = graph.zones;
  std::stable_sort(order.begin(), order.end(), [](const Zone& a, const Zone& b) { return a.rank < b.rank; });
  for (const auto& z : order) pipe.place_secondary(z.id);
  pipe.place_tertiary();
  return std::move(pipe).finish(false);
}

}  // namespace roomopt
