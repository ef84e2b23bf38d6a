#pragma once

// Command implementations behind the roomopt CLI: generate, optimize,
// metrics, render and replay. Every artifact carries a schema tag.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "roomopt/llm/language.hpp"
#include "roomopt/llm/provider.hpp"
#include "roomopt/metrics.hpp"
#include "roomopt/render.hpp"
#include "roomopt/scene.hpp"
#include "roomopt/solver/stages.hpp"

namespace roomopt::app {

namespace fs = std::filesystem;

inline const std::string kReportSchema = "roomopt.report/" + std::to_string(kSchemaVersion);

enum ExitCode : int { kOk = 0, kStageFailure = 1, kConfigError = 2 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string prompt;
  std::uint64_t seed = 7;
  std::string fixtures;      // transcript to replay; empty means a live provider
  std::string out_dir = "out";
  int restarts = 8;
  unsigned threads = 0;
  SolverWeights weights;
  Ablation ablation;
  RenderOptions render;
  std::string model;         // live provider model override
  std::string api_base;      // live provider base URL override
};

/// Applies one ablation name: no_hierarchy, no_cleaning, or a droppable
/// cost given as "bound" or "no_bound".
inline void apply_ablation(Ablation& a, std::string name) {
  if (name == "no_hierarchy") {
    a.no_hierarchy = true;
    return;
  }
  if (name == "no_cleaning") {
    a.no_cleaning = true;
    return;
  }
  if (name.rfind("no_", 0) == 0) name = name.substr(3);
  if (name.rfind("drop_", 0) == 0) name = name.substr(5);
  if (std::find(kDroppableCosts.begin(), kDroppableCosts.end(), name) == kDroppableCosts.end())
    throw ConfigError("unknown ablation '" + name + "'");
  a.drop.insert(name);
}

inline json ablation_json(const Ablation& a) {
  return {{"no_hierarchy", a.no_hierarchy}, {"no_cleaning", a.no_cleaning}, {"drop_cost", a.drop}};
}

inline void check_solver_config(const RunConfig& c) {
  if (c.restarts < 1) throw ConfigError("restarts must be at least 1");
  if (!c.weights.valid()) throw ConfigError("all solver weights must be positive");
  if (!(c.render.scale > 0.0)) throw ConfigError("render scale must be positive");
}

inline void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

struct RunResult {
  int exit_code = kOk;
  LayoutGraph graph;
  PlacementSet placements;
  std::optional<MetricsReport> metrics;
  json report;
  std::string svg;
  std::string error;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline SolveConfig solve_config(const RunConfig& c) {
  SolveConfig s;
  s.weights = c.weights;
  s.restarts = c.restarts;
  s.seed = c.seed;
  s.ablation = c.ablation;
  s.threads = c.threads;
  return s;
}

inline json tier_counts(const LayoutGraph& g) {
  json j = {{"primary", 0}, {"secondary", 0}, {"tertiary", 0}};
  for (const auto& o : g.objects) j[json(o.tier).get<std::string>()] = j[json(o.tier).get<std::string>()].get<int>() + 1;
  return j;
}

inline json base_report(const std::string& command, const RunConfig& c) {
  return {{"schema", kReportSchema},
          {"command", command},
          {"prompt", c.prompt},
          {"seed", c.seed},
          {"restarts", c.restarts},
          {"weights", c.weights},
          {"ablation", ablation_json(c.ablation)}};
}

inline void finish_report(json& report, const std::vector<Diagnostic>& diags) {
  report["diagnostics"] = diags;
  report["diagnostic_counts"] = count_by_category(diags);
}

inline void attach_solve(json& report, const PipelineResult& res) {
  report["single_stage"] = res.single_stage;
  json stages = json::array();
  for (const auto& s : res.stages) {
    json j = s.report;
    j["seconds"] = s.seconds;
    stages.push_back(std::move(j));
  }
  report["stages"] = std::move(stages);
}

}  // namespace detail

/// Optimizes a graph in memory. The returned graph carries the final zone centroids.
inline std::pair<LayoutGraph, PipelineResult> optimize_graph(const LayoutGraph& graph, const RunConfig& c) {
  PipelineResult res = run_pipeline(graph, detail::solve_config(c));
  LayoutGraph out = graph;
  out.zones = res.zones;
  return {std::move(out), std::move(res)};
}

/// Language phase, optimization, metrics and rendering, with every artifact
/// written to `c.out_dir`. A failing language stage returns exit code 1 and
/// leaves the transcript and report of the partial run behind.
inline RunResult generate(const RunConfig& c, llm::ChatProvider& provider, const std::string& command = "generate") {
  check_solver_config(c);
  if (c.prompt.empty()) throw ConfigError("a prompt is required");
  const auto t_start = std::chrono::steady_clock::now();
  const fs::path out_dir(c.out_dir);
  fs::create_directories(out_dir);

  RunResult r;
  r.report = detail::base_report(command, c);
  json timings;
  llm::TranscriptStore transcript;
  llm::RecordingProvider recorder(provider, transcript);
  llm::LanguageConfig lcfg;
  lcfg.no_cleaning = c.ablation.no_cleaning;
  llm::LanguagePhase language(recorder, lcfg);

  llm::LanguageResult lang;
  auto t0 = std::chrono::steady_clock::now();
  try {
    lang = language.run({c.prompt, c.seed, std::nullopt});
  } catch (const std::exception& e) {
    timings["language_s"] = detail::seconds_since(t0);
    timings["total_s"] = detail::seconds_since(t_start);
    auto diags = language.diagnostics();
    diags.push_back({Category::language, "language", e.what()});
    r.exit_code = kStageFailure;
    r.error = e.what();
    r.report["timings"] = timings;
    r.report["failed"] = true;
    detail::finish_report(r.report, diags);
    write_text(out_dir / "transcript.jsonl", transcript.dump());
    write_text(out_dir / "report.json", dump(r.report));
    return r;
  }
  timings["language_s"] = detail::seconds_since(t0);
  write_text(out_dir / "transcript.jsonl", transcript.dump());
  write_text(out_dir / "graph.json", dump(json(lang.graph)));

  t0 = std::chrono::steady_clock::now();
  auto [graph, solved] = optimize_graph(lang.graph, c);
  timings["optimization_s"] = detail::seconds_since(t0);
  r.graph = graph;
  r.placements = solved.placements;
  write_text(out_dir / "layout.json", dump(layout_to_json(graph, solved.placements)));

  t0 = std::chrono::steady_clock::now();
  r.metrics = evaluate(graph, solved.placements);
  timings["metrics_s"] = detail::seconds_since(t0);
  write_text(out_dir / "metrics.json", dump(json(*r.metrics)));

  t0 = std::chrono::steady_clock::now();
  r.svg = render_svg(graph, solved.placements, r.metrics, c.render);
  timings["render_s"] = detail::seconds_since(t0);
  write_text(out_dir / "floorplan.svg", r.svg);
  timings["total_s"] = detail::seconds_since(t_start);

  auto diags = lang.diagnostics;
  diags.insert(diags.end(), solved.diagnostics.begin(), solved.diagnostics.end());
  r.report["objects"] = detail::tier_counts(graph);
  r.report["calls"] = graph.calls.size();
  r.report["sentences"] = lang.sentences;
  json attempts = json::array();
  for (const auto& s : lang.responses) attempts.push_back({{"stage", s.stage}, {"key", s.key}, {"attempts", s.attempts}});
  r.report["language"] = attempts;
  detail::attach_solve(r.report, solved);
  r.report["metrics"] = json(*r.metrics);
  r.report["timings"] = timings;
  detail::finish_report(r.report, diags);
  write_text(out_dir / "report.json", dump(r.report));
  return r;
}

/// Re-solves a saved graph.json (or layout.json) without querying the language model.
inline RunResult optimize(const fs::path& graph_path, const RunConfig& c) {
  check_solver_config(c);
  const json j = read_json(graph_path);
  LayoutGraph graph = j.get<LayoutGraph>();
  const auto t0 = std::chrono::steady_clock::now();
  auto diags = validate_graph(graph);
  auto [solved_graph, solved] = optimize_graph(graph, c);
  RunResult r;
  r.graph = solved_graph;
  r.placements = solved.placements;
  r.report = detail::base_report("optimize", c);
  r.report["graph"] = graph_path.string();
  r.report["objects"] = detail::tier_counts(graph);
  r.report["calls"] = graph.calls.size();
  detail::attach_solve(r.report, solved);
  r.report["timings"] = {{"optimization_s", detail::seconds_since(t0)}};
  diags.insert(diags.end(), solved.diagnostics.begin(), solved.diagnostics.end());
  detail::finish_report(r.report, diags);
  const fs::path out_dir(c.out_dir);
  write_text(out_dir / "layout.json", dump(layout_to_json(solved_graph, solved.placements)));
  write_text(out_dir / "report.json", dump(r.report));
  return r;
}

inline MetricsReport metrics(const fs::path& layout_path, const fs::path& out_dir) {
  const auto [graph, placements] = layout_from_json(read_json(layout_path));
  MetricsReport m = evaluate(graph, placements);
  write_text(out_dir / "metrics.json", dump(json(m)));
  return m;
}

inline std::string render(const fs::path& layout_path, const RunConfig& c) {
  const auto [graph, placements] = layout_from_json(read_json(layout_path));
  const std::string svg = render_svg(graph, placements, evaluate(graph, placements), c.render);
  write_text(fs::path(c.out_dir) / "floorplan.svg", svg);
  return svg;
}

}  // namespace roomopt::app
