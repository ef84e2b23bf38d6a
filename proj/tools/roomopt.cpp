// roomopt: brief -> constrained layout -> metrics and floorplan.

#include <cstdlib>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "roomopt/app.hpp"
#include "roomopt/llm/http_provider.hpp"

using namespace roomopt;
namespace fs = std::filesystem;

namespace {

std::unique_ptr<llm::ChatProvider> make_provider(const app::RunConfig& c) {
  if (!c.fixtures.empty()) return std::make_unique<llm::FixtureProvider>(llm::TranscriptStore::load(c.fixtures));
  auto http = llm::HttpSettings::from_env();
  if (!c.model.empty()) http.model = c.model;
  if (!c.api_base.empty()) http.base_url = c.api_base;
  if (http.api_key.empty())
    throw app::ConfigError(std::string("no fixtures given and ") + llm::kApiKeyEnv + " is not set");
  return std::make_unique<llm::HttpChatProvider>(http);
}

std::set<std::string> parse_layers(const std::string& text) {
  std::set<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.insert(item);
  return out;
}

int report_run(const app::RunResult& r, const app::RunConfig& c) {
  if (r.exit_code != app::kOk) {
    std::cerr << "error: " << r.error << "\npartial artifacts in " << c.out_dir << "\n";
    return r.exit_code;
  }
  if (r.metrics) std::cout << metrics_table(*r.metrics);
  std::cout << "artifacts written to " << c.out_dir << "\n";
  return app::kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Constraint-based room layout engine"};
  cli.require_subcommand(1);
  cli.fallthrough();
  cli.set_config("--config", "", "key = value config file; command-line flags take precedence");

  app::RunConfig cfg;
  std::vector<std::string> ablations;
  std::string layers;
  cli.add_option("--prompt", cfg.prompt, "Design brief");
  cli.add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
  cli.add_option("--fixtures", cfg.fixtures, "Replay transcript (JSON lines) instead of a live provider");
  cli.add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();
  cli.add_option("--restarts", cfg.restarts, "Restarts per optimization stage")->capture_default_str();
  cli.add_option("--threads", cfg.threads, "Worker threads for restarts (0: all cores)")->capture_default_str();
  cli.add_option("--ablate", ablations,
                 "no_hierarchy | no_cleaning | bound | over | align | bal | wall (repeatable)")
      ->allow_extra_args(false);
  cli.add_option("--layers", layers, "Comma-separated SVG layers: zones,primary,secondary,tertiary,pathway,labels");
  cli.add_option("--scale", cfg.render.scale, "SVG pixels per meter")->capture_default_str();
  cli.add_option("--palette", cfg.render.palette, "SVG palette: default | mono")->capture_default_str();
  cli.add_option("--model", cfg.model, "Model name for the live provider");
  cli.add_option("--api-base", cfg.api_base, "Base URL of an OpenAI-compatible endpoint");
  auto& w = cfg.weights;
  cli.add_option("--lambda1", w.lambda1, "Door weight inside the overlap cost")->capture_default_str();
  cli.add_option("--lambda2", w.lambda2, "Wall-attraction divisor")->capture_default_str();
  cli.add_option("--lambda3", w.lambda3, "Overlap weight")->capture_default_str();
  cli.add_option("--lambda4", w.lambda4, "Balance weight")->capture_default_str();
  cli.add_option("--lambda5", w.lambda5, "Bounds weight (primary and secondary)")->capture_default_str();
  cli.add_option("--lambda6", w.lambda6, "Zone weight")->capture_default_str();
  cli.add_option("--lambda7", w.lambda7, "Bounds weight (tertiary)")->capture_default_str();
  cli.add_option("--lambda8", w.lambda8, "Door/window avoidance weight for wall objects")->capture_default_str();
  cli.add_option("--wall-threshold", w.wall_threshold, "Wall-attraction threshold T in meters")->capture_default_str();

  auto* gen = cli.add_subcommand("generate", "Run the full pipeline from a brief");
  auto* opt = cli.add_subcommand("optimize", "Re-solve a saved graph.json");
  auto* met = cli.add_subcommand("metrics", "Score a layout.json");
  auto* ren = cli.add_subcommand("render", "Draw a layout.json as SVG");
  auto* rep = cli.add_subcommand("replay", "Reproduce a run from its transcript.jsonl");
  std::string graph_path;
  std::string layout_path;
  std::string transcript_path;
  opt->add_option("graph", graph_path, "graph.json")->required()->check(CLI::ExistingFile);
  met->add_option("layout", layout_path, "layout.json")->required()->check(CLI::ExistingFile);
  ren->add_option("layout", layout_path, "layout.json")->required()->check(CLI::ExistingFile);
  rep->add_option("transcript", transcript_path, "transcript.jsonl")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(cli, argc, argv);

  try {
    for (const auto& a : ablations) app::apply_ablation(cfg.ablation, a);
    if (!layers.empty()) cfg.render.layers = parse_layers(layers);
    app::check_solver_config(cfg);

    if (gen->parsed()) {
      if (cfg.prompt.empty()) throw app::ConfigError("--prompt is required");
      auto provider = make_provider(cfg);
      return report_run(app::generate(cfg, *provider), cfg);
    }
    if (rep->parsed()) {
      cfg.fixtures = transcript_path;
      if (cfg.prompt.empty()) {
        const fs::path report = fs::path(transcript_path).parent_path() / "report.json";
        if (fs::exists(report)) cfg.prompt = app::read_json(report).value("prompt", "");
      }
      if (cfg.prompt.empty()) throw app::ConfigError("--prompt is required (no report.json next to the transcript)");
      auto provider = make_provider(cfg);
      return report_run(app::generate(cfg, *provider, "replay"), cfg);
    }
    if (opt->parsed()) {
      const auto r = app::optimize(graph_path, cfg);
      std::cout << "layout written to " << (fs::path(cfg.out_dir) / "layout.json").string() << "\n";
      return r.exit_code;
    }
    if (met->parsed()) {
      std::cout << metrics_table(app::metrics(layout_path, cfg.out_dir));
      return app::kOk;
    }
    if (ren->parsed()) {
      app::render(layout_path, cfg);
      std::cout << "floorplan written to " << (fs::path(cfg.out_dir) / "floorplan.svg").string() << "\n";
      return app::kOk;
    }
  } catch (const app::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return app::kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return app::kStageFailure;
  }
  return app::kOk;
}
