#include <gtest/gtest.h>

#include <filesystem>

#include "roomopt/app.hpp"
#include "scripted.hpp"

using namespace roomopt;
namespace fs = std::filesystem;

namespace {

const std::string kPrompt = "A bedroom that is 4m x 5m";

app::RunConfig fixture_config(const std::string& out) {
  app::RunConfig c;
  c.prompt = kPrompt;
  c.seed = 7;
  c.fixtures = scripted::source_path("fixtures/bedroom_4x5.jsonl");
  c.out_dir = testing::TempDir() + out;
  c.restarts = 3;
  c.threads = 1;
  fs::remove_all(c.out_dir);
  return c;
}

app::RunResult run(const app::RunConfig& c) {
  llm::FixtureProvider provider(llm::TranscriptStore::load(c.fixtures));
  return app::generate(c, provider);
}

}  // namespace

TEST(Generate, WritesEveryArtifactWithSchemaTags) {
  const auto c = fixture_config("gen_artifacts");
  const auto r = run(c);
  ASSERT_EQ(r.exit_code, app::kOk) << r.error;
  for (const char* f : {"graph.json", "layout.json", "metrics.json", "report.json", "floorplan.svg", "transcript.jsonl"})
    EXPECT_TRUE(fs::exists(fs::path(c.out_dir) / f)) << f;
  EXPECT_EQ(app::read_json(fs::path(c.out_dir) / "graph.json")["schema"], "roomopt.graph/1");
  EXPECT_EQ(app::read_json(fs::path(c.out_dir) / "layout.json")["schema"], "roomopt.layout/1");
  EXPECT_EQ(app::read_json(fs::path(c.out_dir) / "metrics.json")["schema"], "roomopt.metrics/1");
  const json report = app::read_json(fs::path(c.out_dir) / "report.json");
  EXPECT_EQ(report["schema"], app::kReportSchema);
  EXPECT_EQ(report["prompt"], kPrompt);
  EXPECT_FALSE(report["single_stage"].get<bool>());
  for (const auto& p : r.placements) EXPECT_TRUE(p.has_value());
}

TEST(Generate, DeterministicArtifacts) {
  const auto a = fixture_config("gen_det_a");
  const auto b = fixture_config("gen_det_b");
  run(a);
  run(b);
  for (const char* f : {"layout.json", "floorplan.svg", "graph.json", "metrics.json", "transcript.jsonl"})
    EXPECT_EQ(app::read_text(fs::path(a.out_dir) / f), app::read_text(fs::path(b.out_dir) / f)) << f;
}

TEST(Generate, TranscriptOfARunReplaysItself) {
  const auto a = fixture_config("gen_replay_src");
  run(a);
  auto b = fixture_config("gen_replay_dst");
  b.fixtures = (fs::path(a.out_dir) / "transcript.jsonl").string();
  run(b);
  EXPECT_EQ(app::read_text(fs::path(a.out_dir) / "layout.json"), app::read_text(fs::path(b.out_dir) / "layout.json"));
}

TEST(Optimize, SavedGraphReproducesTheLayout) {
  const auto a = fixture_config("opt_src");
  run(a);
  auto b = fixture_config("opt_dst");
  app::optimize(fs::path(a.out_dir) / "graph.json", b);
  EXPECT_EQ(app::read_text(fs::path(a.out_dir) / "layout.json"), app::read_text(fs::path(b.out_dir) / "layout.json"));
}

TEST(MetricsAndRender, ReadBackTheLayout) {
  const auto a = fixture_config("met_src");
  const auto r = run(a);
  auto b = fixture_config("met_dst");
  const auto m = app::metrics(fs::path(a.out_dir) / "layout.json", b.out_dir);
  EXPECT_NEAR(m.oob_fraction, r.metrics->oob_fraction, 1e-12);
  EXPECT_NEAR(m.oor_fraction, r.metrics->oor_fraction, 1e-12);
  EXPECT_EQ(app::render(fs::path(a.out_dir) / "layout.json", b), r.svg);
}

TEST(Generate, NoHierarchyAblationRunsOneStage) {
  auto c = fixture_config("gen_nohier");
  app::apply_ablation(c.ablation, "no_hierarchy");
  const auto r = run(c);
  ASSERT_EQ(r.exit_code, app::kOk);
  EXPECT_TRUE(r.report["single_stage"].get<bool>());
  EXPECT_EQ(r.report["stages"].size(), 1u);
}

TEST(Generate, StageFailureLeavesPartialArtifacts) {
  auto c = fixture_config("gen_fail");
  llm::ScriptedProvider bad([](const llm::ChatRequest&) { return std::string("I cannot help with that."); });
  const auto r = app::generate(c, bad);
  EXPECT_EQ(r.exit_code, app::kStageFailure);
  EXPECT_TRUE(fs::exists(fs::path(c.out_dir) / "report.json"));
  EXPECT_TRUE(fs::exists(fs::path(c.out_dir) / "transcript.jsonl"));
  EXPECT_FALSE(fs::exists(fs::path(c.out_dir) / "layout.json"));
  EXPECT_TRUE(app::read_json(fs::path(c.out_dir) / "report.json")["failed"].get<bool>());
}

TEST(Config, RejectsBadSettings) {
  auto c = fixture_config("cfg_bad");
  c.restarts = 0;
  llm::ScriptedProvider none([](const llm::ChatRequest&) { return std::string("{}"); });
  EXPECT_THROW(app::generate(c, none), app::ConfigError);
  c = fixture_config("cfg_bad");
  c.weights.lambda3 = -1;
  EXPECT_THROW(app::generate(c, none), app::ConfigError);
  c = fixture_config("cfg_bad");
  c.prompt.clear();
  EXPECT_THROW(app::generate(c, none), app::ConfigError);
  Ablation a;
  EXPECT_THROW(app::apply_ablation(a, "no_gravity"), app::ConfigError);
  app::apply_ablation(a, "drop_bound");
  app::apply_ablation(a, "over");
  app::apply_ablation(a, "no_cleaning");
  EXPECT_EQ(a.drop, (std::set<std::string>{"bound", "over"}));
  EXPECT_TRUE(a.no_cleaning);
}
