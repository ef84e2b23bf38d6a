// Builds a replay transcript from a fixture script.
//
// The script is a JSON document of canned replies:
//   {"prompt": "...",
//    "room_params": {...}, "zones": {...}, "primary": {...}, "secondary": {...},
//    "tertiary": {...}, "styles": {...}, "inter": {...},
//    "intra": {"<object>": {...}}, "clean": {"<object>": {...}},
//    "translate": {"<sentence>": {...}}}
// The language phase runs once with cleaning and once without, and every
// exchange is written to the transcript.

#include <iostream>
#include <set>
#include <stdexcept>
#include <string>

#include "roomopt/app.hpp"
#include "roomopt/llm/language.hpp"

using namespace roomopt;

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: fixture_builder <script.json> <transcript.jsonl>\n";
    return 2;
  }
  try {
    const json script = app::read_json(argv[1]);
    std::set<std::string> used;
    llm::ScriptedProvider scripted([&](const llm::ChatRequest& req) -> std::string {
      static const std::set<std::string> kKeyed{"intra", "clean", "translate"};
      const json* reply = nullptr;
      if (!script.contains(req.stage)) throw std::runtime_error("script has no stage '" + req.stage + "'");
      if (kKeyed.count(req.stage)) {
        const auto& table = script[req.stage];
        if (!table.contains(req.key))
          throw std::runtime_error("script has no '" + req.stage + "' reply for \"" + req.key + "\"");
        reply = &table[req.key];
        used.insert(req.stage + "/" + req.key);
      } else {
        reply = &script[req.stage];
        used.insert(req.stage);
      }
      return reply->dump();
    });
    llm::TranscriptStore store;
    llm::RecordingProvider recorder(scripted, store);
    const std::string prompt = script.at("prompt").get<std::string>();
    for (bool no_cleaning : {false, true}) {
      llm::LanguageConfig cfg;
      cfg.no_cleaning = no_cleaning;
      llm::LanguagePhase phase(recorder, cfg);
      const auto res = phase.run({prompt, 0, std::nullopt});
      std::cerr << (no_cleaning ? "without" : "with") << " cleaning: " << res.graph.objects.size() << " objects, "
                << res.graph.calls.size() << " calls, " << res.diagnostics.size() << " diagnostics\n";
      for (const auto& d : res.diagnostics) std::cerr << "  [" << to_string(d.category) << "] " << d.message << "\n";
    }
    for (const char* keyed : {"intra", "clean", "translate"}) {
      if (!script.contains(keyed)) continue;
      for (const auto& [k, _] : script[keyed].items())
        if (!used.count(std::string(keyed) + "/" + k)) std::cerr << "unused " << keyed << " entry: \"" << k << "\"\n";
    }
    store.save(argv[2]);
    std::cerr << store.size() << " records written to " << argv[2] << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
