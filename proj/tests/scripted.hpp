#pragma once

// Canned model replies from the fixture scripts, for tests that need to
// tamper with single answers.

#include <fstream>
#include <stdexcept>
#include <string>

#include "roomopt/llm/language.hpp"

namespace scripted {

using roomopt::json;

inline std::string source_path(const std::string& rel) { return std::string(ROOMOPT_SOURCE_DIR) + "/" + rel; }

inline json load(const std::string& name) {
  std::ifstream in(source_path("fixtures/scripts/" + name));
  if (!in) throw std::runtime_error("missing script " + name);
  return json::parse(in);
}

/// Reply for one request, keyed the same way the fixture builder keys it.
inline std::string reply(const json& script, const roomopt::llm::ChatRequest& req) {
  const bool keyed = req.stage == "intra" || req.stage == "clean" || req.stage == "translate";
  const json& entry = keyed ? script.at(req.stage).at(req.key) : script.at(req.stage);
  return entry.dump();
}

}  // namespace scripted
