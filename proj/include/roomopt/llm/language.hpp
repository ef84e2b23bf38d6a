#pragma once

// Language phase: staged structured queries for the room, zones, objects,
// styles and constraints, constraint cleaning, and translation of
// constraint sentences into calls against the cost-function registry.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "roomopt/diagnostics.hpp"
#include "roomopt/llm/provider.hpp"
#include "roomopt/registry.hpp"
#include "roomopt/scene.hpp"

namespace roomopt::llm {

struct BriefRequest {
  std::string prompt;
  std::uint64_t seed = 0;
  std::optional<Room> overrides;  // skips the room query when set
};

struct StageResponse {
  std::string stage;
  std::string key;  // object or sentence the query was about; empty for whole-scene stages
  std::string raw;
  json parsed;
  int attempts = 0;
};

inline void to_json(json& j, const StageResponse& r) {
  j = {{"stage", r.stage}, {"key", r.key}, {"raw", r.raw}, {"parsed", r.parsed}, {"attempts", r.attempts}};
}

/// A stage whose replies never validated.
class StageFailure : public std::runtime_error {
 public:
  StageFailure(std::string stage, std::string raw, const std::string& error)
      : std::runtime_error("stage '" + stage + "' failed: " + error), stage_(std::move(stage)),
        raw_(std::move(raw)) {}
  const std::string& stage() const { return stage_; }
  const std::string& raw() const { return raw_; }

 private:
  std::string stage_;
  std::string raw_;
};

struct LanguageConfig {
  int max_zones = 6;
  int max_attempts = 3;
  bool no_cleaning = false;
  int max_tokens = 2048;
  double design_temperature = 0.2;
  double translate_temperature = 0.0;
};

/// A constraint sentence about one object or duplicate group.
struct Sentence {
  std::string subject;
  std::string text;
  TranslationStage stage = TranslationStage::intra;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

inline void to_json(json& j, const Sentence& s) {
  j = {{"subject", s.subject}, {"text", s.text}, {"stage", s.stage}};
}

struct LanguageResult {
  LayoutGraph graph;
  std::vector<Sentence> sentences;  // after cleaning
  std::vector<Diagnostic> diagnostics;
  std::vector<StageResponse> responses;
};

/// Lowercase snake_case identifier.
inline std::string normalize_name(std::string_view s) {
  std::string out;
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) {
      out += static_cast<char>(std::tolower(u));
    } else if (!out.empty() && out.back() != '_') {
      out += '_';
    }
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

/// The JSON object inside a reply, tolerating code fences and prose around it.
inline std::optional<json> extract_json(std::string_view raw) {
  const auto open = raw.find('{');
  const auto close = raw.rfind('}');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) return std::nullopt;
  json j = json::parse(raw.substr(open, close - open + 1), nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  return j;
}

namespace schema {

using Check = std::optional<std::string>;  // error message, empty when valid

inline bool positive_number(const json& j, const char* key) {
  return j.contains(key) && j[key].is_number() && j[key].get<double>() > 0.0;
}

inline Check string_list(const json& j, const char* key, bool allow_empty) {
  if (!j.contains(key) || !j[key].is_array()) return std::string("'") + key + "' must be an array of strings";
  if (!allow_empty && j[key].empty()) return std::string("'") + key + "' must not be empty";
  for (const auto& v : j[key])
    if (!v.is_string() || v.get<std::string>().empty())
      return std::string("every entry of '") + key + "' must be a non-empty string";
  return std::nullopt;
}

inline Check room(const json& j, Room& out) {
  if (!positive_number(j, "width") || !positive_number(j, "length"))
    return "'width' and 'length' must be positive numbers (meters)";
  for (const char* key : {"doors", "windows", "sockets"})
    if (j.contains(key) && !j[key].is_array()) return std::string("'") + key + "' must be an array";
  try {
    out = j.get<Room>();
  } catch (const json::exception& e) {
    return std::string("malformed room: ") + e.what();
  }
  LayoutGraph g;
  g.room = out;
  const auto diags = validate_graph(g);
  if (!diags.empty()) return diags.front().message;
  return std::nullopt;
}

inline Check object_common(const json& o) {
  if (!o.is_object()) return "every object must be a JSON object";
  if (!o.contains("name") || !o["name"].is_string() || normalize_name(o["name"].get<std::string>()).empty())
    return "every object needs a non-empty 'name'";
  if (!positive_number(o, "width") || !positive_number(o, "length"))
    return "object '" + o["name"].get<std::string>() + "' needs positive 'width' and 'length' in meters";
  return std::nullopt;
}

}  // namespace schema

inline constexpr const char* kSystemPrompt =
    "You are an experienced interior designer helping to furnish a single rectangular room. "
    "The origin is the south-west corner; x runs east along the width, y runs north along the length. "
    "Walls are named south (y=0), north (y=length), west (x=0) and east (x=width); positions along a "
    "wall are measured from its west or south end. All lengths are in meters. "
    "Always answer with exactly one JSON object that follows the requested format and nothing else.";

class LanguagePhase {
 public:
  explicit LanguagePhase(ChatProvider& provider, LanguageConfig config = {})
      : provider_(provider), config_(config) {}

  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }
  const std::vector<StageResponse>& responses() const { return responses_; }

  /// Runs every stage and assembles the layout graph.
  LanguageResult run(const BriefRequest& brief) {
    if (brief.prompt.empty()) throw std::invalid_argument("brief prompt must not be empty");
    seed_ = brief.seed;
    LanguageResult out;
    Room room = query_room_params(brief);
    const auto zones = query_zones(brief, room);
    auto objects = query_primary(brief, room, zones);
    const auto secondaries = query_secondary(brief, room, zones, objects);
    objects.insert(objects.end(), secondaries.begin(), secondaries.end());
    const auto tertiaries = query_tertiary(brief, room, objects);
    objects.insert(objects.end(), tertiaries.begin(), tertiaries.end());
    query_styles(brief, room, objects);

    auto sentences = query_intra_constraints(brief, room, objects);
    const auto inter = query_inter_constraints(brief, room, objects);
    sentences.insert(sentences.end(), inter.begin(), inter.end());
    if (!config_.no_cleaning) sentences = clean_all(brief, objects, sentences);

    for (auto& o : objects) {
      if (o.tier == Tier::tertiary) continue;
      const std::string unit = o.count_group.value_or(o.name);
      for (const auto& s : sentences)
        if (s.subject == unit) o.raw_constraints.push_back(s.text);
    }
    std::vector<Sentence> ter;
    for (const auto& o : objects)
      if (o.tier == Tier::tertiary) ter.push_back({o.name, o.raw_constraints.front(), TranslationStage::tertiary});

    out.graph.room = room;
    out.graph.objects = objects;
    for (std::size_t z = 0; z < zones.size(); ++z)
      out.graph.zones.push_back({static_cast<int>(z), zones[z], {}, static_cast<int>(z)});
    std::vector<Sentence> intra_s;
    std::vector<Sentence> inter_s;
    for (const auto& s : sentences) (s.stage == TranslationStage::inter ? inter_s : intra_s).push_back(s);
    for (const auto* group : {&intra_s, &inter_s, &ter}) {
      if (group->empty()) continue;
      auto calls = translate(*group, objects, group->front().stage);
      out.graph.calls.insert(out.graph.calls.end(), calls.begin(), calls.end());
    }
    for (auto d : validate_graph(out.graph)) diagnostics_.push_back(std::move(d));
    out.sentences = sentences;
    out.sentences.insert(out.sentences.end(), ter.begin(), ter.end());
    out.diagnostics = diagnostics_;
    out.responses = responses_;
    return out;
  }

  // -------------------------------------------------------------- stage A --

  Room query_room_params(const BriefRequest& brief) {
    seed_ = brief.seed;
    if (brief.overrides) return *brief.overrides;
    Room room;
    ask("room_params", "",
        "Design brief: \"" + brief.prompt + "\"\n\n"
        "Decide the room's dimensions and its fixed features: doors, windows and electrical sockets, "
        "each on a named wall with the offset of its center along that wall. If the brief gives "
        "dimensions, use them.\n"
        "Answer format: {\"width\": number, \"length\": number, "
        "\"doors\": [{\"wall\": \"south|north|west|east\", \"offset\": number, \"width\": number}], "
        "\"windows\": [{\"wall\": ..., \"offset\": number, \"width\": number}], "
        "\"sockets\": [{\"wall\": ..., \"offset\": number}]}",
        config_.design_temperature, [&](const json& j) { return schema::room(j, room); });
    return room;
  }

  // -------------------------------------------------------------- stage B --

  std::vector<std::string> query_zones(const BriefRequest& brief, const Room& room) {
    std::vector<std::string> zones;
    ask("zones", "",
        context(brief, room) +
            "Divide the room into functional zones and list them ordered by significance, most "
            "important first. Use at most " + std::to_string(config_.max_zones) + " zones.\n"
            "Answer format: {\"zones\": [\"label\", ...]}",
        config_.design_temperature, [&](const json& j) -> schema::Check {
          if (auto e = schema::string_list(j, "zones", false)) return e;
          zones.clear();
          for (const auto& v : j["zones"]) zones.push_back(normalize_name(v.get<std::string>()));
          if (static_cast<int>(zones.size()) > config_.max_zones)
            return "at most " + std::to_string(config_.max_zones) + " zones are allowed";
          std::set<std::string> seen(zones.begin(), zones.end());
          if (seen.size() != zones.size() || seen.count("")) return std::string("zone labels must be distinct");
          return std::nullopt;
        });
    return zones;
  }

  // -------------------------------------------------------------- stage C --

  std::vector<ObjectSpec> query_primary(const BriefRequest& brief, const Room& room,
                                        const std::vector<std::string>& zones) {
    std::vector<ObjectSpec> out;
    ask("primary", "",
        context(brief, room) + "Zones, most significant first: " + join(zones) + ".\n"
            "Choose exactly one primary (focal) object for each zone with its footprint: width is the "
            "left-right extent seen from the object's front, length the front-back extent.\n"
            "Answer format: {\"objects\": [{\"name\": string, \"width\": number, \"length\": number, "
            "\"zone\": string}]}",
        config_.design_temperature, [&](const json& j) -> schema::Check {
          if (!j.contains("objects") || !j["objects"].is_array()) return "'objects' must be an array";
          std::map<std::string, ObjectSpec> by_zone;
          std::set<std::string> names;
          for (const auto& o : j["objects"]) {
            if (auto e = schema::object_common(o)) return e;
            if (!o.contains("zone") || !o["zone"].is_string()) return std::string("every object needs a 'zone'");
            const auto zone = normalize_name(o["zone"].get<std::string>());
            const auto it = std::find(zones.begin(), zones.end(), zone);
            if (it == zones.end()) return "unknown zone '" + zone + "'";
            if (by_zone.count(zone)) return "zone '" + zone + "' has more than one primary object";
            ObjectSpec spec = make_object(o, Tier::primary);
            if (!names.insert(spec.name).second) return "duplicate object name '" + spec.name + "'";
            spec.zone = static_cast<int>(it - zones.begin());
            by_zone[zone] = spec;
          }
          if (by_zone.size() != zones.size()) return std::string("every zone needs exactly one primary object");
          out.clear();
          for (const auto& z : zones) out.push_back(by_zone[z]);
          return std::nullopt;
        });
    return out;
  }

  /// Secondary objects; an entry with count n > 1 becomes name_1 ... name_n
  /// sharing the count group `name`.
  std::vector<ObjectSpec> query_secondary(const BriefRequest& brief, const Room& room,
                                          const std::vector<std::string>& zones,
                                          const std::vector<ObjectSpec>& primaries) {
    std::vector<ObjectSpec> out;
    ask("secondary", "",
        context(brief, room) + "Zones: " + join(zones) + ".\nPrimary objects:\n" + list_objects(primaries) +
            "List the secondary floor-standing objects (no rugs) that complete each zone, with how many "
            "of each are needed.\n"
            "Answer format: {\"objects\": [{\"name\": string, \"width\": number, \"length\": number, "
            "\"zone\": string, \"count\": integer}]}",
        config_.design_temperature, [&](const json& j) -> schema::Check {
          if (!j.contains("objects") || !j["objects"].is_array()) return "'objects' must be an array";
          std::set<std::string> names;
          for (const auto& p : primaries) names.insert(p.name);
          std::vector<ObjectSpec> list;
          for (const auto& o : j["objects"]) {
            if (auto e = schema::object_common(o)) return e;
            if (!o.contains("zone") || !o["zone"].is_string()) return std::string("every object needs a 'zone'");
            const auto zone = normalize_name(o["zone"].get<std::string>());
            const auto it = std::find(zones.begin(), zones.end(), zone);
            if (it == zones.end()) return "unknown zone '" + zone + "'";
            const int count = o.contains("count") ? (o["count"].is_number_integer() ? o["count"].get<int>() : 0) : 1;
            if (count < 1) return std::string("'count' must be a positive integer");
            ObjectSpec spec = make_object(o, Tier::secondary);
            spec.zone = static_cast<int>(it - zones.begin());
            if (!names.insert(spec.name).second) return "duplicate object name '" + spec.name + "'";
            if (count == 1) {
              list.push_back(spec);
              continue;
            }
            for (int k = 1; k <= count; ++k) {
              ObjectSpec member = spec;
              member.name = spec.name + "_" + std::to_string(k);
              member.count_group = spec.name;
              if (!names.insert(member.name).second) return "duplicate object name '" + member.name + "'";
              list.push_back(member);
            }
          }
          out = std::move(list);
          return std::nullopt;
        });
    return out;
  }

  std::vector<ObjectSpec> query_tertiary(const BriefRequest& brief, const Room& room,
                                         const std::vector<ObjectSpec>& placed) {
    std::vector<ObjectSpec> out;
    ask("tertiary", "",
        context(brief, room) + "Objects so far:\n" + list_objects(placed) +
            "List decorative and lighting objects: wall-mounted, ceiling, surface (resting on another "
            "object) and rugs (type floor). Give each exactly one placement constraint that names the "
            "object it relates to. List duplicates individually with distinct names.\n"
            "Answer format: {\"objects\": [{\"name\": string, \"width\": number, \"length\": number, "
            "\"type\": \"wall|floor|ceiling|surface\", \"constraint\": string}]}",
        config_.design_temperature, [&](const json& j) -> schema::Check {
          if (!j.contains("objects") || !j["objects"].is_array()) return "'objects' must be an array";
          std::set<std::string> names;
          for (const auto& p : placed) {
            names.insert(p.name);
            if (p.count_group) names.insert(*p.count_group);
          }
          std::vector<ObjectSpec> list;
          for (const auto& o : j["objects"]) {
            if (auto e = schema::object_common(o)) return e;
            static const std::map<std::string, Attach> kTypes{
                {"wall", Attach::wall}, {"floor", Attach::floor}, {"ceiling", Attach::ceiling},
                {"surface", Attach::surface}};
            const auto type = o.contains("type") && o["type"].is_string() ? o["type"].get<std::string>() : "";
            if (!kTypes.count(type)) return "'type' must be one of wall, floor, ceiling, surface";
            if (!o.contains("constraint") || !o["constraint"].is_string() ||
                o["constraint"].get<std::string>().empty())
              return std::string("every tertiary object needs exactly one 'constraint' sentence");
            ObjectSpec spec = make_object(o, Tier::tertiary);
            spec.attach = kTypes.at(type);
            spec.raw_constraints = {o["constraint"].get<std::string>()};
            if (!names.insert(spec.name).second) return "duplicate object name '" + spec.name + "'";
            list.push_back(spec);
          }
          out = std::move(list);
          return std::nullopt;
        });
    return out;
  }

  /// Style descriptions; names may refer to duplicate groups.
  void query_styles(const BriefRequest& brief, Room& room, std::vector<ObjectSpec>& objects) {
    json parsed;
    ask("styles", "",
        context(brief, room) + "Objects:\n" + list_objects(objects) +
            "Describe the style of the room (walls and floor) and of every object: materials, colors "
            "and patterns.\n"
            "Answer format: {\"room\": string, \"objects\": {\"<object name>\": string, ...}}",
        config_.design_temperature, [&](const json& j) -> schema::Check {
          if (!j.contains("room") || !j["room"].is_string()) return std::string("'room' must be a string");
          if (!j.contains("objects") || !j["objects"].is_object()) return std::string("'objects' must be an object");
          for (const auto& [k, v] : j["objects"].items())
            if (!v.is_string()) return "style of '" + k + "' must be a string";
          parsed = j;
          return std::nullopt;
        });
    room.style = parsed["room"].get<std::string>();
    for (const auto& [k, v] : parsed["objects"].items()) {
      const auto name = normalize_name(k);
      bool used = false;
      for (auto& o : objects) {
        if (o.name == name || (o.count_group && *o.count_group == name)) {
          o.style = v.get<std::string>();
          used = true;
        }
      }
      if (!used) diagnostics_.push_back({Category::language, "styles", "style given for unknown object '" + k + "'"});
    }
  }

  // -------------------------------------------------------------- stage D --

  /// One query per primary/secondary object (once per duplicate group).
  std::vector<Sentence> query_intra_constraints(const BriefRequest& brief, const Room& room,
                                                const std::vector<ObjectSpec>& objects) {
    std::vector<Sentence> out;
    for (const auto& unit : units(objects)) {
      ask("intra", unit,
          context(brief, room) + "Objects:\n" + list_objects(objects) + "List the placement constraints for '" +
              unit + "' on its own: position relative to walls, doors, windows and sockets, orientation, "
              "and which sides must stay accessible. One short sentence per constraint.\n"
              "Answer format: {\"constraints\": [string, ...]}",
          config_.design_temperature, [&](const json& j) -> schema::Check {
            if (auto e = schema::string_list(j, "constraints", true)) return e;
            for (const auto& v : j["constraints"]) out.push_back({unit, v.get<std::string>(), TranslationStage::intra});
            return std::nullopt;
          });
    }
    return out;
  }

  std::vector<Sentence> query_inter_constraints(const BriefRequest& brief, const Room& room,
                                                const std::vector<ObjectSpec>& objects) {
    std::vector<Sentence> out;
    const auto names = units(objects);
    ask("inter", "",
        context(brief, room) + "Objects:\n" + list_objects(objects) +
            "List the constraints between pairs of primary and secondary objects (for example "
            "adjacency, facing, distance). Attach each to the object being placed relative to another.\n"
            "Answer format: {\"constraints\": [{\"object\": string, \"constraint\": string}]}",
        config_.design_temperature, [&](const json& j) -> schema::Check {
          if (!j.contains("constraints") || !j["constraints"].is_array())
            return std::string("'constraints' must be an array");
          std::vector<Sentence> list;
          for (const auto& c : j["constraints"]) {
            if (!c.is_object() || !c.contains("object") || !c["object"].is_string() || !c.contains("constraint") ||
                !c["constraint"].is_string())
              return std::string("each constraint needs string fields 'object' and 'constraint'");
            const auto subject = normalize_name(c["object"].get<std::string>());
            if (std::find(names.begin(), names.end(), subject) == names.end())
              return "unknown object '" + c["object"].get<std::string>() + "'";
            list.push_back({subject, c["constraint"].get<std::string>(), TranslationStage::inter});
          }
          out = std::move(list);
          return std::nullopt;
        });
    return out;
  }

  /// Cleans the constraints of one object: merge, dedupe, split compound
  /// sentences and drop contradictions. Falls back to the input on failure.
  std::vector<Sentence> clean_constraints(const std::string& subject, const std::vector<Sentence>& in) {
    if (in.empty()) return in;
    std::string listing;
    for (const auto& s : in)
      listing += "- [" + std::string(s.stage == TranslationStage::inter ? "inter" : "intra") + "] " + s.text + "\n";
    std::vector<Sentence> out;
    try {
      ask("clean", subject,
          "Constraints for '" + subject + "':\n" + listing +
              "Clean this list: merge similar constraints, remove duplicates, split sentences that state "
              "several requirements into one sentence each, and remove constraints that contradict "
              "others. Keep each constraint's kind (intra: about the object alone, inter: relative to "
              "another object).\n"
              "Answer format: {\"constraints\": [{\"text\": string, \"kind\": \"intra|inter\"}]}",
          config_.design_temperature, [&](const json& j) -> schema::Check {
            if (!j.contains("constraints") || !j["constraints"].is_array())
              return std::string("'constraints' must be an array");
            std::vector<Sentence> list;
            for (const auto& c : j["constraints"]) {
              if (!c.is_object() || !c.contains("text") || !c["text"].is_string() || c["text"].get<std::string>().empty())
                return std::string("each constraint needs a non-empty 'text'");
              const auto kind = c.value("kind", std::string("intra"));
              if (kind != "intra" && kind != "inter") return std::string("'kind' must be intra or inter");
              list.push_back({subject, c["text"].get<std::string>(),
                              kind == "inter" ? TranslationStage::inter : TranslationStage::intra});
            }
            out = std::move(list);
            return std::nullopt;
          });
    } catch (const StageFailure& e) {
      diagnostics_.push_back({Category::cleaning, "clean",
                              "cleaning failed for '" + subject + "', keeping raw constraints: " + e.what()});
      return in;
    } catch (const ProviderError& e) {
      diagnostics_.push_back({Category::cleaning, "clean",
                              "cleaning failed for '" + subject + "', keeping raw constraints: " + e.what()});
      return in;
    }
    return out;
  }

  /// Maps sentences to registry calls. Sentences without a matching function
  /// and calls naming unknown functions or objects are dropped with a
  /// diagnostic; parameters are checked later, at bind time.
  std::vector<ConstraintCall> translate(const std::vector<Sentence>& sentences, const std::vector<ObjectSpec>& objects,
                                        TranslationStage stage) {
    const auto& reg = Registry::instance();
    std::vector<FunctionKind> kinds = allowed_kinds(stage);
    json manifest = json::array();
    std::set<std::string> allowed;
    for (auto kind : kinds) {
      const json listed = reg.manifest(kind);
      for (const auto& f : listed.at("functions")) {
        allowed.insert(f.at("function_id").get<std::string>());
        manifest.push_back(f);
      }
    }
    const std::string stage_name = json(stage).get<std::string>();
    std::vector<ConstraintCall> out;
    for (const auto& s : sentences) {
      json parsed;
      try {
        ask("translate", s.text,
            "Translation stage: " + stage_name + ".\nLibrary of cost functions (name, parameters, docstring):\n" +
                manifest.dump(1) + "\n\nObjects:\n" + list_objects(objects) + "\nConstraint on '" + s.subject +
                "': \"" + s.text + "\"\n"
                "Express the constraint as calls to library functions. 'object' is the object being "
                "constrained, 'other' the second object when the function takes one (null otherwise). "
                "Parameters that name objects take object names. Return an empty list if no function "
                "fits.\n"
                "Answer format: {\"calls\": [{\"function\": string, \"object\": string, \"other\": "
                "string|null, \"params\": {...}}]}",
            config_.translate_temperature, [&](const json& j) -> schema::Check {
              if (!j.contains("calls") || !j["calls"].is_array()) return std::string("'calls' must be an array");
              for (const auto& c : j["calls"]) {
                if (!c.is_object() || !c.contains("function") || !c["function"].is_string() ||
                    !c.contains("object") || !c["object"].is_string())
                  return std::string("each call needs string fields 'function' and 'object'");
                if (c.contains("other") && !c["other"].is_null() && !c["other"].is_string())
                  return std::string("'other' must be an object name or null");
                if (c.contains("params") && !c["params"].is_object())
                  return std::string("'params' must be an object");
              }
              parsed = j;
              return std::nullopt;
            });
      } catch (const StageFailure& e) {
        diagnostics_.push_back({Category::translation, "translate", "dropped \"" + s.text + "\": " + e.what()});
        continue;
      }
      if (parsed["calls"].empty()) {
        diagnostics_.push_back(
            {Category::translation, "translate", "dropped \"" + s.text + "\": no library function matches"});
        continue;
      }
      for (const auto& c : parsed["calls"]) {
        auto calls = resolve_call(c, s, objects, allowed, stage);
        out.insert(out.end(), calls.begin(), calls.end());
      }
    }
    return out;
  }

 private:
  template <class Validate>
  json ask(const std::string& stage, const std::string& key, const std::string& instruction, double temperature,
           Validate&& validate) {
    ChatRequest req;
    req.stage = stage;
    req.key = key;
    req.temperature = temperature;
    req.max_tokens = config_.max_tokens;
    req.seed = seed_;
    req.messages = {{"system", kSystemPrompt}, {"user", instruction}};
    std::string raw;
    std::string error;
    for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
      raw = provider_.complete(req);
      const auto parsed = extract_json(raw);
      if (!parsed) {
        error = "the reply is not a JSON object";
      } else if (auto e = validate(*parsed)) {
        error = *e;
      } else {
        if (attempt > 1)
          diagnostics_.push_back({Category::language, stage,
                                  "reply accepted after " + std::to_string(attempt) + " attempts"});
        responses_.push_back({stage, key, raw, *parsed, attempt});
        return *parsed;
      }
      diagnostics_.push_back({Category::language, stage, "reply rejected: " + error});
      req.messages.push_back({"assistant", raw});
      req.messages.push_back({"user", "That reply was rejected: " + error +
                                          ". Answer again with one JSON object in the requested format."});
    }
    throw StageFailure(stage, raw, error);
  }

  std::vector<Sentence> clean_all(const BriefRequest&, const std::vector<ObjectSpec>& objects,
                                  const std::vector<Sentence>& sentences) {
    std::vector<Sentence> out;
    for (const auto& unit : units(objects)) {
      std::vector<Sentence> mine;
      for (const auto& s : sentences)
        if (s.subject == unit) mine.push_back(s);
      const auto cleaned = clean_constraints(unit, mine);
      out.insert(out.end(), cleaned.begin(), cleaned.end());
    }
    return out;
  }

  static std::vector<FunctionKind> allowed_kinds(TranslationStage stage) {
    switch (stage) {
      case TranslationStage::intra: return {FunctionKind::individual};
      case TranslationStage::inter: return {FunctionKind::individual, FunctionKind::pairwise};
      case TranslationStage::tertiary: return {FunctionKind::tertiary, FunctionKind::individual};
    }
    return {};
  }

  /// Object indices a name refers to: the object itself or every member of a duplicate group.
  static std::vector<std::size_t> resolve_name(const std::string& raw, const std::vector<ObjectSpec>& objects) {
    const auto name = normalize_name(raw);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < objects.size(); ++i)
      if (objects[i].name == name) return {i};
    for (std::size_t i = 0; i < objects.size(); ++i)
      if (objects[i].count_group && *objects[i].count_group == name) out.push_back(i);
    return out;
  }

  std::vector<ConstraintCall> resolve_call(const json& c, const Sentence& s, const std::vector<ObjectSpec>& objects,
                                           const std::set<std::string>& allowed, TranslationStage stage) {
    const auto drop = [&](const std::string& why) {
      diagnostics_.push_back({Category::translation, "translate", "dropped call from \"" + s.text + "\": " + why});
      return std::vector<ConstraintCall>{};
    };
    const auto fn = c["function"].get<std::string>();
    if (!allowed.count(fn)) return drop("unknown function '" + fn + "'");
    const auto subjects = resolve_name(c["object"].get<std::string>(), objects);
    if (subjects.empty()) return drop("unknown object '" + c["object"].get<std::string>() + "'");
    std::vector<std::optional<std::size_t>> others{std::nullopt};
    if (c.contains("other") && c["other"].is_string()) {
      const auto idx = resolve_name(c["other"].get<std::string>(), objects);
      if (idx.empty()) return drop("unknown object '" + c["other"].get<std::string>() + "'");
      others.assign(idx.begin(), idx.end());
    }
    json params = c.value("params", json::object());
    for (auto key : kObjectParamKeys) {
      const auto it = params.find(std::string(key));
      if (it == params.end() || !it->is_string()) continue;
      const auto idx = resolve_name(it->get<std::string>(), objects);
      if (idx.size() != 1) return drop("parameter '" + std::string(key) + "' does not name a single object");
      *it = idx.front();
    }
    std::vector<ConstraintCall> out;
    for (std::size_t subj : subjects) {
      for (const auto& other : others) {
        if (other && *other == subj) continue;
        ConstraintCall call;
        call.function_id = fn;
        call.subject = subj;
        call.object2 = other;
        call.params = params;
        call.source = s.text;
        call.stage = stage;
        out.push_back(std::move(call));
      }
    }
    return out;
  }

  static ObjectSpec make_object(const json& o, Tier tier) {
    ObjectSpec spec;
    spec.name = normalize_name(o["name"].get<std::string>());
    spec.tier = tier;
    spec.width = o["width"].get<double>();
    spec.length = o["length"].get<double>();
    return spec;
  }

  /// Primary and secondary units: object names, with duplicate groups collapsed.
  static std::vector<std::string> units(const std::vector<ObjectSpec>& objects) {
    std::vector<std::string> out;
    for (const auto& o : objects) {
      if (o.tier == Tier::tertiary) continue;
      const std::string name = o.count_group.value_or(o.name);
      if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    }
    return out;
  }

  static std::string list_objects(const std::vector<ObjectSpec>& objects) {
    std::string s;
    char buf[64];
    for (std::size_t i = 0; i < objects.size(); ++i) {
      const auto& o = objects[i];
      if (o.count_group && i > 0 && objects[i - 1].count_group == o.count_group) continue;
      std::size_t n = 1;
      while (o.count_group && i + n < objects.size() && objects[i + n].count_group == o.count_group) ++n;
      std::snprintf(buf, sizeof buf, "%.2f x %.2f m", o.width, o.length);
      s += "- " + o.count_group.value_or(o.name);
      if (n > 1) s += " x" + std::to_string(n);
      s += " (" + json(o.tier).get<std::string>() + ", " + buf;
      if (o.tier == Tier::tertiary) s += ", " + json(o.attach).get<std::string>();
      if (n > 1) {
        s += ", members";
        for (std::size_t k = 0; k < n; ++k) s += " " + objects[i + k].name;
      }
      s += ")\n";
    }
    return s;
  }

  static std::string context(const BriefRequest& brief, const Room& room) {
    return "Design brief: \"" + brief.prompt + "\"\nRoom: " + json(room).dump() + "\n\n";
  }

  static std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
    return s;
  }

  ChatProvider& provider_;
  LanguageConfig config_;
  std::uint64_t seed_ = 0;
  std::vector<Diagnostic> diagnostics_;
  std::vector<StageResponse> responses_;
};

}  // namespace roomopt::llm
