#pragma once

// Chat-completion providers: the request/response surface, a JSONL
// transcript store, and replaying, recording and scripted backends.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "roomopt/rng.hpp"

namespace roomopt::llm {

using json = nlohmann::json;

struct ChatMessage {
  std::string role;  // system | user | assistant
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

inline void to_json(json& j, const ChatMessage& m) { j = {{"role", m.role}, {"content", m.content}}; }
inline void from_json(const json& j, ChatMessage& m) {
  j.at("role").get_to(m.role);
  j.at("content").get_to(m.content);
}

struct ChatRequest {
  std::string stage;
  std::string key;  // object or sentence the request is about; informational, not hashed
  std::vector<ChatMessage> messages;
  double temperature = 0.2;
  int max_tokens = 2048;
  std::uint64_t seed = 0;

  /// Hash over (stage, messages) only; decoding settings do not change the key.
  std::string hash() const {
    const json canonical = {{"stage", stage}, {"messages", messages}};
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical.dump())));
    return buf;
  }
};

class ProviderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  /// Returns the assistant message text.
  virtual std::string complete(const ChatRequest& request) = 0;
};

struct TranscriptRecord {
  std::string stage;
  std::string request_hash;
  std::string response;

  friend bool operator==(const TranscriptRecord&, const TranscriptRecord&) = default;
};

inline void to_json(json& j, const TranscriptRecord& r) {
  j = {{"stage", r.stage}, {"request_hash", r.request_hash}, {"response", r.response}};
}
inline void from_json(const json& j, TranscriptRecord& r) {
  j.at("stage").get_to(r.stage);
  j.at("request_hash").get_to(r.request_hash);
  j.at("response").get_to(r.response);
}

/// Ordered (stage, request hash, response) records, stored as JSON lines.
class TranscriptStore {
 public:
  TranscriptStore() = default;

  static TranscriptStore load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open transcript '" + path + "'");
    TranscriptStore store;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        store.append(json::parse(line).get<TranscriptRecord>());
      } catch (const json::exception& e) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
    return store;
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write transcript '" + path + "'");
    out << dump();
  }

  std::string dump() const {
    std::string s;
    for (const auto& r : records_) s += json(r).dump() + "\n";
    return s;
  }

  /// Appends unless an identical request hash is already stored.
  void append(TranscriptRecord r) {
    if (index_.count(r.request_hash)) return;
    index_[r.request_hash] = records_.size();
    records_.push_back(std::move(r));
  }

  const TranscriptRecord* find(const std::string& request_hash) const {
    const auto it = index_.find(request_hash);
    return it == index_.end() ? nullptr : &records_[it->second];
  }

  const std::vector<TranscriptRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

 private:
  std::vector<TranscriptRecord> records_;
  std::map<std::string, std::size_t> index_;
};

/// Answers from a transcript; a request that was never recorded is an error.
class FixtureProvider : public ChatProvider {
 public:
  explicit FixtureProvider(TranscriptStore store) : store_(std::move(store)) {}

  std::string complete(const ChatRequest& request) override {
    const auto h = request.hash();
    const auto* r = store_.find(h);
    if (!r)
      throw ProviderError("no fixture for stage '" + request.stage + "' (request hash " + h +
                          "); the prompt or upstream answers differ from the recording");
    return r->response;
  }

 private:
  TranscriptStore store_;
};

/// Forwards to another provider and records every exchange.
class RecordingProvider : public ChatProvider {
 public:
  RecordingProvider(ChatProvider& inner, TranscriptStore& store) : inner_(inner), store_(store) {}

  std::string complete(const ChatRequest& request) override {
    std::string response = inner_.complete(request);
    store_.append({request.stage, request.hash(), response});
    return response;
  }

 private:
  ChatProvider& inner_;
  TranscriptStore& store_;
};

/// Answers through a callback; used by tests and the fixture builder.
class ScriptedProvider : public ChatProvider {
 public:
  using Script = std::function<std::string(const ChatRequest&)>;
  explicit ScriptedProvider(Script script) : script_(std::move(script)) {}

  std::string complete(const ChatRequest& request) override {
    ++calls_;
    return script_(request);
  }

  int calls() const { return calls_; }

 private:
  Script script_;
  int calls_ = 0;
};

}  // namespace roomopt::llm
