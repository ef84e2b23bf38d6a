#pragma once

// OpenAI-compatible chat-completion client over HTTP(S).

#include <cstdlib>
#include <string>

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include "roomopt/llm/provider.hpp"

namespace roomopt::llm {

inline constexpr const char* kApiKeyEnv = "ROOMOPT_API_KEY";
inline constexpr const char* kApiBaseEnv = "ROOMOPT_API_BASE";
inline constexpr const char* kModelEnv = "ROOMOPT_MODEL";

struct HttpSettings {
  std::string base_url = "https://api.openai.com";
  std::string path = "/v1/chat/completions";
  std::string model = "gpt-4o";
  std::string api_key;
  int timeout_seconds = 120;

  /// Key, base URL and model from the environment, when set.
  static HttpSettings from_env() {
    HttpSettings s;
    if (const char* k = std::getenv(kApiKeyEnv)) s.api_key = k;
    if (const char* b = std::getenv(kApiBaseEnv); b && *b) s.base_url = b;
    if (const char* m = std::getenv(kModelEnv); m && *m) s.model = m;
    return s;
  }
};

class HttpChatProvider : public ChatProvider {
 public:
  explicit HttpChatProvider(HttpSettings settings) : settings_(std::move(settings)) {
    if (settings_.api_key.empty()) throw ProviderError(std::string("missing API key (set ") + kApiKeyEnv + ")");
  }

  std::string complete(const ChatRequest& request) override {
    httplib::Client client(settings_.base_url);
    client.set_read_timeout(settings_.timeout_seconds, 0);
    client.set_bearer_token_auth(settings_.api_key);
    json body = {{"model", settings_.model},
                 {"messages", request.messages},
                 {"temperature", request.temperature},
                 {"max_tokens", request.max_tokens},
                 {"seed", request.seed},
                 {"response_format", {{"type", "json_object"}}}};
    const auto res = client.Post(settings_.path, body.dump(), "application/json");
    if (!res) throw ProviderError("request failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
      throw ProviderError("provider returned HTTP " + std::to_string(res->status) + ": " + res->body);
    try {
      const json reply = json::parse(res->body);
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
      throw ProviderError(std::string("malformed provider reply: ") + e.what());
    }
  }

 private:
  HttpSettings settings_;
};

}  // namespace roomopt::llm
