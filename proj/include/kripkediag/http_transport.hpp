#pragma once

// Chat-completions transport over HTTP(S). Kept out of the umbrella header
// so only the programs that talk to a live model pull in cpp-httplib.

#include <chrono>
#include <cstdlib>
#include <optional>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "kripkediag/hypothesis.hpp"

namespace kdiag::hypo {

inline constexpr const char* kEndpointEnv = "KDIAG_LM_ENDPOINT";
inline constexpr const char* kTokenEnv = "KDIAG_LM_API_KEY";
inline constexpr const char* kModelEnv = "KDIAG_LM_MODEL";

struct EndpointConfig {
  std::string url;  // e.g. https://host/v1/chat/completions
  std::string token;
  std::string model = "default";
  std::chrono::seconds timeout{10};
};

/// Reads the endpoint configuration from the environment; nullopt when no
/// endpoint URL is set.
inline std::optional<EndpointConfig> endpoint_from_env() {
  const char* url = std::getenv(kEndpointEnv);
  if (!url || !*url) return std::nullopt;
  EndpointConfig cfg;
  cfg.url = url;
  if (const char* token = std::getenv(kTokenEnv)) cfg.token = token;
  if (const char* model = std::getenv(kModelEnv); model && *model) cfg.model = model;
  return cfg;
}

class HttpChatTransport : public ChatTransport {
 public:
  explicit HttpChatTransport(EndpointConfig cfg) : cfg_(std::move(cfg)) {
    auto scheme_end = cfg_.url.find("://");
    if (scheme_end == std::string::npos) throw TransportError("endpoint URL needs a scheme: " + cfg_.url);
    auto path_start = cfg_.url.find('/', scheme_end + 3);
    origin_ = cfg_.url.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : cfg_.url.substr(path_start);
  }

  std::string complete(const ChatRequest& request) override {
    httplib::Client client(origin_);
    if (!client.is_valid()) throw TransportError("unsupported endpoint '" + origin_ + "'");
    client.set_connection_timeout(cfg_.timeout);
    client.set_read_timeout(cfg_.timeout);
    client.set_write_timeout(cfg_.timeout);

    httplib::Headers headers;
    if (!cfg_.token.empty()) headers.emplace("Authorization", "Bearer " + cfg_.token);

    nlohmann::json body{{"model", cfg_.model},
                        {"temperature", 0},
                        {"messages",
                         {{{"role", "system"}, {"content", request.system}},
                          {{"role", "user"}, {"content", request.user}}}}};
    auto res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res) throw TransportError("request failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw TransportError("HTTP status " + std::to_string(res->status));

    auto reply = nlohmann::json::parse(res->body, nullptr, false);
    if (reply.is_discarded()) throw TransportError("endpoint returned non-JSON body");
    try {
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
      throw TransportError("endpoint reply has no choices[0].message.content");
    }
  }

 private:
  EndpointConfig cfg_;
  std::string origin_;
  std::string path_;
};

}  // namespace kdiag::hypo
