#pragma once

#include <cstdlib>
#include <string>

#include "httplib.h"
#include "json.hpp"

#include "moralnet/elicitation.hpp"
#include "moralnet/error.hpp"

namespace moralnet {

struct EndpointUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

inline EndpointUrl split_endpoint(const std::string& url) {
  const bool https = url.rfind("https://", 0) == 0;
  if (!https && url.rfind("http://", 0) != 0)
    throw ValidationError("endpoint '" + url + "' must start with http:// or https://");
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (https) throw ValidationError("endpoint '" + url + "' needs HTTPS, which this build lacks");
#endif
  const std::size_t host_start = url.find("://") + 3;
  const std::size_t slash = url.find('/', host_start);
  EndpointUrl e;
  e.origin = url.substr(0, slash);
  e.path = slash == std::string::npos ? "/" : url.substr(slash);
  if (e.origin.size() <= host_start) throw ValidationError("endpoint '" + url + "' has no host");
  return e;
}

// OpenAI-style chat-completion client: POSTs {model, messages, temperature,
// n=1} and returns choices[0].message.content.
class HttpChatClient : public CompletionClient {
 public:
  HttpChatClient(const std::string& url, std::string api_key, double timeout_seconds)
      : endpoint_(split_endpoint(url)), api_key_(std::move(api_key)), timeout_(timeout_seconds) {}

  std::string complete(const ChatRequest& request) override {
    httplib::Client cli(endpoint_.origin);
    const auto secs = static_cast<time_t>(timeout_);
    const auto usecs = static_cast<time_t>((timeout_ - static_cast<double>(secs)) * 1e6);
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    cli.set_write_timeout(secs, usecs);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    auto res = cli.Post(endpoint_.path, headers, to_json(request).dump(), "application/json");
    if (!res) throw Error("request failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw Error("endpoint returned HTTP " + std::to_string(res->status));
    try {
      auto body = nlohmann::json::parse(res->body);
      const auto& choice = body.at("choices").at(0);
      if (choice.contains("message")) return choice.at("message").at("content").get<std::string>();
      return choice.at("text").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(std::string("unexpected completion payload: ") + e.what());
    }
  }

 private:
  EndpointUrl endpoint_;
  std::string api_key_;
  double timeout_;
};

inline constexpr const char* kApiKeyEnv = "MORALNET_API_KEY";

inline std::string api_key_from_env() {
  const char* v = std::getenv(kApiKeyEnv);
  return v ? v : "";
}

}  // namespace moralnet
