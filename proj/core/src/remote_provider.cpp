// SPDX-License-Identifier: Apache-2.0

#include "bigfive/remote_provider.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace bigfive {

RateLimiter::RateLimiter(double per_second) {
  if (per_second > 0.0) {
    interval_ = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(1.0 / per_second));
  }
}

void RateLimiter::acquire() {
  if (interval_.count() == 0) return;
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard lock(mu_);
    const auto now = std::chrono::steady_clock::now();
    slot = std::max(now, next_);
    next_ = slot + interval_;
  }
  std::this_thread::sleep_until(slot);
}

namespace {

nlohmann::json as_json_value(const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (!v.empty() && end == v.c_str() + v.size()) {
    if (v.find_first_of(".eE") == std::string::npos) return std::stoll(v);
    return d;
  }
  return v;
}

class RemoteProvider final : public CompletionProvider {
 public:
  explicit RemoteProvider(RemoteProviderConfig config)
      : config_(std::move(config)), limiter_(config_.requests_per_second) {
    const auto scheme_end = config_.endpoint.find("://");
    if (scheme_end == std::string::npos) {
      throw ConfigError("provider endpoint must be an absolute URL: " + config_.endpoint);
    }
    const auto path_start = config_.endpoint.find('/', scheme_end + 3);
    base_ = config_.endpoint.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : config_.endpoint.substr(path_start);
    if (!config_.api_key_env.empty()) {
      if (const char* key = std::getenv(config_.api_key_env.c_str())) api_key_ = key;
    }
  }

  std::string name() const override { return "remote:" + config_.model; }
  bool deterministic() const override { return false; }
  bool retryable() const override { return true; }

  std::string complete(std::string_view prompt, const CompletionParams& params) override {
    nlohmann::json body;
    body["model"] = config_.model;
    body["prompt"] = std::string(prompt);
    body["stop"] = {"\nYou:"};
    for (const auto& [k, v] : config_.sampling) body[k] = as_json_value(v);
    for (const auto& [k, v] : params) body[k] = as_json_value(v);

    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    limiter_.acquire();
    httplib::Client client(base_);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    auto res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res) {
      throw ProviderError("remote provider: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
      throw ProviderError("remote provider: HTTP " + std::to_string(res->status));
    }
    try {
      const auto reply = nlohmann::json::parse(res->body);
      const auto& choice = reply.at("choices").at(0);
      std::string text = choice.contains("text")
                             ? choice.at("text").get<std::string>()
                             : choice.at("message").at("content").get<std::string>();
      if (text.empty()) throw ProviderError("remote provider: empty completion");
      return text;
    } catch (const nlohmann::json::exception& e) {
      throw ProviderError(std::string("remote provider: malformed response: ") + e.what());
    }
  }

 private:
  RemoteProviderConfig config_;
  RateLimiter limiter_;
  std::string base_;
  std::string path_;
  std::string api_key_;
};

}  // namespace

std::unique_ptr<CompletionProvider> remote_provider(RemoteProviderConfig config) {
  return std::make_unique<RemoteProvider>(std::move(config));
}

}  // namespace bigfive
