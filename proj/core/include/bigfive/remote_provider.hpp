// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "bigfive/dialogue.hpp"

namespace bigfive {

/// OpenAI-style text-completion endpoint. The credential is read from the
/// environment variable named by `api_key_env` at construction time.
struct RemoteProviderConfig {
  std::string endpoint;  // e.g. "https://api.openai.com/v1/completions"
  std::string api_key_env = "BIGFIVE_API_KEY";
  std::string model;
  // Forwarded verbatim into the request body; numeric strings become numbers.
  std::map<std::string, std::string> sampling;
  double requests_per_second = 0.0;  // 0 disables rate limiting
  std::chrono::seconds timeout{60};
};

/// Spaces out calls shared across worker threads.
class RateLimiter {
 public:
  explicit RateLimiter(double per_second);
  void acquire();

 private:
  std::mutex mu_;
  std::chrono::steady_clock::duration interval_{};
  std::chrono::steady_clock::time_point next_{};
};

/// Marked nondeterministic and retryable. Throws ConfigError for a bad
/// endpoint URL; ProviderError for transport, HTTP, or payload failures.
std::unique_ptr<CompletionProvider> remote_provider(RemoteProviderConfig config);

}  // namespace bigfive
