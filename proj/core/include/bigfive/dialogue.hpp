// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bigfive/error.hpp"
#include "bigfive/message.hpp"
#include "bigfive/personas.hpp"

namespace bigfive {

using CompletionParams = std::map<std::string, std::string>;

/// Raised when a provider fails or returns an empty completion.
class ProviderError : public Error {
 public:
  using Error::Error;
};

/// Text-completion backend. Implementations must tolerate concurrent calls.
class CompletionProvider {
 public:
  virtual ~CompletionProvider() = default;

  virtual std::string name() const = 0;
  /// True when the same (prompt, params) always yields the same text.
  virtual bool deterministic() const = 0;
  /// Whether transient failures are worth retrying.
  virtual bool retryable() const = 0;
  virtual std::string complete(std::string_view prompt, const CompletionParams& params) = 0;
};

enum class Speaker { USER, AGENT };

struct ConversationTurn {
  Speaker speaker = Speaker::USER;
  std::string text;
  std::int64_t turn_index = 0;

  bool operator==(const ConversationTurn&) const = default;
};

struct Conversation {
  std::string id;
  std::string persona_id;
  std::vector<ConversationTurn> turns;
  std::string provider_name;
  std::chrono::system_clock::time_point created_at{};

  bool operator==(const Conversation&) const = default;
};

/// Generation gave up; `partial()` holds every turn produced so far.
class GenerationError : public Error {
 public:
  GenerationError(const std::string& what, Conversation partial)
      : Error(what), partial_(std::move(partial)) {}
  const Conversation& partial() const noexcept { return partial_; }

 private:
  Conversation partial_;
};

/// Checks USER/AGENT alternation starting with USER and contiguous turn
/// indices. Throws ContractViolation.
void check_alternation(std::span<const ConversationTurn> turns);

/// Header, then "You: ..." / "Friend: ..." lines, then a trailing "Friend:"
/// cue. `history` must alternate and end with a USER turn.
std::string render_context(const PersonaSpec& persona,
                           std::span<const ConversationTurn> history,
                           const PromptOptions& options = {});

/// Strips a leading "Friend:" echo and cuts at the first line that starts a
/// new speaker tag. Returns trimmed text, possibly empty.
std::string clean_completion(std::string_view raw);

/// Supplies the human side of a conversation.
class UserTurnSource {
 public:
  virtual ~UserTurnSource() = default;
  virtual std::string next_user_turn(const Conversation& so_far) = 0;
};

/// Replays a fixed list of utterances.
class ScriptedUserSource final : public UserTurnSource {
 public:
  explicit ScriptedUserSource(std::vector<std::string> lines) : lines_(std::move(lines)) {}
  std::string next_user_turn(const Conversation& so_far) override;

 private:
  std::vector<std::string> lines_;
  std::size_t next_ = 0;
};

/// Prompts a person on a terminal.
class InteractiveUserSource final : public UserTurnSource {
 public:
  InteractiveUserSource(std::istream& in, std::ostream& out) : in_(in), out_(out) {}
  std::string next_user_turn(const Conversation& so_far) override;

 private:
  std::istream& in_;
  std::ostream& out_;
};

/// Lets a second completion provider play the user.
class ProviderUserSource final : public UserTurnSource {
 public:
  ProviderUserSource(CompletionProvider& provider, std::uint64_t seed)
      : provider_(provider), seed_(seed) {}
  std::string next_user_turn(const Conversation& so_far) override;

  static constexpr std::string_view kUserHeader =
      "The following is a message you send to your friend about your day.";

 private:
  CompletionProvider& provider_;
  std::uint64_t seed_;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  double backoff_multiplier = 2.0;
};

struct SimulationOptions {
  std::string conversation_id;
  std::uint64_t seed = 0;
  PromptOptions prompt;
  RetryPolicy retry;  // only used when the provider is retryable()
  std::function<std::chrono::system_clock::time_point()> clock;
};

/// Runs `n_exchanges` USER/AGENT exchanges against `provider`.
Conversation simulate_conversation(CompletionProvider& provider, UserTurnSource& users,
                                   const PersonaSpec& persona, int n_exchanges,
                                   const SimulationOptions& options);

/// One message per AGENT turn, labeled with the persona's trait and polarity.
std::vector<LabeledMessage> extract_labeled_messages(const Conversation& conversation,
                                                     const PersonaSpec& persona);

}  // namespace bigfive
