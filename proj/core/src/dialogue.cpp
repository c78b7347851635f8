// SPDX-License-Identifier: Apache-2.0

#include "bigfive/dialogue.hpp"

#include <istream>
#include <ostream>
#include <thread>

#include "bigfive/rng.hpp"
#include "text_util.hpp"

namespace bigfive {

namespace {

constexpr std::string_view kUserTag = "You:";
constexpr std::string_view kAgentTag = "Friend:";

void append_history(std::string& out, std::span<const ConversationTurn> history) {
  for (const auto& turn : history) {
    out += turn.speaker == Speaker::USER ? kUserTag : kAgentTag;
    out += ' ';
    out += turn.text;
    out += '\n';
  }
}

}  // namespace

void check_alternation(std::span<const ConversationTurn> turns) {
  for (std::size_t i = 0; i < turns.size(); ++i) {
    const Speaker expected = i % 2 == 0 ? Speaker::USER : Speaker::AGENT;
    if (turns[i].speaker != expected) {
      throw ContractViolation("turn " + std::to_string(i) +
                              " breaks USER/AGENT alternation");
    }
    if (turns[i].turn_index != static_cast<std::int64_t>(i)) {
      throw ContractViolation("turn " + std::to_string(i) + " has turn_index " +
                              std::to_string(turns[i].turn_index));
    }
    if (detail::trim(turns[i].text).empty()) {
      throw ContractViolation("turn " + std::to_string(i) + " has empty text");
    }
  }
}

std::string render_context(const PersonaSpec& persona,
                           std::span<const ConversationTurn> history,
                           const PromptOptions& options) {
  if (history.empty() || history.back().speaker != Speaker::USER) {
    throw ContractViolation("history must be non-empty and end with a USER turn");
  }
  check_alternation(history);
  std::string out = build_prompt_header(persona, options);
  out += '\n';
  append_history(out, history);
  out += kAgentTag;
  return out;
}

std::string clean_completion(std::string_view raw) {
  std::string_view rest = detail::trim(raw);
  if (rest.starts_with(kAgentTag)) rest.remove_prefix(kAgentTag.size());

  std::string out;
  bool first = true;
  for (std::string_view line : detail::split_lines(rest)) {
    const std::string_view trimmed = detail::trim(line);
    if (!first && (trimmed.starts_with(kUserTag) || trimmed.starts_with(kAgentTag))) break;
    first = false;
    if (trimmed.empty()) continue;
    if (!out.empty()) out += ' ';
    out += trimmed;
  }
  return out;
}

std::string ScriptedUserSource::next_user_turn(const Conversation&) {
  if (next_ >= lines_.size()) {
    throw ContractViolation("user script exhausted after " + std::to_string(lines_.size()) +
                            " lines");
  }
  return lines_[next_++];
}

std::string InteractiveUserSource::next_user_turn(const Conversation& so_far) {
  if (!so_far.turns.empty()) out_ << kAgentTag << ' ' << so_far.turns.back().text << '\n';
  out_ << kUserTag << ' ' << std::flush;
  std::string line;
  while (std::getline(in_, line)) {
    if (!detail::trim(line).empty()) return line;
    out_ << kUserTag << ' ' << std::flush;
  }
  throw ContractViolation("interactive input closed");
}

std::string ProviderUserSource::next_user_turn(const Conversation& so_far) {
  std::string prompt(kUserHeader);
  prompt += '\n';
  append_history(prompt, so_far.turns);
  prompt += kUserTag;
  CompletionParams params{
      {"seed", std::to_string(mix_seed(mix_seed(seed_, so_far.id), so_far.turns.size()))}};
  std::string text = std::string(detail::trim(provider_.complete(prompt, params)));
  if (text.starts_with(kUserTag)) text = std::string(detail::trim(text.substr(kUserTag.size())));
  // Only the first line belongs to the user.
  auto lines = detail::split_lines(text);
  return lines.empty() ? std::string{} : std::string(detail::trim(lines.front()));
}

Conversation simulate_conversation(CompletionProvider& provider, UserTurnSource& users,
                                   const PersonaSpec& persona, int n_exchanges,
                                   const SimulationOptions& options) {
  if (n_exchanges < 1) throw ContractViolation("n_exchanges must be >= 1");

  Conversation conv;
  conv.id = options.conversation_id;
  conv.persona_id = persona.id;
  conv.provider_name = provider.name();
  conv.created_at = options.clock ? options.clock() : std::chrono::system_clock::now();

  const int attempts = provider.retryable() ? std::max(1, options.retry.max_attempts) : 1;

  for (int exchange = 0; exchange < n_exchanges; ++exchange) {
    std::string user_text = std::string(detail::trim(users.next_user_turn(conv)));
    if (user_text.empty()) {
      throw GenerationError("user source produced an empty turn", conv);
    }
    conv.turns.push_back(
        {Speaker::USER, std::move(user_text), static_cast<std::int64_t>(conv.turns.size())});

    const std::string prompt = render_context(persona, conv.turns, options.prompt);
    const auto agent_index = static_cast<std::int64_t>(conv.turns.size());
    const CompletionParams params{
        {"seed", std::to_string(mix_seed(options.seed, static_cast<std::uint64_t>(agent_index)))}};

    std::string reply;
    auto backoff = options.retry.initial_backoff;
    for (int attempt = 1;; ++attempt) {
      try {
        reply = clean_completion(provider.complete(prompt, params));
        if (reply.empty()) throw ProviderError(provider.name() + " returned an empty completion");
        break;
      } catch (const ProviderError& e) {
        if (attempt >= attempts) {
          throw GenerationError("conversation " + conv.id + ": " + e.what() + " (after " +
                                    std::to_string(attempt) + " attempt(s))",
                                conv);
        }
        std::this_thread::sleep_for(backoff);
        backoff = std::chrono::milliseconds(
            static_cast<std::int64_t>(backoff.count() * options.retry.backoff_multiplier));
      }
    }
    conv.turns.push_back({Speaker::AGENT, std::move(reply), agent_index});
  }
  return conv;
}

std::vector<LabeledMessage> extract_labeled_messages(const Conversation& conversation,
                                                     const PersonaSpec& persona) {
  if (conversation.persona_id != persona.id) {
    throw ContractViolation("conversation " + conversation.id + " belongs to persona " +
                            conversation.persona_id + ", not " + persona.id);
  }
  std::vector<LabeledMessage> out;
  for (const auto& turn : conversation.turns) {
    if (turn.speaker != Speaker::AGENT) continue;
    LabeledMessage m;
    m.id = conversation.id + "-t" + std::to_string(turn.turn_index);
    m.text = turn.text;
    m.trait = persona.trait;
    m.polarity = persona.polarity;
    m.source = CorpusSource::GENERATED;
    m.conversation_id = conversation.id;
    m.turn_index = turn.turn_index;
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace bigfive
