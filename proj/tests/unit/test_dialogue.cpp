// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <atomic>
#include <sstream>

#include "bigfive/dialogue.hpp"
#include "bigfive/mock_provider.hpp"
#include "bigfive/personas.hpp"

using namespace bigfive;
using namespace std::chrono_literals;

namespace {

// Fails the first `failures` calls, then answers with `reply`.
class FlakyProvider final : public CompletionProvider {
 public:
  FlakyProvider(int failures, std::string reply, bool retryable = true)
      : failures_(failures), reply_(std::move(reply)), retryable_(retryable) {}
  std::string name() const override { return "flaky"; }
  bool deterministic() const override { return false; }
  bool retryable() const override { return retryable_; }
  std::string complete(std::string_view prompt, const CompletionParams&) override {
    last_prompt = std::string(prompt);
    ++calls;
    if (calls <= failures_) throw ProviderError("transient");
    return reply_;
  }
  int calls = 0;
  std::string last_prompt;

 private:
  int failures_;
  std::string reply_;
  bool retryable_;
};

SimulationOptions fast_options() {
  SimulationOptions o;
  o.conversation_id = "c1";
  o.seed = 1;
  o.retry.initial_backoff = 0ms;
  o.clock = [] { return std::chrono::system_clock::time_point{}; };
  return o;
}

}  // namespace

TEST_SUITE("dialogue") {
  TEST_CASE("context renders header, alternating lines and an open Friend cue") {
    PromptOptions plain;
    plain.gender_clause = false;
    plain.lowercase_initial = true;
    const std::vector<ConversationTurn> history = {
        {Speaker::USER, "The boss keeps making things difficult for me.", 0}};
    CHECK(render_context(persona_by_id("OPE-pos-A"), history, plain) ==
          "The following is your conversation with your friend, who is intellectual, "
          "imaginative, sensitive, and open-minded.\n"
          "You: The boss keeps making things difficult for me.\n"
          "Friend:");
  }

  TEST_CASE("context requires a trailing user turn and strict alternation") {
    const auto p = persona_by_id("EXT-pos-A");
    std::vector<ConversationTurn> bad = {{Speaker::USER, "a", 0}, {Speaker::AGENT, "b", 1}};
    CHECK_THROWS_AS(render_context(p, bad), ContractViolation);
    bad = {{Speaker::USER, "a", 0}, {Speaker::USER, "b", 1}};
    CHECK_THROWS_AS(check_alternation(bad), ContractViolation);
    bad = {{Speaker::USER, "a", 0}, {Speaker::AGENT, "b", 2}};
    CHECK_THROWS_AS(check_alternation(bad), ContractViolation);
  }

  TEST_CASE("clean_completion strips echoes and stops at the next speaker") {
    CHECK(clean_completion(" Friend: What can you do to change the situation?") ==
          "What can you do to change the situation?");
    CHECK(clean_completion("Sure thing.\nYou: and then?\nFriend: more") == "Sure thing.");
    CHECK(clean_completion("Line one\n\nline two") == "Line one line two");
    CHECK(clean_completion("   \n ").empty());
  }

  TEST_CASE("retryable failures are retried, then the reply is kept") {
    FlakyProvider provider(2, "Friend: fine by me");
    ScriptedUserSource users({"hello"});
    const auto conv =
        simulate_conversation(provider, users, persona_by_id("AGR-pos-B"), 1, fast_options());
    CHECK(provider.calls == 3);
    REQUIRE(conv.turns.size() == 2);
    CHECK(conv.turns[1].text == "fine by me");
    CHECK(conv.turns[1].speaker == Speaker::AGENT);
  }

  TEST_CASE("exhausted retries raise a GenerationError with the partial transcript") {
    FlakyProvider provider(1000, "never");
    ScriptedUserSource users({"hi", "there"});
    try {
      simulate_conversation(provider, users, persona_by_id("CON-neg-A"), 2, fast_options());
      FAIL("expected GenerationError");
    } catch (const GenerationError& e) {
      CHECK(provider.calls == 3);
      REQUIRE(e.partial().turns.size() == 1);
      CHECK(e.partial().turns[0].text == "hi");
    }
  }

  TEST_CASE("empty completion is a provider error; non-retryable gives up at once") {
    FlakyProvider provider(0, "   ", /*retryable=*/false);
    ScriptedUserSource users({"hi"});
    CHECK_THROWS_AS(
        simulate_conversation(provider, users, persona_by_id("CON-neg-A"), 1, fast_options()),
        GenerationError);
    CHECK(provider.calls == 1);
  }

  TEST_CASE("a finished conversation alternates and yields one message per agent turn") {
    auto provider = mock_provider(0);
    ScriptedUserSource users({"one", "two", "three"});
    const auto persona = persona_by_id("NEU-neg-B");
    auto opts = fast_options();
    opts.conversation_id = "conv-x";
    const auto conv = simulate_conversation(*provider, users, persona, 3, opts);
    REQUIRE(conv.turns.size() == 6);
    check_alternation(conv.turns);
    const auto msgs = extract_labeled_messages(conv, persona);
    REQUIRE(msgs.size() == 3);
    CHECK(msgs[0].id == "conv-x-t1");
    CHECK(msgs[2].id == "conv-x-t5");
    CHECK(msgs[0].trait == TraitDimension::NEU);
    CHECK(msgs[0].polarity == Polarity::NEGATIVE);
    CHECK(msgs[0].conversation_id == "conv-x");
    CHECK(msgs[1].turn_index == 3);
  }

  TEST_CASE("scripted source refuses to run past its script") {
    ScriptedUserSource users({"only"});
    Conversation c;
    CHECK(users.next_user_turn(c) == "only");
    CHECK_THROWS_AS(users.next_user_turn(c), ContractViolation);
  }

  TEST_CASE("interactive source skips blank lines") {
    std::istringstream in("\n  \nhello there\n");
    std::ostringstream out;
    InteractiveUserSource users(in, out);
    CHECK(users.next_user_turn(Conversation{}) == "hello there");
  }

  TEST_CASE("a provider can play the user") {
    auto provider = mock_provider(4);
    ProviderUserSource users(*provider, 4);
    Conversation c;
    c.id = "c";
    const auto line = users.next_user_turn(c);
    CHECK_FALSE(line.empty());
    CHECK(line.find('\n') == std::string::npos);
  }
}

TEST_SUITE("mock_provider") {
  TEST_CASE("same prompt and seed give the same text; the seed param varies it") {
    auto p = mock_provider(7);
    const auto prompt = render_context(persona_by_id("OPE-pos-A"),
                                       std::vector<ConversationTurn>{{Speaker::USER, "hey", 0}});
    const auto a = p->complete(prompt, {{"seed", "1"}});
    CHECK(a == p->complete(prompt, {{"seed", "1"}}));
    bool varied = false;
    for (int s = 2; s < 10 && !varied; ++s) varied = a != p->complete(prompt, {{"seed", std::to_string(s)}});
    CHECK(varied);
    CHECK(p->deterministic());
  }

  TEST_CASE("replies use the persona's own lexicon and none of the opposite pole's") {
    auto p = mock_provider(1);
    for (const auto& persona : enumerate_personas()) {
      const auto prompt = render_context(persona,
                                         std::vector<ConversationTurn>{{Speaker::USER, "hey", 0}});
      const Polarity other =
          persona.polarity == Polarity::POSITIVE ? Polarity::NEGATIVE : Polarity::POSITIVE;
      for (int s = 0; s < 5; ++s) {
        const auto reply = p->complete(prompt, {{"seed", std::to_string(s)}});
        bool own = false;
        for (auto k : mock_lexicon_keywords(persona.trait, persona.polarity)) {
          own |= reply.find(k) != std::string::npos;
        }
        CHECK_MESSAGE(own, persona.id << ": " << reply);
        for (auto k : mock_lexicon_keywords(persona.trait, other)) {
          CHECK_MESSAGE(reply.find(" " + std::string(k) + " ") == std::string::npos,
                        persona.id << ": " << reply);
        }
      }
    }
  }

  TEST_CASE("lexicons are pairwise disjoint") {
    std::map<std::string, int> seen;
    for (auto t : kAllTraits) {
      for (auto pol : {Polarity::POSITIVE, Polarity::NEGATIVE}) {
        for (auto k : mock_lexicon_keywords(t, pol)) ++seen[std::string(k)];
      }
    }
    for (const auto& [word, n] : seen) CHECK_MESSAGE(n == 1, word);
  }

  TEST_CASE("an unknown prompt header is a provider error") {
    auto p = mock_provider(1);
    CHECK_THROWS_AS(p->complete("Tell me a joke.\nYou: hi\nFriend:", {}), ProviderError);
  }

  TEST_CASE("built-in user pool is non-trivial") {
    CHECK(default_user_utterances().size() == 40);
  }
}
