// SPDX-License-Identifier: Apache-2.0

#include "bigfive/mock_provider.hpp"

#include <array>
#include <optional>
#include <string>

#include "bigfive/rng.hpp"
#include "text_util.hpp"

namespace bigfive {

namespace {

using Words = std::array<std::string_view, 8>;
using Phrases = std::array<std::string_view, 6>;

struct PoleLexicon {
  Words keywords;
  Phrases phrases;
};

// Indexed by class_index(trait, polarity).
const std::array<PoleLexicon, kClassCount> kLexicon{{
    // EXT +
    {{"sociable", "talkative", "assertive", "active", "outgoing", "energetic", "lively", "bold"},
     {"Let's get everyone together and go out tonight!",
      "I love meeting new people at parties.",
      "Just call them up and tell them exactly what you think!",
      "I already invited the whole team for drinks.",
      "Talking it through with a big group always helps me.",
      "Come on, let's do something fun and loud!"}},
    // EXT -
    {{"retiring", "reserved", "cautious", "quiet", "private", "shy", "withdrawn", "low-key"},
     {"I'd rather stay home and think it over quietly.",
      "Maybe keep it low-key and give it some time.",
      "I prefer a quiet evening on my own.",
      "I usually keep to myself in situations like that.",
      "Let's not make a big scene about it.",
      "I need some time alone to recharge first."}},
    // AGR +
    {{"good-natured", "compliant", "modest", "gentle", "cooperative", "kind", "patient",
      "forgiving"},
     {"I'm sorry you're going through that, I'm happy to help.",
      "We can work it out together, I'm sure.",
      "I understand how you feel, be kind to yourself.",
      "Maybe try to see it from their side too.",
      "Let me know how I can support you.",
      "Everyone makes mistakes, let's be gentle about it."}},
    // AGR -
    {{"irritable", "ruthless", "suspicious", "inflexible", "stubborn", "harsh", "blunt",
      "hostile"},
     {"That's your problem, deal with it.",
      "I don't trust them one bit.",
      "Whatever, people like that annoy me.",
      "Stop complaining and fight back.",
      "They're probably lying to you anyway.",
      "I won't change my mind on this."}},
    // OPE +
    {{"intellectual", "imaginative", "sensitive", "open-minded", "curious", "creative",
      "artistic", "inventive"},
     {"What if you tried something completely new?",
      "Imagine the possibilities if you changed direction.",
      "That reminds me of a fascinating book I read.",
      "Maybe there's a creative way to look at it.",
      "I love exploring new ideas and art.",
      "Have you thought about it from a different perspective?"}},
    // OPE -
    {{"down-to-earth", "insensitive", "conventional", "practical", "traditional",
      "routine-minded", "plain", "old-fashioned"},
     {"That's just the way the world works.",
      "You can't always get what you want.",
      "Stick to what works and don't overthink it.",
      "Things were fine the old way.",
      "No point in fancy ideas, just do the job.",
      "Keep it simple and follow the rules."}},
    // CON +
    {{"careful", "thorough", "responsible", "organized", "scrupulous", "punctual", "diligent",
      "methodical"},
     {"Let's make a plan and write down every step.",
      "I already scheduled everything for next week.",
      "Double-check the details before you decide.",
      "I always finish my tasks before the deadline.",
      "Keep a checklist so nothing gets missed.",
      "Being prepared is the responsible thing to do."}},
    // CON -
    {{"irresponsible", "disorganized", "unscrupulous", "careless", "forgetful", "lazy", "sloppy",
      "late"},
     {"I'll deal with it later, maybe.",
      "Who cares about deadlines anyway?",
      "I forgot about that again, oops.",
      "Just wing it, plans are overrated.",
      "I lost my notes somewhere in the mess.",
      "Skip it, nobody will check."}},
    // NEU +
    {{"anxious", "depressed", "angry", "insecure", "worried", "stressed", "nervous", "tense"},
     {"What if everything goes wrong?",
      "I can't stop worrying about it.",
      "This makes me so upset I can't sleep.",
      "I feel like nothing ever works out for me.",
      "Ugh, it's all so frustrating and unfair.",
      "I'm scared they'll think I'm a failure."}},
    // NEU -
    {{"calm", "poised", "emotionally stable", "relaxed", "steady", "composed", "serene",
      "easygoing"},
     {"It'll be fine, take a deep breath.",
      "Stay calm, these things pass.",
      "I'm not too bothered, it's manageable.",
      "Let's handle it one step at a time, no stress.",
      "Keep your cool and it will work out.",
      "Nothing to panic about, really."}},
}};

// Shared across classes so topic words carry no label signal.
constexpr std::array<std::string_view, 10> kTopics{
    "work",       "my family", "the weekend", "money",      "school",
    "this project", "the news", "my neighbors", "the future", "my friends"};

constexpr std::array<std::string_view, 4> kTemplates{
    "Honestly, people say I'm {0} and {1} when it comes to {2}.",
    "You know me, always {0}, maybe a bit {1}, especially about {2}.",
    "I guess I'm just {0} and {1} about {2}.",
    "When it's about {2}, I'm {0} and {1}."};

constexpr std::array<std::string_view, 40> kUserUtterances{
    "The boss keeps making things difficult for me.",
    "I have a big exam coming up next week.",
    "My roommate never cleans the kitchen.",
    "I'm thinking about changing jobs.",
    "We have a family dinner this weekend.",
    "My car broke down again this morning.",
    "I just moved to a new city.",
    "My best friend forgot my birthday.",
    "I got invited to a party on Friday.",
    "The project deadline got moved up.",
    "I've been thinking about learning a new language.",
    "My neighbors are really loud at night.",
    "I spent too much money this month.",
    "My sister wants to borrow my car.",
    "I'm not sure what to do after graduation.",
    "A coworker took credit for my idea.",
    "I started going to the gym.",
    "My phone screen cracked today.",
    "I have to give a presentation tomorrow.",
    "My parents want me to visit more often.",
    "I lost my wallet on the bus.",
    "We're planning a trip for the summer.",
    "My team lost the game yesterday.",
    "I can't decide what to cook tonight.",
    "Someone cut in front of me in line.",
    "I got a new puppy last week.",
    "My internet has been down all day.",
    "I've been asked to lead a new team.",
    "My landlord is raising the rent.",
    "I failed my driving test.",
    "My friend is getting married soon.",
    "I need to finish my taxes.",
    "I had an argument with my partner.",
    "I'm thinking of adopting a cat.",
    "My flight got delayed by five hours.",
    "I was offered a promotion.",
    "My computer crashed and I lost my work.",
    "I want to start my own business.",
    "The weather ruined our picnic plans.",
    "I've been feeling tired lately."};

std::string fill(std::string_view tmpl, std::string_view a, std::string_view b,
                 std::string_view topic) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] == '{' && i + 2 < tmpl.size() && tmpl[i + 2] == '}') {
      const char slot = tmpl[i + 1];
      out += slot == '0' ? a : slot == '1' ? b : topic;
      i += 2;
    } else {
      out += tmpl[i];
    }
  }
  return out;
}

std::optional<std::size_t> match_pole(std::string_view header) {
  const auto sep = header.find(", who is ");
  if (!header.starts_with(kHeaderPrefix) || sep == std::string_view::npos) return std::nullopt;
  const std::string described = detail::lowercase_ascii(header.substr(sep + 9));
  for (auto t : kAllTraits) {
    for (auto p : kAllPolarities) {
      if (detail::lowercase_ascii(trait_description(t, p)) == described) {
        return class_index(t, p);
      }
    }
  }
  return std::nullopt;
}

class MockProvider final : public CompletionProvider {
 public:
  MockProvider(std::uint64_t seed, MockProviderOptions options)
      : seed_(seed), options_(options) {}

  std::string name() const override { return "mock"; }
  bool deterministic() const override { return true; }
  bool retryable() const override { return false; }

  std::string complete(std::string_view prompt, const CompletionParams& params) override {
    const auto lines = detail::split_lines(prompt);
    if (lines.empty()) throw ProviderError("mock: empty prompt");

    std::uint64_t s = mix_seed(seed_, prompt);
    if (auto it = params.find("seed"); it != params.end()) s = mix_seed(s, it->second);
    Rng rng(s);

    if (lines.front() == ProviderUserSource::kUserHeader) {
      return std::string(rng.pick(std::span<const std::string_view>(kUserUtterances)));
    }

    const auto pole = match_pole(lines.front());
    if (!pole) throw ProviderError("mock: prompt lacks a recognizable persona header");
    const PoleLexicon& lex = kLexicon[*pole];

    std::string reply(rng.pick(std::span<const std::string_view>(lex.phrases)));
    const auto first = rng.uniform_index(lex.keywords.size());
    auto second = rng.uniform_index(lex.keywords.size() - 1);
    if (second >= first) ++second;
    reply += ' ';
    reply += fill(kTemplates[rng.uniform_index(kTemplates.size())], lex.keywords[first],
                  lex.keywords[second], kTopics[rng.uniform_index(kTopics.size())]);

    if (options_.echo_speaker_tags) {
      return "Friend: " + reply + "\nYou: " +
             std::string(rng.pick(std::span<const std::string_view>(kUserUtterances)));
    }
    return reply;
  }

 private:
  std::uint64_t seed_;
  MockProviderOptions options_;
};

}  // namespace

std::unique_ptr<CompletionProvider> mock_provider(std::uint64_t seed,
                                                  MockProviderOptions options) {
  return std::make_unique<MockProvider>(seed, options);
}

std::span<const std::string_view> mock_lexicon_keywords(TraitDimension trait,
                                                        Polarity polarity) {
  return kLexicon[class_index(trait, polarity)].keywords;
}

std::span<const std::string_view> mock_lexicon_phrases(TraitDimension trait,
                                                       Polarity polarity) {
  return kLexicon[class_index(trait, polarity)].phrases;
}

std::span<const std::string_view> default_user_utterances() { return kUserUtterances; }

}  // namespace bigfive
