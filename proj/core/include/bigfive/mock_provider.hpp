// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>

#include "bigfive/dialogue.hpp"

namespace bigfive {

struct MockProviderOptions {
  // Wraps replies in "Friend: ...\nYou: ..." so post-processing gets exercised.
  bool echo_speaker_tags = false;
};

/// Deterministic stand-in for a hosted language model. It reads the persona
/// description out of the prompt header and answers with sentences drawn from
/// a per-(trait, polarity) lexicon. The reply depends only on (seed, prompt,
/// params["seed"]), never on call order.
std::unique_ptr<CompletionProvider> mock_provider(std::uint64_t seed,
                                                  MockProviderOptions options = {});

/// Characteristic adjectives the mock uses for one trait pole. Every reply
/// for that pole contains at least one of them.
std::span<const std::string_view> mock_lexicon_keywords(TraitDimension trait,
                                                        Polarity polarity);

/// Stock phrases the mock opens a reply with for one trait pole.
std::span<const std::string_view> mock_lexicon_phrases(TraitDimension trait,
                                                       Polarity polarity);

/// Neutral everyday openers; the default user script pool.
std::span<const std::string_view> default_user_utterances();

}  // namespace bigfive
