// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "bigfive/traits.hpp"

namespace bigfive {

enum class CorpusSource { GENERATED, MOVIE_DIALOGS, MULTIWOZ, CONVAI };

std::string_view to_string(CorpusSource s) noexcept;
/// Accepts canonical names ("MOVIE_DIALOGS") and CLI short names ("movie").
std::optional<CorpusSource> parse_source(std::string_view s) noexcept;

/// A single utterance. Generated messages carry their persona's label; real
/// corpus messages are unlabeled until annotated.
struct LabeledMessage {
  std::string id;
  std::string text;
  std::optional<TraitDimension> trait;
  std::optional<Polarity> polarity;
  CorpusSource source = CorpusSource::GENERATED;
  std::optional<std::string> conversation_id;
  std::optional<std::int64_t> turn_index;

  bool labeled() const noexcept { return trait.has_value() && polarity.has_value(); }
  bool operator==(const LabeledMessage&) const = default;
};

}  // namespace bigfive
