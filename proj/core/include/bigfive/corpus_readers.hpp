// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bigfive/message.hpp"

namespace bigfive {

/// One utterance pulled out of a native corpus distribution.
struct RawUtterance {
  std::string id;
  std::string text;
  std::string conversation_id;
  std::optional<std::int64_t> turn_index;
};

/// Cornell Movie-Dialogs `movie_lines.txt`. Fields are separated by
/// " +++$+++ " (the distributed format) or by tabs:
///   lineID, characterID, movieID, character name, text
/// Only lineID, movieID and text are consulted. Latin-1 input is transcoded
/// to UTF-8.
std::vector<RawUtterance> read_movie_dialogs(const std::filesystem::path& path);

/// MultiWOZ. Accepts a 2.2 `dialogues_*.json` file (array of
/// {dialogue_id, turns: [{turn_id, utterance}]}), a 2.1 `data.json`
/// (object of dialogue_id -> {log: [{text}]}), or a directory, in which case
/// every `dialogues_*.json` below it is read in path order.
std::vector<RawUtterance> read_multiwoz(const std::filesystem::path& path);

/// ConvAI. A JSON array of dialogues; utterances come from `thread[].text`
/// (ConvAI 2017, keyed by `dialogId`) or `dialog[].text` (ConvAI2 layout).
std::vector<RawUtterance> read_convai(const std::filesystem::path& path);

/// Parses `raw_path` with the reader for `source`, drops whitespace-only
/// utterances, and returns a seeded sample of `n` in corpus order. Messages
/// carry no trait label.
std::vector<LabeledMessage> ingest_external(CorpusSource source,
                                            const std::filesystem::path& raw_path,
                                            std::size_t n, std::uint64_t seed);

}  // namespace bigfive
