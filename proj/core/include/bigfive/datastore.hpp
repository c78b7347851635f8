// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bigfive/message.hpp"

namespace bigfive {

enum class Split { TRAIN, TEST, UNASSIGNED };

std::string_view to_string(Split s) noexcept;
std::optional<Split> parse_split(std::string_view s) noexcept;

/// A stored message. Real-corpus records are always TEST.
struct DatasetRecord {
  LabeledMessage message;
  Split split = Split::UNASSIGNED;

  bool operator==(const DatasetRecord&) const = default;
};

struct SplitSpec {
  std::size_t holdout_count = 1000;
  std::uint64_t seed = 0;
};

/// Canonical JSONL line (no trailing newline). Field order is fixed:
/// id, text, trait, polarity, source, split, conversation_id, turn_index.
std::string to_json_line(const DatasetRecord& record);

/// Parses and validates one line; `line_no` is used in error messages.
DatasetRecord from_json_line(std::string_view line, std::size_t line_no = 0);

/// Atomic write: temp file then rename. UTF-8, LF endings.
void save_corpus(std::span<const DatasetRecord> records, const std::filesystem::path& path);

/// Throws ParseError naming the first bad line.
std::vector<DatasetRecord> load_corpus(const std::filesystem::path& path);

/// Wraps freshly generated or ingested messages: generated ones start
/// UNASSIGNED, real-corpus ones go straight to TEST.
std::vector<DatasetRecord> make_records(std::vector<LabeledMessage> messages);

/// Marks exactly `spec.holdout_count` records TEST by seeded uniform sample,
/// the rest TRAIN. Input must be GENERATED and UNASSIGNED.
std::vector<DatasetRecord> split_holdout(std::vector<DatasetRecord> records,
                                         const SplitSpec& spec);

/// Provenance written next to every artifact as "<path>.meta.json".
struct ArtifactMetadata {
  std::string command;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> extra;
};

std::filesystem::path metadata_path(const std::filesystem::path& artifact);
void write_metadata(const std::filesystem::path& artifact, const ArtifactMetadata& meta);

/// Library version string baked in at build time.
std::string_view tool_version() noexcept;

}  // namespace bigfive
