// SPDX-License-Identifier: Apache-2.0

#include "bigfive/datastore.hpp"

#include <algorithm>
#include <numeric>

#include <json.hpp>

#include "bigfive/error.hpp"
#include "bigfive/rng.hpp"
#include "text_util.hpp"

namespace bigfive {

using ojson = nlohmann::ordered_json;

std::string_view to_string(CorpusSource s) noexcept {
  switch (s) {
    case CorpusSource::GENERATED: return "GENERATED";
    case CorpusSource::MOVIE_DIALOGS: return "MOVIE_DIALOGS";
    case CorpusSource::MULTIWOZ: return "MULTIWOZ";
    case CorpusSource::CONVAI: return "CONVAI";
  }
  return "?";
}

std::optional<CorpusSource> parse_source(std::string_view s) noexcept {
  if (s == "GENERATED" || s == "generated") return CorpusSource::GENERATED;
  if (s == "MOVIE_DIALOGS" || s == "movie") return CorpusSource::MOVIE_DIALOGS;
  if (s == "MULTIWOZ" || s == "multiwoz") return CorpusSource::MULTIWOZ;
  if (s == "CONVAI" || s == "convai") return CorpusSource::CONVAI;
  return std::nullopt;
}

std::string_view to_string(Split s) noexcept {
  switch (s) {
    case Split::TRAIN: return "TRAIN";
    case Split::TEST: return "TEST";
    case Split::UNASSIGNED: return "UNASSIGNED";
  }
  return "?";
}

std::optional<Split> parse_split(std::string_view s) noexcept {
  if (s == "TRAIN") return Split::TRAIN;
  if (s == "TEST") return Split::TEST;
  if (s == "UNASSIGNED") return Split::UNASSIGNED;
  return std::nullopt;
}

std::string_view tool_version() noexcept { return BIGFIVE_VERSION; }

std::string to_json_line(const DatasetRecord& r) {
  const auto& m = r.message;
  ojson j;
  j["id"] = m.id;
  j["text"] = m.text;
  j["trait"] = m.trait ? ojson(to_string(*m.trait)) : ojson(nullptr);
  j["polarity"] = m.polarity ? ojson(to_string(*m.polarity)) : ojson(nullptr);
  j["source"] = to_string(m.source);
  j["split"] = to_string(r.split);
  j["conversation_id"] = m.conversation_id ? ojson(*m.conversation_id) : ojson(nullptr);
  j["turn_index"] = m.turn_index ? ojson(*m.turn_index) : ojson(nullptr);
  return j.dump();
}

namespace {

template <typename T, typename Parse>
std::optional<T> optional_enum(const ojson& j, const char* key, Parse parse, std::size_t line) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  auto parsed = parse(v.get<std::string>());
  if (!parsed) throw ParseError(std::string("bad value for '") + key + "'", line);
  return parsed;
}

}  // namespace

DatasetRecord from_json_line(std::string_view line, std::size_t line_no) {
  ojson j;
  try {
    j = ojson::parse(line);
  } catch (const ojson::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
  }
  if (!j.is_object()) throw ParseError("record is not a JSON object", line_no);

  DatasetRecord r;
  try {
    auto& m = r.message;
    m.id = j.at("id").get<std::string>();
    m.text = j.at("text").get<std::string>();
    m.trait = optional_enum<TraitDimension>(j, "trait", parse_trait, line_no);
    m.polarity = optional_enum<Polarity>(j, "polarity", parse_polarity, line_no);
    auto source = parse_source(j.at("source").get<std::string>());
    if (!source) throw ParseError("bad value for 'source'", line_no);
    m.source = *source;
    auto split = parse_split(j.at("split").get<std::string>());
    if (!split) throw ParseError("bad value for 'split'", line_no);
    r.split = *split;
    const auto& conv = j.at("conversation_id");
    if (!conv.is_null()) m.conversation_id = conv.get<std::string>();
    const auto& turn = j.at("turn_index");
    if (!turn.is_null()) m.turn_index = turn.get<std::int64_t>();
  } catch (const ojson::exception& e) {
    throw ParseError(std::string("schema mismatch: ") + e.what(), line_no);
  }

  const auto& m = r.message;
  if (m.id.empty()) throw ParseError("empty id", line_no);
  if (detail::trim(m.text).empty()) throw ParseError("empty text", line_no);
  if (m.trait.has_value() != m.polarity.has_value()) {
    throw ParseError("trait and polarity must be both set or both null", line_no);
  }
  if (m.source == CorpusSource::GENERATED && !m.labeled()) {
    throw ParseError("generated record without a label", line_no);
  }
  if (m.source != CorpusSource::GENERATED && r.split != Split::TEST) {
    throw ParseError("real-corpus record must be in the TEST split", line_no);
  }
  return r;
}

void save_corpus(std::span<const DatasetRecord> records, const std::filesystem::path& path) {
  std::string out;
  for (const auto& r : records) {
    out += to_json_line(r);
    out += '\n';
  }
  detail::write_file_atomic(path, out);
}

std::vector<DatasetRecord> load_corpus(const std::filesystem::path& path) {
  const std::string raw = detail::read_file(path);
  std::vector<DatasetRecord> out;
  std::size_t line_no = 0;
  for (auto line : detail::split_lines(raw)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    out.push_back(from_json_line(line, line_no));
  }
  return out;
}

std::vector<DatasetRecord> make_records(std::vector<LabeledMessage> messages) {
  std::vector<DatasetRecord> out;
  out.reserve(messages.size());
  for (auto& m : messages) {
    const Split split = m.source == CorpusSource::GENERATED ? Split::UNASSIGNED : Split::TEST;
    out.push_back({std::move(m), split});
  }
  return out;
}

std::vector<DatasetRecord> split_holdout(std::vector<DatasetRecord> records,
                                         const SplitSpec& spec) {
  for (const auto& r : records) {
    if (r.message.source != CorpusSource::GENERATED || r.split != Split::UNASSIGNED) {
      throw ContractViolation("split_holdout expects GENERATED, UNASSIGNED records; '" +
                              r.message.id + "' is not");
    }
  }
  if (spec.holdout_count >= records.size()) {
    throw ContractViolation("holdout_count " + std::to_string(spec.holdout_count) +
                            " must be smaller than the " + std::to_string(records.size()) +
                            " generated records");
  }

  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(spec.seed);
  // Partial Fisher-Yates: the first holdout_count slots are a uniform sample.
  for (std::size_t i = 0; i < spec.holdout_count; ++i) {
    std::swap(order[i], order[i + rng.uniform_index(order.size() - i)]);
  }
  for (auto& r : records) r.split = Split::TRAIN;
  for (std::size_t i = 0; i < spec.holdout_count; ++i) records[order[i]].split = Split::TEST;
  return records;
}

std::filesystem::path metadata_path(const std::filesystem::path& artifact) {
  auto p = artifact;
  p += ".meta.json";
  return p;
}

void write_metadata(const std::filesystem::path& artifact, const ArtifactMetadata& meta) {
  ojson j;
  j["tool"] = "bigfive";
  j["version"] = tool_version();
  j["command"] = meta.command;
  j["seed"] = meta.seed;
  j["artifact"] = artifact.filename().string();
  ojson extra = ojson::object();
  for (const auto& [k, v] : meta.extra) extra[k] = v;
  j["details"] = std::move(extra);
  detail::write_file_atomic(metadata_path(artifact), j.dump(2) + "\n");
}

}  // namespace bigfive
