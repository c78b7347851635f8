// SPDX-License-Identifier: Apache-2.0

#include "bigfive/corpus_readers.hpp"

#include <algorithm>
#include <numeric>

#include <json.hpp>

#include "bigfive/error.hpp"
#include "bigfive/rng.hpp"
#include "text_util.hpp"

namespace bigfive {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::vector<std::string_view> split_fields(std::string_view line, std::string_view sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  for (;;) {
    const auto next = line.find(sep, pos);
    out.push_back(line.substr(pos, next - pos));
    if (next == std::string_view::npos) break;
    pos = next + sep.size();
  }
  return out;
}

json parse_json_file(const fs::path& path) {
  try {
    return json::parse(detail::read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": invalid JSON: " + e.what());
  }
}

std::string id_string(const json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

void read_multiwoz_doc(const json& doc, const fs::path& path, std::vector<RawUtterance>& out) {
  if (doc.is_array()) {
    for (std::size_t d = 0; d < doc.size(); ++d) {
      const auto& dialogue = doc[d];
      if (!dialogue.is_object() || !dialogue.contains("turns")) {
        throw ParseError(path.string() + ": dialogue " + std::to_string(d) +
                         " has no 'turns' (not MultiWOZ 2.2)");
      }
      const std::string did = dialogue.contains("dialogue_id")
                                  ? id_string(dialogue["dialogue_id"])
                                  : std::to_string(d);
      const auto& turns = dialogue["turns"];
      for (std::size_t t = 0; t < turns.size(); ++t) {
        const auto& turn = turns[t];
        if (!turn.contains("utterance")) continue;
        std::int64_t idx = static_cast<std::int64_t>(t);
        if (turn.contains("turn_id")) {
          const auto& tid = turn["turn_id"];
          idx = tid.is_number() ? tid.get<std::int64_t>() : std::stoll(tid.get<std::string>());
        }
        out.push_back({"multiwoz-" + did + "-" + std::to_string(idx),
                       turn["utterance"].get<std::string>(), did, idx});
      }
    }
    return;
  }
  if (doc.is_object()) {
    for (const auto& [did, dialogue] : doc.items()) {
      if (!dialogue.is_object() || !dialogue.contains("log")) {
        throw ParseError(path.string() + ": entry '" + did + "' has no 'log' (not MultiWOZ 2.1)");
      }
      const auto& log = dialogue["log"];
      for (std::size_t t = 0; t < log.size(); ++t) {
        if (!log[t].contains("text")) continue;
        const auto idx = static_cast<std::int64_t>(t);
        out.push_back({"multiwoz-" + did + "-" + std::to_string(idx),
                       log[t]["text"].get<std::string>(), did, idx});
      }
    }
    return;
  }
  throw ParseError(path.string() + ": unrecognized MultiWOZ layout");
}

}  // namespace

std::vector<RawUtterance> read_movie_dialogs(const fs::path& path) {
  const std::string raw = detail::read_file(path);
  std::vector<RawUtterance> out;
  std::size_t line_no = 0;
  for (auto line : detail::split_lines(raw)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto fields = line.find(" +++$+++ ") != std::string_view::npos
                      ? split_fields(line, " +++$+++ ")
                      : split_fields(line, "\t");
    if (fields.size() < 5) {
      throw ParseError(path.string() + ": expected 5 fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    // The text field itself may contain the separator in a handful of lines.
    std::string text(fields[4]);
    for (std::size_t i = 5; i < fields.size(); ++i) {
      text += ' ';
      text += fields[i];
    }
    const std::string line_id(detail::trim(fields[0]));
    out.push_back({"movie-" + line_id, detail::ensure_utf8(text),
                   std::string(detail::trim(fields[2])), std::nullopt});
  }
  return out;
}

std::vector<RawUtterance> read_multiwoz(const fs::path& path) {
  std::vector<RawUtterance> out;
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(path)) {
      const auto name = entry.path().filename().string();
      if (entry.is_regular_file() && name.starts_with("dialogues_") && name.ends_with(".json")) {
        files.push_back(entry.path());
      }
    }
    if (files.empty()) throw ParseError(path.string() + ": no dialogues_*.json files found");
    std::sort(files.begin(), files.end());
    for (const auto& f : files) read_multiwoz_doc(parse_json_file(f), f, out);
  } else {
    read_multiwoz_doc(parse_json_file(path), path, out);
  }
  return out;
}

std::vector<RawUtterance> read_convai(const fs::path& path) {
  const json doc = parse_json_file(path);
  if (!doc.is_array()) throw ParseError(path.string() + ": ConvAI file must be a JSON array");
  std::vector<RawUtterance> out;
  for (std::size_t d = 0; d < doc.size(); ++d) {
    const auto& dialogue = doc[d];
    const char* key = dialogue.contains("thread") ? "thread"
                      : dialogue.contains("dialog") ? "dialog"
                                                    : nullptr;
    if (!dialogue.is_object() || key == nullptr) {
      throw ParseError(path.string() + ": dialogue " + std::to_string(d) +
                       " has neither 'thread' nor 'dialog'");
    }
    std::string did = std::to_string(d);
    for (const char* id_key : {"dialogId", "dialog_id", "id"}) {
      if (dialogue.contains(id_key)) {
        did = id_string(dialogue[id_key]);
        break;
      }
    }
    const auto& turns = dialogue[key];
    for (std::size_t t = 0; t < turns.size(); ++t) {
      if (!turns[t].contains("text")) continue;
      const auto idx = static_cast<std::int64_t>(t);
      out.push_back({"convai-" + did + "-" + std::to_string(idx),
                     turns[t]["text"].get<std::string>(), did, idx});
    }
  }
  return out;
}

std::vector<LabeledMessage> ingest_external(CorpusSource source, const fs::path& raw_path,
                                            std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ContractViolation("ingest needs n >= 1");
  std::vector<RawUtterance> all;
  switch (source) {
    case CorpusSource::MOVIE_DIALOGS: all = read_movie_dialogs(raw_path); break;
    case CorpusSource::MULTIWOZ: all = read_multiwoz(raw_path); break;
    case CorpusSource::CONVAI: all = read_convai(raw_path); break;
    case CorpusSource::GENERATED:
      throw ContractViolation("GENERATED is not an external corpus");
  }
  std::erase_if(all, [](const RawUtterance& u) { return detail::trim(u.text).empty(); });
  if (n > all.size()) {
    throw ContractViolation("requested " + std::to_string(n) + " utterances but " +
                            raw_path.string() + " has only " + std::to_string(all.size()));
  }

  std::vector<std::size_t> order(all.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(mix_seed(seed, to_string(source)));
  for (std::size_t i = 0; i < n; ++i) {
    std::swap(order[i], order[i + rng.uniform_index(order.size() - i)]);
  }
  order.resize(n);
  std::sort(order.begin(), order.end());

  std::vector<LabeledMessage> out;
  out.reserve(n);
  for (auto i : order) {
    auto& u = all[i];
    LabeledMessage m;
    m.id = std::move(u.id);
    m.text = std::string(detail::trim(u.text));
    m.source = source;
    m.conversation_id = std::move(u.conversation_id);
    m.turn_index = u.turn_index;
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace bigfive
