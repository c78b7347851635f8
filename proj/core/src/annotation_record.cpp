// SPDX-License-Identifier: Apache-2.0

#include "bigfive/annotation_record.hpp"

#include <json.hpp>

#include "bigfive/error.hpp"

namespace bigfive {

using ojson = nlohmann::ordered_json;

void validate(const AnnotationRecord& r) {
  std::vector<std::string> bad;
  if (r.annotator_id.empty()) bad.emplace_back("annotator_id");
  if (r.message_id.empty()) bad.emplace_back("message_id");
  for (auto t : kAllTraits) {
    if (r.ratings[t] < kMinRating || r.ratings[t] > kMaxRating) {
      bad.push_back("ratings." + std::string(to_string(t)));
    }
  }
  for (auto t : kAllTraits) {
    if (r.difficulty[t] < kMinRating || r.difficulty[t] > kMaxRating) {
      bad.push_back("difficulty." + std::string(to_string(t)));
    }
  }
  if (bad.empty()) return;
  std::string what = "invalid annotation: ";
  for (std::size_t i = 0; i < bad.size(); ++i) what += (i ? ", " : "") + bad[i];
  throw ValidationError(what, std::move(bad));
}

std::string to_json_line(const AnnotationRecord& r) {
  ojson ratings = ojson::object(), difficulty = ojson::object();
  for (auto t : kAllTraits) {
    ratings[std::string(to_string(t))] = r.ratings[t];
    difficulty[std::string(to_string(t))] = r.difficulty[t];
  }
  ojson j;
  j["annotator_id"] = r.annotator_id;
  j["message_id"] = r.message_id;
  j["ratings"] = std::move(ratings);
  j["difficulty"] = std::move(difficulty);
  j["submitted_at"] = r.submitted_at;
  return j.dump();
}

namespace {

// Integers only; anything else is reported as a bad field.
void read_scale(const ojson& obj, const std::string& field, TraitMap<int>& out,
                std::vector<std::string>& bad) {
  for (auto t : kAllTraits) {
    const std::string key(to_string(t));
    const std::string name = field + "." + key;
    if (!obj.is_object() || !obj.contains(key) || !obj[key].is_number_integer()) {
      bad.push_back(name);
      continue;
    }
    const auto v = obj[key].get<long long>();
    if (v < kMinRating || v > kMaxRating) {
      bad.push_back(name);
      continue;
    }
    out[t] = static_cast<int>(v);
  }
}

}  // namespace

AnnotationRecord annotation_from_json(std::string_view text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const ojson::parse_error& e) {
    throw ValidationError(std::string("invalid JSON: ") + e.what(), {"body"});
  }
  if (!j.is_object()) throw ValidationError("annotation must be a JSON object", {"body"});

  AnnotationRecord r;
  std::vector<std::string> bad;
  for (const char* key : {"annotator_id", "message_id"}) {
    if (!j.contains(key) || !j[key].is_string() || j[key].get<std::string>().empty()) {
      bad.emplace_back(key);
    }
  }
  if (bad.empty()) {
    r.annotator_id = j["annotator_id"].get<std::string>();
    r.message_id = j["message_id"].get<std::string>();
  }
  read_scale(j.contains("ratings") ? j["ratings"] : ojson(), "ratings", r.ratings, bad);

  const ojson diff = j.contains("difficulty") ? j["difficulty"] : ojson();
  if (diff.is_number_integer()) {
    const auto v = diff.get<long long>();
    if (v < kMinRating || v > kMaxRating) {
      bad.emplace_back("difficulty");
    } else {
      r.difficulty = TraitMap<int>(static_cast<int>(v));
    }
  } else {
    read_scale(diff, "difficulty", r.difficulty, bad);
  }

  if (j.contains("submitted_at")) {
    if (j["submitted_at"].is_string()) {
      r.submitted_at = j["submitted_at"].get<std::string>();
    } else {
      bad.emplace_back("submitted_at");
    }
  }
  if (!bad.empty()) {
    std::string what = "invalid annotation: ";
    for (std::size_t i = 0; i < bad.size(); ++i) what += (i ? ", " : "") + bad[i];
    throw ValidationError(what, std::move(bad));
  }
  return r;
}

}  // namespace bigfive
