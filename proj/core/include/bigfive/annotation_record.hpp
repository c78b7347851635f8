// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

#include "bigfive/traits.hpp"

namespace bigfive {

inline constexpr int kMinRating = 1;
inline constexpr int kMaxRating = 10;

/// One annotator's 1-10 judgement of a message: how strongly the sender shows
/// each trait, and how hard each judgement was.
struct AnnotationRecord {
  std::string annotator_id;
  std::string message_id;
  TraitMap<int> ratings;
  TraitMap<int> difficulty;
  std::string submitted_at;  // ISO-8601 UTC

  bool operator==(const AnnotationRecord&) const = default;
};

/// Throws ValidationError naming every out-of-range or missing field, e.g.
/// "ratings.OPE".
void validate(const AnnotationRecord& record);

/// {"annotator_id","message_id","ratings":{EXT..NEU},"difficulty":{EXT..NEU},
///  "submitted_at"} on one line.
std::string to_json_line(const AnnotationRecord& record);

/// Parses and validates. `difficulty` may also be a single integer, which is
/// then applied to all five traits. Throws ValidationError.
AnnotationRecord annotation_from_json(std::string_view text);

}  // namespace bigfive
