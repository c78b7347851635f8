// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bigfive/traits.hpp"

namespace bigfive {

/// One prompt-defined agent: a (trait, polarity, gender) triple and the
/// adjective description it is conditioned on.
struct PersonaSpec {
  std::string id;  // e.g. "OPE-pos-A"
  TraitDimension trait{};
  Polarity polarity{};
  Gender gender{};
  std::string description;

  bool operator==(const PersonaSpec&) const = default;
};

/// Adjective description for a trait pole, with casing and punctuation kept
/// exactly as in the reference table (the Neuroticism row has no period).
std::string_view trait_description(TraitDimension trait, Polarity polarity) noexcept;

/// All 20 personas, ordered trait x polarity x gender.
std::vector<PersonaSpec> enumerate_personas();

/// Looks up a persona by id; throws NotFoundError.
PersonaSpec persona_by_id(std::string_view id);

std::string persona_id(TraitDimension trait, Polarity polarity, Gender gender);

struct PromptOptions {
  // When set, the header reads "your friend, <clause>, who is ...".
  bool gender_clause = true;
  std::string gender_a_clause = "a man";
  std::string gender_b_clause = "a woman";
  // Lower-cases the first letter of the description so it reads as a
  // mid-sentence phrase. Off by default so descriptions stay byte-exact.
  bool lowercase_initial = false;
};

inline constexpr std::string_view kHeaderPrefix =
    "The following is your conversation with your friend";

/// "The following is your conversation with your friend[, <gender>], who is
/// <description>"
std::string build_prompt_header(const PersonaSpec& persona,
                                const PromptOptions& options = {});

/// JSON array of {id, trait, polarity, gender, description}, pretty-printed.
std::string personas_to_json(const std::vector<PersonaSpec>& personas);

}  // namespace bigfive
