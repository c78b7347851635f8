// SPDX-License-Identifier: Apache-2.0

#include "bigfive/personas.hpp"

#include <cctype>

#include <json.hpp>

#include "bigfive/error.hpp"

namespace bigfive {

std::string_view trait_description(TraitDimension trait, Polarity polarity) noexcept {
  const bool pos = polarity == Polarity::POSITIVE;
  switch (trait) {
    case TraitDimension::NEU:
      return pos ? "Anxious, depressed, angry, and insecure"
                 : "Calm, poised, and emotionally stable.";
    case TraitDimension::OPE:
      return pos ? "Intellectual, imaginative, sensitive, and open-minded."
                 : "down-to-earth, insensitive, and conventional.";
    case TraitDimension::AGR:
      return pos ? "good-natured, compliant, modest, gentle, and cooperative."
                 : "irritable, ruthless, suspicious, and inflexible.";
    case TraitDimension::CON:
      return pos ? "careful, thorough, responsible, organized, and scrupulous."
                 : "irresponsible, disorganized, and unscrupulous.";
    case TraitDimension::EXT:
      return pos ? "sociable, talkative, assertive, and active."
                 : "retiring, reserved, and cautious.";
  }
  return {};
}

std::string persona_id(TraitDimension trait, Polarity polarity, Gender gender) {
  std::string id(to_string(trait));
  id += polarity == Polarity::POSITIVE ? "-pos-" : "-neg-";
  id += to_string(gender);
  return id;
}

std::vector<PersonaSpec> enumerate_personas() {
  std::vector<PersonaSpec> out;
  out.reserve(kClassCount * kAllGenders.size());
  for (auto trait : kAllTraits) {
    for (auto polarity : kAllPolarities) {
      for (auto gender : kAllGenders) {
        out.push_back({persona_id(trait, polarity, gender), trait, polarity, gender,
                       std::string(trait_description(trait, polarity))});
      }
    }
  }
  return out;
}

PersonaSpec persona_by_id(std::string_view id) {
  for (auto& p : enumerate_personas()) {
    if (p.id == id) return p;
  }
  throw NotFoundError("unknown persona id '" + std::string(id) + "'");
}

std::string build_prompt_header(const PersonaSpec& persona, const PromptOptions& options) {
  std::string header(kHeaderPrefix);
  if (options.gender_clause) {
    header += ", ";
    header += persona.gender == Gender::A ? options.gender_a_clause
                                          : options.gender_b_clause;
  }
  header += ", who is ";
  std::string description = persona.description;
  if (options.lowercase_initial && !description.empty()) {
    description[0] = static_cast<char>(
        std::tolower(static_cast<unsigned char>(description[0])));
  }
  header += description;
  return header;
}

std::string personas_to_json(const std::vector<PersonaSpec>& personas) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& p : personas) {
    arr.push_back({{"id", p.id},
                   {"trait", to_string(p.trait)},
                   {"polarity", to_string(p.polarity)},
                   {"gender", to_string(p.gender)},
                   {"description", p.description}});
  }
  return arr.dump(2) + "\n";
}

}  // namespace bigfive
