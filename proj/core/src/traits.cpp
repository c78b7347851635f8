// SPDX-License-Identifier: Apache-2.0

#include "bigfive/traits.hpp"

namespace bigfive {

std::string_view to_string(TraitDimension t) noexcept {
  switch (t) {
    case TraitDimension::EXT: return "EXT";
    case TraitDimension::AGR: return "AGR";
    case TraitDimension::OPE: return "OPE";
    case TraitDimension::CON: return "CON";
    case TraitDimension::NEU: return "NEU";
  }
  return "?";
}

std::string_view to_string(Polarity p) noexcept {
  return p == Polarity::POSITIVE ? "POSITIVE" : "NEGATIVE";
}

std::string_view to_string(Gender g) noexcept { return g == Gender::A ? "A" : "B"; }

std::optional<TraitDimension> parse_trait(std::string_view s) noexcept {
  for (auto t : kAllTraits) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

std::optional<Polarity> parse_polarity(std::string_view s) noexcept {
  if (s == "POSITIVE") return Polarity::POSITIVE;
  if (s == "NEGATIVE") return Polarity::NEGATIVE;
  return std::nullopt;
}

std::optional<Gender> parse_gender(std::string_view s) noexcept {
  if (s == "A") return Gender::A;
  if (s == "B") return Gender::B;
  return std::nullopt;
}

}  // namespace bigfive
