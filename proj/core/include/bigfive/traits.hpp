// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace bigfive {

/// The five personality dimensions, in canonical report order.
enum class TraitDimension { EXT = 0, AGR = 1, OPE = 2, CON = 3, NEU = 4 };

/// POSITIVE is the trait itself, NEGATIVE its opposite (e.g. Non-Extroversion).
enum class Polarity { POSITIVE = 0, NEGATIVE = 1 };

enum class Gender { A = 0, B = 1 };

inline constexpr std::size_t kTraitCount = 5;
inline constexpr std::size_t kClassCount = 2 * kTraitCount;

inline constexpr std::array<TraitDimension, kTraitCount> kAllTraits{
    TraitDimension::EXT, TraitDimension::AGR, TraitDimension::OPE,
    TraitDimension::CON, TraitDimension::NEU};
inline constexpr std::array<Polarity, 2> kAllPolarities{Polarity::POSITIVE,
                                                        Polarity::NEGATIVE};
inline constexpr std::array<Gender, 2> kAllGenders{Gender::A, Gender::B};

constexpr std::size_t index_of(TraitDimension t) noexcept {
  return static_cast<std::size_t>(t);
}
constexpr std::size_t index_of(Polarity p) noexcept {
  return static_cast<std::size_t>(p);
}

/// Index into the 10-way label space: trait-major, positive before negative.
constexpr std::size_t class_index(TraitDimension t, Polarity p) noexcept {
  return 2 * index_of(t) + index_of(p);
}

std::string_view to_string(TraitDimension t) noexcept;
std::string_view to_string(Polarity p) noexcept;
std::string_view to_string(Gender g) noexcept;

std::optional<TraitDimension> parse_trait(std::string_view s) noexcept;
std::optional<Polarity> parse_polarity(std::string_view s) noexcept;
std::optional<Gender> parse_gender(std::string_view s) noexcept;

/// Fixed-size map keyed by TraitDimension. Every trait always has a value.
template <typename T>
class TraitMap {
 public:
  TraitMap() = default;
  explicit TraitMap(const T& fill) { values_.fill(fill); }

  T& operator[](TraitDimension t) noexcept { return values_[index_of(t)]; }
  const T& operator[](TraitDimension t) const noexcept {
    return values_[index_of(t)];
  }

  auto begin() noexcept { return values_.begin(); }
  auto end() noexcept { return values_.end(); }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }
  static constexpr std::size_t size() noexcept { return kTraitCount; }

  bool operator==(const TraitMap&) const = default;

 private:
  std::array<T, kTraitCount> values_{};
};

}  // namespace bigfive
