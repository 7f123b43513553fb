#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ucca {

// Foundational-layer categories. Declaration order is the canonical label
// order used for sorting, serialization and rendering.
enum class Category : std::uint8_t {
  A,  // Participant
  C,  // Center
  D,  // Adverbial
  E,  // Elaborator
  F,  // Function
  G,  // Ground
  H,  // Parallel Scene
  L,  // Linker
  N,  // Connector
  P,  // Process
  Q,  // Quantifier
  R,  // Relator
  S,  // State
  T,  // Time
  CMR,  // Coordinated Main Relation (secondary)
  UNA,  // Unanalyzable (secondary)
};

inline constexpr std::size_t kCategoryCount = 16;
inline constexpr std::size_t kBaseCategoryCount = 14;

inline constexpr std::array<Category, kCategoryCount> kAllCategories = {
    Category::A, Category::C, Category::D, Category::E,   Category::F,   Category::G,
    Category::H, Category::L, Category::N, Category::P,   Category::Q,   Category::R,
    Category::S, Category::T, Category::CMR, Category::UNA};

constexpr bool is_secondary(Category c) { return c == Category::CMR || c == Category::UNA; }

std::string_view abbreviation(Category c);
std::string_view description(Category c);
std::optional<Category> category_from_abbreviation(std::string_view text);

// A set of categories carried by one edge. Order-insensitive: iteration and
// formatting always follow the canonical label order, so "S+A" and "A+S" are
// the same set. Only structural well-formedness (known labels) is enforced
// here; combination rules such as "CMR needs P or S" are validator rules.
class CategorySet {
 public:
  constexpr CategorySet() = default;
  CategorySet(std::initializer_list<Category> labels) {
    for (Category c : labels) insert(c);
  }

  constexpr void insert(Category c) { bits_ |= bit(c); }
  constexpr void erase(Category c) { bits_ &= static_cast<std::uint16_t>(~bit(c)); }
  constexpr bool contains(Category c) const { return (bits_ & bit(c)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  std::size_t size() const;

  constexpr bool contains_any(CategorySet other) const { return (bits_ & other.bits_) != 0; }
  // True iff every label here is also in `other`.
  constexpr bool subset_of(CategorySet other) const { return (bits_ & ~other.bits_) == 0; }
  // The set without CMR and UNA.
  constexpr CategorySet base() const {
    CategorySet s;
    s.bits_ = bits_ & static_cast<std::uint16_t>((1u << kBaseCategoryCount) - 1);
    return s;
  }

  std::vector<Category> labels() const;

  // "A+S", "P+CMR+UNA", ... in canonical order.
  std::string to_string() const;
  // Accepts labels joined by '+', in any order, duplicates allowed.
  static std::optional<CategorySet> parse(std::string_view text);

  constexpr std::uint16_t bits() const { return bits_; }

  friend constexpr bool operator==(CategorySet, CategorySet) = default;
  friend constexpr auto operator<=>(CategorySet a, CategorySet b) { return a.bits_ <=> b.bits_; }

 private:
  static constexpr std::uint16_t bit(Category c) {
    return static_cast<std::uint16_t>(1u << static_cast<unsigned>(c));
  }
  std::uint16_t bits_ = 0;
};

}  // namespace ucca
