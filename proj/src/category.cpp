#include "ucca/category.hpp"

#include <bit>

namespace ucca {

namespace {

struct CategoryInfo {
  std::string_view abbreviation;
  std::string_view description;
};

constexpr std::array<CategoryInfo, kCategoryCount> kInfo = {{
    {"A", "Participant"},
    {"C", "Center"},
    {"D", "Adverbial"},
    {"E", "Elaborator"},
    {"F", "Function"},
    {"G", "Ground"},
    {"H", "Parallel Scene"},
    {"L", "Linker"},
    {"N", "Connector"},
    {"P", "Process"},
    {"Q", "Quantifier"},
    {"R", "Relator"},
    {"S", "State"},
    {"T", "Time"},
    {"CMR", "Coordinated Main Relation"},
    {"UNA", "Unanalyzable"},
}};

}  // namespace

std::string_view abbreviation(Category c) { return kInfo[static_cast<std::size_t>(c)].abbreviation; }

std::string_view description(Category c) { return kInfo[static_cast<std::size_t>(c)].description; }

std::optional<Category> category_from_abbreviation(std::string_view text) {
  for (std::size_t i = 0; i < kInfo.size(); ++i) {
    if (kInfo[i].abbreviation == text) return static_cast<Category>(i);
  }
  return std::nullopt;
}

std::size_t CategorySet::size() const { return static_cast<std::size_t>(std::popcount(bits_)); }

std::vector<Category> CategorySet::labels() const {
  std::vector<Category> out;
  for (Category c : kAllCategories) {
    if (contains(c)) out.push_back(c);
  }
  return out;
}

std::string CategorySet::to_string() const {
  std::string out;
  for (Category c : labels()) {
    if (!out.empty()) out += '+';
    out += abbreviation(c);
  }
  return out;
}

std::optional<CategorySet> CategorySet::parse(std::string_view text) {
  CategorySet set;
  if (text.empty()) return std::nullopt;
  std::size_t start = 0;
  while (true) {
    std::size_t plus = text.find('+', start);
    std::string_view part =
        text.substr(start, plus == std::string_view::npos ? std::string_view::npos : plus - start);
    auto c = category_from_abbreviation(part);
    if (!c) return std::nullopt;
    set.insert(*c);
    if (plus == std::string_view::npos) break;
    start = plus + 1;
  }
  return set;
}

}  // namespace ucca
