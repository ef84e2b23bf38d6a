#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace roomopt {

/// Error taxonomy shared by the language, translation and optimization phases.
enum class Category {
  language,
  cleaning,
  translation,
  contradiction,
  optimization,
  validation,
};

inline constexpr std::array<std::string_view, 6> kCategoryNames{
    "language", "cleaning", "translation", "contradiction", "optimization", "validation"};

inline std::string_view to_string(Category c) { return kCategoryNames[static_cast<std::size_t>(c)]; }

inline Category category_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i)
    if (kCategoryNames[i] == s) return static_cast<Category>(i);
  throw std::invalid_argument("unknown diagnostic category: " + std::string(s));
}

struct Diagnostic {
  Category category = Category::validation;
  std::string stage;
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

inline void to_json(nlohmann::json& j, const Diagnostic& d) {
  j = {{"category", std::string(to_string(d.category))}, {"stage", d.stage}, {"message", d.message}};
}

inline void from_json(const nlohmann::json& j, Diagnostic& d) {
  d.category = category_from_string(j.at("category").get<std::string>());
  d.stage = j.value("stage", "");
  d.message = j.at("message").get<std::string>();
}

inline std::map<std::string, int> count_by_category(const std::vector<Diagnostic>& diags) {
  std::map<std::string, int> counts;
  for (auto name : kCategoryNames) counts[std::string(name)] = 0;
  for (const auto& d : diags) ++counts[std::string(to_string(d.category))];
  return counts;
}

}  // namespace roomopt
