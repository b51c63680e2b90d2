#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "trayrec/errors.hpp"
#include "trayrec/feature.hpp"

namespace trayrec {

/// Per-serving nutrition facts of one menu item.
struct NutritionFacts {
  double energy_kcal = 0.0;
  double protein_g = 0.0;
  double lipid_g = 0.0;
  double carbohydrate_g = 0.0;

  friend bool operator==(const NutritionFacts&, const NutritionFacts&) = default;
};

/// Group of related classes. Trigger categories invoke fine-grained
/// recognition on top of the single-class estimate.
struct Category {
  std::string id;
  std::string name;
  bool fine_grained_trigger = false;

  friend bool operator==(const Category&, const Category&) = default;
};

/// One menu item; the unit of recognition and nutrition lookup.
struct FoodClass {
  std::string id;
  std::string name;
  std::string category_id;
  NutritionFacts nutrition;

  friend bool operator==(const FoodClass&, const FoodClass&) = default;
};

/// Everything available for one meal sitting: categories, classes, and the
/// template vectors re-captured for that meal. Immutable after load.
struct MealTemplateSet {
  std::string meal_id;
  std::map<std::string, Category> categories;
  std::map<std::string, FoodClass> classes;
  /// class id -> normalized template vectors (each class has at least one).
  std::map<std::string, std::vector<FeatureVector>> templates;
  /// class id -> feature-store ids the templates were resolved from.
  std::map<std::string, std::vector<std::string>> template_ids;

  friend bool operator==(const MealTemplateSet&, const MealTemplateSet&) = default;

  /// Total number of template vectors in the meal.
  std::size_t template_count() const {
    std::size_t n = 0;
    for (const auto& [id, vecs] : templates) {
      n += vecs.size();
    }
    return n;
  }

  const FoodClass& class_at(const std::string& class_id) const {
    auto it = classes.find(class_id);
    if (it == classes.end()) {
      throw UnknownClassError("unknown class id \"" + class_id + "\"");
    }
    return it->second;
  }

  const Category& category_at(const std::string& category_id) const {
    auto it = categories.find(category_id);
    if (it == categories.end()) {
      throw ValidationError("unknown category id \"" + category_id + "\"");
    }
    return it->second;
  }

  /// Category the given class belongs to.
  const Category& category_of(const std::string& class_id) const {
    return category_at(class_at(class_id).category_id);
  }
};

inline NutritionFacts nutrition_of(const std::string& class_id, const MealTemplateSet& meal) {
  return meal.class_at(class_id).nutrition;
}

/// Checks every structural invariant of a fully resolved meal.
inline void validate_meal(const MealTemplateSet& meal) {
  if (meal.meal_id.empty()) {
    throw ValidationError("meal_id must not be empty");
  }
  for (const auto& [id, food] : meal.classes) {
    if (!meal.categories.contains(food.category_id)) {
      throw ValidationError("class \"" + id + "\" references undeclared category \"" +
                            food.category_id + "\"");
    }
    const NutritionFacts& n = food.nutrition;
    for (double v : {n.energy_kcal, n.protein_g, n.lipid_g, n.carbohydrate_g}) {
      if (!std::isfinite(v) || v < 0.0) {
        throw ValidationError("class \"" + id + "\" has a negative or non-finite nutrition value");
      }
    }
    auto t = meal.templates.find(id);
    if (t == meal.templates.end() || t->second.empty()) {
      throw ValidationError("class \"" + id + "\" has an empty template list");
    }
  }
  for (const auto& [id, vecs] : meal.templates) {
    if (!meal.classes.contains(id)) {
      throw ValidationError("template entry references undeclared class \"" + id + "\"");
    }
    for (const FeatureVector& v : vecs) {
      double sum_sq = 0.0;
      for (double x : v.values()) {
        sum_sq += x * x;
      }
      if (std::abs(std::sqrt(sum_sq) - 1.0) > kUnitNormTolerance) {
        throw ValidationError("template vector of class \"" + id + "\" is not unit norm");
      }
    }
  }
}

/// Meals keyed by meal_id, for batches that span several sittings.
using MealIndex = std::map<std::string, MealTemplateSet>;

inline const MealTemplateSet& meal_for(const MealIndex& meals, const std::string& meal_id) {
  auto it = meals.find(meal_id);
  if (it == meals.end()) {
    throw ValidationError("no meal manifest loaded for meal id \"" + meal_id + "\"");
  }
  return it->second;
}

}  // namespace trayrec
