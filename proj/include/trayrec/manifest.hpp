#pragma once

#include <istream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "trayrec/errors.hpp"
#include "trayrec/feature.hpp"
#include "trayrec/feature_store.hpp"
#include "trayrec/menu.hpp"

namespace trayrec {

namespace detail {

inline const nlohmann::json& require_field(const nlohmann::json& obj, const char* key,
                                           const std::string& context) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(context + " is missing required field \"" + key + "\"");
  }
  return obj.at(key);
}

inline std::string require_string(const nlohmann::json& obj, const char* key,
                                  const std::string& context) {
  const nlohmann::json& v = require_field(obj, key, context);
  if (!v.is_string()) {
    throw ParseError(context + " field \"" + key + "\" must be a string");
  }
  return v.get<std::string>();
}

inline double require_number(const nlohmann::json& obj, const char* key,
                             const std::string& context) {
  const nlohmann::json& v = require_field(obj, key, context);
  if (!v.is_number()) {
    throw ParseError(context + " field \"" + key + "\" must be a number");
  }
  return v.get<double>();
}

inline bool require_bool(const nlohmann::json& obj, const char* key, const std::string& context) {
  const nlohmann::json& v = require_field(obj, key, context);
  if (!v.is_boolean()) {
    throw ParseError(context + " field \"" + key + "\" must be a boolean");
  }
  return v.get<bool>();
}

inline nlohmann::json parse_json_stream(std::istream& source, const std::string& what) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(source);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(what + ": " + e.what());
  }
  return doc;
}

}  // namespace detail

/// Parses a meal manifest without resolving template features. The result
/// carries the menu (categories, classes, nutrition, template ids) but an
/// empty template map; enough for evaluation and nutrition lookups.
inline MealTemplateSet load_meal_menu(const nlohmann::json& doc) {
  using detail::require_bool;
  using detail::require_field;
  using detail::require_number;
  using detail::require_string;

  MealTemplateSet meal;
  meal.meal_id = require_string(doc, "meal_id", "meal manifest");

  const nlohmann::json& categories = require_field(doc, "categories", "meal manifest");
  if (!categories.is_array()) {
    throw ParseError("meal manifest field \"categories\" must be an array");
  }
  for (const nlohmann::json& c : categories) {
    Category category;
    category.id = require_string(c, "id", "category");
    category.name = require_string(c, "name", "category \"" + category.id + "\"");
    category.fine_grained_trigger =
        require_bool(c, "fine_grained_trigger", "category \"" + category.id + "\"");
    if (meal.categories.contains(category.id)) {
      throw ValidationError("duplicate category id \"" + category.id + "\"");
    }
    meal.categories.emplace(category.id, std::move(category));
  }

  const nlohmann::json& classes = require_field(doc, "classes", "meal manifest");
  if (!classes.is_array()) {
    throw ParseError("meal manifest field \"classes\" must be an array");
  }
  for (const nlohmann::json& c : classes) {
    FoodClass food;
    food.id = require_string(c, "id", "class");
    const std::string context = "class \"" + food.id + "\"";
    food.name = require_string(c, "name", context);
    food.category_id = require_string(c, "category_id", context);
    const nlohmann::json& nutrition = require_field(c, "nutrition", context);
    food.nutrition.energy_kcal = require_number(nutrition, "energy_kcal", context + " nutrition");
    food.nutrition.protein_g = require_number(nutrition, "protein_g", context + " nutrition");
    food.nutrition.lipid_g = require_number(nutrition, "lipid_g", context + " nutrition");
    food.nutrition.carbohydrate_g =
        require_number(nutrition, "carbohydrate_g", context + " nutrition");

    const nlohmann::json& ids = require_field(c, "template_feature_ids", context);
    if (!ids.is_array()) {
      throw ParseError(context + " field \"template_feature_ids\" must be an array");
    }
    std::vector<std::string> feature_ids;
    for (const nlohmann::json& id : ids) {
      if (!id.is_string()) {
        throw ParseError(context + " template_feature_ids must contain strings");
      }
      feature_ids.push_back(id.get<std::string>());
    }
    if (feature_ids.empty()) {
      throw ValidationError(context + " declares an empty template list");
    }
    if (meal.classes.contains(food.id)) {
      throw ValidationError("duplicate class id \"" + food.id + "\"");
    }
    if (!meal.categories.contains(food.category_id)) {
      throw ValidationError(context + " references undeclared category \"" + food.category_id +
                            "\"");
    }
    meal.template_ids.emplace(food.id, std::move(feature_ids));
    meal.classes.emplace(food.id, std::move(food));
  }
  return meal;
}

inline MealTemplateSet load_meal_menu(std::istream& source) {
  return load_meal_menu(detail::parse_json_stream(source, "meal manifest"));
}

/// Loads a manifest and resolves every template feature id against the store,
/// normalizing the raw vectors. The result passes validate_meal.
inline MealTemplateSet load_meal_manifest(const nlohmann::json& doc, const FeatureStore& store) {
  MealTemplateSet meal = load_meal_menu(doc);
  for (const auto& [class_id, feature_ids] : meal.template_ids) {
    std::vector<FeatureVector> vecs;
    vecs.reserve(feature_ids.size());
    for (const std::string& fid : feature_ids) {
      const std::vector<double>& raw = store.at(fid);
      try {
        vecs.push_back(normalize(raw, store.dim));
      } catch (const Error& e) {
        throw ValidationError("template feature \"" + fid + "\" of class \"" + class_id +
                              "\": " + e.what());
      }
    }
    meal.templates.emplace(class_id, std::move(vecs));
  }
  validate_meal(meal);
  return meal;
}

inline MealTemplateSet load_meal_manifest(std::istream& source, const FeatureStore& store) {
  return load_meal_manifest(detail::parse_json_stream(source, "meal manifest"), store);
}

/// Inverse of load_meal_manifest (up to JSON formatting): loading the result
/// against the same store reproduces the meal structurally.
inline nlohmann::json serialize_meal_manifest(const MealTemplateSet& meal) {
  nlohmann::json doc;
  doc["meal_id"] = meal.meal_id;
  doc["categories"] = nlohmann::json::array();
  for (const auto& [id, category] : meal.categories) {
    doc["categories"].push_back({{"id", category.id},
                                 {"name", category.name},
                                 {"fine_grained_trigger", category.fine_grained_trigger}});
  }
  doc["classes"] = nlohmann::json::array();
  for (const auto& [id, food] : meal.classes) {
    nlohmann::json entry;
    entry["id"] = food.id;
    entry["name"] = food.name;
    entry["category_id"] = food.category_id;
    entry["nutrition"] = {{"energy_kcal", food.nutrition.energy_kcal},
                          {"protein_g", food.nutrition.protein_g},
                          {"lipid_g", food.nutrition.lipid_g},
                          {"carbohydrate_g", food.nutrition.carbohydrate_g}};
    entry["template_feature_ids"] = meal.template_ids.at(food.id);
    doc["classes"].push_back(std::move(entry));
  }
  return doc;
}

}  // namespace trayrec
