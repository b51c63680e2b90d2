#pragma once

#include <string>

#include "trayrec/errors.hpp"
#include "trayrec/feature.hpp"
#include "trayrec/menu.hpp"

namespace trayrec {

/// Nearest-neighbour decision: winning class and its similarity.
struct Classification {
  std::string class_id;
  SimilarityScore score;

  friend bool operator==(const Classification&, const Classification&) = default;
};

/// Similarity between a query and one class: the maximum inner product over
/// the class's template vectors.
inline SimilarityScore class_similarity(const std::string& class_id, const FeatureVector& x,
                                        const MealTemplateSet& meal) {
  auto it = meal.templates.find(class_id);
  if (it == meal.templates.end() || it->second.empty()) {
    throw UnknownClassError("class \"" + class_id + "\" has no templates in meal \"" +
                            meal.meal_id + "\"");
  }
  double best = dot(it->second.front(), x);
  for (std::size_t i = 1; i < it->second.size(); ++i) {
    const double s = dot(it->second[i], x);
    if (s > best) {
      best = s;
    }
  }
  return SimilarityScore{best};
}

/// Single-class recognition: argmax of class_similarity over every class in
/// the meal. Ties resolve to the lexicographically smallest class id (the
/// template map iterates in ascending id order, and only a strictly greater
/// score replaces the running best).
inline Classification classify_single(const FeatureVector& x, const MealTemplateSet& meal) {
  if (meal.templates.empty()) {
    throw EmptyTemplateSetError("meal \"" + meal.meal_id + "\" has no template vectors");
  }
  const std::string* best_id = nullptr;
  double best = 0.0;
  for (const auto& [class_id, vecs] : meal.templates) {
    const double s = class_similarity(class_id, x, meal).value;
    if (best_id == nullptr || s > best) {
      best_id = &class_id;
      best = s;
    }
  }
  return Classification{*best_id, SimilarityScore{best}};
}

}  // namespace trayrec
