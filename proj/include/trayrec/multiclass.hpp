#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trayrec/classify.hpp"
#include "trayrec/errors.hpp"
#include "trayrec/evaluate.hpp"
#include "trayrec/menu.hpp"
#include "trayrec/recognize.hpp"

namespace trayrec {

/// Global similarity threshold plus the candidate grid used to tune it.
struct ThresholdConfig {
  double theta = 0.5;
  std::vector<double> grid;
};

/// Grids must be ascending and stay inside the similarity range; the
/// largest-theta tie-break in tune_threshold depends on the ordering.
inline void validate_grid(std::span<const double> grid) {
  if (grid.empty()) {
    throw InvalidParameterError("threshold grid is empty");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < -1.0 || grid[i] > 1.0) {
      throw InvalidParameterError("threshold grid values must lie in [-1, 1]");
    }
    if (i > 0 && grid[i] < grid[i - 1]) {
      throw InvalidParameterError("threshold grid must be sorted ascending");
    }
  }
}

/// Evenly spaced candidate thresholds, both ends inclusive.
inline std::vector<double> make_grid(double lo = 0.0, double hi = 1.0, double step = 0.005) {
  if (!(step > 0.0) || hi < lo || lo < -1.0 || hi > 1.0) {
    throw InvalidParameterError("threshold grid must satisfy -1 <= lo <= hi <= 1 and step > 0");
  }
  const auto count = static_cast<std::size_t>((hi - lo) / step + 0.5);
  std::vector<double> grid;
  grid.reserve(count + 1);
  for (std::size_t i = 0; i <= count; ++i) {
    grid.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count == 0 ? 1 : count));
  }
  return grid;
}

/// Every class whose similarity to x reaches theta. May be empty.
inline std::set<std::string> classify_multi(const FeatureVector& x, const MealTemplateSet& meal,
                                            double theta) {
  std::set<std::string> out;
  for (const auto& [class_id, vecs] : meal.templates) {
    if (class_similarity(class_id, x, meal).value >= theta) {
      out.insert(class_id);
    }
  }
  return out;
}

struct MultiRegionResult {
  Region region;
  std::set<std::string> classes;
};

struct MultiTrayResult {
  std::string photo_id;
  std::vector<MultiRegionResult> region_results;
  std::set<std::string> predicted_items;
};

/// Threshold baseline over a whole tray: the prediction is the union of the
/// per-region threshold sets, mirroring the hierarchical union rule.
inline MultiTrayResult predict_tray_multi(const TrayObservation& photo,
                                          const MealTemplateSet& meal, double theta) {
  MultiTrayResult out;
  out.photo_id = photo.photo_id;
  out.region_results.reserve(photo.regions.size());
  for (const RegionObservation& obs : photo.regions) {
    MultiRegionResult r{obs.region, classify_multi(obs.feature, meal, theta)};
    out.predicted_items.insert(r.classes.begin(), r.classes.end());
    out.region_results.push_back(std::move(r));
  }
  return out;
}

/// One tune/test split. Within a fold the two sides partition the photo set.
struct Fold {
  std::vector<std::string> tune;
  std::vector<std::string> test;
};

struct FoldPlan {
  std::vector<Fold> folds;
};

namespace detail {

/// Fisher-Yates with an explicit uniform draw, so the permutation depends
/// only on the seed, not on the standard library's distribution internals.
inline void seeded_shuffle(std::vector<std::string>& items, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(engine() % i);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace detail

/// Shuffles the photos by seed and cuts fold_count tune parts of exactly
/// floor(n / fold_count) photos each. Whatever the division leaves over is
/// only ever used for testing.
inline FoldPlan make_fold_plan(std::span<const std::string> photo_ids, int fold_count,
                               std::uint64_t seed) {
  if (fold_count < 2) {
    throw InvalidParameterError("fold count must be at least 2");
  }
  const std::size_t n = photo_ids.size();
  const std::size_t part = n / static_cast<std::size_t>(fold_count);
  if (part == 0) {
    throw InsufficientDataError("cannot build " + std::to_string(fold_count) + " folds from " +
                                std::to_string(n) + " photos");
  }
  std::vector<std::string> order(photo_ids.begin(), photo_ids.end());
  detail::seeded_shuffle(order, seed);

  FoldPlan plan;
  plan.folds.reserve(static_cast<std::size_t>(fold_count));
  for (int f = 0; f < fold_count; ++f) {
    const std::size_t begin = static_cast<std::size_t>(f) * part;
    const std::size_t end = begin + part;
    Fold fold;
    fold.tune.assign(order.begin() + static_cast<std::ptrdiff_t>(begin),
                     order.begin() + static_cast<std::ptrdiff_t>(end));
    for (std::size_t i = 0; i < n; ++i) {
      if (i < begin || i >= end) {
        fold.test.push_back(order[i]);
      }
    }
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

namespace detail {

struct ScoredRegion {
  std::vector<std::pair<const std::string*, double>> class_scores;
};

struct ScoredTray {
  const TrayObservation* tray = nullptr;
  std::vector<ScoredRegion> regions;
};

inline std::vector<ScoredTray> score_trays(std::span<const TrayObservation> trays,
                                           const MealIndex& meals) {
  std::vector<ScoredTray> scored;
  scored.reserve(trays.size());
  for (const TrayObservation& tray : trays) {
    const MealTemplateSet& meal = meal_for(meals, tray.meal_id);
    ScoredTray st;
    st.tray = &tray;
    st.regions.reserve(tray.regions.size());
    for (const RegionObservation& obs : tray.regions) {
      ScoredRegion sr;
      sr.class_scores.reserve(meal.templates.size());
      for (const auto& [class_id, vecs] : meal.templates) {
        sr.class_scores.emplace_back(&class_id, class_similarity(class_id, obs.feature, meal).value);
      }
      st.regions.push_back(std::move(sr));
    }
    scored.push_back(std::move(st));
  }
  return scored;
}

inline std::set<std::string> thresholded_union(const ScoredTray& tray, double theta) {
  std::set<std::string> predicted;
  for (const ScoredRegion& region : tray.regions) {
    for (const auto& [class_id, score] : region.class_scores) {
      if (score >= theta) {
        predicted.insert(*class_id);
      }
    }
  }
  return predicted;
}

}  // namespace detail

/// Picks the grid threshold maximizing micro-averaged F of multi-class tray
/// prediction on the tune set. Ties go to the largest theta.
inline double tune_threshold(std::span<const TrayObservation> tune_trays, const MealIndex& meals,
                             std::span<const double> grid) {
  validate_grid(grid);
  if (tune_trays.empty()) {
    throw InsufficientDataError("threshold tuning needs at least one photo");
  }
  for (const TrayObservation& tray : tune_trays) {
    if (!tray.ground_truth.has_value()) {
      throw NoGroundTruthError("photo \"" + tray.photo_id + "\" has no ground truth");
    }
  }
  const auto scored = detail::score_trays(tune_trays, meals);

  double best_theta = grid.front();
  double best_f = -1.0;
  for (const double theta : grid) {
    std::size_t tp = 0;
    std::size_t predicted = 0;
    std::size_t truth = 0;
    for (const detail::ScoredTray& tray : scored) {
      const std::set<std::string> pred = detail::thresholded_union(tray, theta);
      const std::set<std::string>& gt = *tray.tray->ground_truth;
      tp += detail::intersection_size(pred, gt);
      predicted += pred.size();
      truth += gt.size();
    }
    const double p = predicted == 0 ? 0.0 : static_cast<double>(tp) / predicted;
    const double r = truth == 0 ? 0.0 : static_cast<double>(tp) / truth;
    const double f = detail::harmonic_f(p, r);
    if (f >= best_f) {
      best_f = f;
      best_theta = theta;
    }
  }
  return best_theta;
}

struct FoldOutcome {
  double theta = 0.0;
  EvalReport report;
};

struct CrossValidationResult {
  std::vector<FoldOutcome> folds;
  EvalReport pooled;
};

/// Cross-validated threshold baseline: per fold, tunes theta on the tune part
/// and evaluates on the rest; the pooled report recomputes every metric over
/// the concatenated test predictions of all folds.
inline CrossValidationResult cross_validate(std::span<const TrayObservation> photos,
                                            const MealIndex& meals, std::span<const double> grid,
                                            int fold_count, std::uint64_t seed) {
  std::vector<std::string> ids;
  std::map<std::string, const TrayObservation*> by_id;
  ids.reserve(photos.size());
  for (const TrayObservation& tray : photos) {
    if (!tray.ground_truth.has_value()) {
      throw NoGroundTruthError("photo \"" + tray.photo_id + "\" has no ground truth");
    }
    if (!by_id.emplace(tray.photo_id, &tray).second) {
      throw ValidationError("duplicate photo id \"" + tray.photo_id + "\"");
    }
    ids.push_back(tray.photo_id);
  }
  const FoldPlan plan = make_fold_plan(ids, fold_count, seed);

  CrossValidationResult out;
  std::vector<PhotoPrediction> pooled;
  for (const Fold& fold : plan.folds) {
    std::vector<TrayObservation> tune_trays;
    tune_trays.reserve(fold.tune.size());
    for (const std::string& id : fold.tune) {
      tune_trays.push_back(*by_id.at(id));
    }
    const double theta = tune_threshold(tune_trays, meals, grid);

    std::vector<PhotoPrediction> fold_predictions;
    fold_predictions.reserve(fold.test.size());
    for (const std::string& id : fold.test) {
      const TrayObservation& tray = *by_id.at(id);
      const MealTemplateSet& meal = meal_for(meals, tray.meal_id);
      const MultiTrayResult result = predict_tray_multi(tray, meal, theta);
      fold_predictions.push_back(
          PhotoPrediction{tray.photo_id, tray.meal_id, result.predicted_items,
                          *tray.ground_truth});
    }
    out.folds.push_back(FoldOutcome{theta, build_report(fold_predictions, meals)});
    pooled.insert(pooled.end(), fold_predictions.begin(), fold_predictions.end());
  }
  out.pooled = build_report(pooled, meals);
  return out;
}

}  // namespace trayrec
