#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trayrec/classify.hpp"
#include "trayrec/errors.hpp"
#include "trayrec/feature.hpp"
#include "trayrec/menu.hpp"
#include "trayrec/region.hpp"

namespace trayrec {

/// One detected dish area with its plate-level feature. Sub-window features
/// may arrive precomputed; when absent they can be derived on demand through
/// a window feature provider.
struct RegionObservation {
  Region region;
  FeatureVector feature;
  std::optional<std::vector<std::pair<Region, FeatureVector>>> sub_windows;
};

/// One tray photo: its detected regions plus optional ground truth.
struct TrayObservation {
  std::string photo_id;
  std::string meal_id;
  std::vector<RegionObservation> regions;
  std::optional<std::set<std::string>> ground_truth;
};

/// Outcome of recognizing one region. fine_classes is empty unless the
/// coarse class's category triggered fine-grained recognition, and every
/// member shares the coarse class's category.
struct RegionResult {
  Region region;
  std::string coarse_class;
  SimilarityScore coarse_score;
  std::set<std::string> fine_classes;
  bool triggered = false;

  friend bool operator==(const RegionResult&, const RegionResult&) = default;
};

struct TrayResult {
  std::string photo_id;
  std::vector<RegionResult> region_results;
  std::set<std::string> predicted_items;

  friend bool operator==(const TrayResult&, const TrayResult&) = default;
};

/// Computes the feature of a window when the tray file carries none.
using WindowFeatureProvider = std::function<FeatureVector(const Region&)>;

struct RecognizerConfig {
  double window_fraction = 0.5;
  double stride_fraction = 0.25;
  bool fine_grained_enabled = true;
  WindowFeatureProvider window_features;
};

/// Square sliding windows over a parent region, row-major. The window side is
/// window_fraction of the parent's short side; the step is stride_fraction of
/// the short side. A final window flush with the right/bottom edge is added
/// when the grid does not divide evenly.
inline std::vector<Region> generate_windows(const Region& parent, double window_fraction,
                                            double stride_fraction) {
  if (!(window_fraction > 0.0 && window_fraction <= 1.0)) {
    throw InvalidParameterError("window_fraction must be in (0, 1]");
  }
  if (!(stride_fraction > 0.0 && stride_fraction <= window_fraction)) {
    throw InvalidParameterError("stride_fraction must be in (0, window_fraction]");
  }
  validate_region(parent, "window parent");

  const int short_side = std::min(parent.width, parent.height);
  const int side = std::max(1, static_cast<int>(std::floor(window_fraction * short_side)));
  const double stride = stride_fraction * short_side;

  const auto offsets = [&](int extent) {
    std::vector<int> out;
    for (std::size_t k = 0;; ++k) {
      const int o = static_cast<int>(std::floor(static_cast<double>(k) * stride));
      if (o + side > extent) {
        break;
      }
      if (out.empty() || out.back() != o) {
        out.push_back(o);
      }
    }
    if (out.empty() || out.back() != extent - side) {
      out.push_back(extent - side);
    }
    return out;
  };

  const std::vector<int> xs = offsets(parent.width);
  const std::vector<int> ys = offsets(parent.height);

  std::vector<Region> windows;
  windows.reserve(xs.size() * ys.size());
  for (int oy : ys) {
    for (int ox : xs) {
      windows.push_back(Region{parent.x + ox, parent.y + oy, side, side});
    }
  }
  return windows;
}

/// Classifies each window and keeps its class only when the class's category
/// matches the coarse category. Returns the deduplicated set.
inline std::set<std::string> fine_grained(const std::string& coarse_category_id,
                                          std::span<const std::pair<Region, FeatureVector>> windows,
                                          const MealTemplateSet& meal) {
  std::set<std::string> kept;
  for (const auto& [window, feature] : windows) {
    const Classification result = classify_single(feature, meal);
    if (meal.category_of(result.class_id).id == coarse_category_id) {
      kept.insert(result.class_id);
    }
  }
  return kept;
}

/// Coarse single-class recognition, then category-gated fine-grained
/// recognition over sub-windows. When fine-grained yields nothing the coarse
/// class stands in, so a detected dish never vanishes from the tray.
inline RegionResult recognize_region(const RegionObservation& obs, const MealTemplateSet& meal,
                                     const RecognizerConfig& cfg = {}) {
  const Classification coarse = classify_single(obs.feature, meal);
  RegionResult out{obs.region, coarse.class_id, coarse.score, {}, false};
  if (!cfg.fine_grained_enabled) {
    return out;
  }
  const Category& category = meal.category_of(coarse.class_id);
  if (!category.fine_grained_trigger) {
    return out;
  }
  out.triggered = true;

  std::vector<std::pair<Region, FeatureVector>> windows;
  if (obs.sub_windows.has_value()) {
    windows = *obs.sub_windows;
  } else if (cfg.window_features) {
    for (const Region& w : generate_windows(obs.region, cfg.window_fraction, cfg.stride_fraction)) {
      windows.emplace_back(w, cfg.window_features(w));
    }
  } else {
    throw MissingWindowFeaturesError("category \"" + category.id +
                                     "\" triggered fine-grained recognition but no sub-window "
                                     "features are available");
  }

  out.fine_classes = fine_grained(category.id, windows, meal);
  if (out.fine_classes.empty()) {
    out.fine_classes.insert(coarse.class_id);
  }
  return out;
}

/// Hierarchical recognition of a whole tray. The predicted item set is the
/// union over regions of the fine classes when triggered, the coarse class
/// otherwise.
inline TrayResult recognize_tray(const TrayObservation& photo, const MealTemplateSet& meal,
                                 const RecognizerConfig& cfg = {}) {
  TrayResult out{photo.photo_id, {}, {}};
  out.region_results.reserve(photo.regions.size());
  for (const RegionObservation& obs : photo.regions) {
    out.region_results.push_back(recognize_region(obs, meal, cfg));
    const RegionResult& r = out.region_results.back();
    if (r.triggered) {
      out.predicted_items.insert(r.fine_classes.begin(), r.fine_classes.end());
    } else {
      out.predicted_items.insert(r.coarse_class);
    }
  }
  return out;
}

/// Single-class baseline: the first stage alone, fine-grained disabled.
inline TrayResult recognize_tray_single(const TrayObservation& photo, const MealTemplateSet& meal) {
  RecognizerConfig cfg;
  cfg.fine_grained_enabled = false;
  return recognize_tray(photo, meal, cfg);
}

}  // namespace trayrec
