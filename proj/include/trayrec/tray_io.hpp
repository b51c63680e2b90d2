#pragma once

#include <istream>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "trayrec/errors.hpp"
#include "trayrec/feature_store.hpp"
#include "trayrec/manifest.hpp"
#include "trayrec/recognize.hpp"
#include "trayrec/region.hpp"

namespace trayrec {

/// File form of one sub-window: geometry plus a feature reference.
struct WindowRecord {
  Region region;
  std::string feature_id;

  friend bool operator==(const WindowRecord&, const WindowRecord&) = default;
};

struct RegionRecord {
  Region region;
  std::string feature_id;
  std::optional<std::vector<WindowRecord>> sub_windows;

  friend bool operator==(const RegionRecord&, const RegionRecord&) = default;
};

/// File form of one tray photo, before feature resolution.
struct TrayRecord {
  std::string photo_id;
  std::string meal_id;
  std::vector<RegionRecord> regions;
  std::optional<std::set<std::string>> ground_truth;

  friend bool operator==(const TrayRecord&, const TrayRecord&) = default;
};

namespace detail {

inline Region region_from_json(const nlohmann::json& obj, const std::string& context) {
  Region r;
  r.x = static_cast<int>(require_number(obj, "x", context));
  r.y = static_cast<int>(require_number(obj, "y", context));
  r.width = static_cast<int>(require_number(obj, "width", context));
  r.height = static_cast<int>(require_number(obj, "height", context));
  return r;
}

inline nlohmann::json region_to_json(const Region& r) {
  return {{"x", r.x}, {"y", r.y}, {"width", r.width}, {"height", r.height}};
}

}  // namespace detail

inline TrayRecord tray_record_from_json(const nlohmann::json& doc) {
  using detail::require_field;
  using detail::require_string;

  TrayRecord tray;
  tray.photo_id = require_string(doc, "photo_id", "tray observation");
  tray.meal_id = require_string(doc, "meal_id", "tray observation");
  const std::string context = "tray \"" + tray.photo_id + "\"";

  const nlohmann::json& regions = require_field(doc, "regions", context);
  if (!regions.is_array()) {
    throw ParseError(context + " field \"regions\" must be an array");
  }
  for (const nlohmann::json& r : regions) {
    RegionRecord record;
    record.region = detail::region_from_json(r, context + " region");
    record.feature_id = require_string(r, "feature_id", context + " region");
    if (r.contains("sub_windows")) {
      const nlohmann::json& windows = r.at("sub_windows");
      if (!windows.is_array()) {
        throw ParseError(context + " field \"sub_windows\" must be an array");
      }
      std::vector<WindowRecord> parsed;
      for (const nlohmann::json& w : windows) {
        WindowRecord window;
        window.region = detail::region_from_json(w, context + " sub-window");
        window.feature_id = require_string(w, "feature_id", context + " sub-window");
        parsed.push_back(std::move(window));
      }
      record.sub_windows = std::move(parsed);
    }
    tray.regions.push_back(std::move(record));
  }

  if (doc.contains("ground_truth")) {
    const nlohmann::json& gt = doc.at("ground_truth");
    if (!gt.is_array()) {
      throw ParseError(context + " field \"ground_truth\" must be an array");
    }
    std::set<std::string> items;
    for (const nlohmann::json& item : gt) {
      if (!item.is_string()) {
        throw ParseError(context + " ground_truth must contain class id strings");
      }
      items.insert(item.get<std::string>());
    }
    tray.ground_truth = std::move(items);
  }
  return tray;
}

inline TrayRecord load_tray_record(std::istream& source) {
  return tray_record_from_json(detail::parse_json_stream(source, "tray observation"));
}

inline nlohmann::json tray_record_to_json(const TrayRecord& tray) {
  nlohmann::json doc;
  doc["photo_id"] = tray.photo_id;
  doc["meal_id"] = tray.meal_id;
  doc["regions"] = nlohmann::json::array();
  for (const RegionRecord& record : tray.regions) {
    nlohmann::json r = detail::region_to_json(record.region);
    r["feature_id"] = record.feature_id;
    if (record.sub_windows.has_value()) {
      nlohmann::json windows = nlohmann::json::array();
      for (const WindowRecord& w : *record.sub_windows) {
        nlohmann::json entry = detail::region_to_json(w.region);
        entry["feature_id"] = w.feature_id;
        windows.push_back(std::move(entry));
      }
      r["sub_windows"] = std::move(windows);
    }
    doc["regions"].push_back(std::move(r));
  }
  if (tray.ground_truth.has_value()) {
    doc["ground_truth"] = *tray.ground_truth;
  }
  return doc;
}

/// Resolves feature references against the store and normalizes them,
/// checking region geometry on the way.
inline TrayObservation resolve_tray(const TrayRecord& tray, const FeatureStore& store) {
  TrayObservation obs;
  obs.photo_id = tray.photo_id;
  obs.meal_id = tray.meal_id;
  obs.ground_truth = tray.ground_truth;
  obs.regions.reserve(tray.regions.size());
  for (const RegionRecord& record : tray.regions) {
    const std::string context = "tray \"" + tray.photo_id + "\" region";
    validate_region(record.region, context);
    std::optional<std::vector<std::pair<Region, FeatureVector>>> windows;
    if (record.sub_windows.has_value()) {
      std::vector<std::pair<Region, FeatureVector>> resolved;
      resolved.reserve(record.sub_windows->size());
      for (const WindowRecord& w : *record.sub_windows) {
        validate_region(w.region, context + " sub-window");
        if (!record.region.contains(w.region)) {
          throw ValidationError(context + " sub-window lies outside its parent region");
        }
        resolved.emplace_back(w.region, normalize(store.at(w.feature_id), store.dim));
      }
      windows = std::move(resolved);
    }
    obs.regions.push_back(RegionObservation{record.region,
                                            normalize(store.at(record.feature_id), store.dim),
                                            std::move(windows)});
  }
  return obs;
}

}  // namespace trayrec
