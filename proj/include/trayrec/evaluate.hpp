#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "trayrec/errors.hpp"
#include "trayrec/feature_store.hpp"
#include "trayrec/menu.hpp"

namespace trayrec {

/// Nutrition of a whole tray: one serving of every item on it.
struct TrayNutrition {
  double energy_kcal = 0.0;
  double protein_g = 0.0;
  double lipid_g = 0.0;
  double carbohydrate_g = 0.0;

  friend bool operator==(const TrayNutrition&, const TrayNutrition&) = default;
};

inline TrayNutrition tray_nutrition(const std::set<std::string>& items,
                                    const MealTemplateSet& meal) {
  TrayNutrition total;
  for (const std::string& item : items) {
    const NutritionFacts& n = nutrition_of(item, meal);
    total.energy_kcal += n.energy_kcal;
    total.protein_g += n.protein_g;
    total.lipid_g += n.lipid_g;
    total.carbohydrate_g += n.carbohydrate_g;
  }
  return total;
}

/// Predicted and ground-truth item sets of one photo.
struct PhotoPrediction {
  std::string photo_id;
  std::string meal_id;
  std::set<std::string> predicted;
  std::set<std::string> ground_truth;
};

struct SetMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  // Set when the corresponding denominator (total predicted / total GT) was zero.
  bool precision_degenerate = false;
  bool recall_degenerate = false;
};

namespace detail {

inline std::size_t intersection_size(const std::set<std::string>& a,
                                     const std::set<std::string>& b) {
  std::size_t n = 0;
  for (const std::string& item : a) {
    if (b.contains(item)) {
      ++n;
    }
  }
  return n;
}

inline double harmonic_f(double precision, double recall) {
  const double denom = precision + recall;
  return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

}  // namespace detail

/// Micro-averaged set precision/recall/F: counts are pooled over all photos
/// before dividing.
inline SetMetrics set_metrics(std::span<const PhotoPrediction> predictions) {
  std::size_t tp = 0;
  std::size_t predicted = 0;
  std::size_t truth = 0;
  for (const PhotoPrediction& p : predictions) {
    tp += detail::intersection_size(p.predicted, p.ground_truth);
    predicted += p.predicted.size();
    truth += p.ground_truth.size();
  }
  SetMetrics out;
  out.precision_degenerate = predicted == 0;
  out.recall_degenerate = truth == 0;
  out.precision = predicted == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(predicted);
  out.recall = truth == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(truth);
  out.f_measure = detail::harmonic_f(out.precision, out.recall);
  return out;
}

/// Per-photo (macro) averages, reported alongside the micro metrics. A photo
/// with an empty denominator scores 1 when the other side is empty too,
/// otherwise 0.
inline SetMetrics macro_set_metrics(std::span<const PhotoPrediction> predictions) {
  SetMetrics out;
  if (predictions.empty()) {
    out.precision_degenerate = true;
    out.recall_degenerate = true;
    return out;
  }
  double sum_p = 0.0;
  double sum_r = 0.0;
  double sum_f = 0.0;
  for (const PhotoPrediction& p : predictions) {
    const double tp = static_cast<double>(detail::intersection_size(p.predicted, p.ground_truth));
    const double precision =
        p.predicted.empty() ? (p.ground_truth.empty() ? 1.0 : 0.0) : tp / p.predicted.size();
    const double recall =
        p.ground_truth.empty() ? (p.predicted.empty() ? 1.0 : 0.0) : tp / p.ground_truth.size();
    sum_p += precision;
    sum_r += recall;
    sum_f += detail::harmonic_f(precision, recall);
  }
  const double n = static_cast<double>(predictions.size());
  out.precision = sum_p / n;
  out.recall = sum_r / n;
  out.f_measure = sum_f / n;
  return out;
}

/// Absolute error of one nutrient. mae_relative is absent when the mean
/// ground-truth value is zero (or no photo has ground-truth items).
struct NutrientError {
  double mae = 0.0;
  std::optional<double> mae_relative;
};

struct NutrientErrors {
  NutrientError energy;
  NutrientError protein;
  NutrientError lipid;
  NutrientError carbohydrate;
};

namespace detail {

struct NutritionPair {
  TrayNutrition predicted;
  TrayNutrition truth;
  bool truth_nonempty = false;
};

inline std::vector<NutritionPair> nutrition_pairs(std::span<const PhotoPrediction> predictions,
                                                  const MealIndex& meals) {
  std::vector<NutritionPair> pairs;
  pairs.reserve(predictions.size());
  for (const PhotoPrediction& p : predictions) {
    const MealTemplateSet& meal = meal_for(meals, p.meal_id);
    pairs.push_back(NutritionPair{tray_nutrition(p.predicted, meal),
                                  tray_nutrition(p.ground_truth, meal),
                                  !p.ground_truth.empty()});
  }
  return pairs;
}

inline NutrientError nutrient_error(const std::vector<NutritionPair>& pairs,
                                    double TrayNutrition::* field) {
  NutrientError out;
  if (pairs.empty()) {
    return out;
  }
  double abs_sum = 0.0;
  double gt_sum = 0.0;
  std::size_t gt_count = 0;
  for (const NutritionPair& pair : pairs) {
    abs_sum += std::abs(pair.predicted.*field - pair.truth.*field);
    if (pair.truth_nonempty) {
      gt_sum += pair.truth.*field;
      ++gt_count;
    }
  }
  out.mae = abs_sum / static_cast<double>(pairs.size());
  if (gt_count > 0) {
    const double gt_mean = gt_sum / static_cast<double>(gt_count);
    if (gt_mean > 0.0) {
      out.mae_relative = out.mae / gt_mean;
    }
  }
  return out;
}

}  // namespace detail

/// Mean absolute error of tray nutrition, per nutrient, with the relative
/// form divided by the mean ground-truth value of that nutrient.
inline NutrientErrors nutrition_mae(std::span<const PhotoPrediction> predictions,
                                    const MealIndex& meals) {
  const auto pairs = detail::nutrition_pairs(predictions, meals);
  NutrientErrors out;
  out.energy = detail::nutrient_error(pairs, &TrayNutrition::energy_kcal);
  out.protein = detail::nutrient_error(pairs, &TrayNutrition::protein_g);
  out.lipid = detail::nutrient_error(pairs, &TrayNutrition::lipid_g);
  out.carbohydrate = detail::nutrient_error(pairs, &TrayNutrition::carbohydrate_g);
  return out;
}

/// Pearson correlation between ground-truth and predicted tray energy.
inline double energy_correlation(std::span<const PhotoPrediction> predictions,
                                 const MealIndex& meals) {
  if (predictions.size() < 2) {
    throw DegenerateVarianceError("energy correlation needs at least two photos");
  }
  const auto pairs = detail::nutrition_pairs(predictions, meals);
  double mean_gt = 0.0;
  double mean_pred = 0.0;
  for (const auto& pair : pairs) {
    mean_gt += pair.truth.energy_kcal;
    mean_pred += pair.predicted.energy_kcal;
  }
  mean_gt /= static_cast<double>(pairs.size());
  mean_pred /= static_cast<double>(pairs.size());

  double cov = 0.0;
  double var_gt = 0.0;
  double var_pred = 0.0;
  for (const auto& pair : pairs) {
    const double dg = pair.truth.energy_kcal - mean_gt;
    const double dp = pair.predicted.energy_kcal - mean_pred;
    cov += dg * dp;
    var_gt += dg * dg;
    var_pred += dp * dp;
  }
  if (var_gt <= 0.0 || var_pred <= 0.0) {
    throw DegenerateVarianceError("energy correlation is undefined: a series has zero variance");
  }
  return cov / std::sqrt(var_gt * var_pred);
}

/// Writes `photo_id,gt_energy_kcal,predicted_energy_kcal` rows in input
/// order. Returns the number of data rows.
inline std::size_t export_scatter(std::span<const PhotoPrediction> predictions,
                                  const MealIndex& meals, std::ostream& sink) {
  sink << "photo_id,gt_energy_kcal,predicted_energy_kcal\n";
  std::size_t rows = 0;
  for (const PhotoPrediction& p : predictions) {
    const MealTemplateSet& meal = meal_for(meals, p.meal_id);
    std::string line = p.photo_id;
    line += ',';
    detail::format_double(line, tray_nutrition(p.ground_truth, meal).energy_kcal);
    line += ',';
    detail::format_double(line, tray_nutrition(p.predicted, meal).energy_kcal);
    line += '\n';
    sink.write(line.data(), static_cast<std::streamsize>(line.size()));
    ++rows;
  }
  if (!sink) {
    throw IoError("failed to write scatter CSV");
  }
  return rows;
}

/// Full evaluation of one batch of photos.
struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  bool precision_degenerate = false;
  bool recall_degenerate = false;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f_measure = 0.0;
  NutrientErrors mae;
  std::optional<double> pearson_r_energy;
  std::size_t n_photos = 0;
};

inline EvalReport build_report(std::span<const PhotoPrediction> predictions,
                               const MealIndex& meals) {
  EvalReport report;
  report.n_photos = predictions.size();
  const SetMetrics micro = set_metrics(predictions);
  report.precision = micro.precision;
  report.recall = micro.recall;
  report.f_measure = micro.f_measure;
  report.precision_degenerate = micro.precision_degenerate;
  report.recall_degenerate = micro.recall_degenerate;
  const SetMetrics macro = macro_set_metrics(predictions);
  report.macro_precision = macro.precision;
  report.macro_recall = macro.recall;
  report.macro_f_measure = macro.f_measure;
  report.mae = nutrition_mae(predictions, meals);
  try {
    report.pearson_r_energy = energy_correlation(predictions, meals);
  } catch (const DegenerateVarianceError&) {
    report.pearson_r_energy = std::nullopt;
  }
  return report;
}

inline nlohmann::json report_to_json(const EvalReport& report) {
  const auto nutrient = [](const NutrientError& e) {
    nlohmann::json out;
    out["mae"] = e.mae;
    out["mae_relative"] = e.mae_relative.has_value() ? nlohmann::json(*e.mae_relative)
                                                     : nlohmann::json(nullptr);
    return out;
  };
  nlohmann::json doc;
  doc["n_photos"] = report.n_photos;
  doc["precision"] = report.precision;
  doc["recall"] = report.recall;
  doc["f_measure"] = report.f_measure;
  doc["precision_degenerate"] = report.precision_degenerate;
  doc["recall_degenerate"] = report.recall_degenerate;
  doc["macro_precision"] = report.macro_precision;
  doc["macro_recall"] = report.macro_recall;
  doc["macro_f_measure"] = report.macro_f_measure;
  doc["mae"] = {{"energy_kcal", nutrient(report.mae.energy)},
                {"protein_g", nutrient(report.mae.protein)},
                {"lipid_g", nutrient(report.mae.lipid)},
                {"carbohydrate_g", nutrient(report.mae.carbohydrate)}};
  doc["pearson_r_energy"] = report.pearson_r_energy.has_value()
                                ? nlohmann::json(*report.pearson_r_energy)
                                : nlohmann::json(nullptr);
  return doc;
}

}  // namespace trayrec
