// trayrec command line: synthetic dataset generation, tray recognition with
// the single-class / multi-class / hierarchical methods, threshold tuning by
// cross-validation, and evaluation of prediction files.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "trayrec/trayrec.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw trayrec::IoError("cannot open " + path.string() + " for reading");
  }
  return in;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw trayrec::IoError("cannot open " + path.string() + " for writing");
  }
  return out;
}

trayrec::FeatureStore load_store(const fs::path& path) {
  auto in = open_input(path);
  return trayrec::load_feature_store(in);
}

std::vector<trayrec::TrayRecord> load_tray_records(const std::vector<std::string>& paths) {
  std::vector<trayrec::TrayRecord> records;
  records.reserve(paths.size());
  for (const std::string& path : paths) {
    auto in = open_input(path);
    records.push_back(trayrec::load_tray_record(in));
  }
  return records;
}

json region_to_json(const trayrec::Region& r) {
  return {{"x", r.x}, {"y", r.y}, {"width", r.width}, {"height", r.height}};
}

json nutrition_to_json(const trayrec::TrayNutrition& n) {
  return {{"energy_kcal", n.energy_kcal},
          {"protein_g", n.protein_g},
          {"lipid_g", n.lipid_g},
          {"carbohydrate_g", n.carbohydrate_g}};
}

struct GenerateArgs {
  std::string out_dir;
  trayrec::SyntheticMenuSpec spec;
};

int run_generate(const GenerateArgs& args) {
  const trayrec::SyntheticDataset dataset = trayrec::generate_synthetic_dataset(args.spec);
  trayrec::write_synthetic_dataset(dataset, args.out_dir);
  std::cerr << "wrote " << dataset.trays.size() << " trays, "
            << dataset.meal.classes.size() << " classes, "
            << dataset.store.vectors.size() << " feature vectors to " << args.out_dir << "\n";
  return 0;
}

struct RecognizeArgs {
  std::string meal_path;
  std::string features_path;
  std::vector<std::string> tray_paths;
  std::string method;
  std::optional<double> theta;
  double window_fraction = 0.5;
  double stride_fraction = 0.25;
  std::string out_path;  // empty -> stdout
};

int run_recognize(const RecognizeArgs& args) {
  if (args.method == "multi" && !args.theta.has_value()) {
    throw trayrec::InvalidParameterError("--method multi requires --theta");
  }
  if (args.method != "multi" && args.theta.has_value()) {
    throw trayrec::InvalidParameterError("--theta only applies to --method multi");
  }

  const trayrec::FeatureStore store = load_store(args.features_path);
  auto manifest_in = open_input(args.meal_path);
  const trayrec::MealTemplateSet meal = trayrec::load_meal_manifest(manifest_in, store);

  std::ofstream file_out;
  if (!args.out_path.empty()) {
    file_out = open_output(args.out_path);
  }
  std::ostream& out = args.out_path.empty() ? std::cout : file_out;

  trayrec::RecognizerConfig cfg;
  cfg.window_fraction = args.window_fraction;
  cfg.stride_fraction = args.stride_fraction;

  for (const trayrec::TrayRecord& record : load_tray_records(args.tray_paths)) {
    if (record.meal_id != meal.meal_id) {
      throw trayrec::ValidationError("tray \"" + record.photo_id + "\" references meal \"" +
                                     record.meal_id + "\" but the manifest declares \"" +
                                     meal.meal_id + "\"");
    }
    const trayrec::TrayObservation tray = trayrec::resolve_tray(record, store);

    json line;
    line["photo_id"] = tray.photo_id;
    json regions = json::array();
    std::set<std::string> predicted;

    if (args.method == "multi") {
      const trayrec::MultiTrayResult result =
          trayrec::predict_tray_multi(tray, meal, *args.theta);
      predicted = result.predicted_items;
      for (const trayrec::MultiRegionResult& r : result.region_results) {
        regions.push_back({{"region", region_to_json(r.region)}, {"classes", r.classes}});
      }
    } else {
      const trayrec::TrayResult result = args.method == "single"
                                             ? trayrec::recognize_tray_single(tray, meal)
                                             : trayrec::recognize_tray(tray, meal, cfg);
      predicted = result.predicted_items;
      for (const trayrec::RegionResult& r : result.region_results) {
        regions.push_back({{"region", region_to_json(r.region)},
                           {"coarse_class", r.coarse_class},
                           {"coarse_score", r.coarse_score.value},
                           {"triggered", r.triggered},
                           {"fine_classes", r.fine_classes}});
      }
    }

    line["predicted_items"] = predicted;
    line["region_results"] = std::move(regions);
    line["nutrition"] = nutrition_to_json(trayrec::tray_nutrition(predicted, meal));
    out << line.dump() << "\n";
  }
  if (!out) {
    throw trayrec::IoError("failed to write predictions");
  }
  return 0;
}

struct EvaluateArgs {
  std::string meal_path;
  std::string predictions_path;
  std::vector<std::string> tray_paths;
  std::string scatter_path;
  std::string out_path;
};

int run_evaluate(const EvaluateArgs& args) {
  auto manifest_in = open_input(args.meal_path);
  const trayrec::MealTemplateSet meal = trayrec::load_meal_menu(manifest_in);
  trayrec::MealIndex meals;
  meals.emplace(meal.meal_id, meal);

  std::map<std::string, trayrec::TrayRecord> trays;
  for (trayrec::TrayRecord& record : load_tray_records(args.tray_paths)) {
    const std::string id = record.photo_id;
    if (!trays.emplace(id, std::move(record)).second) {
      throw trayrec::ValidationError("duplicate tray photo id \"" + id + "\"");
    }
  }

  std::vector<trayrec::PhotoPrediction> predictions;
  auto in = open_input(args.predictions_path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::exception& e) {
      throw trayrec::ParseError("predictions line " + std::to_string(line_no) + ": " + e.what());
    }
    trayrec::PhotoPrediction p;
    p.photo_id = trayrec::detail::require_string(doc, "photo_id", "prediction record");
    const json& items = trayrec::detail::require_field(doc, "predicted_items", "prediction record");
    if (!items.is_array()) {
      throw trayrec::ParseError("prediction record field \"predicted_items\" must be an array");
    }
    for (const json& item : items) {
      p.predicted.insert(item.get<std::string>());
    }
    auto tray_it = trays.find(p.photo_id);
    if (tray_it == trays.end()) {
      throw trayrec::ValidationError("prediction for unknown photo \"" + p.photo_id + "\"");
    }
    if (!tray_it->second.ground_truth.has_value()) {
      throw trayrec::NoGroundTruthError("photo \"" + p.photo_id + "\" has no ground truth");
    }
    p.meal_id = tray_it->second.meal_id;
    p.ground_truth = *tray_it->second.ground_truth;
    predictions.push_back(std::move(p));
  }
  if (predictions.size() != trays.size()) {
    throw trayrec::ValidationError("predictions cover " + std::to_string(predictions.size()) +
                                   " photos but " + std::to_string(trays.size()) +
                                   " tray files were given");
  }

  const trayrec::EvalReport report = trayrec::build_report(predictions, meals);
  if (!args.scatter_path.empty()) {
    auto scatter = open_output(args.scatter_path);
    trayrec::export_scatter(predictions, meals, scatter);
  }

  const std::string text = trayrec::report_to_json(report).dump(2) + "\n";
  if (args.out_path.empty()) {
    std::cout << text;
  } else {
    auto out = open_output(args.out_path);
    out << text;
    if (!out) {
      throw trayrec::IoError("failed to write report");
    }
  }
  return 0;
}

struct TuneArgs {
  std::string meal_path;
  std::string features_path;
  std::vector<std::string> tray_paths;
  double grid_min = 0.0;
  double grid_max = 1.0;
  double grid_step = 0.005;
  int folds = 3;
  std::uint64_t seed = 0;
  std::string out_path;
};

int run_tune(const TuneArgs& args) {
  const trayrec::FeatureStore store = load_store(args.features_path);
  auto manifest_in = open_input(args.meal_path);
  const trayrec::MealTemplateSet meal = trayrec::load_meal_manifest(manifest_in, store);
  trayrec::MealIndex meals;
  meals.emplace(meal.meal_id, meal);

  std::vector<trayrec::TrayObservation> trays;
  for (const trayrec::TrayRecord& record : load_tray_records(args.tray_paths)) {
    trays.push_back(trayrec::resolve_tray(record, store));
  }

  const std::vector<double> grid =
      trayrec::make_grid(args.grid_min, args.grid_max, args.grid_step);
  const trayrec::CrossValidationResult result =
      trayrec::cross_validate(trays, meals, grid, args.folds, args.seed);

  json doc;
  doc["folds"] = json::array();
  for (std::size_t i = 0; i < result.folds.size(); ++i) {
    doc["folds"].push_back({{"fold", i},
                            {"theta", result.folds[i].theta},
                            {"report", trayrec::report_to_json(result.folds[i].report)}});
  }
  doc["pooled"] = trayrec::report_to_json(result.pooled);

  const std::string text = doc.dump(2) + "\n";
  if (args.out_path.empty()) {
    std::cout << text;
  } else {
    auto out = open_output(args.out_path);
    out << text;
    if (!out) {
      throw trayrec::IoError("failed to write tuning report");
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-item food tray recognition from per-meal template images"};
  app.require_subcommand(1);
  app.set_config("--config");

  GenerateArgs gen;
  CLI::App* generate = app.add_subcommand("generate", "Write a synthetic dataset");
  generate->add_option("--out", gen.out_dir, "Output directory")->required();
  generate->add_option("--categories", gen.spec.category_count, "Number of categories");
  generate->add_option("--classes-per-category", gen.spec.classes_per_category,
                       "Classes per category");
  generate->add_option("--trigger-categories", gen.spec.trigger_category_count,
                       "Leading categories flagged for fine-grained recognition");
  generate->add_option("--templates-per-class", gen.spec.templates_per_class,
                       "Template images per class");
  generate->add_option("--dim", gen.spec.feature_dim, "Feature dimensionality");
  generate->add_option("--separation", gen.spec.separation,
                       "Distance between same-category class centers");
  generate->add_option("--sigma", gen.spec.noise_sigma, "Expected feature noise norm");
  generate->add_option("--trays", gen.spec.tray_count, "Number of tray photos");
  generate->add_option("--regions-per-tray", gen.spec.regions_per_tray, "Dish regions per tray");
  generate->add_option("--mixed-fraction", gen.spec.mixed_fraction,
                       "Fraction of regions that are mixed plates");
  generate->add_option("--mixed-items", gen.spec.mixed_item_count,
                       "Same-category items per mixed plate");
  generate->add_option("--seed", gen.spec.seed, "Generator seed");

  RecognizeArgs rec;
  CLI::App* recognize = app.add_subcommand("recognize", "Recognize tray photos");
  recognize->add_option("--meal", rec.meal_path, "Meal manifest JSON")->required();
  recognize->add_option("--features", rec.features_path, "Feature store file")->required();
  recognize->add_option("--trays", rec.tray_paths, "Tray observation JSON files")
      ->required()
      ->expected(-1);
  recognize->add_option("--method", rec.method, "single, multi, or hierarchical")
      ->required()
      ->check(CLI::IsMember({"single", "multi", "hierarchical"}));
  double theta_value = 0.0;
  CLI::Option* theta_opt =
      recognize->add_option("--theta", theta_value, "Similarity threshold (multi only)");
  recognize->add_option("--window-fraction", rec.window_fraction,
                        "Window side as a fraction of the region short side");
  recognize->add_option("--stride-fraction", rec.stride_fraction,
                        "Window step as a fraction of the region short side");
  recognize->add_option("--out", rec.out_path, "Predictions output file (default stdout)");

  EvaluateArgs eval;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Score a predictions file");
  evaluate->add_option("--meal", eval.meal_path, "Meal manifest JSON")->required();
  evaluate->add_option("--predictions", eval.predictions_path, "Predictions JSONL")->required();
  evaluate->add_option("--trays", eval.tray_paths, "Tray observation JSON files with ground truth")
      ->required()
      ->expected(-1);
  evaluate->add_option("--scatter", eval.scatter_path, "Write a GT vs estimate energy CSV here");
  evaluate->add_option("--out", eval.out_path, "Report output file (default stdout)");

  TuneArgs tune;
  CLI::App* tune_cmd =
      app.add_subcommand("tune", "Cross-validated similarity threshold tuning");
  tune_cmd->add_option("--meal", tune.meal_path, "Meal manifest JSON")->required();
  tune_cmd->add_option("--features", tune.features_path, "Feature store file")->required();
  tune_cmd->add_option("--trays", tune.tray_paths, "Tray observation JSON files with ground truth")
      ->required()
      ->expected(-1);
  tune_cmd->add_option("--grid-min", tune.grid_min, "Smallest candidate threshold");
  tune_cmd->add_option("--grid-max", tune.grid_max, "Largest candidate threshold");
  tune_cmd->add_option("--grid-step", tune.grid_step, "Grid spacing");
  tune_cmd->add_option("--folds", tune.folds, "Number of cross-validation folds");
  tune_cmd->add_option("--seed", tune.seed, "Shuffle seed");
  tune_cmd->add_option("--out", tune.out_path, "Report output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*generate) {
      return run_generate(gen);
    }
    if (*recognize) {
      if (theta_opt->count() > 0) {
        rec.theta = theta_value;
      }
      return run_recognize(rec);
    }
    if (*evaluate) {
      return run_evaluate(eval);
    }
    if (*tune_cmd) {
      return run_tune(tune);
    }
  } catch (const trayrec::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const trayrec::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
