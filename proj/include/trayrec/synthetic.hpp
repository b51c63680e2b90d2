#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "trayrec/errors.hpp"
#include "trayrec/feature.hpp"
#include "trayrec/feature_store.hpp"
#include "trayrec/manifest.hpp"
#include "trayrec/menu.hpp"
#include "trayrec/tray_io.hpp"

namespace trayrec {

/// Knobs of the synthetic dataset generator.
///
/// Class centers are unit vectors built on an orthonormal basis so that two
/// classes of the same category sit exactly `separation` apart and classes of
/// different categories sit sqrt(2) apart. `noise_sigma` is the expected
/// Euclidean norm of the additive feature noise, independent of
/// dimensionality.
struct SyntheticMenuSpec {
  int category_count = 5;
  int classes_per_category = 8;
  int trigger_category_count = 2;
  int templates_per_class = 3;
  int feature_dim = 64;
  double separation = 1.0;
  double noise_sigma = 0.1;
  int tray_count = 100;
  int regions_per_tray = 5;
  double mixed_fraction = 0.4;
  int mixed_item_count = 3;
  std::uint64_t seed = 0;
};

struct SyntheticDataset {
  MealTemplateSet meal;
  FeatureStore store;
  std::vector<TrayRecord> trays;
};

namespace detail {

/// Deterministic RNG helpers on top of mt19937_64. The distributions are
/// hand-rolled so the byte stream does not depend on the standard library's
/// implementation of <random> distributions.
class SyntheticRng {
 public:
  explicit SyntheticRng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  std::size_t uniform_index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) {
      u1 = uniform01();
    }
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline std::vector<std::vector<double>> orthonormal_basis(int count, int dim, SyntheticRng& rng) {
  std::vector<std::vector<double>> basis;
  basis.reserve(static_cast<std::size_t>(count));
  while (basis.size() < static_cast<std::size_t>(count)) {
    std::vector<double> v(static_cast<std::size_t>(dim));
    for (double& x : v) {
      x = rng.gaussian();
    }
    for (const auto& b : basis) {
      double proj = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        proj += v[i] * b[i];
      }
      for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] -= proj * b[i];
      }
    }
    double norm_sq = 0.0;
    for (double x : v) {
      norm_sq += x * x;
    }
    const double norm = std::sqrt(norm_sq);
    if (norm < 1e-8) {
      continue;  // essentially impossible; redraw
    }
    for (double& x : v) {
      x /= norm;
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

inline std::string padded(int value, int width) {
  std::string digits = std::to_string(value);
  if (static_cast<int>(digits.size()) < width) {
    digits.insert(digits.begin(), static_cast<std::size_t>(width) - digits.size(), '0');
  }
  return digits;
}

}  // namespace detail

inline void validate_spec(const SyntheticMenuSpec& spec) {
  const auto fail = [](const std::string& message) { throw InvalidSpecError(message); };
  if (spec.feature_dim < 2) fail("feature_dim must be at least 2");
  if (spec.category_count < 1) fail("category_count must be at least 1");
  if (spec.classes_per_category < 1) fail("classes_per_category must be at least 1");
  if (spec.trigger_category_count < 0 || spec.trigger_category_count > spec.category_count) {
    fail("trigger_category_count must lie in [0, category_count]");
  }
  if (spec.templates_per_class < 1) fail("templates_per_class must be at least 1");
  if (!(spec.separation > 0.0) || spec.separation > std::numbers::sqrt2) {
    fail("separation must lie in (0, sqrt(2)]");
  }
  if (spec.noise_sigma < 0.0) fail("noise_sigma must be non-negative");
  if (spec.tray_count < 0) fail("tray_count must be non-negative");
  if (spec.tray_count > 0 && spec.regions_per_tray < 1) {
    fail("regions_per_tray must be at least 1");
  }
  if (spec.mixed_fraction < 0.0 || spec.mixed_fraction > 1.0) {
    fail("mixed_fraction must lie in [0, 1]");
  }
  const int total_classes = spec.category_count * spec.classes_per_category;
  if (spec.category_count + total_classes > spec.feature_dim) {
    fail("feature_dim must be at least category_count * (classes_per_category + 1) to place "
         "orthogonal class centers");
  }
  const int mixed_per_tray =
      static_cast<int>(std::llround(spec.regions_per_tray * spec.mixed_fraction));
  if (spec.tray_count > 0 && mixed_per_tray > 0) {
    if (spec.mixed_item_count < 2) fail("mixed_item_count must be at least 2");
    if (spec.trigger_category_count < 1) {
      fail("mixed plates need at least one trigger category");
    }
    const int plates_per_category =
        (mixed_per_tray + spec.trigger_category_count - 1) / spec.trigger_category_count;
    if (plates_per_category * (spec.mixed_item_count + 1) > spec.classes_per_category) {
      fail("classes_per_category is too small for the requested mixed plates");
    }
  }
  if (spec.tray_count > 0 && spec.regions_per_tray + mixed_per_tray * spec.mixed_item_count >
                                 total_classes) {
    fail("not enough classes to fill a tray with distinct items");
  }
}

/// Builds a complete deterministic dataset: manifest, raw feature store, and
/// tray observations with ground truth.
///
/// Plain plates carry one item; their feature is the class center plus noise.
/// Mixed plates blend the centers of `mixed_item_count` same-category items
/// with a dominant weight on the first, plus a small admixture of one more
/// "garnish" class of the same category that is NOT part of the ground truth.
/// Only the true members appear as sub-windows. The garnish term keeps the
/// whole-plate similarities of minor members and absent category-mates
/// overlapping, so no single global threshold separates them, while window
/// features stay trivially separable.
inline SyntheticDataset generate_synthetic_dataset(const SyntheticMenuSpec& spec) {
  validate_spec(spec);
  detail::SyntheticRng rng(spec.seed);

  const int total_classes = spec.category_count * spec.classes_per_category;
  const auto basis =
      detail::orthonormal_basis(spec.category_count + total_classes, spec.feature_dim, rng);

  // alpha scales the shared category direction; separation is the realized
  // distance between same-category centers.
  const double alpha = std::sqrt(std::max(0.0, 1.0 - spec.separation * spec.separation / 2.0));
  const double beta = std::sqrt(1.0 - alpha * alpha);
  const double coord_sigma =
      spec.noise_sigma / std::sqrt(static_cast<double>(spec.feature_dim));

  SyntheticDataset out;
  out.meal.meal_id = "synthetic_meal";
  out.store.dim = static_cast<std::size_t>(spec.feature_dim);

  std::vector<std::vector<double>> centers(static_cast<std::size_t>(total_classes));
  std::vector<std::vector<int>> category_classes(static_cast<std::size_t>(spec.category_count));

  const auto noisy = [&](const std::vector<double>& base) {
    std::vector<double> v = base;
    for (double& x : v) {
      x += coord_sigma * rng.gaussian();
    }
    return v;
  };

  for (int c = 0; c < spec.category_count; ++c) {
    Category category;
    category.id = "cat" + detail::padded(c, 2);
    category.name = "Category " + std::to_string(c);
    category.fine_grained_trigger = c < spec.trigger_category_count;
    out.meal.categories.emplace(category.id, category);
  }

  for (int y = 0; y < total_classes; ++y) {
    const int category_index = y / spec.classes_per_category;
    category_classes[static_cast<std::size_t>(category_index)].push_back(y);

    auto& center = centers[static_cast<std::size_t>(y)];
    center.resize(static_cast<std::size_t>(spec.feature_dim));
    const auto& u = basis[static_cast<std::size_t>(category_index)];
    const auto& w = basis[static_cast<std::size_t>(spec.category_count + y)];
    for (int i = 0; i < spec.feature_dim; ++i) {
      center[static_cast<std::size_t>(i)] =
          alpha * u[static_cast<std::size_t>(i)] + beta * w[static_cast<std::size_t>(i)];
    }

    FoodClass food;
    food.id = "cls" + detail::padded(y, 3);
    food.name = "Item " + std::to_string(y);
    food.category_id = "cat" + detail::padded(category_index, 2);
    food.nutrition.energy_kcal = rng.uniform(10.0, 400.0);
    food.nutrition.protein_g = rng.uniform(1.0, 40.0);
    food.nutrition.lipid_g = rng.uniform(1.0, 40.0);
    food.nutrition.carbohydrate_g = rng.uniform(1.0, 80.0);

    std::vector<std::string> template_ids;
    std::vector<FeatureVector> templates;
    for (int k = 0; k < spec.templates_per_class; ++k) {
      std::string feature_id = "tpl_" + food.id + "_" + std::to_string(k);
      std::vector<double> raw = noisy(center);
      templates.push_back(normalize(raw));
      out.store.vectors.emplace(feature_id, std::move(raw));
      template_ids.push_back(std::move(feature_id));
    }
    out.meal.templates.emplace(food.id, std::move(templates));
    out.meal.template_ids.emplace(food.id, std::move(template_ids));
    out.meal.classes.emplace(food.id, std::move(food));
  }

  const auto class_id_of = [](int y) { return "cls" + detail::padded(y, 3); };

  const int mixed_per_tray =
      static_cast<int>(std::llround(spec.regions_per_tray * spec.mixed_fraction));
  const int non_trigger_count = spec.category_count - spec.trigger_category_count;

  for (int t = 0; t < spec.tray_count; ++t) {
    TrayRecord tray;
    tray.photo_id = "tray_" + detail::padded(t, 5);
    tray.meal_id = out.meal.meal_id;
    std::set<std::string> truth;
    std::set<int> used;

    const auto pick_unused = [&](const std::vector<int>& candidates) {
      std::vector<int> open;
      for (int y : candidates) {
        if (!used.contains(y)) {
          open.push_back(y);
        }
      }
      if (open.empty()) {
        throw InvalidSpecError("ran out of distinct classes while composing a tray");
      }
      const int y = open[rng.uniform_index(open.size())];
      used.insert(y);
      return y;
    };

    int cursor_x = 0;
    for (int r = 0; r < spec.regions_per_tray; ++r) {
      Region region;
      region.width = 160 + static_cast<int>(rng.uniform_index(80));
      region.height = 140 + static_cast<int>(rng.uniform_index(60));
      region.x = cursor_x;
      region.y = static_cast<int>(rng.uniform_index(20));
      cursor_x += region.width + 20;

      RegionRecord record;
      record.region = region;
      const bool mixed = r < mixed_per_tray;
      const std::string feature_prefix = tray.photo_id + "_" + std::to_string(r);

      if (mixed) {
        const int category_index = r % spec.trigger_category_count;
        const auto& pool = category_classes[static_cast<std::size_t>(category_index)];

        std::vector<int> members;
        for (int m = 0; m < spec.mixed_item_count; ++m) {
          members.push_back(pick_unused(pool));
        }
        const int garnish = pick_unused(pool);

        // Dominant first member, equal minor shares, small garnish admixture.
        const double dominant = rng.uniform(0.5, 0.7);
        const double garnish_weight = rng.uniform(0.05, 0.15);
        const double minor =
            (1.0 - dominant - garnish_weight) / static_cast<double>(members.size() - 1);

        std::vector<double> plate(static_cast<std::size_t>(spec.feature_dim), 0.0);
        for (std::size_t m = 0; m < members.size(); ++m) {
          const double weight = m == 0 ? dominant : minor;
          const auto& center = centers[static_cast<std::size_t>(members[m])];
          for (int i = 0; i < spec.feature_dim; ++i) {
            plate[static_cast<std::size_t>(i)] += weight * center[static_cast<std::size_t>(i)];
          }
        }
        {
          const auto& center = centers[static_cast<std::size_t>(garnish)];
          for (int i = 0; i < spec.feature_dim; ++i) {
            plate[static_cast<std::size_t>(i)] +=
                garnish_weight * center[static_cast<std::size_t>(i)];
          }
        }
        for (double& x : plate) {
          x += coord_sigma * rng.gaussian();
        }
        record.feature_id = "reg_" + feature_prefix;
        out.store.vectors.emplace(record.feature_id, std::move(plate));

        // One vertical strip per true member; the garnish gets no window.
        std::vector<WindowRecord> windows;
        const int strip = region.width / static_cast<int>(members.size());
        for (std::size_t m = 0; m < members.size(); ++m) {
          WindowRecord w;
          const int left = region.x + static_cast<int>(m) * strip;
          const int width =
              m + 1 == members.size() ? region.x + region.width - left : strip;
          w.region = Region{left, region.y, width, region.height};
          w.feature_id = "win_" + feature_prefix + "_" + std::to_string(m);
          out.store.vectors.emplace(w.feature_id,
                                    noisy(centers[static_cast<std::size_t>(members[m])]));
          windows.push_back(std::move(w));
          truth.insert(class_id_of(members[m]));
        }
        if (non_trigger_count > 0) {
          // A clutter window from a non-trigger category; the category gate
          // must drop it.
          const int category_index_d =
              spec.trigger_category_count + static_cast<int>(rng.uniform_index(
                                                static_cast<std::size_t>(non_trigger_count)));
          const auto& distractor_pool = category_classes[static_cast<std::size_t>(category_index_d)];
          const int distractor = distractor_pool[rng.uniform_index(distractor_pool.size())];
          WindowRecord w;
          w.region = Region{region.x + region.width / 4, region.y + region.height / 4,
                            region.width / 2, region.height / 2};
          w.feature_id = "win_" + feature_prefix + "_x";
          out.store.vectors.emplace(w.feature_id,
                                    noisy(centers[static_cast<std::size_t>(distractor)]));
          windows.push_back(std::move(w));
        }
        record.sub_windows = std::move(windows);
      } else {
        std::vector<int> all_classes(static_cast<std::size_t>(total_classes));
        for (int y = 0; y < total_classes; ++y) {
          all_classes[static_cast<std::size_t>(y)] = y;
        }
        const int item = pick_unused(all_classes);
        truth.insert(class_id_of(item));
        record.feature_id = "reg_" + feature_prefix;
        out.store.vectors.emplace(record.feature_id,
                                  noisy(centers[static_cast<std::size_t>(item)]));

        // Plates of trigger categories get fine-grained recognition too, so
        // their tray files must carry window features.
        const int category_index = item / spec.classes_per_category;
        if (category_index < spec.trigger_category_count) {
          std::vector<WindowRecord> windows;
          const int half_w = region.width / 2;
          const int half_h = region.height / 2;
          int window_index = 0;
          for (int qy = 0; qy < 2; ++qy) {
            for (int qx = 0; qx < 2; ++qx) {
              WindowRecord w;
              w.region = Region{region.x + qx * half_w, region.y + qy * half_h, half_w, half_h};
              w.feature_id = "win_" + feature_prefix + "_" + std::to_string(window_index++);
              out.store.vectors.emplace(w.feature_id,
                                        noisy(centers[static_cast<std::size_t>(item)]));
              windows.push_back(std::move(w));
            }
          }
          record.sub_windows = std::move(windows);
        }
      }
      tray.regions.push_back(std::move(record));
    }
    tray.ground_truth = std::move(truth);
    out.trays.push_back(std::move(tray));
  }

  validate_meal(out.meal);
  return out;
}

/// Writes manifest.json, features.tsv, and trays/tray_<n>.json under `dir`.
inline void write_synthetic_dataset(const SyntheticDataset& dataset,
                                    const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "trays", ec);
  if (ec) {
    throw IoError("cannot create output directory " + (dir / "trays").string() + ": " +
                  ec.message());
  }
  const auto write_file = [](const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      throw IoError("cannot open " + path.string() + " for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      throw IoError("failed to write " + path.string());
    }
  };

  write_file(dir / "manifest.json", serialize_meal_manifest(dataset.meal).dump(2) + "\n");
  {
    std::ofstream out(dir / "features.tsv", std::ios::binary);
    if (!out) {
      throw IoError("cannot open " + (dir / "features.tsv").string() + " for writing");
    }
    save_feature_store(dataset.store, out);
  }
  for (const TrayRecord& tray : dataset.trays) {
    write_file(dir / "trays" / (tray.photo_id + ".json"),
               tray_record_to_json(tray).dump(2) + "\n");
  }
}

}  // namespace trayrec
