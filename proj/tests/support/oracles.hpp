// Independent reference implementations used to cross-check the library.
// Everything here recomputes results from first principles with plain loops
// (long double where the tolerance demands it) and stays off the library's
// code paths.

#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "trayrec/menu.hpp"

namespace oracle {

/// Exhaustive nearest-neighbour scan: loops every (class, template) pair,
/// accumulating inner products in index order, per-class max, argmax with a
/// strictly-greater update over ascending class ids.
inline std::pair<std::string, double> nn_scan(const trayrec::FeatureVector& query,
                                              const trayrec::MealTemplateSet& meal) {
  std::string best_id;
  double best = 0.0;
  bool first = true;
  for (const auto& [class_id, templates] : meal.templates) {
    bool class_first = true;
    double class_best = 0.0;
    for (const trayrec::FeatureVector& t : templates) {
      double s = 0.0;
      for (std::size_t i = 0; i < t.dim(); ++i) {
        s += t[i] * query[i];
      }
      if (class_first || s > class_best) {
        class_best = s;
        class_first = false;
      }
    }
    if (first || class_best > best) {
      best = class_best;
      best_id = class_id;
      first = false;
    }
  }
  return {best_id, best};
}

/// Max inner product of one class, brute force.
inline double class_max_similarity(const std::string& class_id,
                                   const trayrec::FeatureVector& query,
                                   const trayrec::MealTemplateSet& meal) {
  bool first = true;
  double best = 0.0;
  for (const trayrec::FeatureVector& t : meal.templates.at(class_id)) {
    double s = 0.0;
    for (std::size_t i = 0; i < t.dim(); ++i) {
      s += t[i] * query[i];
    }
    if (first || s > best) {
      best = s;
      first = false;
    }
  }
  return best;
}

/// All window offsets the sliding grid can produce along one axis: every o
/// in [0, extent - side] reachable as floor(k * stride), plus the flush one.
inline std::vector<int> admissible_offsets(int extent, int side, double stride) {
  std::set<int> offsets;
  for (std::size_t k = 0;; ++k) {
    const int o = static_cast<int>(std::floor(static_cast<double>(k) * stride));
    if (o > extent - side) {
      break;
    }
    offsets.insert(o);
  }
  offsets.insert(extent - side);
  return {offsets.begin(), offsets.end()};
}

struct PrfOracle {
  long double precision = 0.0L;
  long double recall = 0.0L;
  long double f_measure = 0.0L;
};

/// Micro precision/recall/F by per-element counting.
inline PrfOracle micro_prf(
    const std::vector<std::pair<std::set<std::string>, std::set<std::string>>>& pairs) {
  long tp = 0;
  long predicted = 0;
  long truth = 0;
  for (const auto& [pred, gt] : pairs) {
    for (const std::string& item : pred) {
      for (const std::string& g : gt) {
        if (item == g) {
          ++tp;
          break;
        }
      }
    }
    predicted += static_cast<long>(pred.size());
    truth += static_cast<long>(gt.size());
  }
  PrfOracle out;
  out.precision = predicted == 0 ? 0.0L : static_cast<long double>(tp) / predicted;
  out.recall = truth == 0 ? 0.0L : static_cast<long double>(tp) / truth;
  out.f_measure = (out.precision + out.recall) > 0.0L
                      ? 2.0L * out.precision * out.recall / (out.precision + out.recall)
                      : 0.0L;
  return out;
}

/// Tray energy at extended precision given a per-class energy table.
inline long double tray_energy(const std::set<std::string>& items,
                               const std::map<std::string, long double>& energy) {
  long double total = 0.0L;
  for (const std::string& item : items) {
    total += energy.at(item);
  }
  return total;
}

/// Mean absolute error at extended precision.
inline long double mean_abs_error(const std::vector<long double>& predicted,
                                  const std::vector<long double>& truth) {
  long double sum = 0.0L;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    sum += std::abs(predicted[i] - truth[i]);
  }
  return predicted.empty() ? 0.0L : sum / static_cast<long double>(predicted.size());
}

/// Pearson correlation via the E[xy] - E[x]E[y] route, long double.
inline long double pearson(const std::vector<long double>& xs,
                           const std::vector<long double>& ys) {
  const auto n = static_cast<long double>(xs.size());
  long double sx = 0.0L, sy = 0.0L, sxx = 0.0L, syy = 0.0L, sxy = 0.0L;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    syy += ys[i] * ys[i];
    sxy += xs[i] * ys[i];
  }
  const long double cov = sxy - sx * sy / n;
  const long double vx = sxx - sx * sx / n;
  const long double vy = syy - sy * sy / n;
  return cov / std::sqrt(vx * vy);
}

}  // namespace oracle
