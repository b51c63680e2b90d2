#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trayrec/errors.hpp"

namespace trayrec {

inline constexpr double kUnitNormTolerance = 1e-6;
inline constexpr double kZeroNormThreshold = 1e-12;

/// L2-normalized descriptor of one image region. Instances only come out of
/// normalize(), so the unit-norm invariant holds by construction.
class FeatureVector {
 public:
  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t dim() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

  friend FeatureVector normalize(std::span<const double> raw);

 private:
  explicit FeatureVector(std::vector<double> v) : values_(std::move(v)) {}

  std::vector<double> values_;
};

/// Inner product of two unit vectors; stays in [-1, 1] up to rounding.
struct SimilarityScore {
  double value = 0.0;

  friend bool operator==(const SimilarityScore&, const SimilarityScore&) = default;
};

/// Scales `raw` to unit Euclidean norm.
inline FeatureVector normalize(std::span<const double> raw) {
  double sum_sq = 0.0;
  for (double v : raw) {
    if (!std::isfinite(v)) {
      throw InvalidParameterError("feature vector has a non-finite entry");
    }
    sum_sq += v * v;
  }
  const double norm = std::sqrt(sum_sq);
  if (norm < kZeroNormThreshold) {
    throw ZeroVectorError("cannot normalize a zero vector");
  }
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out[i] = raw[i] / norm;
  }
  return FeatureVector(std::move(out));
}

inline FeatureVector normalize(std::span<const double> raw, std::size_t expected_dim) {
  if (raw.size() != expected_dim) {
    throw DimensionMismatchError("feature vector has length " + std::to_string(raw.size()) +
                                 ", expected " + std::to_string(expected_dim));
  }
  return normalize(raw);
}

/// Plain inner product, accumulated in index order.
inline double dot(const FeatureVector& a, const FeatureVector& b) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatchError("inner product of vectors with lengths " +
                                 std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    sum += a[i] * b[i];
  }
  return sum;
}

}  // namespace trayrec
