#include <cmath>
#include <limits>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "support/builders.hpp"
#include "trayrec/feature.hpp"

using trayrec::FeatureVector;
using trayrec::normalize;

TEST_CASE("normalize scales to unit norm") {
  const FeatureVector v = normalize(std::vector<double>{3.0, 4.0});
  CHECK(v.values() == std::vector<double>{0.6, 0.8});

  const FeatureVector unit = normalize(std::vector<double>{1.0, 0.0, 0.0});
  CHECK(unit.values() == std::vector<double>{1.0, 0.0, 0.0});
}

TEST_CASE("normalize rejects degenerate input") {
  CHECK_THROWS_AS(normalize(std::vector<double>{0.0, 0.0}), trayrec::ZeroVectorError);
  CHECK_THROWS_AS(normalize(std::vector<double>{1e-13, 0.0}), trayrec::ZeroVectorError);
  CHECK_THROWS_AS(normalize(std::vector<double>{1.0, 2.0}, 3), trayrec::DimensionMismatchError);
  CHECK_THROWS_AS(normalize(std::vector<double>{1.0, std::numeric_limits<double>::quiet_NaN()}),
                  trayrec::InvalidParameterError);
  CHECK_THROWS_AS(normalize(std::vector<double>{std::numeric_limits<double>::infinity()}),
                  trayrec::InvalidParameterError);
}

TEST_CASE("normalized vectors have unit norm within tolerance") {
  testkit::Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    const std::size_t dim = static_cast<std::size_t>(rng.uniform_int(1, 64));
    std::vector<double> raw(dim);
    for (double& x : raw) {
      x = rng.uniform(-100.0, 100.0);
    }
    bool all_zero = true;
    for (double x : raw) {
      if (x != 0.0) {
        all_zero = false;
      }
    }
    if (all_zero) {
      raw[0] = 1.0;
    }
    const FeatureVector v = normalize(raw);
    double sum_sq = 0.0;
    for (double x : v.values()) {
      REQUIRE(std::isfinite(x));
      sum_sq += x * x;
    }
    CHECK(std::abs(std::sqrt(sum_sq) - 1.0) <= trayrec::kUnitNormTolerance);
  }
}

TEST_CASE("dot is bounded for unit vectors") {
  testkit::Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const std::size_t dim = static_cast<std::size_t>(rng.uniform_int(2, 32));
    const FeatureVector a = testkit::unit_vector(rng, dim);
    const FeatureVector b = testkit::unit_vector(rng, dim);
    const double s = trayrec::dot(a, b);
    CHECK(std::abs(s) <= 1.0 + 1e-9);
    CHECK(trayrec::dot(b, a) == s);
  }
}

TEST_CASE("dot rejects mismatched dimensions") {
  const FeatureVector a = normalize(std::vector<double>{1.0, 0.0});
  const FeatureVector b = normalize(std::vector<double>{1.0, 0.0, 0.0});
  CHECK_THROWS_AS(trayrec::dot(a, b), trayrec::DimensionMismatchError);
}
