#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "support/builders.hpp"
#include "support/oracles.hpp"
#include "trayrec/classify.hpp"

using trayrec::classify_single;
using trayrec::class_similarity;
using trayrec::FeatureVector;
using trayrec::MealTemplateSet;
using trayrec::normalize;

namespace {

MealTemplateSet two_class_meal(const std::vector<double>& a, const std::vector<double>& b) {
  testkit::Rng rng(0);
  MealTemplateSet meal = testkit::random_meal(rng, 2, 1, 1, a.size());
  meal.templates.at("cls000") = {normalize(a)};
  meal.templates.at("cls001") = {normalize(b)};
  return meal;
}

}  // namespace

TEST_CASE("class similarity of a vector with itself is 1") {
  testkit::Rng rng(3);
  const MealTemplateSet meal = testkit::random_meal(rng, 1, 1, 1, 16);
  const FeatureVector& t = meal.templates.at("cls000").front();
  CHECK(class_similarity("cls000", t, meal).value == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("class similarity takes the max over templates") {
  MealTemplateSet meal = two_class_meal({1.0, 0.0}, {0.0, 1.0});
  meal.templates.at("cls000") = {normalize(std::vector<double>{0.2, std::sqrt(0.96)}),
                                 normalize(std::vector<double>{0.9, std::sqrt(0.19)})};
  const FeatureVector x = normalize(std::vector<double>{1.0, 0.0});
  CHECK(class_similarity("cls000", x, meal).value == 0.9);
}

TEST_CASE("class similarity matches a brute-force loop") {
  testkit::Rng rng(5);
  const MealTemplateSet meal = testkit::random_meal(rng, 1, 1, 5, 24);
  for (int i = 0; i < 50; ++i) {
    const FeatureVector x = testkit::unit_vector(rng, 24);
    CHECK(class_similarity("cls000", x, meal).value ==
          oracle::class_max_similarity("cls000", x, meal));
  }
}

TEST_CASE("class similarity is invariant under template permutation") {
  testkit::Rng rng(9);
  MealTemplateSet meal = testkit::random_meal(rng, 1, 1, 5, 16);
  const FeatureVector x = testkit::unit_vector(rng, 16);
  const double before = class_similarity("cls000", x, meal).value;
  auto& templates = meal.templates.at("cls000");
  std::shuffle(templates.begin(), templates.end(), rng.engine());
  CHECK(class_similarity("cls000", x, meal).value == before);
}

TEST_CASE("class similarity rejects unknown classes") {
  testkit::Rng rng(1);
  const MealTemplateSet meal = testkit::random_meal(rng, 2, 1, 1, 8);
  const FeatureVector x = testkit::unit_vector(rng, 8);
  CHECK_THROWS_AS(class_similarity("nope", x, meal), trayrec::UnknownClassError);
}

TEST_CASE("classify_single picks the exact template match") {
  const MealTemplateSet meal = two_class_meal({1.0, 0.0}, {0.0, 1.0});
  const auto result = classify_single(normalize(std::vector<double>{1.0, 0.0}), meal);
  CHECK(result.class_id == "cls000");
  CHECK(result.score.value == 1.0);
}

TEST_CASE("classify_single breaks ties toward the smaller class id") {
  const MealTemplateSet meal = two_class_meal({1.0, 0.0}, {1.0, 0.0});
  const auto result = classify_single(normalize(std::vector<double>{1.0, 0.0}), meal);
  CHECK(result.class_id == "cls000");
  CHECK(result.score.value == 1.0);
}

TEST_CASE("classify_single rejects an empty meal") {
  MealTemplateSet meal;
  meal.meal_id = "empty";
  CHECK_THROWS_AS(classify_single(normalize(std::vector<double>{1.0}), meal),
                  trayrec::EmptyTemplateSetError);
}

TEST_CASE("classify_single matches the exhaustive double loop") {
  testkit::Rng rng(17);
  const MealTemplateSet meal = testkit::random_meal(rng, 50, 5, 3, 32);
  for (int q = 0; q < 100; ++q) {
    const FeatureVector x = testkit::unit_vector(rng, 32);
    const auto got = classify_single(x, meal);
    const auto [want_id, want_score] = oracle::nn_scan(x, meal);
    CHECK(got.class_id == want_id);
    CHECK(got.score.value == want_score);
  }
}

TEST_CASE("classify_single returns a class no other class strictly beats") {
  testkit::Rng rng(23);
  for (int round = 0; round < 20; ++round) {
    const MealTemplateSet meal =
        testkit::random_meal(rng, rng.uniform_int(1, 12), 2, 3, 8);
    const FeatureVector x = testkit::unit_vector(rng, 8);
    const auto got = classify_single(x, meal);
    for (const auto& [class_id, templates] : meal.templates) {
      const double s = oracle::class_max_similarity(class_id, x, meal);
      CHECK(s <= got.score.value);
      if (s == got.score.value) {
        CHECK(got.class_id <= class_id);
      }
    }
  }
}
