#include <doctest.h>

#include "orbtriage/error.hpp"
#include "orbtriage/metrics.hpp"
#include "orbtriage/vector_index.hpp"

using namespace orbtriage;
using namespace orbtriage::bench;

namespace {

Embedding unit(std::initializer_list<float> values) {
  return Embedding::normalized(
      std::span<const float>(values.begin(), values.size()));
}

HintRecord change_record(std::string id, std::string pair, std::string tag,
                         Embedding e, int quadrant = 0) {
  Meta meta;
  meta["pair_id"] = std::move(pair);
  meta["time_tag"] = tag;
  meta["quadrant"] = static_cast<double>(quadrant);
  return {std::move(id), TaskKind::change, std::move(tag), std::move(e),
          std::move(meta)};
}

}  // namespace

TEST_CASE("recall_at_k checks group membership anywhere in the list") {
  const std::unordered_map<std::string, std::string> labels = {
      {"a", "wildfire"}, {"b", "flood"}, {"c", "flood"}};
  CHECK(recall_at_k({{"a", 0.9}, {"b", 0.8}}, "flood", labels) == 1);
  CHECK(recall_at_k({{"a", 0.9}}, "flood", labels) == 0);
  // k=1: recall@1 equals the top-1 indicator.
  CHECK(recall_at_k({{"b", 0.9}}, "flood", labels) == 1);
  CHECK_THROWS_AS(recall_at_k({{"zz", 0.9}}, "flood", labels),
                  ValidationError);
}

TEST_CASE("top1_accuracy averages indicators") {
  std::vector<int> all(10, 1);
  CHECK(top1_accuracy(all) == 1.0);
  all[3] = 0;
  CHECK(top1_accuracy(all) == doctest::Approx(0.9));
  CHECK_THROWS_AS(top1_accuracy(std::vector<int>{}), ValidationError);
}

TEST_CASE("balanced_accuracy is the mean per-class recall") {
  Confusion perfect;
  perfect.add("a", "a");
  perfect.add("b", "b");
  CHECK(balanced_accuracy(perfect) == 1.0);

  // Constant predictor on a balanced binary truth: (1 + 0) / 2.
  Confusion constant;
  for (int i = 0; i < 5; ++i) {
    constant.add("a", "a");
    constant.add("b", "a");
  }
  CHECK(balanced_accuracy(constant) == 0.5);

  // Recalls 0.8 and 0.6 average to 0.7.
  Confusion mixed;
  for (int i = 0; i < 8; ++i) mixed.add("a", "a");
  for (int i = 0; i < 2; ++i) mixed.add("a", "b");
  for (int i = 0; i < 6; ++i) mixed.add("b", "b");
  for (int i = 0; i < 4; ++i) mixed.add("b", "a");
  CHECK(balanced_accuracy(mixed) == doctest::Approx(0.7).epsilon(1e-12));

  // Balanced classes and a class-symmetric predictor: equals plain accuracy.
  Confusion symmetric;
  for (int i = 0; i < 7; ++i) symmetric.add("a", "a");
  for (int i = 0; i < 3; ++i) symmetric.add("a", "b");
  for (int i = 0; i < 7; ++i) symmetric.add("b", "b");
  for (int i = 0; i < 3; ++i) symmetric.add("b", "a");
  CHECK(balanced_accuracy(symmetric) ==
        doctest::Approx(14.0 / 20.0).epsilon(1e-12));
}

TEST_CASE("macro_f1 over the class union") {
  Confusion perfect;
  perfect.add("a", "a");
  perfect.add("b", "b");
  CHECK(macro_f1(perfect) == 1.0);

  // Binary with TP=1, FP=1, FN=1, TN=1 per class: F1 = 0.5 each.
  Confusion half;
  half.add("a", "a");
  half.add("a", "b");
  half.add("b", "b");
  half.add("b", "a");
  CHECK(macro_f1(half) == doctest::Approx(0.5).epsilon(1e-12));

  // All predictions one class on balanced truth: (2/3 + 0) / 2 = 1/3.
  Confusion lump;
  for (int i = 0; i < 5; ++i) {
    lump.add("a", "a");
    lump.add("b", "a");
  }
  CHECK(macro_f1(lump) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("time preference compares per-pair group aggregates strictly") {
  // Pair p1: after hints along +x, before hints along +y.
  std::vector<HintRecord> hints;
  hints.push_back(change_record("a1", "p1", "after", unit({1, 0}), 0));
  hints.push_back(change_record("a2", "p1", "after", unit({1, 0}), 1));
  hints.push_back(change_record("b1", "p1", "before", unit({0, 1}), 0));
  hints.push_back(change_record("b2", "p1", "before", unit({0, 1}), 1));
  const VectorIndex index = VectorIndex::build(hints);

  std::vector<QueryRecord> queries = {
      change_record("q1", "p1", "after", unit({1, 0}), 3)};
  CHECK(time_preference_accuracy(queries, index) == 1.0);
  CHECK(time_preference_accuracy(queries, index, GroupAggregate::max) == 1.0);

  // Exactly equal group means count as incorrect.
  std::vector<QueryRecord> tied = {
      change_record("q2", "p1", "after", unit({1, 1}), 3)};
  CHECK(time_preference_accuracy(tied, index) == 0.0);

  // Orthogonal-to-after query prefers before.
  std::vector<QueryRecord> wrong = {
      change_record("q3", "p1", "after", unit({0, 1}), 3)};
  CHECK(time_preference_accuracy(wrong, index) == 0.0);
}

TEST_CASE("mean and sample std") {
  const std::vector<double> same = {0.5, 0.5, 0.5};
  CHECK(mean_of(same) == 0.5);
  CHECK(sample_std(same) == 0.0);
  const std::vector<double> two = {1.0, 3.0};
  CHECK(mean_of(two) == 2.0);
  CHECK(sample_std(two) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(sample_std(std::vector<double>{1.0}) == 0.0);
}
