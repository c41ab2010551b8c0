#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "bfmfuse/objective.hpp"
#include "oracles.hpp"

using namespace bfmfuse;

namespace {

Bag bag(BagLabel label, std::vector<std::vector<Instance>> sets) {
  Bag b{label, {}};
  for (auto& s : sets) b.candidate_sets.push_back(CandidateSet{std::move(s), {}});
  return b;
}

// g({1}) = 1, g({2}) = 0, so the integral is always h[0]
BinaryFuzzyMeasure first_source_only() {
  return from_minimal_winning(2, std::vector<SourceSet>{SourceSet::of(2, {0})});
}

Dataset two_bag_case() {
  Dataset d{2, {}};
  d.bags.push_back(bag(BagLabel::negative, {{{0.4, 0.7}, {0.6, 0.1}}, {{0.2, 0.9}}}));
  d.bags.push_back(bag(BagLabel::positive, {{{0.9, 0.2}, {0.3, 0.3}}, {{0.5, 0.8}}}));
  return d;
}

}  // namespace

TEST(Objective, HandDerivedTwoSourceCase) {
  const auto d = two_bag_case();
  const auto g = first_source_only();
  const auto b = ObjectiveEvaluator(d).breakdown(g);
  // sorted differences round in the last bits, e.g. (0.9 - 0.2) + 0.2
  EXPECT_NEAR(b.negative_term, 0.16, 1e-15);
  EXPECT_NEAR(b.positive_term, 0.01, 1e-15);
  EXPECT_NEAR(b.total, 0.17, 1e-15);
  EXPECT_EQ(objective(g, d).total, b.total);
  EXPECT_EQ(b.per_bag[0].selected_set, 0U);
  EXPECT_EQ(b.per_bag[1].selected_set, 0U);
  EXPECT_EQ(b.per_bag[1].label, BagLabel::positive);
}

TEST(Objective, SinglePositiveBagAllZero) {
  Dataset d{3, {bag(BagLabel::positive, {{{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}})}};
  EXPECT_DOUBLE_EQ(objective(BinaryFuzzyMeasure::maximum(3), d).total, 1.0);
}

TEST(Objective, PerfectFitIsZero) {
  Dataset d{2, {}};
  d.bags.push_back(bag(BagLabel::negative, {{{0.0, 0.9}, {0.5, 0.5}}, {{0.0, 0.0}}}));
  d.bags.push_back(bag(BagLabel::positive, {{{0.1, 0.9}}, {{1.0, 0.2}, {0.3, 0.3}}}));
  EXPECT_EQ(objective(first_source_only(), d).total, 0.0);
}

TEST(Objective, TiesSelectLowestSet) {
  Dataset d{2, {}};
  d.bags.push_back(bag(BagLabel::negative, {{{0.3, 0.0}}, {{0.3, 0.5}}}));
  d.bags.push_back(bag(BagLabel::positive, {{{0.5, 0.0}}, {{0.5, 0.1}}}));
  const auto b = ObjectiveEvaluator(d).breakdown(first_source_only());
  EXPECT_EQ(b.per_bag[0].selected_set, 0U);
  EXPECT_EQ(b.per_bag[1].selected_set, 0U);
}

TEST(Objective, Errors) {
  const auto d = two_bag_case();
  EXPECT_THROW(objective(BinaryFuzzyMeasure::maximum(3), d).total, StructuralError);
  EXPECT_THROW(ObjectiveEvaluator(Dataset{2, {}}), ValidationError);
  Dataset empty_set{2, {bag(BagLabel::negative, {{}})}};
  EXPECT_THROW(ObjectiveEvaluator{empty_set}, ValidationError);
}

TEST(ObjectiveProperty, MatchesNaiveOracle) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const int s = 1 + int(rng() % 4);
    const auto d = oracle::random_dataset(s, rng);
    const ObjectiveEvaluator eval(d);
    const auto gb = sample_random(s, 0.5, rng());
    const auto gr = sample_random_real(s, rng());
    const double jb = oracle::objective(d, [&](Mask m) { return gb.value(m); });
    const double jr = oracle::objective(d, [&](Mask m) { return gr.value(m); });
    ASSERT_NEAR(eval.total(gb), jb, 1e-12);
    ASSERT_NEAR(eval.total(gr), jr, 1e-12);
    const auto br = eval.breakdown(gr);
    ASSERT_EQ(br.total, eval.total(gr));
    ASSERT_EQ(br.total, br.negative_term + br.positive_term);
    ASSERT_GE(br.total, 0.0);
  }
}

TEST(ObjectiveProperty, ZeroIffEveryBagIsExplained) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const int s = 2 + int(rng() % 3);
    auto d = oracle::random_dataset(s, rng);
    // 0/1 confidences so integrals of exactly 0 and 1 occur
    for (auto& b : d.bags)
      for (auto& set : b.candidate_sets)
        for (auto& h : set.instances)
          for (double& v : h) v = v < 0.5 ? 0.0 : 1.0;
    const auto g = sample_random(s, 0.5, rng());
    bool explained = true;
    for (const auto& b : d.bags) {
      if (b.label == BagLabel::negative) {
        for (const auto& set : b.candidate_sets) {
          bool has_zero = false;
          for (const auto& h : set.instances) has_zero |= choquet_maxmin(h, g) == 0.0;
          explained &= has_zero;
        }
      } else {
        bool has_one = false;
        for (const auto& set : b.candidate_sets)
          for (const auto& h : set.instances) has_one |= choquet_maxmin(h, g) == 1.0;
        explained &= has_one;
      }
    }
    ASSERT_EQ(objective(g, d).total == 0.0, explained);
  }
}

TEST(ObjectiveProperty, BagPermutationInvariance) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const int s = 1 + int(rng() % 4);
    auto d = oracle::random_dataset(s, rng, 10);
    const auto g = sample_random_real(s, rng());
    const auto before = ObjectiveEvaluator(d).breakdown(g);
    std::shuffle(d.bags.begin(), d.bags.end(), rng);
    const auto after = ObjectiveEvaluator(d).breakdown(g);
    ASSERT_NEAR(before.negative_term, after.negative_term, 1e-12);
    ASSERT_NEAR(before.positive_term, after.positive_term, 1e-12);
    ASSERT_NEAR(before.total, after.total, 1e-12);
  }
}

TEST(ObjectiveProperty, DuplicateCandidateSetChangesNothing) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 100; ++trial) {
    const int s = 1 + int(rng() % 4);
    auto d = oracle::random_dataset(s, rng);
    const auto g = sample_random(s, 0.5, rng());
    const auto before = ObjectiveEvaluator(d).breakdown(g);
    const std::size_t b = rng() % d.bags.size();
    auto& sets = d.bags[b].candidate_sets;
    sets.push_back(sets[rng() % sets.size()]);
    const auto after = ObjectiveEvaluator(d).breakdown(g);
    ASSERT_EQ(before.per_bag[b].contribution, after.per_bag[b].contribution);
    ASSERT_EQ(before.total, after.total);
  }
}

TEST(Evaluator, IntegralMatchesChoquet) {
  std::mt19937_64 rng(31);
  const auto d = oracle::random_dataset(4, rng);
  const ObjectiveEvaluator eval(d);
  const auto g = sample_random_real(4, 5);
  std::size_t k = 0;
  d.for_each_instance([&](std::span<const double> h, auto...) {
    EXPECT_EQ(eval.integral(k++, g), choquet_integral(h, g));
  });
}
