#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "bfmfuse/io.hpp"
#include "bfmfuse/objective.hpp"
#include "bfmfuse/optimizer.hpp"
#include "bfmfuse/synthetic.hpp"
#include "oracles.hpp"

using namespace bfmfuse;
namespace fs = std::filesystem;

namespace {

BinaryFuzzyMeasure learned_measure() {
  return from_minimal_winning(3, std::vector<SourceSet>{SourceSet::of(3, {0, 1}),
                                                        SourceSet::of(3, {0, 2})});
}

SynthSpec demo_spec(double sigma, std::uint64_t seed) {
  return SynthSpec{3, 20, 20, {1, 3}, {1, 4}, sigma, learned_measure(), seed};
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("bfmfuse-test-" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

std::string expect_validation_message(const std::string& text) {
  try {
    dataset_from_json(parse_json_text(text, "inline"));
  } catch (const ValidationError& e) {
    return e.what();
  }
  ADD_FAILURE() << "no error for " << text;
  return {};
}

}  // namespace

TEST(Dataset, Counts) {
  const auto d = generate_synthetic(demo_spec(0.0, 1));
  EXPECT_EQ(d.count(BagLabel::positive), 20U);
  EXPECT_EQ(d.count(BagLabel::negative), 20U);
  EXPECT_EQ(d.bags.front().label, BagLabel::positive);
  EXPECT_EQ(d.bags.back().label, BagLabel::negative);
  EXPECT_TRUE(d.has_truth());
  EXPECT_EQ(d.flattened_truth().size(), d.instance_count());
}

TEST(Dataset, ValidationNamesTheOffender) {
  const auto msg = expect_validation_message(
      R"({"source_count": 2, "bags": [{"label": 1, "candidate_sets": [[[0.2, 0.4]], [[0.1, 1.3]]]}]})");
  EXPECT_NE(msg.find("bag 0"), std::string::npos) << msg;
  EXPECT_NE(msg.find("set 1"), std::string::npos) << msg;
  EXPECT_NE(msg.find("1.3"), std::string::npos) << msg;

  const auto empty = expect_validation_message(
      R"({"source_count": 2, "bags": [{"label": 0, "candidate_sets": [[[0.2, 0.4]], []]}]})");
  EXPECT_NE(empty.find("empty"), std::string::npos) << empty;

  EXPECT_THROW(
      dataset_from_json(parse_json_text(
          R"({"source_count": 3, "bags": [{"label": 0, "candidate_sets": [[[0.2, 0.4]]]}]})", "x")),
      StructuralError);
  expect_validation_message(
      R"({"source_count": 1, "bags": [{"label": 2, "candidate_sets": [[[0.2]]]}]})");
  expect_validation_message(R"({"source_count": 1, "bags": []})");
}

TEST(Dataset, TruthMustCoverEverySet) {
  Dataset d{1, {}};
  d.bags.push_back({BagLabel::negative, {CandidateSet{{{0.1}}, {0}}, CandidateSet{{{0.3}}, {}}}});
  EXPECT_THROW(validate_dataset(d), StructuralError);
  d.bags[0].candidate_sets[1].truth = {0, 1};
  EXPECT_THROW(validate_dataset(d), StructuralError);
}

TEST(Dataset, ParseErrorReportsLine) {
  try {
    parse_json_text("{\n  \"source_count\": 2,\n  \"bags\": [ oops ]\n}", "broken.json");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("broken.json:3:"), std::string::npos) << e.what();
  }
}

TEST(Dataset, SaveLoadRoundTrip) {
  TempDir dir;
  for (double sigma : {0.0, 0.05}) {
    const auto d = generate_synthetic(demo_spec(sigma, 9));
    const auto path = dir / ("d" + std::to_string(int(sigma * 100)) + ".json");
    save_dataset(path, d, false);
    EXPECT_EQ(load_dataset(path), d);
    EXPECT_THROW(save_dataset(path, d, false), IoError);
    EXPECT_NO_THROW(save_dataset(path, d, true));
  }
  EXPECT_THROW(load_dataset(dir / "missing.json"), IoError);
}

TEST(Dataset, RoundTripWithoutTruth) {
  std::mt19937_64 rng(4);
  const auto d = oracle::random_dataset(3, rng);
  EXPECT_FALSE(d.has_truth());
  EXPECT_EQ(dataset_from_json(parse_json_text(dataset_to_string(d), "x")), d);
}

TEST(Measures, JsonForms) {
  const auto g = learned_measure();
  EXPECT_EQ(std::get<BinaryFuzzyMeasure>(measure_from_json(to_json(g))), g);
  EXPECT_EQ(std::get<BinaryFuzzyMeasure>(measure_from_json(to_antichain_json(g))), g);
  EXPECT_EQ(to_antichain_json(g).at("minimal_winning").dump(), "[[0,1],[0,2]]");
  const auto r = sample_random_real(4, 8);
  EXPECT_EQ(std::get<RealFuzzyMeasure>(measure_from_json(to_json(r))), r);
  EXPECT_THROW(measure_from_json(parse_json_text(
                   R"({"source_count": 2, "values": [0, 1, 0, 0]})", "x")),
               ValidationError);
  EXPECT_THROW(measure_from_json(parse_json_text(
                   R"({"source_count": 2, "values": [0, 1, 0]})", "x")),
               StructuralError);
}

TEST(Synthetic, NoiseFreeTruthScoresZero) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto spec = demo_spec(0.0, seed);
    const auto d = generate_synthetic(spec);
    ASSERT_EQ(objective(spec.truth_measure, d).total, 0.0) << seed;
  }
}

TEST(Synthetic, NoiseFreeTruthScoresZeroForRandomTruths) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const int s = 1 + int(rng() % 7);
    const SynthSpec spec{s, 5, 5, {1, 3}, {1, 3}, 0.0, sample_random(s, 0.4, rng()), rng()};
    const auto d = generate_synthetic(spec);
    ASSERT_EQ(objective(spec.truth_measure, d).total, 0.0);
  }
}

TEST(Synthetic, TruthLabelsMarkIntegralOne) {
  const auto spec = demo_spec(0.0, 3);
  const auto d = generate_synthetic(spec);
  d.for_each_instance([&](std::span<const double> h, std::size_t b, std::size_t s, std::size_t i) {
    const double c = choquet_integral(h, spec.truth_measure);
    const bool label = d.bags[b].candidate_sets[s].truth[i] != 0;
    EXPECT_EQ(label, c == 1.0);
    if (!label) {
      EXPECT_LE(c, 0.1);
    }
  });
}

TEST(Synthetic, Deterministic) {
  EXPECT_EQ(dataset_to_string(generate_synthetic(demo_spec(0.05, 77))),
            dataset_to_string(generate_synthetic(demo_spec(0.05, 77))));
  EXPECT_NE(dataset_to_string(generate_synthetic(demo_spec(0.05, 77))),
            dataset_to_string(generate_synthetic(demo_spec(0.05, 78))));
}

TEST(Synthetic, SpecValidation) {
  auto spec = demo_spec(0.0, 1);
  spec.n_pos_bags = 0;
  EXPECT_THROW(generate_synthetic(spec), ValidationError);
  spec = demo_spec(0.0, 1);
  spec.instances_per_set = {3, 2};
  EXPECT_THROW(generate_synthetic(spec), ValidationError);
  spec = demo_spec(-0.1, 1);
  EXPECT_THROW(generate_synthetic(spec), ValidationError);
  spec = demo_spec(0.0, 1);
  spec.source_count = 4;
  EXPECT_THROW(generate_synthetic(spec), StructuralError);
}

TEST(Synthetic, SpecJsonRoundTrip) {
  const auto spec = demo_spec(0.05, 12345678901234ULL);
  const auto back = synth_spec_from_json(parse_json_text(to_json(spec).dump(), "x"));
  EXPECT_EQ(to_json(back), to_json(spec));
  EXPECT_EQ(back.truth_measure, spec.truth_measure);
}

TEST(Synthetic, ExhaustiveOptimumIsTheTruth) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto spec = demo_spec(0.05, seed);
    const auto d = generate_synthetic(spec);
    const auto best = train_exhaustive(d);
    EXPECT_EQ(best.best_measure, spec.truth_measure) << "seed " << seed;
    EXPECT_EQ(best.evaluations, 18U);
  }
}
