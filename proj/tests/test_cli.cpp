#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

using namespace bfmfuse;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::random_device rd;
    dir_ = fs::temp_directory_path() / ("bfmfuse-cli-" + std::to_string(rd()));
    fs::create_directories(dir_);
  }
  void TearDown() override {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    write_text_file(dir_ / name, text, true);
    return path(name);
  }

  std::string spec(double sigma, int sources = 3) const {
    json j = {{"source_count", sources},
              {"n_pos_bags", 20},
              {"n_neg_bags", 20},
              {"sets_per_bag", {1, 3}},
              {"instances_per_set", {1, 4}},
              {"noise_sigma", sigma},
              {"truth_measure", {{"source_count", sources}, {"minimal_winning", {{0, 1}, {0, 2}}}}},
              {"seed", 7}};
    return write("spec.json", j.dump());
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SynthIsDeterministic) {
  const auto s = spec(0.05);
  ASSERT_EQ(run({"synth", "--spec", s, "--out", path("a.json")}).code, 0);
  ASSERT_EQ(run({"synth", "--spec", s, "--out", path("b.json")}).code, 0);
  EXPECT_EQ(read_text_file(path("a.json")), read_text_file(path("b.json")));
  EXPECT_NO_THROW(load_dataset(path("a.json")));
  const json manifest = load_json(path("a.json.manifest.json"));
  EXPECT_EQ(manifest.at("seed"), 7);
  EXPECT_EQ(manifest.at("tool"), "bfmfuse");
  EXPECT_EQ(manifest.at("config_hash").get<std::string>().size(), 16U);
}

TEST_F(CliTest, RefusesToOverwrite) {
  const auto s = spec(0.0);
  ASSERT_EQ(run({"synth", "--spec", s, "--out", path("d.json")}).code, 0);
  const auto again = run({"synth", "--spec", s, "--out", path("d.json")});
  EXPECT_EQ(again.code, 2);
  EXPECT_NE(again.err.find("--force"), std::string::npos);
  EXPECT_EQ(run({"synth", "--spec", s, "--out", path("d.json"), "--force"}).code, 0);
}

TEST_F(CliTest, NoiseFreeTrainReachesZero) {
  const auto s = spec(0.0);
  ASSERT_EQ(run({"synth", "--spec", s, "--out", path("d.json")}).code, 0);
  const auto r = run({"train", "--data", path("d.json"), "--mode", "bfm", "--seed", "1", "--out",
                      path("m.json"), "--explain"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("best objective 0 "), std::string::npos) << r.out;
  const json doc = load_json(path("m.json"));
  EXPECT_EQ(doc.at("result").at("best_objective"), 0.0);
  EXPECT_EQ(doc.at("result").at("explain").at("per_bag").size(), 40U);
  EXPECT_EQ(doc.at("tool"), "bfmfuse");
  EXPECT_EQ(doc.at("seed"), 1);
}

TEST_F(CliTest, TrainPrintsLearnedAntichain) {
  const auto s = spec(0.05);
  ASSERT_EQ(run({"synth", "--spec", s, "--out", path("d.json")}).code, 0);
  for (const char* mode : {"bfm", "bfm-exhaustive"}) {
    const auto out = path(std::string(mode) + ".json");
    const auto r = run({"train", "--data", path("d.json"), "--mode", mode, "--out", out});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("{1,2} {1,3}"), std::string::npos) << r.out;
  }
  const auto real = run({"train", "--data", path("d.json"), "--mode", "real", "--out",
                         path("real.json"), "--generations", "20"});
  EXPECT_EQ(real.code, 0) << real.err;
}

TEST_F(CliTest, ExhaustiveRefusedAboveCap) {
  const auto s = spec(0.05, 6);
  ASSERT_EQ(run({"synth", "--spec", s, "--out", path("d.json")}).code, 0);
  const auto r = run({"train", "--data", path("d.json"), "--mode", "bfm-exhaustive", "--out",
                      path("m.json")});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("7828352"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(path("m.json")));
}

TEST_F(CliTest, InputErrorsExitOne) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"train", "--data", "x.json"}).code, 1);
  const auto bad = write("bad.json", R"({"source_count": 2, "bags": [{"label": 0,
    "candidate_sets": [[[0.2, 1.3]]]}]})");
  const auto r = run({"train", "--data", bad, "--out", path("m.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("bag 0"), std::string::npos) << r.err;
  EXPECT_EQ(run({"train", "--data", path("missing.json"), "--out", path("m.json")}).code, 2);
  EXPECT_EQ(run({"fuse-eval", "--data", bad, "--out", path("o")}).code, 1);
}

TEST_F(CliTest, MinimumMeasureMatchesNaiveMin) {
  ASSERT_EQ(run({"synth", "--spec", spec(0.05), "--out", path("d.json")}).code, 0);
  const auto m = write("min.json", to_json(BinaryFuzzyMeasure::minimum(3)).dump());
  ASSERT_EQ(run({"fuse-eval", "--data", path("d.json"), "--measure", m, "--out", path("a")}).code, 0);
  ASSERT_EQ(run({"fuse-eval", "--data", path("d.json"), "--naive", "min", "--out", path("b")}).code,
            0);
  EXPECT_EQ(read_text_file(path("a/fusion.csv")), read_text_file(path("b/fusion.csv")));
  EXPECT_TRUE(fs::exists(path("a/roc.csv")));
  EXPECT_TRUE(fs::exists(path("a/manifest.json")));
  EXPECT_EQ(run({"fuse-eval", "--data", path("d.json"), "--naive", "min", "--out", path("b")}).code,
            2);
}

TEST_F(CliTest, FuseEvalReproducesHandCountedAuc) {
  const auto d = write("d.json", R"({"source_count": 1,
    "bags": [{"label": 0, "candidate_sets": [[[0.1], [0.4]]]},
             {"label": 1, "candidate_sets": [[[0.35], [0.8]]]}],
    "instance_truth": [[[0, 0]], [[1, 1]]]})");
  const auto r = run({"fuse-eval", "--data", d, "--naive", "mean", "--out", path("o")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(load_json(path("o/score.json")).at("auc"), 0.75);
}

TEST_F(CliTest, FuseEvalAcceptsTrainResult) {
  ASSERT_EQ(run({"synth", "--spec", spec(0.0), "--out", path("d.json")}).code, 0);
  ASSERT_EQ(run({"train", "--data", path("d.json"), "--out", path("m.json")}).code, 0);
  const auto r = run({"fuse-eval", "--data", path("d.json"), "--measure", path("m.json"), "--out",
                      path("o")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json score = load_json(path("o/score.json"));
  EXPECT_EQ(score.at("auc"), 1.0);
  EXPECT_TRUE(score.at("psnr").is_number());  // weak instances score up to 0.1
}

TEST_F(CliTest, MissingTruthWarnsAndSkipsScoring) {
  const auto d = write("d.json", R"({"source_count": 2,
    "bags": [{"label": 0, "candidate_sets": [[[0.1, 0.2]]]},
             {"label": 1, "candidate_sets": [[[0.9, 0.7]]]}]})");
  const auto r = run({"fuse-eval", "--data", d, "--naive", "max", "--out", path("o")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_TRUE(fs::exists(path("o/fusion.csv")));
  EXPECT_FALSE(fs::exists(path("o/score.json")));
}

TEST_F(CliTest, BenchSmoke) {
  const auto r = run({"bench", "--sources", "3,4", "--repeats", "2", "--cap-seconds", "30",
                      "--pos-bags", "8", "--neg-bags", "8", "--out", path("bench.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = read_text_file(path("bench.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "method,metric,S=3,S=4");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  EXPECT_EQ(csv.find('>'), std::string::npos) << csv;
  const json doc = load_json(path("bench.csv.json"));
  EXPECT_EQ(doc.at("cells").size(), 4U);
  for (const auto& cell : doc.at("cells")) {
    EXPECT_EQ(cell.at("runs").size(), 2U);
    EXPECT_EQ(cell.at("censored"), 0);
  }
}

TEST(BenchFormat, CensoredCells) {
  BenchCell all{"real-fm", 8, {{120.4, 0.5, 3, Termination::time_cap}}};
  EXPECT_EQ(cli::detail::bench_cell(all, 120.0), ">120 s");
  BenchCell some{"real-fm", 8,
                 {{120.4, 0.5, 3, Termination::time_cap}, {2.0, 0.1, 9, Termination::stalled}}};
  EXPECT_NE(cli::detail::bench_cell(some, 120.0).find("[1/2 censored]"), std::string::npos);
}
