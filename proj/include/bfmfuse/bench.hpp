#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "bfmfuse/dataset.hpp"
#include "bfmfuse/measure.hpp"
#include "bfmfuse/optimizer.hpp"
#include "bfmfuse/random.hpp"
#include "bfmfuse/synthetic.hpp"

namespace bfmfuse {

/// Timing study: for every source count, one seeded synthetic dataset,
/// then `repeats` seeded runs of each optimizer under the same EA budget.
struct BenchSpec {
  std::vector<int> source_counts{6, 8, 10, 12};
  int repeats = 5;
  double cap_seconds = 120.0;
  EAConfig config{};
  std::uint64_t seed = 0;
  int n_pos_bags = 30;
  int n_neg_bags = 30;
  IntRange sets_per_bag{1, 3};
  IntRange instances_per_set{1, 4};
  double noise_sigma = 0.05;
};

struct BenchRun {
  double seconds;
  double best_objective;
  int generations;
  Termination terminated_by;

  bool censored() const { return terminated_by == Termination::time_cap; }
  /// The cap expired before a single generation completed.
  bool cap_too_small() const { return censored() && generations == 0; }
};

struct BenchCell {
  std::string method;  // "bfm" or "real-fm"
  int source_count;
  std::vector<BenchRun> runs;

  double mean_seconds() const {
    double s = 0.0;
    for (const auto& r : runs) s += r.seconds;
    return runs.empty() ? 0.0 : s / double(runs.size());
  }

  /// Sample standard deviation; 0 for a single run.
  double sd_seconds() const {
    if (runs.size() < 2) return 0.0;
    const double m = mean_seconds();
    double ss = 0.0;
    for (const auto& r : runs) ss += (r.seconds - m) * (r.seconds - m);
    return std::sqrt(ss / double(runs.size() - 1));
  }

  double mean_objective() const {
    double s = 0.0;
    for (const auto& r : runs) s += r.best_objective;
    return runs.empty() ? 0.0 : s / double(runs.size());
  }

  std::size_t censored_count() const {
    std::size_t n = 0;
    for (const auto& r : runs) n += r.censored() ? 1 : 0;
    return n;
  }
};

struct BenchTable {
  BenchSpec spec;
  std::vector<BenchCell> bfm;
  std::vector<BenchCell> real_fm;
};

/// Truth measure for a benchmark dataset: upward closure of three random
/// coalitions of two to max(2, S/2) sources.
inline BinaryFuzzyMeasure bench_truth(int source_count, std::uint64_t seed) {
  check_source_count(source_count);
  if (source_count < 2) return BinaryFuzzyMeasure::minimum(source_count);
  Rng rng = make_stream(seed, "bench-truth", std::uint64_t(source_count));
  const int top = std::max(2, source_count / 2);
  std::vector<SourceSet> coalitions;
  for (int k = 0; k < 3; ++k) {
    const int size = 2 + static_cast<int>(uniform_index(rng, std::uint64_t(top - 1)));
    std::vector<int> pool(source_count);
    for (int i = 0; i < source_count; ++i) pool[i] = i;
    std::vector<int> members;
    for (int i = 0; i < size; ++i) {
      const auto j = uniform_index(rng, pool.size());
      members.push_back(pool[j]);
      pool.erase(pool.begin() + std::ptrdiff_t(j));
    }
    coalitions.push_back(SourceSet::of(source_count, members));
  }
  return from_minimal_winning(source_count, coalitions);
}

inline Dataset bench_dataset(const BenchSpec& spec, int source_count) {
  Rng rng = make_stream(spec.seed, "bench-data", std::uint64_t(source_count));
  return generate_synthetic(SynthSpec{source_count, spec.n_pos_bags, spec.n_neg_bags,
                                      spec.sets_per_bag, spec.instances_per_set,
                                      spec.noise_sigma, bench_truth(source_count, spec.seed),
                                      rng()});
}

/// Runs the study. Timing covers the optimizer call only; dataset
/// generation is excluded.
template <class Progress>
BenchTable run_bench(const BenchSpec& spec, Progress&& progress) {
  if (spec.repeats < 1) throw ValidationError("repeats must be positive");
  if (!(spec.cap_seconds > 0.0)) throw ValidationError("cap must be positive");
  for (int s : spec.source_counts) {
    if (s < 2) throw ValidationError("benchmark source counts must be at least 2");
    check_source_count(s);
  }
  BenchTable table{spec, {}, {}};
  for (int s : spec.source_counts) {
    const Dataset data = bench_dataset(spec, s);
    BenchCell bfm{"bfm", s, {}};
    BenchCell real{"real-fm", s, {}};
    for (int r = 0; r < spec.repeats; ++r) {
      EAConfig cfg = spec.config;
      Rng seeds = make_stream(spec.seed, "bench-run", std::uint64_t(s) * 1000 + std::uint64_t(r));
      cfg.seed = seeds();
      cfg.time_cap_seconds = spec.cap_seconds;
      const auto b = train_bfm(data, cfg);
      bfm.runs.push_back({b.wall_time_seconds, b.best_objective, b.generations_run, b.terminated_by});
      progress(bfm, bfm.runs.back());
      const auto f = train_real_fm(data, cfg);
      real.runs.push_back({f.wall_time_seconds, f.best_objective, f.generations_run, f.terminated_by});
      progress(real, real.runs.back());
    }
    table.bfm.push_back(std::move(bfm));
    table.real_fm.push_back(std::move(real));
  }
  return table;
}

inline BenchTable run_bench(const BenchSpec& spec) {
  return run_bench(spec, [](const BenchCell&, const BenchRun&) {});
}

}  // namespace bfmfuse
