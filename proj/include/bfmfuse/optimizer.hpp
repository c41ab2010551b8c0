#pragma once

#include <algorithm>
#include <atomic>
#include <cassert>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "bfmfuse/dataset.hpp"
#include "bfmfuse/errors.hpp"
#include "bfmfuse/measure.hpp"
#include "bfmfuse/objective.hpp"
#include "bfmfuse/random.hpp"

namespace bfmfuse {

/// `exhausted` is reported by exhaustive search only.
enum class Termination { converged, stalled, max_generations, time_cap, exhausted };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::stalled: return "stalled";
    case Termination::max_generations: return "max_generations";
    case Termination::time_cap: return "time_cap";
    case Termination::exhausted: return "exhausted";
  }
  return "?";
}

struct EAConfig {
  int population_size = 64;
  int elite_count = 4;
  /// Flip one free element and repair monotonicity.
  double small_mutation_rate = 0.8;
  /// Replace the child by a fresh random measure.
  double large_mutation_rate = 0.2;
  /// Meet/join of two ranked parents instead of mutation. Off by default.
  double crossover_rate = 0.0;
  int max_generations = 500;
  int stall_generations = 30;
  /// Convergence threshold on J, and the smallest decrease that counts as
  /// progress for the stall counter.
  double fitness_tolerance = 1e-6;
  /// Bernoulli rate for random BFM sampling.
  double init_density = 0.5;
  std::uint64_t seed = 0;
  std::optional<double> time_cap_seconds;
  int threads = 1;

  void validate() const {
    auto fail = [](const std::string& what) { throw ValidationError("EA config: " + what); };
    if (population_size < 2) fail("population_size must be at least 2");
    if (elite_count < 1 || elite_count >= population_size) {
      fail("elite_count must be in [1, population_size)");
    }
    if (!(small_mutation_rate >= 0.0 && large_mutation_rate >= 0.0)) {
      fail("mutation rates must be non-negative");
    }
    if (std::abs(small_mutation_rate + large_mutation_rate - 1.0) > 1e-9) {
      fail("small_mutation_rate + large_mutation_rate must equal 1");
    }
    if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) fail("crossover_rate must be in [0, 1]");
    if (max_generations < 1) fail("max_generations must be positive");
    if (stall_generations < 1) fail("stall_generations must be positive");
    if (!(fitness_tolerance >= 0.0)) fail("fitness_tolerance must be non-negative");
    if (!(init_density > 0.0 && init_density < 1.0)) fail("init_density must be in (0, 1)");
    if (time_cap_seconds && !(*time_cap_seconds > 0.0)) fail("time cap must be positive");
    if (threads < 1) fail("threads must be positive");
  }
};

template <class M>
struct TrainResult {
  M best_measure;
  double best_objective;
  int generations_run;
  double wall_time_seconds;
  /// Best objective after initialization, then after every generation.
  std::vector<double> objective_trace;
  Termination terminated_by;
  std::size_t evaluations;
};

namespace detail {

struct BinaryTraits {
  using measure_type = BinaryFuzzyMeasure;

  static measure_type sample(int s, const EAConfig& cfg, Rng& rng) {
    return sample_random(s, cfg.init_density, rng);
  }

  static measure_type small_mutation(const measure_type& g, Rng& rng) {
    const int s = g.source_count();
    const std::uint64_t free = lattice_size(s) - 2;
    if (free == 0) return g;
    const Mask m = static_cast<Mask>(1 + uniform_index(rng, free));
    return set_with_repair(g, SourceSet(m, s), !g.test(m));
  }

  /// Tie-break key: fewer winning subsets first.
  static double sparsity(const measure_type& g) { return static_cast<double>(g.count_ones()); }
};

struct RealTraits {
  using measure_type = RealFuzzyMeasure;

  static measure_type sample(int s, const EAConfig&, Rng& rng) {
    return sample_random_real(s, rng);
  }

  static measure_type small_mutation(const measure_type& g, Rng& rng) {
    const int s = g.source_count();
    const std::uint64_t free = lattice_size(s) - 2;
    if (free == 0) return g;
    const Mask m = static_cast<Mask>(1 + uniform_index(rng, free));
    return redraw_within_bounds(g, SourceSet(m, s), rng);
  }

  static double sparsity(const measure_type& g) { return g.total_mass(); }
};

template <class M>
struct Member {
  M measure;
  double fitness = 0.0;
  double sparsity = 0.0;
};

template <class M>
bool ranks_before(const Member<M>& a, const Member<M>& b) {
  if (a.fitness != b.fitness) return a.fitness < b.fitness;
  if (a.sparsity != b.sparsity) return a.sparsity < b.sparsity;
  return std::is_lt(a.measure <=> b.measure);
}

template <class M>
void evaluate_members(std::vector<Member<M>>& members, std::size_t from,
                      const ObjectiveEvaluator& eval, int threads) {
  const std::size_t n = members.size();
  if (threads <= 1 || n - from < 2) {
    for (std::size_t i = from; i < n; ++i) members[i].fitness = eval.total(members[i].measure);
    return;
  }
  std::atomic<std::size_t> next{from};
  std::vector<std::jthread> workers;
  const auto count = std::min<std::size_t>(std::size_t(threads), n - from);
  for (std::size_t t = 0; t < count; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        members[i].fitness = eval.total(members[i].measure);
      }
    });
  }
}

/// Linear ranking: rank r of n (0 = best) is drawn with weight n - r.
inline std::size_t rank_select(std::size_t n, Rng& rng) {
  std::uint64_t u = uniform_index(rng, n * (n + 1) / 2);
  for (std::size_t r = 0; r < n; ++r) {
    const std::uint64_t w = n - r;
    if (u < w) return r;
    u -= w;
  }
  return n - 1;
}

struct NoObserver {
  template <class M>
  void operator()(int, const std::vector<Member<M>>&) const {}
};

template <class Traits, class Observer>
TrainResult<typename Traits::measure_type> evolve(const Dataset& data, const EAConfig& cfg,
                                                  Observer&& observe) {
  using M = typename Traits::measure_type;
  using clock = std::chrono::steady_clock;
  cfg.validate();
  validate_dataset(data, true);
  const auto start = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

  const ObjectiveEvaluator eval(data);
  const int s = data.source_count;
  const auto n = static_cast<std::size_t>(cfg.population_size);
  std::size_t evaluations = 0;

  std::vector<Member<M>> population;
  population.reserve(n);
  {
    Rng rng = make_stream(cfg.seed, "init");
    population.push_back({M::minimum(s)});
    population.push_back({M::maximum(s)});
    while (population.size() < n) population.push_back({Traits::sample(s, cfg, rng)});
  }
  for (auto& m : population) {
    m.sparsity = Traits::sparsity(m.measure);
    assert(validate(m.measure).ok());
  }
  evaluate_members(population, 0, eval, cfg.threads);
  evaluations += population.size();
  std::sort(population.begin(), population.end(), ranks_before<M>);
  observe(0, population);

  std::vector<double> trace{population.front().fitness};
  double reference = population.front().fitness;
  int since_progress = 0;
  int generation = 0;
  Termination why;

  while (true) {
    if (population.front().fitness <= cfg.fitness_tolerance) {
      why = Termination::converged;
      break;
    }
    if (since_progress >= cfg.stall_generations) {
      why = Termination::stalled;
      break;
    }
    if (generation >= cfg.max_generations) {
      why = Termination::max_generations;
      break;
    }
    if (cfg.time_cap_seconds && elapsed() >= *cfg.time_cap_seconds) {
      why = Termination::time_cap;
      break;
    }

    ++generation;
    Rng rng = make_stream(cfg.seed, "mutation", std::uint64_t(generation));
    std::vector<Member<M>> next(population.begin(), population.begin() + cfg.elite_count);
    while (next.size() < n) {
      const M& parent = population[rank_select(n, rng)].measure;
      std::optional<M> child;
      if (cfg.crossover_rate > 0.0 && unit_uniform(rng) < cfg.crossover_rate) {
        const M& other = population[rank_select(n, rng)].measure;
        child = bernoulli(rng, 0.5) ? meet(parent, other) : join(parent, other);
      } else if (unit_uniform(rng) < cfg.small_mutation_rate) {
        child = Traits::small_mutation(parent, rng);
      } else {
        child = Traits::sample(s, cfg, rng);
      }
      assert(validate(*child).ok());
      const double sparsity = Traits::sparsity(*child);
      next.push_back({std::move(*child), 0.0, sparsity});
    }
    evaluate_members(next, std::size_t(cfg.elite_count), eval, cfg.threads);
    evaluations += next.size() - std::size_t(cfg.elite_count);
    std::sort(next.begin(), next.end(), ranks_before<M>);
    population = std::move(next);
    observe(generation, population);

    const double best = population.front().fitness;
    trace.push_back(best);
    if (best < reference - cfg.fitness_tolerance) {
      reference = best;
      since_progress = 0;
    } else {
      ++since_progress;
    }
  }

  return {population.front().measure, population.front().fitness, generation, elapsed(),
          std::move(trace), why, evaluations};
}

}  // namespace detail

/// Evolutionary search over binary fuzzy measures. The run is a pure
/// function of (data, cfg) apart from wall time; `cfg.threads` only
/// parallelizes fitness evaluation. `observe(generation, population)` sees
/// every population after ranking.
template <class Observer = detail::NoObserver>
TrainResult<BinaryFuzzyMeasure> train_bfm(const Dataset& data, const EAConfig& cfg,
                                          Observer&& observe = {}) {
  return detail::evolve<detail::BinaryTraits>(data, cfg, std::forward<Observer>(observe));
}

/// Same search skeleton over real-valued measures; the timing baseline.
template <class Observer = detail::NoObserver>
TrainResult<RealFuzzyMeasure> train_real_fm(const Dataset& data, const EAConfig& cfg,
                                            Observer&& observe = {}) {
  return detail::evolve<detail::RealTraits>(data, cfg, std::forward<Observer>(observe));
}

/// Global minimum over every BFM; ties go to the lowest value table in
/// lexicographic order.
inline TrainResult<BinaryFuzzyMeasure> train_exhaustive(const Dataset& data,
                                                        int cap = default_enumeration_cap) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const ObjectiveEvaluator eval(data);
  std::optional<BinaryFuzzyMeasure> best;
  double best_value = 0.0;
  std::size_t evaluations = 0;
  for_each_binary_measure(
      data.source_count,
      [&](BinaryFuzzyMeasure g) {
        const double j = eval.total(g);
        ++evaluations;
        if (!best || j < best_value || (j == best_value && g < *best)) {
          best = std::move(g);
          best_value = j;
        }
      },
      cap);
  const double seconds = std::chrono::duration<double>(clock::now() - start).count();
  return {std::move(*best), best_value, 0, seconds, {best_value}, Termination::exhausted,
          evaluations};
}

}  // namespace bfmfuse
