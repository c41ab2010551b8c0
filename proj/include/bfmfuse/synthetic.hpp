#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "bfmfuse/dataset.hpp"
#include "bfmfuse/errors.hpp"
#include "bfmfuse/measure.hpp"
#include "bfmfuse/random.hpp"

namespace bfmfuse {

struct IntRange {
  int min = 1;
  int max = 1;

  friend bool operator==(const IntRange&, const IntRange&) = default;
};

/// Recipe for a synthetic multi-resolution MIL dataset whose bag labels are
/// explained by `truth_measure`.
struct SynthSpec {
  int source_count;
  int n_pos_bags;
  int n_neg_bags;
  IntRange sets_per_bag;
  IntRange instances_per_set;
  double noise_sigma;
  BinaryFuzzyMeasure truth_measure;
  std::uint64_t seed;
};

inline void validate_spec(const SynthSpec& spec) {
  check_source_count(spec.source_count);
  if (spec.n_pos_bags < 1 || spec.n_neg_bags < 1) {
    throw ValidationError("synthetic spec needs at least one positive and one negative bag");
  }
  for (const auto& [name, r] : {std::pair{"sets_per_bag", spec.sets_per_bag},
                                std::pair{"instances_per_set", spec.instances_per_set}}) {
    if (r.min < 1 || r.max < r.min) {
      throw ValidationError(std::string(name) + " must be a non-empty range of positive counts");
    }
  }
  if (!(spec.noise_sigma >= 0.0)) throw ValidationError("noise_sigma must be >= 0");
  if (spec.truth_measure.source_count() != spec.source_count) {
    throw StructuralError("truth measure is over " +
                          std::to_string(spec.truth_measure.source_count()) +
                          " sources, spec says " + std::to_string(spec.source_count));
  }
}

namespace detail {

class SynthBuilder {
 public:
  SynthBuilder(const SynthSpec& spec)
      : spec_(spec),
        rng_(make_stream(spec.seed, "synth")),
        winning_(minimal_winning_coalitions(spec.truth_measure)),
        losing_(maximal_losing_coalitions(spec.truth_measure)) {}

  Dataset build() {
    Dataset data;
    data.source_count = spec_.source_count;
    for (int b = 0; b < spec_.n_pos_bags; ++b) data.bags.push_back(positive_bag());
    for (int b = 0; b < spec_.n_neg_bags; ++b) data.bags.push_back(negative_bag());
    if (spec_.noise_sigma > 0.0) {
      for (auto& bag : data.bags) {
        for (auto& set : bag.candidate_sets) {
          for (auto& inst : set.instances) {
            for (double& v : inst) {
              v = std::clamp(v + spec_.noise_sigma * standard_normal(rng_), 0.0, 1.0);
            }
          }
        }
      }
    }
    return data;
  }

 private:
  int draw(IntRange r) {
    return r.min + static_cast<int>(uniform_index(rng_, std::uint64_t(r.max - r.min + 1)));
  }

  const SourceSet& pick(const std::vector<SourceSet>& from) {
    return from[uniform_index(rng_, from.size())];
  }

  // Indicator of a minimal winning coalition: integral exactly 1.
  Instance high_instance() {
    const auto& coalition = pick(winning_);
    Instance h(spec_.source_count, 0.0);
    for (int i : coalition.members()) h[i] = 1.0;
    return h;
  }

  // Strong on a maximal losing coalition, weak elsewhere. Every winning
  // coalition has a member outside the losing one, so the integral is at
  // most 0.1, and exactly 0 when `exact_zero`.
  Instance low_instance(bool exact_zero) {
    const auto& coalition = pick(losing_);
    Instance h(spec_.source_count, 0.0);
    for (int i = 0; i < spec_.source_count; ++i) {
      if (coalition.contains(i)) {
        h[i] = uniform_between(rng_, 0.6, 1.0);
      } else if (!exact_zero) {
        h[i] = uniform_between(rng_, 0.0, 0.1);
      }
    }
    return h;
  }

  // One anchor instance with integral exactly 0, the rest at most 0.1.
  CandidateSet background_set() {
    CandidateSet set;
    const int n = draw(spec_.instances_per_set);
    const auto anchor = uniform_index(rng_, std::uint64_t(n));
    for (int i = 0; i < n; ++i) {
      set.instances.push_back(low_instance(std::uint64_t(i) == anchor));
      set.truth.push_back(0);
    }
    return set;
  }

  Bag positive_bag() {
    Bag bag{BagLabel::positive, {}};
    const int n_sets = draw(spec_.sets_per_bag);
    const auto target = uniform_index(rng_, std::uint64_t(n_sets));
    for (int s = 0; s < n_sets; ++s) {
      CandidateSet set = background_set();
      if (std::uint64_t(s) == target) {
        const auto slot = uniform_index(rng_, set.instances.size());
        set.instances[slot] = high_instance();
        set.truth[slot] = 1;
      }
      bag.candidate_sets.push_back(std::move(set));
    }
    return bag;
  }

  Bag negative_bag() {
    Bag bag{BagLabel::negative, {}};
    const int n_sets = draw(spec_.sets_per_bag);
    for (int s = 0; s < n_sets; ++s) bag.candidate_sets.push_back(background_set());
    return bag;
  }

  const SynthSpec& spec_;
  Rng rng_;
  std::vector<SourceSet> winning_;
  std::vector<SourceSet> losing_;
};

}  // namespace detail

/// Positive bags first, then negative bags. Before noise, each positive bag
/// has one candidate set holding an instance whose integral under the truth
/// measure is exactly 1, and every negative-bag instance integrates to at
/// most 0.1, with one exact 0 per candidate set. Noise is N(0, sigma^2) per
/// source value, clipped to [0, 1]. Instance labels mark the integral-1
/// instances.
inline Dataset generate_synthetic(const SynthSpec& spec) {
  validate_spec(spec);
  return detail::SynthBuilder(spec).build();
}

}  // namespace bfmfuse
