#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bfmfuse/errors.hpp"
#include "bfmfuse/measure.hpp"

namespace bfmfuse {

enum class BagLabel : std::uint8_t { negative = 0, positive = 1 };

/// One length-S vector of per-source confidences.
using Instance = std::vector<double>;

/// Plausible matching hypotheses for one coarse-resolution unit. `truth`
/// holds evaluation-only instance labels; it is either empty or parallel to
/// `instances` and never read by training.
struct CandidateSet {
  std::vector<Instance> instances;
  std::vector<std::uint8_t> truth;

  friend bool operator==(const CandidateSet&, const CandidateSet&) = default;
};

struct Bag {
  BagLabel label = BagLabel::negative;
  std::vector<CandidateSet> candidate_sets;

  friend bool operator==(const Bag&, const Bag&) = default;
};

struct Dataset {
  int source_count = 0;
  std::vector<Bag> bags;

  std::size_t count(BagLabel label) const {
    std::size_t n = 0;
    for (const auto& b : bags) n += b.label == label ? 1 : 0;
    return n;
  }

  std::size_t instance_count() const {
    std::size_t n = 0;
    for (const auto& b : bags) {
      for (const auto& s : b.candidate_sets) n += s.instances.size();
    }
    return n;
  }

  /// True when every candidate set carries instance labels.
  bool has_truth() const {
    if (bags.empty()) return false;
    for (const auto& b : bags) {
      for (const auto& s : b.candidate_sets) {
        if (s.truth.empty()) return false;
      }
    }
    return true;
  }

  /// Visits instances in storage order (bag, candidate set, instance).
  template <class Fn>
  void for_each_instance(Fn&& fn) const {
    for (std::size_t b = 0; b < bags.size(); ++b) {
      const auto& sets = bags[b].candidate_sets;
      for (std::size_t s = 0; s < sets.size(); ++s) {
        for (std::size_t i = 0; i < sets[s].instances.size(); ++i) {
          fn(std::span<const double>(sets[s].instances[i]), b, s, i);
        }
      }
    }
  }

  /// Instance labels flattened in the same order as for_each_instance.
  std::vector<std::uint8_t> flattened_truth() const {
    if (!has_truth()) throw ValidationError("dataset carries no instance ground truth");
    std::vector<std::uint8_t> out;
    out.reserve(instance_count());
    for (const auto& b : bags) {
      for (const auto& s : b.candidate_sets) out.insert(out.end(), s.truth.begin(), s.truth.end());
    }
    return out;
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

namespace detail {

inline std::string where(std::size_t bag, std::size_t set) {
  return "bag " + std::to_string(bag) + ", candidate set " + std::to_string(set);
}

inline std::string where(std::size_t bag, std::size_t set, std::size_t inst) {
  return where(bag, set) + ", instance " + std::to_string(inst);
}

}  // namespace detail

/// Throws ValidationError naming the first offending bag / set / instance.
/// `require_both_polarities` adds the training precondition of at least one
/// positive and one negative bag.
inline void validate_dataset(const Dataset& data, bool require_both_polarities = false) {
  check_source_count(data.source_count);
  if (data.bags.empty()) throw ValidationError("dataset has no bags");
  bool any_truth = false;
  bool all_truth = true;
  for (std::size_t b = 0; b < data.bags.size(); ++b) {
    const auto& bag = data.bags[b];
    if (bag.label != BagLabel::negative && bag.label != BagLabel::positive) {
      throw ValidationError("bag " + std::to_string(b) + ": label must be 0 or 1");
    }
    if (bag.candidate_sets.empty()) {
      throw ValidationError("bag " + std::to_string(b) + " has no candidate sets");
    }
    for (std::size_t s = 0; s < bag.candidate_sets.size(); ++s) {
      const auto& set = bag.candidate_sets[s];
      if (set.instances.empty()) throw ValidationError(detail::where(b, s) + " is empty");
      for (std::size_t i = 0; i < set.instances.size(); ++i) {
        const auto& inst = set.instances[i];
        if (static_cast<int>(inst.size()) != data.source_count) {
          throw StructuralError(detail::where(b, s, i) + " has " + std::to_string(inst.size()) +
                                " values, expected " + std::to_string(data.source_count));
        }
        for (std::size_t k = 0; k < inst.size(); ++k) {
          if (!(inst[k] >= 0.0 && inst[k] <= 1.0)) {
            throw ValidationError(detail::where(b, s, i) + ", source " + std::to_string(k) +
                                  ": confidence " + std::to_string(inst[k]) +
                                  " outside [0, 1]");
          }
        }
      }
      if (set.truth.empty()) {
        all_truth = false;
        continue;
      }
      any_truth = true;
      if (set.truth.size() != set.instances.size()) {
        throw StructuralError(detail::where(b, s) + ": " + std::to_string(set.truth.size()) +
                              " truth labels for " + std::to_string(set.instances.size()) +
                              " instances");
      }
      for (std::size_t i = 0; i < set.truth.size(); ++i) {
        if (set.truth[i] > 1) {
          throw ValidationError(detail::where(b, s, i) + ": truth label must be 0 or 1");
        }
      }
    }
  }
  if (any_truth && !all_truth) {
    throw StructuralError("instance truth must be given for every candidate set or none");
  }
  if (require_both_polarities &&
      (data.count(BagLabel::positive) == 0 || data.count(BagLabel::negative) == 0)) {
    throw ValidationError("training needs at least one positive and one negative bag");
  }
}

}  // namespace bfmfuse
