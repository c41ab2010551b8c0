#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "bfmfuse/choquet.hpp"
#include "bfmfuse/dataset.hpp"
#include "bfmfuse/errors.hpp"
#include "bfmfuse/measure.hpp"

namespace bfmfuse {

struct BagContribution {
  std::size_t bag_index;
  BagLabel label;
  double contribution;
  /// Candidate set that realized the outer max (negative bag) or min
  /// (positive bag); lowest index on ties.
  std::size_t selected_set;
};

struct ObjectiveBreakdown {
  double total = 0.0;
  double negative_term = 0.0;
  double positive_term = 0.0;
  std::vector<BagContribution> per_bag;
};

/// Multiple-instance, multi-resolution fusion objective
///
///   J = sum_neg  max_sets (min_instances CI)^2
///     + sum_pos  min_sets (max_instances CI - 1)^2
///
/// The sorted chain of every instance is computed once at construction, so
/// repeated evaluation against many measures costs O(S) per instance.
class ObjectiveEvaluator {
 public:
  explicit ObjectiveEvaluator(const Dataset& data) : source_count_(data.source_count) {
    validate_dataset(data);
    const auto s = static_cast<std::size_t>(source_count_);
    subsets_.reserve(data.instance_count() * s);
    weights_.reserve(data.instance_count() * s);
    for (std::size_t b = 0; b < data.bags.size(); ++b) {
      const auto& bag = data.bags[b];
      BagSpan span{b, bag.label, sets_.size(), 0};
      for (const auto& set : bag.candidate_sets) {
        const std::size_t first = instance_count_;
        for (const auto& inst : set.instances) {
          const ChoquetChain chain(inst);
          subsets_.insert(subsets_.end(), chain.subsets().begin(), chain.subsets().end());
          weights_.insert(weights_.end(), chain.weights().begin(), chain.weights().end());
          ++instance_count_;
        }
        sets_.push_back({first, instance_count_});
      }
      span.set_end = sets_.size();
      (bag.label == BagLabel::negative ? negative_ : positive_).push_back(span);
    }
  }

  int source_count() const noexcept { return source_count_; }
  std::size_t bag_count() const noexcept { return negative_.size() + positive_.size(); }

  /// Objective value only; bitwise equal to breakdown(g).total.
  template <FuzzyMeasure M>
  double total(const M& g) const {
    check_measure(g);
    double neg = 0.0;
    for (const auto& bag : negative_) neg += negative_bag(bag, g).first;
    double pos = 0.0;
    for (const auto& bag : positive_) pos += positive_bag(bag, g).first;
    return neg + pos;
  }

  /// Per-bag contributions in original bag order.
  template <FuzzyMeasure M>
  ObjectiveBreakdown breakdown(const M& g) const {
    check_measure(g);
    ObjectiveBreakdown out;
    out.per_bag.resize(bag_count());
    for (const auto& bag : negative_) {
      const auto [c, sel] = negative_bag(bag, g);
      out.negative_term += c;
      out.per_bag[bag.bag_index] = {bag.bag_index, BagLabel::negative, c, sel};
    }
    for (const auto& bag : positive_) {
      const auto [c, sel] = positive_bag(bag, g);
      out.positive_term += c;
      out.per_bag[bag.bag_index] = {bag.bag_index, BagLabel::positive, c, sel};
    }
    out.total = out.negative_term + out.positive_term;
    return out;
  }

  /// Choquet integral of the i-th instance in storage order.
  template <FuzzyMeasure M>
  double integral(std::size_t instance, const M& g) const {
    const std::size_t s = static_cast<std::size_t>(source_count_);
    const Mask* subsets = subsets_.data() + instance * s;
    const double* weights = weights_.data() + instance * s;
    double sum = 0.0;
    for (std::size_t k = 0; k < s; ++k) sum += weights[k] * g.value(subsets[k]);
    return sum;
  }

 private:
  struct SetSpan {
    std::size_t begin;
    std::size_t end;
  };
  struct BagSpan {
    std::size_t bag_index;
    BagLabel label;
    std::size_t set_begin;
    std::size_t set_end;
  };

  template <FuzzyMeasure M>
  void check_measure(const M& g) const {
    if (g.source_count() != source_count_) {
      throw StructuralError("measure is over " + std::to_string(g.source_count()) +
                            " sources, dataset has " + std::to_string(source_count_));
    }
  }

  template <FuzzyMeasure M>
  std::pair<double, std::size_t> negative_bag(const BagSpan& bag, const M& g) const {
    double best = -1.0;
    std::size_t arg = 0;
    for (std::size_t s = bag.set_begin; s < bag.set_end; ++s) {
      double lo = 2.0;
      for (std::size_t i = sets_[s].begin; i < sets_[s].end; ++i) {
        lo = std::min(lo, integral(i, g));
      }
      const double c = lo * lo;
      if (c > best) {
        best = c;
        arg = s - bag.set_begin;
      }
    }
    return {best, arg};
  }

  template <FuzzyMeasure M>
  std::pair<double, std::size_t> positive_bag(const BagSpan& bag, const M& g) const {
    double best = 2.0;
    std::size_t arg = 0;
    for (std::size_t s = bag.set_begin; s < bag.set_end; ++s) {
      double hi = -1.0;
      for (std::size_t i = sets_[s].begin; i < sets_[s].end; ++i) {
        hi = std::max(hi, integral(i, g));
      }
      const double c = (hi - 1.0) * (hi - 1.0);
      if (c < best) {
        best = c;
        arg = s - bag.set_begin;
      }
    }
    return {best, arg};
  }

  int source_count_;
  std::size_t instance_count_ = 0;
  std::vector<Mask> subsets_;
  std::vector<double> weights_;
  std::vector<SetSpan> sets_;
  std::vector<BagSpan> negative_;
  std::vector<BagSpan> positive_;
};

template <FuzzyMeasure M>
ObjectiveBreakdown objective(const M& g, const Dataset& data) {
  return ObjectiveEvaluator(data).breakdown(g);
}

}  // namespace bfmfuse
