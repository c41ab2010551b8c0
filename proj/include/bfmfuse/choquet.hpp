#pragma once

#include <algorithm>
#include <array>
#include <numeric>
#include <span>
#include <string>

#include "bfmfuse/errors.hpp"
#include "bfmfuse/measure.hpp"

namespace bfmfuse {

/// Rejects instances of the wrong length or with confidences outside [0, 1].
/// Values are never clamped.
inline void check_instance(std::span<const double> h, int source_count) {
  if (static_cast<int>(h.size()) != source_count) {
    throw StructuralError("instance has " + std::to_string(h.size()) + " values, expected " +
                          std::to_string(source_count));
  }
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] >= 0.0 && h[i] <= 1.0)) {
      throw ValidationError("confidence " + std::to_string(h[i]) + " of source " +
                            std::to_string(i) + " lies outside [0, 1]");
    }
  }
}

/// The sorted chain of an instance: sources by descending confidence
/// (stable on ties), the nested top-k subsets A_k and the weights
/// h_(k) - h_(k+1). It does not depend on the measure, so it can be computed
/// once per instance and reused against many measures.
class ChoquetChain {
 public:
  explicit ChoquetChain(std::span<const double> h) : size_(static_cast<int>(h.size())) {
    std::array<int, max_sources> order{};
    std::iota(order.begin(), order.begin() + size_, 0);
    std::stable_sort(order.begin(), order.begin() + size_,
                     [&](int a, int b) { return h[a] > h[b]; });
    Mask acc = 0;
    for (int k = 0; k < size_; ++k) {
      acc |= Mask{1} << order[k];
      subsets_[k] = acc;
      const double next = k + 1 < size_ ? h[order[k + 1]] : 0.0;
      weights_[k] = h[order[k]] - next;
    }
  }

  int size() const noexcept { return size_; }
  std::span<const Mask> subsets() const noexcept { return {subsets_.data(), std::size_t(size_)}; }
  std::span<const double> weights() const noexcept {
    return {weights_.data(), std::size_t(size_)};
  }

  template <FuzzyMeasure M>
  double integrate(const M& g) const {
    double sum = 0.0;
    for (int k = 0; k < size_; ++k) sum += weights_[k] * g.value(subsets_[k]);
    return sum;
  }

 private:
  int size_;
  std::array<Mask, max_sources> subsets_{};
  std::array<double, max_sources> weights_{};
};

/// Discrete Choquet integral of `h` with respect to `g`:
///   sum_k (h_(k) - h_(k+1)) g(A_k),  h_(S+1) = 0,
/// with h sorted descending and A_k the k sources of largest confidence.
template <FuzzyMeasure M>
double choquet_integral(std::span<const double> h, const M& g) {
  check_instance(h, g.source_count());
  return ChoquetChain(h).integrate(g);
}

/// Max over winning coalitions of the smallest confidence inside the
/// coalition. Equals the Choquet integral for binary measures; kept as an
/// independent brute-force route.
inline double choquet_maxmin(std::span<const double> h, const BinaryFuzzyMeasure& g) {
  check_instance(h, g.source_count());
  double best = 0.0;
  for (std::size_t m = 1; m < g.size(); ++m) {
    if (!g.test(Mask(m))) continue;
    double lo = 1.0;
    for (int i = 0; i < g.source_count(); ++i) {
      if ((m >> i) & 1U) lo = std::min(lo, h[i]);
    }
    best = std::max(best, lo);
  }
  return best;
}

}  // namespace bfmfuse
