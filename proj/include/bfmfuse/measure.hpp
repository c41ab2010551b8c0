#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <concepts>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bfmfuse/errors.hpp"
#include "bfmfuse/random.hpp"

/*!
  \file measure.hpp
  \brief Binary and real-valued fuzzy measures on the subset lattice of S sources

  A measure over S sources is stored as a table of 2^S values indexed by
  bitmask: bit i of the index is set iff source i belongs to the subset.
  Both measure types are immutable; every edit returns a new value.
*/

namespace bfmfuse {

inline constexpr int max_sources = 24;
inline constexpr int default_enumeration_cap = 5;
/// Enumeration packs a whole measure into one 64-bit word.
inline constexpr int max_enumeration_cap = 6;

using Mask = std::uint32_t;

inline constexpr Mask full_mask(int source_count) {
  return static_cast<Mask>((std::uint64_t{1} << source_count) - 1);
}

inline constexpr std::size_t lattice_size(int source_count) {
  return std::size_t{1} << source_count;
}

inline void check_source_count(int source_count) {
  if (source_count < 1) {
    throw ValidationError("source count must be at least 1, got " +
                          std::to_string(source_count));
  }
  if (source_count > max_sources) {
    throw CapError("source count " + std::to_string(source_count) +
                   " exceeds the supported maximum of " + std::to_string(max_sources));
  }
}

/// A subset of the S sources.
class SourceSet {
 public:
  SourceSet(Mask mask, int source_count) : mask_(mask), source_count_(source_count) {
    check_source_count(source_count);
    if (mask > full_mask(source_count)) {
      throw StructuralError("subset mask " + std::to_string(mask) + " out of range for " +
                            std::to_string(source_count) + " sources");
    }
  }

  static SourceSet empty(int source_count) { return {0, source_count}; }
  static SourceSet full(int source_count) { return {full_mask(source_count), source_count}; }

  /// Zero-based source indices.
  static SourceSet of(int source_count, std::span<const int> sources) {
    check_source_count(source_count);
    Mask mask = 0;
    for (int s : sources) {
      if (s < 0 || s >= source_count) {
        throw StructuralError("source index " + std::to_string(s) + " out of range for " +
                              std::to_string(source_count) + " sources");
      }
      mask |= Mask{1} << s;
    }
    return {mask, source_count};
  }
  static SourceSet of(int source_count, std::initializer_list<int> sources) {
    return of(source_count, std::span<const int>(sources.begin(), sources.size()));
  }

  Mask mask() const noexcept { return mask_; }
  int source_count() const noexcept { return source_count_; }
  int size() const noexcept { return std::popcount(mask_); }
  bool is_empty() const noexcept { return mask_ == 0; }
  bool is_full() const noexcept { return mask_ == full_mask(source_count_); }
  bool contains(int source) const noexcept { return (mask_ >> source) & 1U; }
  bool is_subset_of(const SourceSet& other) const noexcept {
    return (mask_ & other.mask_) == mask_;
  }

  std::vector<int> members() const {
    std::vector<int> out;
    for (int i = 0; i < source_count_; ++i) {
      if (contains(i)) out.push_back(i);
    }
    return out;
  }

  /// "{0,2}" with `base` added to every index (1 gives the conventional
  /// one-based source labels).
  std::string to_string(int base = 0) const {
    std::string out = "{";
    bool first = true;
    for (int i : members()) {
      if (!first) out += ",";
      out += std::to_string(i + base);
      first = false;
    }
    return out + "}";
  }

  friend bool operator==(const SourceSet&, const SourceSet&) = default;

 private:
  Mask mask_;
  int source_count_;
};

/// Visits every mask of the lattice in increasing cardinality, increasing
/// numeric value within a cardinality.
template <class Fn>
void for_each_by_cardinality(int source_count, Fn&& fn) {
  const std::uint64_t limit = std::uint64_t{1} << source_count;
  fn(Mask{0});
  for (int k = 1; k <= source_count; ++k) {
    std::uint64_t m = (std::uint64_t{1} << k) - 1;
    while (m < limit) {
      fn(static_cast<Mask>(m));
      // Gosper's hack: next larger integer with the same popcount
      const std::uint64_t low = m & (~m + 1);
      const std::uint64_t ripple = m + low;
      m = (((ripple ^ m) >> 2) / low) | ripple;
    }
  }
}

/// All supersets of `mask` within S sources, `mask` itself included.
template <class Fn>
void for_each_superset(Mask mask, int source_count, Fn&& fn) {
  const Mask free = full_mask(source_count) & ~mask;
  Mask sub = free;
  while (true) {
    fn(static_cast<Mask>(mask | sub));
    if (sub == 0) break;
    sub = (sub - 1) & free;
  }
}

/// All subsets of `mask`, `mask` and the empty set included.
template <class Fn>
void for_each_subset(Mask mask, Fn&& fn) {
  Mask sub = mask;
  while (true) {
    fn(sub);
    if (sub == 0) break;
    sub = (sub - 1) & mask;
  }
}

// ---------------------------------------------------------------------------
// Axiom checks

enum class Axiom { range, empty_set, normalization, monotonicity };

inline const char* to_string(Axiom axiom) {
  switch (axiom) {
    case Axiom::range: return "range";
    case Axiom::empty_set: return "empty-set rule";
    case Axiom::normalization: return "normalization";
    case Axiom::monotonicity: return "monotonicity";
  }
  return "?";
}

/// First offending pair for one axiom. For the pointwise axioms
/// (range, empty set, normalization) subset == superset.
struct AxiomViolation {
  Axiom axiom;
  Mask subset;
  Mask superset;
};

struct ValidityReport {
  std::vector<AxiomViolation> violations;

  bool ok() const noexcept { return violations.empty(); }

  bool violates(Axiom axiom) const noexcept {
    return std::any_of(violations.begin(), violations.end(),
                       [axiom](const AxiomViolation& v) { return v.axiom == axiom; });
  }

  std::string describe() const {
    if (ok()) return "valid";
    std::string out;
    for (const auto& v : violations) {
      if (!out.empty()) out += "; ";
      out += to_string(v.axiom);
      out += " violated at mask " + std::to_string(v.subset);
      if (v.superset != v.subset) out += " <= " + std::to_string(v.superset);
    }
    return out;
  }
};

namespace detail {

template <class T>
bool in_range(T v) {
  if constexpr (std::is_floating_point_v<T>) {
    return v >= T(0) && v <= T(1);  // false for NaN
  } else {
    return v == T(0) || v == T(1);
  }
}

}  // namespace detail

/// Checks the three measure axioms (plus the value range) on a raw table.
/// Monotonicity is checked on covering pairs (A, A + {i}) only, which
/// implies it for every A <= B. Throws StructuralError when the table does
/// not have exactly 2^S entries.
template <class T>
ValidityReport validate_values(int source_count, std::span<const T> values) {
  check_source_count(source_count);
  const std::size_t n = lattice_size(source_count);
  if (values.size() != n) {
    throw StructuralError("measure over " + std::to_string(source_count) + " sources needs " +
                          std::to_string(n) + " values, got " + std::to_string(values.size()));
  }
  ValidityReport report;
  for (std::size_t m = 0; m < n; ++m) {
    if (!detail::in_range(values[m])) {
      report.violations.push_back({Axiom::range, Mask(m), Mask(m)});
      break;
    }
  }
  if (values[0] != T(0)) report.violations.push_back({Axiom::empty_set, 0, 0});
  const Mask full = full_mask(source_count);
  if (values[full] != T(1)) report.violations.push_back({Axiom::normalization, full, full});
  for (std::size_t m = 0; m < n; ++m) {
    bool found = false;
    for (int i = 0; i < source_count && !found; ++i) {
      const std::size_t up = m | (std::size_t{1} << i);
      if (up != m && values[m] > values[up]) {
        report.violations.push_back({Axiom::monotonicity, Mask(m), Mask(up)});
        found = true;
      }
    }
    if (found) break;
  }
  return report;
}

struct trusted_t {
  explicit trusted_t() = default;
};
/// Tag for constructors that skip validation; callers guarantee the axioms.
inline constexpr trusted_t trusted{};

// ---------------------------------------------------------------------------
// BinaryFuzzyMeasure

class BinaryFuzzyMeasure {
 public:
  static std::size_t word_count(int source_count) {
    return std::max<std::size_t>(1, lattice_size(source_count) / 64);
  }

  BinaryFuzzyMeasure(trusted_t, int source_count, std::vector<std::uint64_t> words)
      : source_count_(source_count), words_(std::move(words)) {}

  static BinaryFuzzyMeasure from_values(int source_count, std::span<const std::uint8_t> values) {
    const auto report = validate_values(source_count, values);
    if (!report.ok()) throw ValidationError("invalid binary measure: " + report.describe());
    std::vector<std::uint64_t> words(word_count(source_count), 0);
    for (std::size_t m = 0; m < values.size(); ++m) {
      if (values[m]) words[m >> 6] |= std::uint64_t{1} << (m & 63);
    }
    return {trusted, source_count, std::move(words)};
  }

  /// Only the full set is 1; the integral reduces to min.
  static BinaryFuzzyMeasure minimum(int source_count) {
    check_source_count(source_count);
    std::vector<std::uint64_t> words(word_count(source_count), 0);
    const Mask full = full_mask(source_count);
    words[full >> 6] |= std::uint64_t{1} << (full & 63);
    return {trusted, source_count, std::move(words)};
  }

  /// Every non-empty set is 1; the integral reduces to max.
  static BinaryFuzzyMeasure maximum(int source_count) {
    check_source_count(source_count);
    const std::size_t n = lattice_size(source_count);
    std::vector<std::uint64_t> words(word_count(source_count), ~std::uint64_t{0});
    if (n < 64) words[0] = (std::uint64_t{1} << n) - 1;
    words[0] &= ~std::uint64_t{1};
    return {trusted, source_count, std::move(words)};
  }

  int source_count() const noexcept { return source_count_; }
  std::size_t size() const noexcept { return lattice_size(source_count_); }

  bool test(Mask mask) const noexcept { return (words_[mask >> 6] >> (mask & 63)) & 1U; }
  double value(Mask mask) const noexcept { return test(mask) ? 1.0 : 0.0; }

  bool operator()(const SourceSet& set) const {
    if (set.source_count() != source_count_) {
      throw StructuralError("subset is over " + std::to_string(set.source_count()) +
                            " sources, measure over " + std::to_string(source_count_));
    }
    return test(set.mask());
  }

  std::size_t count_ones() const noexcept {
    std::size_t total = 0;
    for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
    return total;
  }

  std::vector<std::uint8_t> values() const {
    std::vector<std::uint8_t> out(size());
    for (std::size_t m = 0; m < out.size(); ++m) out[m] = test(Mask(m)) ? 1 : 0;
    return out;
  }

  std::span<const std::uint64_t> words() const noexcept { return words_; }

  friend bool operator==(const BinaryFuzzyMeasure& a, const BinaryFuzzyMeasure& b) {
    return a.source_count_ == b.source_count_ && a.words_ == b.words_;
  }

  /// Lexicographic order of the value tables read from mask 0 upward.
  friend std::strong_ordering operator<=>(const BinaryFuzzyMeasure& a,
                                          const BinaryFuzzyMeasure& b) {
    if (auto c = a.source_count_ <=> b.source_count_; c != 0) return c;
    for (std::size_t w = 0; w < a.words_.size(); ++w) {
      const std::uint64_t diff = a.words_[w] ^ b.words_[w];
      if (diff == 0) continue;
      const int bit = std::countr_zero(diff);
      return ((a.words_[w] >> bit) & 1U) ? std::strong_ordering::greater
                                         : std::strong_ordering::less;
    }
    return std::strong_ordering::equal;
  }

 private:
  int source_count_;
  std::vector<std::uint64_t> words_;
};

// ---------------------------------------------------------------------------
// RealFuzzyMeasure

class RealFuzzyMeasure {
 public:
  RealFuzzyMeasure(trusted_t, int source_count, std::vector<double> values)
      : source_count_(source_count), values_(std::move(values)) {}

  static RealFuzzyMeasure from_values(int source_count, std::span<const double> values) {
    const auto report = validate_values(source_count, values);
    if (!report.ok()) throw ValidationError("invalid real measure: " + report.describe());
    return {trusted, source_count, std::vector<double>(values.begin(), values.end())};
  }

  static RealFuzzyMeasure minimum(int source_count) {
    check_source_count(source_count);
    std::vector<double> v(lattice_size(source_count), 0.0);
    v.back() = 1.0;
    return {trusted, source_count, std::move(v)};
  }

  static RealFuzzyMeasure maximum(int source_count) {
    check_source_count(source_count);
    std::vector<double> v(lattice_size(source_count), 1.0);
    v.front() = 0.0;
    return {trusted, source_count, std::move(v)};
  }

  static RealFuzzyMeasure from_binary(const BinaryFuzzyMeasure& g) {
    std::vector<double> v(g.size());
    for (std::size_t m = 0; m < v.size(); ++m) v[m] = g.value(Mask(m));
    return {trusted, g.source_count(), std::move(v)};
  }

  int source_count() const noexcept { return source_count_; }
  std::size_t size() const noexcept { return values_.size(); }
  double value(Mask mask) const noexcept { return values_[mask]; }
  double operator()(const SourceSet& set) const {
    if (set.source_count() != source_count_) {
      throw StructuralError("subset is over " + std::to_string(set.source_count()) +
                            " sources, measure over " + std::to_string(source_count_));
    }
    return values_[set.mask()];
  }
  std::span<const double> values() const noexcept { return values_; }

  double total_mass() const noexcept {
    double s = 0.0;
    for (double v : values_) s += v;
    return s;
  }

  friend bool operator==(const RealFuzzyMeasure&, const RealFuzzyMeasure&) = default;

  friend std::partial_ordering operator<=>(const RealFuzzyMeasure& a, const RealFuzzyMeasure& b) {
    if (auto c = a.source_count_ <=> b.source_count_; c != 0) return c;
    return std::lexicographical_compare_three_way(a.values_.begin(), a.values_.end(),
                                                  b.values_.begin(), b.values_.end());
  }

 private:
  int source_count_;
  std::vector<double> values_;
};

template <class M>
concept FuzzyMeasure = requires(const M& m, Mask mask) {
  { m.source_count() } -> std::convertible_to<int>;
  { m.value(mask) } -> std::convertible_to<double>;
};

inline ValidityReport validate(const BinaryFuzzyMeasure& g) {
  const auto v = g.values();
  return validate_values(g.source_count(), std::span<const std::uint8_t>(v));
}

inline ValidityReport validate(const RealFuzzyMeasure& g) {
  return validate_values(g.source_count(), g.values());
}

// ---------------------------------------------------------------------------
// Editing and sampling

namespace detail {

inline void set_bit(std::vector<std::uint64_t>& words, Mask m, bool on) {
  const std::uint64_t bit = std::uint64_t{1} << (m & 63);
  if (on) {
    words[m >> 6] |= bit;
  } else {
    words[m >> 6] &= ~bit;
  }
}

inline bool get_bit(const std::vector<std::uint64_t>& words, Mask m) {
  return (words[m >> 6] >> (m & 63)) & 1U;
}

inline void check_editable(const SourceSet& subset, int source_count) {
  if (subset.source_count() != source_count) {
    throw StructuralError("subset is over " + std::to_string(subset.source_count()) +
                          " sources, measure over " + std::to_string(source_count));
  }
  if (subset.is_empty()) throw PinnedElementError("the empty set is pinned to 0");
  if (subset.is_full()) throw PinnedElementError("the full set is pinned to 1");
}

}  // namespace detail

/// Sets one element and restores monotonicity: raising a subset to 1 raises
/// all of its supersets, lowering it to 0 lowers all of its subsets.
inline BinaryFuzzyMeasure set_with_repair(const BinaryFuzzyMeasure& g, const SourceSet& subset,
                                          bool bit) {
  detail::check_editable(subset, g.source_count());
  std::vector<std::uint64_t> words(g.words().begin(), g.words().end());
  if (bit) {
    for_each_superset(subset.mask(), g.source_count(),
                      [&](Mask m) { detail::set_bit(words, m, true); });
  } else {
    // the empty set is already 0, so lowering it too is harmless
    for_each_subset(subset.mask(), [&](Mask m) { detail::set_bit(words, m, false); });
  }
  return {trusted, g.source_count(), std::move(words)};
}

inline void check_density(double density) {
  if (!(density > 0.0 && density < 1.0)) {
    throw ValidationError("density must lie strictly between 0 and 1, got " +
                          std::to_string(density));
  }
}

/// Random BFM: sweep subsets by cardinality; a subset is forced to 1 when
/// one of its immediate subsets already is, otherwise it is 1 with
/// probability `density`. The full set is forced to 1.
inline BinaryFuzzyMeasure sample_random(int source_count, double density, Rng& rng) {
  check_source_count(source_count);
  check_density(density);
  const Mask full = full_mask(source_count);
  std::vector<std::uint64_t> words(BinaryFuzzyMeasure::word_count(source_count), 0);
  for_each_by_cardinality(source_count, [&](Mask m) {
    if (m == 0) return;
    if (m == full) {
      detail::set_bit(words, m, true);
      return;
    }
    bool forced = false;
    for (Mask rest = m; rest != 0 && !forced; rest &= rest - 1) {
      forced = detail::get_bit(words, m & ~(rest & (~rest + 1)));
    }
    if (forced || bernoulli(rng, density)) detail::set_bit(words, m, true);
  });
  return {trusted, source_count, std::move(words)};
}

inline BinaryFuzzyMeasure sample_random(int source_count, double density, std::uint64_t seed) {
  Rng rng = make_stream(seed, "measure");
  return sample_random(source_count, density, rng);
}

/// Subsets valued 1 whose immediate subsets are all 0. Ascending mask order.
inline std::vector<SourceSet> minimal_winning_coalitions(const BinaryFuzzyMeasure& g) {
  std::vector<SourceSet> out;
  const int s = g.source_count();
  for (std::size_t m = 1; m < g.size(); ++m) {
    if (!g.test(Mask(m))) continue;
    bool minimal = true;
    for (Mask rest = Mask(m); rest != 0 && minimal; rest &= rest - 1) {
      minimal = !g.test(Mask(m) & ~(rest & (~rest + 1)));
    }
    if (minimal) out.emplace_back(Mask(m), s);
  }
  return out;
}

/// Subsets valued 0 whose immediate supersets are all 1. Ascending mask order.
inline std::vector<SourceSet> maximal_losing_coalitions(const BinaryFuzzyMeasure& g) {
  std::vector<SourceSet> out;
  const int s = g.source_count();
  const Mask full = full_mask(s);
  for (std::size_t m = 0; m < g.size(); ++m) {
    if (g.test(Mask(m))) continue;
    bool maximal = true;
    for (Mask rest = full & ~Mask(m); rest != 0 && maximal; rest &= rest - 1) {
      maximal = g.test(Mask(m) | (rest & (~rest + 1)));
    }
    if (maximal) out.emplace_back(Mask(m), s);
  }
  return out;
}

/// Upward closure of a family of winning coalitions.
inline BinaryFuzzyMeasure from_minimal_winning(int source_count,
                                               std::span<const SourceSet> coalitions) {
  check_source_count(source_count);
  if (coalitions.empty()) {
    throw ValidationError("at least one winning coalition is required (normalization)");
  }
  std::vector<std::uint64_t> words(BinaryFuzzyMeasure::word_count(source_count), 0);
  for (const auto& c : coalitions) {
    if (c.source_count() != source_count) {
      throw StructuralError("coalition " + c.to_string() + " is over " +
                            std::to_string(c.source_count()) + " sources, expected " +
                            std::to_string(source_count));
    }
    if (c.is_empty()) throw ValidationError("the empty set cannot be a winning coalition");
    for_each_superset(c.mask(), source_count, [&](Mask m) { detail::set_bit(words, m, true); });
  }
  return {trusted, source_count, std::move(words)};
}

/// Pointwise AND of two BFMs; monotone and normalized whenever both inputs are.
inline BinaryFuzzyMeasure meet(const BinaryFuzzyMeasure& a, const BinaryFuzzyMeasure& b) {
  if (a.source_count() != b.source_count()) throw StructuralError("source count mismatch");
  std::vector<std::uint64_t> words(a.words().size());
  for (std::size_t i = 0; i < words.size(); ++i) words[i] = a.words()[i] & b.words()[i];
  return {trusted, a.source_count(), std::move(words)};
}

inline BinaryFuzzyMeasure join(const BinaryFuzzyMeasure& a, const BinaryFuzzyMeasure& b) {
  if (a.source_count() != b.source_count()) throw StructuralError("source count mismatch");
  std::vector<std::uint64_t> words(a.words().size());
  for (std::size_t i = 0; i < words.size(); ++i) words[i] = a.words()[i] | b.words()[i];
  return {trusted, a.source_count(), std::move(words)};
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration

/// Number of valid BFMs over S sources, i.e. the Dedekind number M(S) minus
/// the two constant functions. Known values only.
inline std::string binary_measure_count(int source_count) {
  static const char* const counts[] = {
      "0",
      "1",
      "4",
      "18",
      "166",
      "7579",
      "7828352",
      "2414682040996",
      "56130437228687557907786",
      "286386577668298411128469151667598498812364",
  };
  if (source_count >= 0 && source_count < 10) return counts[source_count];
  return "more than 10^41";
}

namespace detail {

template <class Fn>
struct MeasureEnumerator {
  int source_count;
  std::vector<Mask> order;
  Fn& emit;

  void run(std::size_t pos, std::uint64_t bits) {
    if (pos == order.size()) {
      emit(bits | (std::uint64_t{1} << full_mask(source_count)));
      return;
    }
    const Mask m = order[pos];
    // any immediate subset already 1 forces this one to 1
    bool forced = false;
    for (Mask rest = m; rest != 0 && !forced; rest &= rest - 1) {
      forced = (bits >> (m & ~(rest & (~rest + 1)))) & 1U;
    }
    const std::uint64_t with = bits | (std::uint64_t{1} << m);
    if (forced) {
      run(pos + 1, with);
    } else {
      run(pos + 1, bits);
      run(pos + 1, with);
    }
  }
};

}  // namespace detail

/// Calls `fn` once for every valid BFM over S sources, in the order of a
/// depth-first assignment by cardinality with 0 tried before 1.
template <class Fn>
void for_each_binary_measure(int source_count, Fn&& fn, int cap = default_enumeration_cap) {
  check_source_count(source_count);
  if (cap < 1 || cap > max_enumeration_cap) {
    throw ValidationError("enumeration cap must be in [1, " +
                          std::to_string(max_enumeration_cap) + "]");
  }
  if (source_count > cap) {
    throw CapError("refusing to enumerate " + binary_measure_count(source_count) +
                   " binary measures over " + std::to_string(source_count) +
                   " sources (cap is " + std::to_string(cap) + ")");
  }
  const Mask full = full_mask(source_count);
  std::vector<Mask> order;
  for_each_by_cardinality(source_count, [&](Mask m) {
    if (m != 0 && m != full) order.push_back(m);
  });
  auto wrap = [&](std::uint64_t bits) {
    fn(BinaryFuzzyMeasure(trusted, source_count, std::vector<std::uint64_t>{bits}));
  };
  detail::MeasureEnumerator<decltype(wrap)> e{source_count, std::move(order), wrap};
  e.run(0, 0);
}

inline std::vector<BinaryFuzzyMeasure> enumerate_all(int source_count,
                                                     int cap = default_enumeration_cap) {
  std::vector<BinaryFuzzyMeasure> out;
  for_each_binary_measure(
      source_count, [&](BinaryFuzzyMeasure g) { out.push_back(std::move(g)); }, cap);
  return out;
}

// ---------------------------------------------------------------------------
// Real-valued measures

/// Largest value among the immediate subsets of `mask` (0 for the empty set).
inline double lower_bound_at(const RealFuzzyMeasure& g, Mask mask) {
  double lo = 0.0;
  for (Mask rest = mask; rest != 0; rest &= rest - 1) {
    lo = std::max(lo, g.value(mask & ~(rest & (~rest + 1))));
  }
  return lo;
}

/// Smallest value among the immediate supersets of `mask` (1 for the full set).
inline double upper_bound_at(const RealFuzzyMeasure& g, Mask mask) {
  double hi = 1.0;
  for (Mask rest = full_mask(g.source_count()) & ~mask; rest != 0; rest &= rest - 1) {
    hi = std::min(hi, g.value(mask | (rest & (~rest + 1))));
  }
  return hi;
}

/// Cardinality sweep drawing each element uniformly from
/// [max of its immediate subsets, 1].
inline RealFuzzyMeasure sample_random_real(int source_count, Rng& rng) {
  check_source_count(source_count);
  const Mask full = full_mask(source_count);
  std::vector<double> v(lattice_size(source_count), 0.0);
  for_each_by_cardinality(source_count, [&](Mask m) {
    if (m == 0) return;
    if (m == full) {
      v[m] = 1.0;
      return;
    }
    double lo = 0.0;
    for (Mask rest = m; rest != 0; rest &= rest - 1) {
      lo = std::max(lo, v[m & ~(rest & (~rest + 1))]);
    }
    v[m] = uniform_between(rng, lo, 1.0);
  });
  return {trusted, source_count, std::move(v)};
}

inline RealFuzzyMeasure sample_random_real(int source_count, std::uint64_t seed) {
  Rng rng = make_stream(seed, "measure");
  return sample_random_real(source_count, rng);
}

/// Re-draws one element uniformly between its current monotonicity bounds.
inline RealFuzzyMeasure redraw_within_bounds(const RealFuzzyMeasure& g, const SourceSet& subset,
                                             Rng& rng) {
  detail::check_editable(subset, g.source_count());
  const double lo = lower_bound_at(g, subset.mask());
  const double hi = upper_bound_at(g, subset.mask());
  std::vector<double> v(g.values().begin(), g.values().end());
  v[subset.mask()] = uniform_between(rng, lo, hi);
  return {trusted, g.source_count(), std::move(v)};
}

inline RealFuzzyMeasure meet(const RealFuzzyMeasure& a, const RealFuzzyMeasure& b) {
  if (a.source_count() != b.source_count()) throw StructuralError("source count mismatch");
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::min(a.values()[i], b.values()[i]);
  return {trusted, a.source_count(), std::move(v)};
}

inline RealFuzzyMeasure join(const RealFuzzyMeasure& a, const RealFuzzyMeasure& b) {
  if (a.source_count() != b.source_count()) throw StructuralError("source count mismatch");
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::max(a.values()[i], b.values()[i]);
  return {trusted, a.source_count(), std::move(v)};
}

}  // namespace bfmfuse
