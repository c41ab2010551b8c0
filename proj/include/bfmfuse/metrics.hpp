#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bfmfuse/choquet.hpp"
#include "bfmfuse/dataset.hpp"
#include "bfmfuse/errors.hpp"
#include "bfmfuse/measure.hpp"

namespace bfmfuse {

/// Fused confidence per instance, in Dataset::for_each_instance order.
struct FusionMap {
  std::vector<double> scores;
  std::string provenance;
};

enum class NaiveMode { min, max, mean };

inline const char* to_string(NaiveMode mode) {
  switch (mode) {
    case NaiveMode::min: return "min";
    case NaiveMode::max: return "max";
    case NaiveMode::mean: return "mean";
  }
  return "?";
}

template <FuzzyMeasure M>
FusionMap fuse(const Dataset& data, const M& g, std::string provenance = "choquet") {
  validate_dataset(data);
  if (g.source_count() != data.source_count) {
    throw StructuralError("measure is over " + std::to_string(g.source_count()) +
                          " sources, dataset has " + std::to_string(data.source_count));
  }
  FusionMap map{{}, std::move(provenance)};
  map.scores.reserve(data.instance_count());
  data.for_each_instance([&](std::span<const double> h, auto...) {
    map.scores.push_back(ChoquetChain(h).integrate(g));
  });
  return map;
}

inline FusionMap fuse_naive(const Dataset& data, NaiveMode mode) {
  validate_dataset(data);
  FusionMap map{{}, std::string("naive-") + to_string(mode)};
  map.scores.reserve(data.instance_count());
  data.for_each_instance([&](std::span<const double> h, auto...) {
    double v = 0.0;
    switch (mode) {
      case NaiveMode::min: v = *std::min_element(h.begin(), h.end()); break;
      case NaiveMode::max: v = *std::max_element(h.begin(), h.end()); break;
      case NaiveMode::mean:
        v = std::accumulate(h.begin(), h.end(), 0.0) / static_cast<double>(h.size());
        break;
    }
    map.scores.push_back(v);
  });
  return map;
}

// ---------------------------------------------------------------------------
// Scoring

/// AUC needs both classes.
class UndefinedAucError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct RocPoint {
  double fpr;
  double tpr;

  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

namespace detail {

inline void check_aligned(std::span<const double> scores, std::span<const std::uint8_t> truth) {
  if (scores.size() != truth.size()) {
    throw StructuralError(std::to_string(scores.size()) + " scores but " +
                          std::to_string(truth.size()) + " truth labels");
  }
  if (scores.empty()) throw ValidationError("nothing to score");
}

}  // namespace detail

/// ROC curve from (0,0) to (1,1), thresholding at every distinct score from
/// the top. Equal scores form one step, which gives ties half credit in the
/// trapezoidal area.
inline std::vector<RocPoint> roc_curve(std::span<const double> scores,
                                       std::span<const std::uint8_t> truth) {
  detail::check_aligned(scores, truth);
  const auto positives =
      static_cast<std::size_t>(std::count_if(truth.begin(), truth.end(), [](auto t) { return t != 0; }));
  const std::size_t negatives = truth.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw UndefinedAucError("ROC/AUC undefined: truth contains a single class");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::vector<RocPoint> curve{{0.0, 0.0}};
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == threshold; ++i) {
      (truth[order[i]] ? tp : fp) += 1;
    }
    curve.push_back({double(fp) / double(negatives), double(tp) / double(positives)});
  }
  return curve;
}

inline double trapezoid_area(std::span<const RocPoint> curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    area += (curve[i].fpr - curve[i - 1].fpr) * (curve[i].tpr + curve[i - 1].tpr) * 0.5;
  }
  return area;
}

inline double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> truth) {
  return trapezoid_area(roc_curve(scores, truth));
}

inline double rmse(std::span<const double> scores, std::span<const std::uint8_t> truth) {
  detail::check_aligned(scores, truth);
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double d = scores[i] - double(truth[i]);
    sum += d * d;
  }
  return std::sqrt(sum / double(scores.size()));
}

/// Unit peak: -20 log10(rmse); +inf for a perfect match.
inline double psnr_from_rmse(double rmse_value) {
  if (rmse_value == 0.0) return std::numeric_limits<double>::infinity();
  return -20.0 * std::log10(rmse_value);
}

struct ScoreReport {
  /// Empty when truth holds a single class.
  std::optional<double> auc;
  double rmse = 0.0;
  double psnr = 0.0;
  std::vector<RocPoint> roc_points;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

inline ScoreReport score(const FusionMap& map, std::span<const std::uint8_t> truth) {
  detail::check_aligned(map.scores, truth);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] > 1) throw ValidationError("truth label " + std::to_string(i) + " is not 0/1");
  }
  ScoreReport report;
  report.positives =
      static_cast<std::size_t>(std::count(truth.begin(), truth.end(), std::uint8_t{1}));
  report.negatives = truth.size() - report.positives;
  report.rmse = rmse(map.scores, truth);
  report.psnr = psnr_from_rmse(report.rmse);
  if (report.positives > 0 && report.negatives > 0) {
    report.roc_points = roc_curve(map.scores, truth);
    report.auc = trapezoid_area(report.roc_points);
  }
  return report;
}

}  // namespace bfmfuse
