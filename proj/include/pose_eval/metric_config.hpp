#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "pose_eval/kernels.hpp"
#include "pose_eval/preprocess.hpp"

namespace pose_eval {

enum class MetricBase { APE, MSE, DTW, NDTW };
enum class Padding { None, Zero, FirstFrame };

/// One point of the distance-metric variant space.
struct MetricConfig {
  MetricBase base = MetricBase::DTW;
  Padding padding = Padding::None;
  PreprocessConfig preprocess;
  /// Ham2Pose-style: where either side is masked, both sides become 0.
  bool pairwise_zero_fill = false;
  /// L2 or L1; MSE always uses squared L2.
  kernels::PointDistance pointwise = kernels::PointDistance::L2;
  /// When set, each masked point pair costs this much instead of being skipped.
  std::optional<double> default_distance;

  /// Throws InvalidConfig on inconsistent combinations.
  void validate() const;

  bool operator==(const MetricConfig&) const = default;
};

inline bool is_dtw(MetricBase b) noexcept { return b == MetricBase::DTW || b == MetricBase::NDTW; }

std::string_view to_string(MetricBase b) noexcept;
std::string_view to_string(Padding p) noexcept;

}  // namespace pose_eval
