#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pose_eval/metric_config.hpp"
#include "pose_eval/selection.hpp"

namespace pose_eval {

/// Axes of the variant space. Each axis must be non-empty. Settings outside
/// the axes (drop_world, hide, fps) apply to every expanded config.
struct GridSpec {
  std::vector<MetricBase> bases;
  std::vector<std::optional<double>> fills;
  std::vector<bool> trims;
  std::vector<bool> norms;
  std::vector<Padding> paddings;                  // Zero / FirstFrame; ignored for DTW bases
  std::vector<std::optional<std::string>> selections;  // preset id or label; nullopt = all points
  std::vector<kernels::PointDistance> pointwise;

  bool drop_world = false;
  std::optional<double> hide_below_confidence;
  std::optional<double> target_fps;
};

struct NamedConfig {
  std::string name;
  MetricConfig config;
};

/// Size of the raw cross product, before exclusions and deduplication.
std::size_t cross_product_size(const GridSpec& spec);

/// Expands in nested axis order (base, fill, trim, norm, padding, selection,
/// pointwise). Combinations that fail validation are skipped; configs that
/// coincide (DTW bases across paddings) keep their first occurrence.
/// Throws EmptyAxis.
std::vector<NamedConfig> expand(const GridSpec& spec,
                                const SelectionLibrary& library = SelectionLibrary::builtin());

/// The 48 keypoint-distance candidates of the retrieval study:
/// {APE, DTW} x fill 10 x trim x norm x {zero, first} x four selections.
GridSpec retrieval_study_grid();

}  // namespace pose_eval
