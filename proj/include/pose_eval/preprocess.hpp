#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pose_eval/pose.hpp"
#include "pose_eval/selection.hpp"

namespace pose_eval {

struct PreprocessConfig {
  bool drop_world = false;
  std::optional<std::string> selection;  // preset id or label
  bool trim = false;
  std::optional<double> target_fps;
  bool normalize = false;
  std::optional<double> hide_below_confidence;
  std::optional<double> fill_value;
  PointRef left_shoulder{"POSE_LANDMARKS", 11};
  PointRef right_shoulder{"POSE_LANDMARKS", 12};

  bool operator==(const PreprocessConfig&) const = default;
};

/// Removes components named *_WORLD or *_WORLD_LANDMARKS.
PoseSequence drop_world_components(const PoseSequence& seq);

/// Restricts to the selected points in selection order. The result has one
/// synthetic component named after the selection whose point names record
/// the source point as <component>.<index>.
PoseSequence select_keypoints(const PoseSequence& seq, const KeypointSelection& sel);

/// True when the point at `flat` belongs to a hand (by component name, or by
/// the source prefix of a synthetic selection component).
bool is_hand_point(const PoseHeader& header, std::size_t flat);

/// Drops the leading and trailing frames in which every hand point is masked.
PoseSequence trim_inactive(const PoseSequence& seq);

/// Linear resampling onto k / target_fps timestamps; confidence takes the
/// minimum of the two bracketing frames.
PoseSequence resample_fps(const PoseSequence& seq, double target_fps);

/// Global similarity transform x -> (x - origin) / scale.
struct ShoulderTransform {
  std::vector<double> origin;  // one entry per dim
  double scale = 1.0;
};

/// Mean shoulder midpoint and mean shoulder width over frames where both
/// shoulders are visible. Throws DegenerateSkeleton when undefined.
ShoulderTransform shoulder_transform(const PoseSequence& seq, const PointRef& left,
                                     const PointRef& right);
PoseSequence apply_transform(const PoseSequence& seq, const ShoulderTransform& t);
PoseSequence normalize_by_shoulders(const PoseSequence& seq, const PointRef& left,
                                    const PointRef& right);

PoseSequence hide_low_confidence(const PoseSequence& seq, double threshold);
PoseSequence fill_masked(const PoseSequence& seq, double value);

struct PipelineResult {
  PoseSequence sequence;
  std::vector<std::string> audit;  // applied steps, in order
};

/// drop_world -> select -> trim -> resample -> hide -> normalize -> fill.
/// The shoulder transform is measured right after drop_world, on the full
/// header, and applied at the normalize position.
PipelineResult run_pipeline(const PoseSequence& seq, const PreprocessConfig& cfg,
                            const SelectionLibrary& library = SelectionLibrary::builtin());

/// Ham2Pose-compatible preparation: drop world landmarks, REDUCED
/// selection, shoulder normalization, hide confidence < 0.5.
PreprocessConfig ham2pose_preprocess();

inline constexpr double kDefaultHideThreshold = 0.5;
inline constexpr double kShoulderEpsilon = 1e-8;

}  // namespace pose_eval
