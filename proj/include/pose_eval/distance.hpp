#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pose_eval/kernels.hpp"
#include "pose_eval/metric_config.hpp"
#include "pose_eval/pose.hpp"
#include "pose_eval/preprocess.hpp"
#include "pose_eval/selection.hpp"

namespace pose_eval {

/// Point-major sequence in the kernel layout: per frame, `dims` planes of
/// `stride` coordinates followed by one validity plane.
class PlanarSequence {
 public:
  explicit PlanarSequence(const PoseSequence& seq);

  std::size_t frames() const noexcept { return frames_; }
  std::size_t points() const noexcept { return points_; }
  std::size_t stride() const noexcept { return stride_; }
  int dims() const noexcept { return dims_; }

  const double* coords(std::size_t frame) const noexcept {
    return data_.data() + frame * frame_size();
  }
  const double* valid(std::size_t frame) const noexcept {
    return coords(frame) + static_cast<std::size_t>(dims_) * stride_;
  }

 private:
  std::size_t frame_size() const noexcept {
    return (static_cast<std::size_t>(dims_) + 1) * stride_;
  }

  std::size_t frames_ = 0;
  std::size_t points_ = 0;
  std::size_t stride_ = 0;
  int dims_ = 2;
  std::vector<double> data_;
};

/// Mean joint error between frame i of a and frame j of b. Masked pairs are
/// skipped (or cost `default_distance` each); a frame pair with no visible
/// pairs and no default costs 0.
double frame_cost(const PlanarSequence& a, std::size_t i, const PlanarSequence& b, std::size_t j,
                  kernels::PointDistance kind, std::optional<double> default_distance,
                  const kernels::KernelSet& k = kernels::active());

std::pair<PoseSequence, PoseSequence> pad_sequences(const PoseSequence& a, const PoseSequence& b,
                                                    Padding strategy);

std::pair<PoseSequence, PoseSequence> pairwise_zero_fill(const PoseSequence& a,
                                                         const PoseSequence& b);

// The base metrics take preprocessed sequences. APE and MSE pad unequal
// lengths according to cfg.padding (ShapeMismatch when it is None) and apply
// the pairwise zero fill when configured.
double ape(const PoseSequence& a, const PoseSequence& b, const MetricConfig& cfg);
double mse(const PoseSequence& a, const PoseSequence& b, const MetricConfig& cfg);

struct DtwResult {
  double cost = 0.0;
  std::size_t path_length = 0;  // number of aligned cells on the optimal path
};

/// Symmetric {right, down, diagonal} DTW over mean-joint-error frame costs.
/// Cost ties prefer the diagonal, then the step that advances `a`.
DtwResult dtw_align(const PlanarSequence& a, const PlanarSequence& b, const MetricConfig& cfg,
                    const kernels::KernelSet& k = kernels::active());

double dtw_mje(const PoseSequence& a, const PoseSequence& b, const MetricConfig& cfg);
double ndtw_mje(const PoseSequence& a, const PoseSequence& b, const MetricConfig& cfg);

/// Base metric on already preprocessed sequences.
double compute_base_metric(const PoseSequence& hyp, const PoseSequence& ref,
                           const MetricConfig& cfg);

struct ScoreRecord {
  std::string variant;
  double score = 0.0;
  std::vector<std::string> hyp_audit;
  std::vector<std::string> ref_audit;
};

/// Preprocesses both sides (hyp resampled to ref's fps when no target fps is
/// configured and rates differ), then computes the configured base metric.
ScoreRecord score_pair(const PoseSequence& hyp, const PoseSequence& ref, const MetricConfig& cfg,
                       const SelectionLibrary& library = SelectionLibrary::builtin());

/// A sequence preprocessed once for repeated scoring.
struct PreparedSequence {
  PoseSequence sequence;
  std::vector<std::string> audit;
  std::optional<PlanarSequence> planar;  // filled for DTW bases
};

PreparedSequence prepare(const PoseSequence& seq, const MetricConfig& cfg,
                         std::optional<double> fps_override = std::nullopt,
                         const SelectionLibrary& library = SelectionLibrary::builtin());

double score_prepared(const PreparedSequence& hyp, const PreparedSequence& ref,
                      const MetricConfig& cfg);

}  // namespace pose_eval
