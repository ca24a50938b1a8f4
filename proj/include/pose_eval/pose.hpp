#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pose_eval {

struct ComponentSpec {
  std::string name;
  std::size_t point_count = 0;
  int dims = 2;
  std::vector<std::string> point_names;  // empty, or exactly point_count entries

  bool operator==(const ComponentSpec&) const = default;
};

/// Frame rate plus the ordered component layout of the point axis.
class PoseHeader {
 public:
  PoseHeader() = default;
  /// Validates fps > 0, unique names, dims in {2,3} and shared by all components.
  PoseHeader(double fps, std::vector<ComponentSpec> components);

  double fps() const noexcept { return fps_; }
  const std::vector<ComponentSpec>& components() const noexcept { return components_; }
  std::size_t total_points() const noexcept { return total_points_; }
  /// Spatial dimensionality shared by every component (2 when there are no components).
  int dims() const noexcept { return dims_; }

  const ComponentSpec* find(std::string_view name) const noexcept;
  /// Flat index of the first point of `name` on the point axis.
  std::optional<std::size_t> offset_of(std::string_view name) const noexcept;

  PoseHeader with_fps(double fps) const;

  bool operator==(const PoseHeader&) const = default;

 private:
  double fps_ = 1.0;
  std::vector<ComponentSpec> components_;
  std::size_t total_points_ = 0;
  int dims_ = 2;
};

/// A (component, point index) address into a header.
struct PointRef {
  std::string component;
  std::size_t index = 0;

  bool operator==(const PointRef&) const = default;
};

/// Immutable frames x points x dims coordinate grid with per-point confidence.
/// Confidence exactly 0 marks a point as masked.
class PoseSequence {
 public:
  PoseSequence() = default;
  /// Validates tensor sizes, finite coordinates and confidences within [0,1].
  PoseSequence(PoseHeader header, std::size_t frames, std::vector<double> coords,
               std::vector<double> confidence);

  const PoseHeader& header() const noexcept { return header_; }
  std::size_t frames() const noexcept { return frames_; }
  std::size_t points() const noexcept { return header_.total_points(); }
  int dims() const noexcept { return header_.dims(); }

  std::span<const double> coords() const noexcept { return coords_; }
  std::span<const double> confidence() const noexcept { return confidence_; }

  double coord(std::size_t frame, std::size_t point, int dim) const noexcept {
    return coords_[(frame * points() + point) * static_cast<std::size_t>(dims()) +
                   static_cast<std::size_t>(dim)];
  }
  double conf(std::size_t frame, std::size_t point) const noexcept {
    return confidence_[frame * points() + point];
  }
  bool masked(std::size_t frame, std::size_t point) const noexcept {
    return conf(frame, point) == 0.0;
  }

  /// Contiguous slice of frames [first, first + count).
  PoseSequence slice_frames(std::size_t first, std::size_t count) const;

  bool operator==(const PoseSequence&) const = default;

 private:
  PoseHeader header_;
  std::size_t frames_ = 0;
  std::vector<double> coords_;
  std::vector<double> confidence_;
};

/// Flat-index helper that accounts for dims.
inline std::size_t coord_index(std::size_t frame, std::size_t point, int dim,
                               std::size_t points, int dims) noexcept {
  return (frame * points + point) * static_cast<std::size_t>(dims) + static_cast<std::size_t>(dim);
}

}  // namespace pose_eval
