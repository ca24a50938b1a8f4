#include "pose_eval/pose.hpp"

#include <cmath>
#include <set>

#include "pose_eval/error.hpp"

namespace pose_eval {

PoseHeader::PoseHeader(double fps, std::vector<ComponentSpec> components)
    : fps_(fps), components_(std::move(components)) {
  if (!(fps_ > 0.0) || !std::isfinite(fps_)) {
    fail(ErrorCode::InvalidFps, "fps must be a positive finite number");
  }
  std::set<std::string> names;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const auto& c = components_[i];
    if (c.name.empty()) fail(ErrorCode::MalformedFile, "component name is empty");
    if (!names.insert(c.name).second) {
      fail(ErrorCode::MalformedFile, "duplicate component name '" + c.name + "'");
    }
    if (c.point_count == 0) {
      fail(ErrorCode::MalformedFile, "component '" + c.name + "' has no points");
    }
    if (c.dims != 2 && c.dims != 3) {
      fail(ErrorCode::MalformedFile, "component '" + c.name + "' dims must be 2 or 3");
    }
    if (!c.point_names.empty() && c.point_names.size() != c.point_count) {
      fail(ErrorCode::DimensionMismatch,
           "component '" + c.name + "' lists " + std::to_string(c.point_names.size()) +
               " point names for " + std::to_string(c.point_count) + " points");
    }
    if (i == 0) {
      dims_ = c.dims;
    } else if (c.dims != dims_) {
      fail(ErrorCode::DimensionMismatch, "component '" + c.name + "' has dims " +
                                             std::to_string(c.dims) + ", expected " +
                                             std::to_string(dims_));
    }
    total_points_ += c.point_count;
  }
}

const ComponentSpec* PoseHeader::find(std::string_view name) const noexcept {
  for (const auto& c : components_) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::optional<std::size_t> PoseHeader::offset_of(std::string_view name) const noexcept {
  std::size_t offset = 0;
  for (const auto& c : components_) {
    if (c.name == name) return offset;
    offset += c.point_count;
  }
  return std::nullopt;
}

PoseHeader PoseHeader::with_fps(double fps) const { return PoseHeader(fps, components_); }

PoseSequence::PoseSequence(PoseHeader header, std::size_t frames, std::vector<double> coords,
                           std::vector<double> confidence)
    : header_(std::move(header)),
      frames_(frames),
      coords_(std::move(coords)),
      confidence_(std::move(confidence)) {
  const std::size_t cells = frames_ * header_.total_points();
  if (coords_.size() != cells * static_cast<std::size_t>(header_.dims())) {
    fail(ErrorCode::DimensionMismatch,
         "coordinate tensor holds " + std::to_string(coords_.size()) + " values, expected " +
             std::to_string(cells * static_cast<std::size_t>(header_.dims())));
  }
  if (confidence_.size() != cells) {
    fail(ErrorCode::DimensionMismatch, "confidence tensor holds " +
                                           std::to_string(confidence_.size()) +
                                           " values, expected " + std::to_string(cells));
  }
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (!std::isfinite(coords_[i])) {
      fail(ErrorCode::NonFiniteValue, "coordinate #" + std::to_string(i) + " is not finite");
    }
  }
  for (std::size_t i = 0; i < confidence_.size(); ++i) {
    const double c = confidence_[i];
    if (!std::isfinite(c)) {
      fail(ErrorCode::NonFiniteValue, "confidence #" + std::to_string(i) + " is not finite");
    }
    if (c < 0.0 || c > 1.0) {
      fail(ErrorCode::MalformedFile, "confidence #" + std::to_string(i) + " is outside [0,1]");
    }
  }
}

PoseSequence PoseSequence::slice_frames(std::size_t first, std::size_t count) const {
  if (first + count > frames_) {
    fail(ErrorCode::IndexOutOfRange, "frame slice exceeds sequence length");
  }
  const std::size_t per_frame = points();
  const auto d = static_cast<std::size_t>(dims());
  std::vector<double> c(coords_.begin() + static_cast<std::ptrdiff_t>(first * per_frame * d),
                        coords_.begin() + static_cast<std::ptrdiff_t>((first + count) * per_frame * d));
  std::vector<double> w(confidence_.begin() + static_cast<std::ptrdiff_t>(first * per_frame),
                        confidence_.begin() + static_cast<std::ptrdiff_t>((first + count) * per_frame));
  return PoseSequence(header_, count, std::move(c), std::move(w));
}

}  // namespace pose_eval
