#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pose_eval/pose.hpp"

namespace pose_eval {

/// One selection entry. `component == "*"` means every component; an empty
/// `indices` list means every point of the component.
struct SelectionEntry {
  std::string component;
  std::vector<std::size_t> indices;

  bool operator==(const SelectionEntry&) const = default;
};

struct KeypointSelection {
  std::string name;   // preset id, e.g. HANDS_ONLY
  std::string label;  // name used in metric variant strings, e.g. Hands-Only
  std::vector<SelectionEntry> entries;

  /// Concrete (component, index) pairs against `header`, in selection order.
  std::vector<PointRef> expand(const PoseHeader& header) const;

  bool operator==(const KeypointSelection&) const = default;
};

/// Flat indices into the point axis, in selection order.
/// Throws UnknownComponent, IndexOutOfRange, or InvalidConfig on duplicates.
std::vector<std::size_t> resolve_selection(const KeypointSelection& sel, const PoseHeader& header);

std::size_t resolve_point(const PointRef& ref, const PoseHeader& header);

/// Named selections loaded from the preset file format.
class SelectionLibrary {
 public:
  static SelectionLibrary parse(std::string_view ini_text, const std::string& origin = "<memory>");
  static SelectionLibrary load(const std::filesystem::path& path);
  /// Presets compiled in from data/selection_presets.ini.
  static const SelectionLibrary& builtin();

  /// Looks up by preset id or by label (case-sensitive).
  const KeypointSelection* find(std::string_view name_or_label) const;
  const KeypointSelection& at(std::string_view name_or_label) const;
  const std::vector<KeypointSelection>& all() const noexcept { return presets_; }

  void add(KeypointSelection sel);

 private:
  std::vector<KeypointSelection> presets_;
};

}  // namespace pose_eval
