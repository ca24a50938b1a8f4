#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pose_eval/metric_config.hpp"
#include "pose_eval/selection.hpp"

namespace pose_eval {

// Variant names are '+'-joined tokens, a base followed by modifiers:
//
//   <BASE>[+Trim][+Norm][+MaskFill<v>][+Pad<Zero|First>][+DropWorld][+Hide<v>]
//         [+Fps<v>][+PairZeroFill][+MaskDefault<v>][+L1][+<SelectionLabel>]
//
// canonical_name emits modifiers in exactly this order. The parser accepts
// them in any order, takes "Norm." for "Norm", and accepts a selection by
// preset id or by label. Shoulder reference points are not part of the name.

std::string canonical_name(const MetricConfig& cfg,
                           const SelectionLibrary& library = SelectionLibrary::builtin());

/// Parses a variant name or one of the shorthand aliases below.
/// Throws ParseError (with a character position) or InvalidConfig.
MetricConfig named_config(std::string_view name,
                          const SelectionLibrary& library = SelectionLibrary::builtin());

struct MetricAlias {
  std::string_view alias;
  std::string_view expansion;
};

/// nAPE, nMSE, nDTW (Ham2Pose re-implementations) and DTWp, nDTWp.
const std::vector<MetricAlias>& metric_aliases();

}  // namespace pose_eval
