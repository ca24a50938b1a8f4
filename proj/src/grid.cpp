#include "pose_eval/grid.hpp"

#include <unordered_set>

#include "pose_eval/error.hpp"
#include "pose_eval/variant.hpp"

namespace pose_eval {
namespace {

template <typename T>
void require_axis(const std::vector<T>& axis, const char* name) {
  if (axis.empty()) fail(ErrorCode::EmptyAxis, std::string("grid axis '") + name + "' is empty");
}

}  // namespace

std::size_t cross_product_size(const GridSpec& s) {
  return s.bases.size() * s.fills.size() * s.trims.size() * s.norms.size() * s.paddings.size() *
         s.selections.size() * s.pointwise.size();
}

std::vector<NamedConfig> expand(const GridSpec& spec, const SelectionLibrary& library) {
  require_axis(spec.bases, "bases");
  require_axis(spec.fills, "fills");
  require_axis(spec.trims, "trims");
  require_axis(spec.norms, "norms");
  require_axis(spec.paddings, "paddings");
  require_axis(spec.selections, "selections");
  require_axis(spec.pointwise, "pointwise");
  for (const auto& sel : spec.selections) {
    if (sel) library.at(*sel);
  }

  std::vector<NamedConfig> out;
  std::unordered_set<std::string> seen;
  for (auto base : spec.bases) {
    for (const auto& fill : spec.fills) {
      for (bool trim : spec.trims) {
        for (bool norm : spec.norms) {
          for (auto padding : spec.paddings) {
            for (const auto& sel : spec.selections) {
              for (auto pw : spec.pointwise) {
                MetricConfig cfg;
                cfg.base = base;
                cfg.padding = is_dtw(base) ? Padding::None : padding;
                cfg.pointwise = pw;
                auto& pre = cfg.preprocess;
                pre.fill_value = fill;
                pre.trim = trim;
                pre.normalize = norm;
                pre.drop_world = spec.drop_world;
                pre.hide_below_confidence = spec.hide_below_confidence;
                pre.target_fps = spec.target_fps;
                if (sel) pre.selection = library.at(*sel).name;
                try {
                  cfg.validate();
                } catch (const Error& e) {
                  if (e.code() == ErrorCode::InvalidConfig) continue;
                  throw;
                }
                auto name = canonical_name(cfg, library);
                if (seen.insert(name).second) out.push_back({std::move(name), std::move(cfg)});
              }
            }
          }
        }
      }
    }
  }
  return out;
}

GridSpec retrieval_study_grid() {
  GridSpec g;
  g.bases = {MetricBase::APE, MetricBase::DTW};
  g.fills = {10.0};
  g.trims = {false, true};
  g.norms = {false, true};
  g.paddings = {Padding::Zero, Padding::FirstFrame};
  g.selections = {"HANDS_ONLY", "UPPER_BODY", "REDUCED", "YT_ASL_85"};
  g.pointwise = {kernels::PointDistance::L2};
  return g;
}

}  // namespace pose_eval
