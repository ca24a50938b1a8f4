#include "pose_eval/variant.hpp"

#include <cmath>
#include <optional>
#include <set>

#include "pose_eval/error.hpp"
#include "pose_eval/text_util.hpp"

namespace pose_eval {
namespace {

[[noreturn]] void parse_fail(std::string_view name, std::size_t pos, const std::string& what) {
  fail(ErrorCode::ParseError, "position " + std::to_string(pos) + " in '" + std::string(name) +
                                  "': " + what);
}

std::optional<double> number_suffix(std::string_view token, std::string_view prefix) {
  if (!token.starts_with(prefix) || token.size() == prefix.size()) return std::nullopt;
  auto v = parse_double(token.substr(prefix.size()));
  if (v && !std::isfinite(*v)) return std::nullopt;
  return v;
}

}  // namespace

const std::vector<MetricAlias>& metric_aliases() {
  static const std::vector<MetricAlias> aliases{
      {"nAPE", "APE+Norm+PadZero+DropWorld+Hide0.5+PairZeroFill+Reduced"},
      {"nMSE", "MSE+Norm+PadZero+DropWorld+Hide0.5+PairZeroFill+Reduced"},
      {"nDTW", "NDTW+Norm+DropWorld+Hide0.5+Reduced"},
      {"DTWp", "DTW+Trim+MaskFill10.0+Hands-Only"},
      {"nDTWp", "DTW+Norm+MaskFill1.0+Hands-Only"},
  };
  return aliases;
}

std::string canonical_name(const MetricConfig& cfg, const SelectionLibrary& library) {
  const auto& pre = cfg.preprocess;
  std::string out(to_string(cfg.base));
  if (pre.trim) out += "+Trim";
  if (pre.normalize) out += "+Norm";
  if (pre.fill_value) out += "+MaskFill" + format_decimal(*pre.fill_value);
  if (cfg.padding == Padding::Zero) out += "+PadZero";
  if (cfg.padding == Padding::FirstFrame) out += "+PadFirst";
  if (pre.drop_world) out += "+DropWorld";
  if (pre.hide_below_confidence) out += "+Hide" + format_decimal(*pre.hide_below_confidence);
  if (pre.target_fps) out += "+Fps" + format_decimal(*pre.target_fps);
  if (cfg.pairwise_zero_fill) out += "+PairZeroFill";
  if (cfg.default_distance) out += "+MaskDefault" + format_decimal(*cfg.default_distance);
  if (cfg.pointwise == kernels::PointDistance::L1) out += "+L1";
  if (pre.selection) out += "+" + library.at(*pre.selection).label;
  return out;
}

MetricConfig named_config(std::string_view name, const SelectionLibrary& library) {
  for (const auto& a : metric_aliases()) {
    if (name == a.alias) return named_config(a.expansion, library);
  }
  if (name.empty()) parse_fail(name, 0, "empty variant name");

  MetricConfig cfg;
  auto& pre = cfg.preprocess;
  std::set<std::string> seen;
  std::size_t pos = 0;
  bool first = true;
  while (pos <= name.size()) {
    const auto end = std::min(name.find('+', pos), name.size());
    const auto token = name.substr(pos, end - pos);
    if (token.empty()) parse_fail(name, pos, "empty token");

    std::string kind;
    if (first) {
      if (token == "APE") cfg.base = MetricBase::APE;
      else if (token == "MSE") cfg.base = MetricBase::MSE;
      else if (token == "DTW") cfg.base = MetricBase::DTW;
      else if (token == "NDTW") cfg.base = MetricBase::NDTW;
      else parse_fail(name, pos, "unknown base '" + std::string(token) + "'");
      kind = "base";
      first = false;
    } else if (token == "Trim") {
      pre.trim = true;
      kind = "Trim";
    } else if (token == "Norm" || token == "Norm.") {
      pre.normalize = true;
      kind = "Norm";
    } else if (token == "PadZero" || token == "PadFirst") {
      cfg.padding = token == "PadZero" ? Padding::Zero : Padding::FirstFrame;
      kind = "Pad";
    } else if (token == "DropWorld") {
      pre.drop_world = true;
      kind = "DropWorld";
    } else if (token == "PairZeroFill") {
      cfg.pairwise_zero_fill = true;
      kind = "PairZeroFill";
    } else if (token == "L1" || token == "L2") {
      cfg.pointwise = token == "L1" ? kernels::PointDistance::L1 : kernels::PointDistance::L2;
      kind = "Pointwise";
    } else if (token.starts_with("MaskFill")) {
      pre.fill_value = number_suffix(token, "MaskFill");
      if (!pre.fill_value) parse_fail(name, pos + 8, "MaskFill needs a number");
      kind = "MaskFill";
    } else if (token.starts_with("MaskDefault")) {
      cfg.default_distance = number_suffix(token, "MaskDefault");
      if (!cfg.default_distance) parse_fail(name, pos + 11, "MaskDefault needs a number");
      kind = "MaskDefault";
    } else if (token.starts_with("Hide")) {
      pre.hide_below_confidence = number_suffix(token, "Hide");
      if (!pre.hide_below_confidence) parse_fail(name, pos + 4, "Hide needs a number");
      kind = "Hide";
    } else if (token.starts_with("Fps")) {
      pre.target_fps = number_suffix(token, "Fps");
      if (!pre.target_fps) parse_fail(name, pos + 3, "Fps needs a number");
      kind = "Fps";
    } else if (const auto* sel = library.find(token)) {
      pre.selection = sel->name;
      kind = "selection";
    } else if (token.starts_with("Pad")) {
      parse_fail(name, pos + 3, "padding must be Zero or First");
    } else {
      parse_fail(name, pos, "unknown modifier '" + std::string(token) + "'");
    }
    if (!seen.insert(kind).second) parse_fail(name, pos, "repeated " + kind + " modifier");
    pos = end + 1;
  }
  cfg.validate();
  return cfg;
}

}  // namespace pose_eval
