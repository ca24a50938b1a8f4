#include "pose_eval/run_config.hpp"

#include <cstdlib>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "pose_eval/csv.hpp"
#include "pose_eval/error.hpp"
#include "pose_eval/text_util.hpp"

namespace pose_eval {
namespace {

[[noreturn]] void config_fail(const std::string& origin, const std::string& what) {
  fail(ErrorCode::InvalidConfig, origin + ": " + what);
}

std::vector<std::string> list_of(std::string_view v) {
  std::vector<std::string> out;
  for (auto part : split(v, ',')) {
    const auto t = trim(part);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

bool bool_of(std::string_view v, const std::string& where) {
  const auto b = parse_bool(trim(v));
  if (!b) config_fail(where, "'" + std::string(v) + "' is not a boolean");
  return *b;
}

double double_of(std::string_view v, const std::string& where) {
  const auto d = parse_double(trim(v));
  if (!d) config_fail(where, "'" + std::string(v) + "' is not a number");
  return *d;
}

std::optional<double> optional_double_of(std::string_view v, const std::string& where) {
  const auto t = to_lower_ascii(trim(v));
  if (t == "none" || t.empty()) return std::nullopt;
  return double_of(v, where);
}

std::uint64_t u64_of(std::string_view v, const std::string& where) {
  const auto i = parse_int(trim(v));
  if (!i || *i < 0) config_fail(where, "'" + std::string(v) + "' is not a non-negative integer");
  return static_cast<std::uint64_t>(*i);
}

MetricBase base_of(std::string_view v, const std::string& where) {
  const auto t = to_upper_ascii(v);
  if (t == "APE") return MetricBase::APE;
  if (t == "MSE") return MetricBase::MSE;
  if (t == "DTW") return MetricBase::DTW;
  if (t == "NDTW") return MetricBase::NDTW;
  config_fail(where, "unknown base '" + std::string(v) + "'");
}

Padding padding_of(std::string_view v, const std::string& where) {
  const auto t = to_lower_ascii(v);
  if (t == "zero") return Padding::Zero;
  if (t == "first" || t == "first-frame" || t == "first_frame") return Padding::FirstFrame;
  config_fail(where, "unknown padding '" + std::string(v) + "'");
}

kernels::PointDistance pointwise_of(std::string_view v, const std::string& where) {
  const auto t = to_upper_ascii(v);
  if (t == "L2") return kernels::PointDistance::L2;
  if (t == "L1") return kernels::PointDistance::L1;
  config_fail(where, "pointwise distance must be L1 or L2, got '" + std::string(v) + "'");
}

PreprocessConfig parse_preprocess(const std::map<std::string, std::string>& keys,
                                  const std::string& origin) {
  PreprocessConfig p;
  for (const auto& [k, v] : keys) {
    const auto where = origin + " key '" + k + "'";
    if (k == "drop_world") p.drop_world = bool_of(v, where);
    else if (k == "selection") p.selection = trim(v).empty() ? std::nullopt : std::optional<std::string>(std::string(trim(v)));
    else if (k == "trim") p.trim = bool_of(v, where);
    else if (k == "fps") p.target_fps = optional_double_of(v, where);
    else if (k == "normalize") p.normalize = bool_of(v, where);
    else if (k == "hide") p.hide_below_confidence = optional_double_of(v, where);
    else if (k == "fill") p.fill_value = optional_double_of(v, where);
    else if (k == "left_shoulder") p.left_shoulder = parse_point_ref(v);
    else if (k == "right_shoulder") p.right_shoulder = parse_point_ref(v);
    else config_fail(origin, "unknown key '" + k + "'");
  }
  return p;
}

}  // namespace

PointRef parse_point_ref(std::string_view s) {
  const auto t = trim(s);
  const auto colon = t.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    fail(ErrorCode::InvalidConfig, "point reference '" + std::string(s) + "' is not COMPONENT:index");
  }
  const auto idx = parse_int(t.substr(colon + 1));
  if (!idx || *idx < 0) {
    fail(ErrorCode::InvalidConfig, "point reference '" + std::string(s) + "' has a bad index");
  }
  return {std::string(t.substr(0, colon)), static_cast<std::size_t>(*idx)};
}

GridSpec parse_grid(const std::map<std::string, std::string>& keys, const std::string& origin) {
  GridSpec g;
  for (const auto& [k, v] : keys) {
    const auto where = origin + " key '" + k + "'";
    const auto items = list_of(v);
    if (k == "bases") {
      for (const auto& i : items) g.bases.push_back(base_of(i, where));
    } else if (k == "fills") {
      for (const auto& i : items) g.fills.push_back(optional_double_of(i, where));
    } else if (k == "trims") {
      for (const auto& i : items) g.trims.push_back(bool_of(i, where));
    } else if (k == "norms") {
      for (const auto& i : items) g.norms.push_back(bool_of(i, where));
    } else if (k == "paddings") {
      for (const auto& i : items) g.paddings.push_back(padding_of(i, where));
    } else if (k == "selections") {
      for (const auto& i : items) {
        g.selections.push_back(to_lower_ascii(i) == "none" ? std::nullopt
                                                           : std::optional<std::string>(i));
      }
    } else if (k == "pointwise") {
      for (const auto& i : items) g.pointwise.push_back(pointwise_of(i, where));
    } else if (k == "drop_world") {
      g.drop_world = bool_of(v, where);
    } else if (k == "hide") {
      g.hide_below_confidence = optional_double_of(v, where);
    } else if (k == "fps") {
      g.target_fps = optional_double_of(v, where);
    } else {
      config_fail(origin, "unknown key '" + k + "'");
    }
  }
  // Axes left out of the section take their single default value.
  if (!keys.count("fills")) g.fills = {std::nullopt};
  if (!keys.count("trims")) g.trims = {false};
  if (!keys.count("norms")) g.norms = {false};
  if (!keys.count("paddings")) g.paddings = {Padding::Zero};
  if (!keys.count("selections")) g.selections = {std::nullopt};
  if (!keys.count("pointwise")) g.pointwise = {kernels::PointDistance::L2};
  return g;
}

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir,
                           const std::string& origin) {
  boost::property_tree::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    fail(ErrorCode::ParseError, origin + ":line " + std::to_string(e.line()) + ": " + e.message());
  }

  RunConfig cfg;
  for (const auto& [section, body] : tree) {
    const auto where = origin + " [" + section + "]";
    if (body.empty() && !body.data().empty()) config_fail(origin, "key '" + section + "' outside a section");
    std::map<std::string, std::string> keys;
    for (const auto& [k, v] : body) keys[k] = v.data();

    if (section == "run") {
      for (const auto& [k, v] : keys) {
        if (k == "seed") cfg.seed = u64_of(v, where + " seed");
        else if (k == "threads") cfg.threads = static_cast<unsigned>(u64_of(v, where + " threads"));
        else config_fail(where, "unknown key '" + k + "'");
      }
    } else if (section == "paths") {
      for (const auto& [k, v] : keys) {
        std::filesystem::path p(std::string(trim(v)));
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        cfg.paths[k] = p;
      }
    } else if (section == "grid") {
      cfg.grid = parse_grid(keys, where);
    } else if (section.starts_with("preprocess.") && section.size() > 11) {
      cfg.preprocess[section.substr(11)] = parse_preprocess(keys, where);
    } else {
      config_fail(origin, "unknown section [" + section + "]");
    }
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_text_file(path), path.parent_path(), path.string());
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> explicit_seed) {
  if (explicit_seed) return *explicit_seed;
  if (const char* env = std::getenv("POSE_EVAL_SEED"); env && *env) {
    const auto v = parse_int(trim(env));
    if (!v || *v < 0) fail(ErrorCode::InvalidConfig, "POSE_EVAL_SEED must be a non-negative integer");
    return static_cast<std::uint64_t>(*v);
  }
  return 0;
}

}  // namespace pose_eval
