#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "pose_eval/grid.hpp"
#include "pose_eval/preprocess.hpp"

namespace pose_eval {

// INI run configuration:
//
//   [run]               seed, threads
//   [paths]             free-form name = path; relative paths resolve
//                       against the config file's directory
//   [grid]              bases, fills, trims, norms, paddings, selections,
//                       pointwise (comma lists), drop_world, hide, fps
//   [preprocess.NAME]   drop_world, selection, trim, fps, normalize, hide,
//                       fill, left_shoulder, right_shoulder
//
// Unknown sections or keys are InvalidConfig.

struct RunConfig {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::map<std::string, std::filesystem::path> paths;
  std::optional<GridSpec> grid;
  std::map<std::string, PreprocessConfig> preprocess;
};

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir = {},
                           const std::string& origin = "<memory>");
RunConfig load_run_config(const std::filesystem::path& path);

/// Parses one grid axis value list, e.g. "APE, DTW" or "none, 10".
GridSpec parse_grid(const std::map<std::string, std::string>& keys, const std::string& origin);

/// "COMPONENT:index".
PointRef parse_point_ref(std::string_view s);

/// Resolves the seed: explicit value, then the POSE_EVAL_SEED environment
/// variable, then 0.
std::uint64_t resolve_seed(std::optional<std::uint64_t> explicit_seed);

}  // namespace pose_eval
