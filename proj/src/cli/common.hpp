#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "pose_eval/grid.hpp"
#include "pose_eval/pose.hpp"
#include "pose_eval/run_config.hpp"
#include "pose_eval/selection.hpp"

namespace pose_eval::cli {

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::optional<std::filesystem::path> config_path;
  RunConfig config;
  SelectionLibrary library;
};

/// Options shared by the commands that do work.
struct CommonOptions {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

/// Flag, then [run] seed, then POSE_EVAL_SEED, then 0.
std::uint64_t effective_seed(const Context& ctx, const CommonOptions& o);
/// Flag, then [run] threads, then the number of cores.
unsigned effective_threads(const Context& ctx, const CommonOptions& o);

/// Leading `# key: value` lines identifying the tool and run.
std::string metadata(std::string_view command, std::uint64_t seed,
                     const std::vector<std::pair<std::string, std::string>>& extra = {});

/// Throws IoFailure unless every path names an existing regular file.
void require_files(const std::vector<std::filesystem::path>& paths);

/// A [paths] entry from the run configuration, or the flag value when given.
std::optional<std::filesystem::path> path_setting(const Context& ctx,
                                                  const std::optional<std::filesystem::path>& flag,
                                                  const std::string& key);

/// Resolves a metric name, applying a named [preprocess.NAME] section (or the
/// built-in "ham2pose") in place of the name's own preprocessing.
NamedConfig resolve_metric(const Context& ctx, const std::string& name,
                           const std::optional<std::string>& preprocess);

/// Metric variants from --metric names, the [grid] section, or the built-in
/// retrieval study grid, in that order of preference.
std::vector<NamedConfig> resolve_variants(const Context& ctx, const std::vector<std::string>& names,
                                          bool use_config_grid, bool use_study_grid,
                                          const std::optional<std::string>& preprocess);

/// Loads pose files on `threads` workers. The first failure in input order is
/// rethrown.
std::vector<PoseSequence> load_poses(const std::vector<std::filesystem::path>& paths,
                                     unsigned threads);

/// Variant name as a file stem: characters outside [A-Za-z0-9+._-] become '_'.
std::string file_stem_for(std::string_view variant);

}  // namespace pose_eval::cli
