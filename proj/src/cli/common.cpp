#include "common.hpp"

#include <algorithm>
#include <exception>

#include <fmt/format.h>

#include "pose_eval/error.hpp"
#include "pose_eval/parallel.hpp"
#include "pose_eval/posec_io.hpp"
#include "pose_eval/variant.hpp"
#include "pose_eval/version.hpp"

namespace pose_eval::cli {

std::uint64_t effective_seed(const Context& ctx, const CommonOptions& o) {
  return resolve_seed(o.seed ? o.seed : ctx.config.seed);
}

unsigned effective_threads(const Context& ctx, const CommonOptions& o) {
  unsigned t = o.threads.value_or(ctx.config.threads.value_or(0));
  return t == 0 ? default_threads() : t;
}

std::string metadata(std::string_view command, std::uint64_t seed,
                     const std::vector<std::pair<std::string, std::string>>& extra) {
  std::string out = fmt::format("# pose-eval {}\n# command: {}\n# seed: {}\n", kVersion, command, seed);
  for (const auto& [k, v] : extra) out += fmt::format("# {}: {}\n", k, v);
  return out;
}

void require_files(const std::vector<std::filesystem::path>& paths) {
  for (const auto& p : paths) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(p, ec)) {
      fail(ErrorCode::IoFailure, p.string() + ": no such file");
    }
  }
}

std::optional<std::filesystem::path> path_setting(const Context& ctx,
                                                  const std::optional<std::filesystem::path>& flag,
                                                  const std::string& key) {
  if (flag) return flag;
  if (const auto it = ctx.config.paths.find(key); it != ctx.config.paths.end()) return it->second;
  return std::nullopt;
}

namespace {

PreprocessConfig preprocess_preset(const Context& ctx, const std::string& name) {
  if (const auto it = ctx.config.preprocess.find(name); it != ctx.config.preprocess.end()) {
    return it->second;
  }
  if (name == "ham2pose") return ham2pose_preprocess();
  fail(ErrorCode::InvalidConfig, "unknown preprocess preset '" + name + "'");
}

}  // namespace

NamedConfig resolve_metric(const Context& ctx, const std::string& name,
                           const std::optional<std::string>& preprocess) {
  auto cfg = named_config(name, ctx.library);
  if (preprocess) {
    cfg.preprocess = preprocess_preset(ctx, *preprocess);
    cfg.validate();
  }
  return {canonical_name(cfg, ctx.library), cfg};
}

std::vector<NamedConfig> resolve_variants(const Context& ctx, const std::vector<std::string>& names,
                                          bool use_config_grid, bool use_study_grid,
                                          const std::optional<std::string>& preprocess) {
  std::vector<NamedConfig> out;
  if (!names.empty()) {
    for (const auto& n : names) {
      auto nc = resolve_metric(ctx, n, preprocess);
      const bool seen = std::any_of(out.begin(), out.end(),
                                    [&](const NamedConfig& o) { return o.name == nc.name; });
      if (!seen) out.push_back(std::move(nc));
    }
    return out;
  }
  if (use_config_grid) {
    if (!ctx.config.grid) fail(ErrorCode::InvalidConfig, "the run configuration has no [grid] section");
    return expand(*ctx.config.grid, ctx.library);
  }
  if (use_study_grid) return expand(retrieval_study_grid(), ctx.library);
  fail(ErrorCode::InvalidConfig, "no metric given; use --metric, --grid or --study-grid");
}

std::vector<PoseSequence> load_poses(const std::vector<std::filesystem::path>& paths,
                                     unsigned threads) {
  std::vector<std::optional<PoseSequence>> loaded(paths.size());
  std::vector<std::exception_ptr> errors(paths.size());
  parallel_for(paths.size(), threads, [&](std::size_t i) {
    try {
      loaded[i] = load_pose(paths[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  std::vector<PoseSequence> out;
  out.reserve(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*loaded[i]));
  }
  return out;
}

std::string file_stem_for(std::string_view variant) {
  std::string s(variant);
  for (auto& c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '+' || c == '.' || c == '_' || c == '-';
    if (!ok) c = '_';
  }
  return s;
}

}  // namespace pose_eval::cli
