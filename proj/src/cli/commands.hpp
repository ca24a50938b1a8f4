#pragma once

#include <functional>

#include <CLI11.hpp>

#include "common.hpp"

namespace pose_eval::cli {

// Each function registers one subcommand and returns the action to run when
// that subcommand was selected on the command line.
using Action = std::function<void()>;

Action add_score(CLI::App& app, Context& ctx);
Action add_retrieval(CLI::App& app, Context& ctx);
Action add_correlate(CLI::App& app, Context& ctx);
Action add_agreement(CLI::App& app, Context& ctx);
Action add_grid(CLI::App& app, Context& ctx);
Action add_synth(CLI::App& app, Context& ctx);
Action add_text(CLI::App& app, Context& ctx);
Action add_embed(CLI::App& app, Context& ctx);

void add_common_options(CLI::App& sub, CommonOptions& o);

}  // namespace pose_eval::cli
