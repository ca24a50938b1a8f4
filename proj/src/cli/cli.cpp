#include "pose_eval/cli.hpp"

#include <exception>
#include <vector>

#include "commands.hpp"
#include "pose_eval/error.hpp"
#include "pose_eval/version.hpp"

namespace pose_eval {
namespace cli {

void add_common_options(CLI::App& sub, CommonOptions& o) {
  sub.add_option("--seed", o.seed, "Random seed (default: [run] seed, then POSE_EVAL_SEED, then 0)");
  sub.add_option("--threads", o.threads, "Worker threads (default: all cores)")
      ->check(CLI::PositiveNumber);
}

}  // namespace cli

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pose sequence evaluation toolkit", "pose-eval"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::filesystem::path> config_path;
  app.add_option("--config", config_path, "INI run configuration");

  cli::Context ctx{out, err, std::nullopt, {}, SelectionLibrary::builtin()};
  std::vector<std::pair<CLI::App*, cli::Action>> commands;
  const auto track = [&](const char* name, cli::Action a) {
    commands.emplace_back(app.get_subcommand(name), std::move(a));
  };
  track("score", cli::add_score(app, ctx));
  track("retrieval", cli::add_retrieval(app, ctx));
  track("correlate", cli::add_correlate(app, ctx));
  track("agreement", cli::add_agreement(app, ctx));
  track("grid", cli::add_grid(app, ctx));
  track("synth", cli::add_synth(app, ctx));
  track("text", cli::add_text(app, ctx));
  track("embed", cli::add_embed(app, ctx));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (config_path) {
      ctx.config_path = config_path;
      ctx.config = load_run_config(*config_path);
      if (const auto it = ctx.config.paths.find("selections"); it != ctx.config.paths.end()) {
        ctx.library = SelectionLibrary::load(it->second);
      }
    }
    for (const auto& [sub, action] : commands) {
      if (sub->parsed()) action();
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_config_error(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace pose_eval
