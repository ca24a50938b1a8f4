#include <algorithm>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "commands.hpp"
#include "pose_eval/batch.hpp"
#include "pose_eval/csv.hpp"
#include "pose_eval/error.hpp"
#include "pose_eval/retrieval.hpp"
#include "pose_eval/synth.hpp"
#include "pose_eval/text_util.hpp"

namespace pose_eval::cli {
namespace {

struct RetrievalCliOptions {
  CommonOptions common;
  std::optional<std::filesystem::path> manifest;
  std::vector<std::string> metrics;
  bool grid = false;
  bool study_grid = false;
  std::optional<std::string> preprocess;
  std::optional<std::filesystem::path> out;
  std::size_t k = 10;
  bool shuffle_labels = false;
};

/// Fisher-Yates permutation of the gloss labels, seeded independently of the
/// distractor draws.
void shuffle_labels(RetrievalDataset& ds, std::uint64_t seed) {
  SynthRng rng(seed ^ 0x53485546464c45ull);
  std::vector<std::string> glosses;
  for (const auto& it : ds.items) glosses.push_back(it.gloss);
  for (std::size_t i = glosses.size(); i > 1; --i) {
    std::swap(glosses[i - 1], glosses[rng.below(i)]);
  }
  for (std::size_t i = 0; i < glosses.size(); ++i) ds.items[i].gloss = glosses[i];
}

void run(Context& ctx, const RetrievalCliOptions& o) {
  const auto manifest = path_setting(ctx, o.manifest, "manifest");
  if (!manifest) fail(ErrorCode::InvalidConfig, "retrieval needs --manifest or [paths] manifest");
  const auto out_dir = path_setting(ctx, o.out, "out");
  if (!out_dir) fail(ErrorCode::InvalidConfig, "retrieval needs --out or [paths] out");
  if (o.k == 0) fail(ErrorCode::InvalidConfig, "--k must be positive");

  const auto variants = resolve_variants(ctx, o.metrics, o.grid, o.study_grid, o.preprocess);
  const auto seed = effective_seed(ctx, o.common);
  const unsigned threads = effective_threads(ctx, o.common);

  require_files({*manifest});
  auto ds = read_manifest(*manifest, seed);
  std::vector<std::filesystem::path> paths;
  for (const auto& it : ds.items) paths.push_back(it.path);
  require_files(paths);
  if (o.shuffle_labels) shuffle_labels(ds, seed);
  const auto pools = build_pools(ds);
  const auto poses = load_poses(paths, threads);

  bool same_fps = true;
  for (const auto& p : poses) same_fps = same_fps && p.header().fps() == poses.front().header().fps();

  struct Row {
    std::string variant;
    double mean_ap, p_at_k;
    std::size_t skipped, failed;
  };
  std::vector<Row> rows;
  for (const auto& v : variants) {
    const PreparedCorpus corpus(poses, v.config, ctx.library, threads);
    RetrievalOptions ro;
    ro.lower_is_better = true;
    ro.symmetric = same_fps || v.config.preprocess.target_fps.has_value();
    ro.k = o.k;
    ro.threads = threads;
    ro.variant = v.name;
    const auto report = run_retrieval(
        ds, pools, [&](std::size_t hyp, std::size_t ref) { return corpus.score(hyp, ref); }, ro);
    const auto stem = file_stem_for(v.name);
    write_text_file(*out_dir / (stem + ".txt"), format_report_text(report));
    write_text_file(*out_dir / (stem + ".csv"), format_report_csv(report));
    rows.push_back({v.name, report.mean_ap, report.mean_p_at_k, report.skipped_queries,
                    report.pair_errors.size()});
    if (!report.pair_errors.empty()) {
      ctx.err << fmt::format("warning: {}: {} pairs failed to score; see {}.txt\n", v.name,
                             report.pair_errors.size(), stem);
    }
  }

  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return a.mean_ap > b.mean_ap; });
  std::ostringstream csv;
  csv << metadata("retrieval", seed,
                  {{"manifest", manifest->string()},
                   {"labels", o.shuffle_labels ? "shuffled" : "original"},
                   {"distractor_ratio", std::to_string(kDistractorRatio)},
                   {"variants", std::to_string(rows.size())}});
  write_csv_row(csv, {"rank", "variant", "mean_ap", fmt::format("p_at_{}", o.k), "skipped_queries",
                      "failed_pairs"});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    write_csv_row(csv, {std::to_string(i + 1), r.variant, format_fixed(r.mean_ap, 6),
                        format_fixed(r.p_at_k, 6), std::to_string(r.skipped), std::to_string(r.failed)});
  }
  write_text_file(*out_dir / "summary.csv", csv.str());
  ctx.out << csv.str();
}

}  // namespace

Action add_retrieval(CLI::App& app, Context& ctx) {
  auto o = std::make_shared<RetrievalCliOptions>();
  auto* sub = app.add_subcommand("retrieval", "Rank metric variants by gloss retrieval quality");
  add_common_options(*sub, o->common);
  sub->add_option("--manifest", o->manifest, "TSV manifest: id, gloss, path");
  sub->add_option("-m,--metric", o->metrics, "Metric alias or variant name (repeatable)");
  sub->add_flag("--grid", o->grid, "Expand the [grid] section of the run configuration");
  sub->add_flag("--study-grid", o->study_grid, "Use the built-in 48-variant grid");
  sub->add_option("--preprocess", o->preprocess,
                  "Replace each metric's preprocessing with a [preprocess.NAME] section");
  sub->add_option("-o,--out", o->out, "Output directory for reports");
  sub->add_option("--k", o->k, "Cutoff for precision at k")->capture_default_str();
  sub->add_flag("--shuffle-labels", o->shuffle_labels, "Permute gloss labels before pooling");
  return [&ctx, o] { run(ctx, *o); };
}

}  // namespace pose_eval::cli
