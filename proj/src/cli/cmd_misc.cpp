#include <map>
#include <memory>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "commands.hpp"
#include "pose_eval/csv.hpp"
#include "pose_eval/embedding.hpp"
#include "pose_eval/error.hpp"
#include "pose_eval/retrieval.hpp"
#include "pose_eval/synth.hpp"
#include "pose_eval/text_metrics.hpp"
#include "pose_eval/text_util.hpp"

namespace pose_eval::cli {
namespace {

struct GridOptions {
  CommonOptions common;
  bool study_grid = false;
  std::optional<std::filesystem::path> manifest;
};

/// Unordered pairs scored by one retrieval run over `pools`.
std::size_t retrieval_pair_count(const std::vector<RetrievalPool>& pools) {
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& pool : pools) {
    for (const auto q : pool.targets) {
      const auto add = [&](std::size_t c) {
        if (c != q) pairs.emplace(std::min(c, q), std::max(c, q));
      };
      for (const auto c : pool.targets) add(c);
      for (const auto c : pool.distractors) add(c);
    }
  }
  return pairs.size();
}

void run_grid_expand(Context& ctx, const GridOptions& o) {
  const bool from_config = ctx.config.grid.has_value() && !o.study_grid;
  const auto spec = from_config ? *ctx.config.grid : retrieval_study_grid();
  const auto variants = expand(spec, ctx.library);
  const auto seed = effective_seed(ctx, o.common);

  std::vector<std::pair<std::string, std::string>> meta{
      {"source", from_config ? "config [grid]" : "built-in study grid"},
      {"cross_product", std::to_string(cross_product_size(spec))},
      {"variants", std::to_string(variants.size())}};
  const auto manifest = path_setting(ctx, o.manifest, "manifest");
  if (manifest) {
    require_files({*manifest});
    const auto pools = build_pools(read_manifest(*manifest, seed));
    const auto pairs = retrieval_pair_count(pools);
    meta.emplace_back("pairs_per_variant", std::to_string(pairs));
    meta.emplace_back("total_pair_scores", std::to_string(pairs * variants.size()));
  }
  std::string text = metadata("grid expand", seed, meta);
  for (const auto& v : variants) text += v.name + "\n";
  ctx.out << text;
}

struct SynthOptions {
  CommonOptions common;
  std::string kind = "separable";
  std::optional<std::filesystem::path> out;
};

void run_synth(Context& ctx, const SynthOptions& o) {
  if (!o.out) fail(ErrorCode::InvalidConfig, "synth needs --out");
  SynthCorpusSpec spec;
  if (o.kind == "separable") {
    spec = separable_corpus_spec();
  } else if (o.kind == "noisy") {
    spec = noisy_corpus_spec();
  } else if (o.kind == "gloss40") {
    spec = separable_corpus_spec();
    spec.glosses = 5;
    spec.per_gloss = 40;
    spec.seed = 13;
  } else {
    fail(ErrorCode::InvalidConfig, "unknown corpus kind '" + o.kind + "'");
  }
  if (o.common.seed) spec.seed = *o.common.seed;
  else if (ctx.config.seed) spec.seed = *ctx.config.seed;
  const auto items = generate_corpus(spec);
  const auto manifest = write_corpus(items, *o.out);
  ctx.out << metadata("synth", spec.seed, {{"kind", o.kind}, {"items", std::to_string(items.size())}})
          << manifest.string() << "\n";
}

struct TextOptions {
  CommonOptions common;
  std::optional<std::filesystem::path> pairs;
  std::optional<std::filesystem::path> segment_dir;
};

void run_text(Context& ctx, const TextOptions& o) {
  if (!o.pairs) fail(ErrorCode::InvalidConfig, "text needs --pairs");
  require_files({*o.pairs});
  const auto pairs = read_text_pairs(*o.pairs);
  std::string text = metadata("text", effective_seed(ctx, o.common),
                              {{"pairs", o.pairs->string()}, {"segments", std::to_string(pairs.size())}});
  text += fmt::format("BLEU\t{}\t{}\n", format_fixed(bleu4(pairs), 6), kBleuSignature);
  text += fmt::format("chrF\t{}\t{}\n", format_fixed(chrf(pairs), 6), kChrfSignature);
  ctx.out << text;

  if (o.segment_dir) {
    std::ostringstream bleu_csv, chrf_csv;
    bleu_csv << fmt::format("# BLEU {}\n", kBleuSignature);
    chrf_csv << fmt::format("# chrF {}\n", kChrfSignature);
    write_csv_row(bleu_csv, {"id", "score"});
    write_csv_row(chrf_csv, {"id", "score"});
    for (const auto& p : pairs) {
      write_csv_row(bleu_csv, {p.id, format_fixed(bleu4({p}), 6)});
      write_csv_row(chrf_csv, {p.id, format_fixed(chrf({p}), 6)});
    }
    write_text_file(*o.segment_dir / "bleu.csv", bleu_csv.str());
    write_text_file(*o.segment_dir / "chrf.csv", chrf_csv.str());
  }
}

struct EmbedOptions {
  CommonOptions common;
  std::optional<std::filesystem::path> hyp;
  std::optional<std::filesystem::path> ref;
  std::optional<std::filesystem::path> text;
  std::optional<std::filesystem::path> out;
};

void run_embed(Context& ctx, const EmbedOptions& o) {
  if (!o.hyp || (o.ref.has_value() == o.text.has_value())) {
    fail(ErrorCode::InvalidConfig, "embed needs --hyp and exactly one of --ref or --text");
  }
  const auto& other_path = o.ref ? *o.ref : *o.text;
  require_files({*o.hyp, other_path});
  const auto hyps = read_embedding_set(*o.hyp);
  const auto others = read_embedding_set(other_path);
  std::map<std::string, const EmbeddingVector*> by_id;
  for (const auto& e : others) by_id.emplace(e.id, &e);

  std::map<std::string, double> scores;
  std::size_t unmatched = 0;
  for (const auto& h : hyps) {
    const auto it = by_id.find(h.id);
    if (it == by_id.end()) {
      ++unmatched;
      continue;
    }
    scores[h.id] = o.ref ? signclip_score_pp(*it->second, h) : signclip_score_pt(*it->second, h);
  }
  if (unmatched) ctx.err << "warning: " << unmatched << " hypothesis embeddings had no counterpart\n";

  std::ostringstream csv;
  csv << metadata("embed", effective_seed(ctx, o.common),
                  {{"hyp", o.hyp->string()},
                   {o.ref ? "ref" : "text", other_path.string()},
                   {"score", o.ref ? "pose-pose dot product" : "text-pose dot product"}});
  write_csv_row(csv, {"id", "score"});
  for (const auto& [id, s] : scores) write_csv_row(csv, {id, format_shortest(s)});
  if (o.out) write_text_file(*o.out, csv.str());
  else ctx.out << csv.str();
}

}  // namespace

Action add_grid(CLI::App& app, Context& ctx) {
  auto o = std::make_shared<GridOptions>();
  auto* grid = app.add_subcommand("grid", "Metric variant grids");
  grid->require_subcommand(1);
  auto* sub = grid->add_subcommand("expand", "List the variants of a grid and the scoring workload");
  add_common_options(*sub, o->common);
  sub->add_flag("--study-grid", o->study_grid, "Use the built-in 48-variant grid even if [grid] is set");
  sub->add_option("--manifest", o->manifest, "Retrieval manifest for the workload estimate");
  return [&ctx, o] { run_grid_expand(ctx, *o); };
}

Action add_synth(CLI::App& app, Context& ctx) {
  auto o = std::make_shared<SynthOptions>();
  auto* sub = app.add_subcommand("synth", "Write a synthetic retrieval corpus");
  add_common_options(*sub, o->common);
  sub->add_option("--kind", o->kind, "separable, noisy or gloss40")
      ->check(CLI::IsMember({"separable", "noisy", "gloss40"}))
      ->capture_default_str();
  sub->add_option("-o,--out", o->out, "Output directory");
  return [&ctx, o] { run_synth(ctx, *o); };
}

Action add_text(CLI::App& app, Context& ctx) {
  auto o = std::make_shared<TextOptions>();
  auto* sub = app.add_subcommand("text", "Corpus BLEU and chrF over back-translated text");
  add_common_options(*sub, o->common);
  sub->add_option("--pairs", o->pairs, "CSV: id, hypothesis, reference");
  sub->add_option("--segment-scores", o->segment_dir,
                  "Also write per-segment bleu.csv and chrf.csv (id,score) to this directory");
  return [&ctx, o] { run_text(ctx, *o); };
}

Action add_embed(CLI::App& app, Context& ctx) {
  auto o = std::make_shared<EmbedOptions>();
  auto* sub = app.add_subcommand("embed", "Per-segment embedding similarity scores");
  add_common_options(*sub, o->common);
  sub->add_option("--hyp", o->hyp, "Hypothesis pose embeddings CSV");
  sub->add_option("--ref", o->ref, "Reference pose embeddings CSV");
  sub->add_option("--text", o->text, "Source text embeddings CSV");
  sub->add_option("-o,--out", o->out, "Write id,score CSV here (default: stdout)");
  return [&ctx, o] { run_embed(ctx, *o); };
}

}  // namespace pose_eval::cli
