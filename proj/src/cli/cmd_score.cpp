#include <exception>
#include <map>
#include <memory>
#include <sstream>

#include "commands.hpp"
#include "pose_eval/batch.hpp"
#include "pose_eval/csv.hpp"
#include "pose_eval/distance.hpp"
#include "pose_eval/error.hpp"
#include "pose_eval/parallel.hpp"
#include "pose_eval/posec_io.hpp"
#include "pose_eval/stats.hpp"
#include "pose_eval/text_util.hpp"

namespace pose_eval::cli {
namespace {

struct ScoreOptions {
  CommonOptions common;
  std::vector<std::string> metrics;
  std::optional<std::string> preprocess;
  std::vector<std::filesystem::path> files;
  std::optional<std::filesystem::path> batch;
  std::optional<std::filesystem::path> out;
};

struct PairRow {
  std::size_t line = 0;
  std::string segment, system, language;
  std::size_t hyp = 0, ref = 0;  // indices into the unique path list
};

struct PairsFile {
  std::vector<PairRow> rows;
  std::vector<std::filesystem::path> paths;
};

PairsFile read_pairs(const std::filesystem::path& path) {
  const auto text = read_text_file(path);
  const auto base = path.parent_path();
  PairsFile pf;
  std::map<std::filesystem::path, std::size_t> index;
  const auto intern = [&](std::string_view p) {
    std::filesystem::path fp{std::string(p)};
    if (fp.is_relative()) fp = base / fp;
    const auto [it, added] = index.emplace(fp, pf.paths.size());
    if (added) pf.paths.push_back(fp);
    return it->second;
  };

  std::size_t line_no = 0;
  bool header_seen = false;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    const auto where = path.string() + ":line " + std::to_string(line_no);
    const auto f = split(line, '\t');
    if (!header_seen) {
      const std::vector<std::string_view> expected{"segment", "system", "language", "hyp", "ref"};
      if (f.size() != expected.size() || !std::equal(f.begin(), f.end(), expected.begin())) {
        fail(ErrorCode::MalformedFile, where + ": expected header segment<TAB>system<TAB>language<TAB>hyp<TAB>ref");
      }
      header_seen = true;
      continue;
    }
    if (f.size() != 5) {
      fail(ErrorCode::MalformedFile, where + ": expected 5 tab-separated fields, got " + std::to_string(f.size()));
    }
    pf.rows.push_back({line_no, std::string(f[0]), std::string(f[1]), std::string(f[2]), intern(f[3]),
                       intern(f[4])});
  }
  if (!header_seen) fail(ErrorCode::MalformedFile, path.string() + ": empty pairs file");
  return pf;
}

void score_single(Context& ctx, const ScoreOptions& o) {
  if (o.files.size() != 2) {
    fail(ErrorCode::InvalidConfig, "score takes exactly two pose files (REF HYP) unless --batch is given");
  }
  require_files(o.files);
  const auto ref = load_pose(o.files[0]);
  const auto hyp = load_pose(o.files[1]);
  std::vector<NamedConfig> variants;
  for (const auto& m : o.metrics) variants.push_back(resolve_metric(ctx, m, o.preprocess));

  std::string text = metadata("score", effective_seed(ctx, o.common),
                              {{"reference", o.files[0].string()}, {"hypothesis", o.files[1].string()}});
  for (const auto& v : variants) {
    const auto rec = score_pair(hyp, ref, v.config, ctx.library);
    text += rec.variant + "\t" + format_decimal(rec.score) + "\n";
  }
  ctx.out << text;
}

void score_batch(Context& ctx, const ScoreOptions& o) {
  if (!o.files.empty()) fail(ErrorCode::InvalidConfig, "--batch does not take positional pose files");
  require_files({*o.batch});
  std::vector<NamedConfig> variants;
  for (const auto& m : o.metrics) variants.push_back(resolve_metric(ctx, m, o.preprocess));
  const auto pairs = read_pairs(*o.batch);
  require_files(pairs.paths);

  const unsigned threads = effective_threads(ctx, o.common);
  const auto poses = load_poses(pairs.paths, threads);

  std::vector<std::vector<double>> scores(variants.size(), std::vector<double>(pairs.rows.size()));
  for (std::size_t v = 0; v < variants.size(); ++v) {
    const PreparedCorpus corpus(poses, variants[v].config, ctx.library, threads);
    std::vector<std::exception_ptr> errors(pairs.rows.size());
    parallel_for(pairs.rows.size(), threads, [&](std::size_t i) {
      try {
        scores[v][i] = corpus.score(pairs.rows[i].hyp, pairs.rows[i].ref);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
    for (std::size_t i = 0; i < errors.size(); ++i) {
      if (!errors[i]) continue;
      try {
        std::rethrow_exception(errors[i]);
      } catch (const Error& e) {
        fail(e.code(), o.batch->string() + ":line " + std::to_string(pairs.rows[i].line) + ": " +
                           variants[v].name + ": " + e.what());
      }
    }
  }

  ScoreTable table;
  for (std::size_t i = 0; i < pairs.rows.size(); ++i) {
    const auto& r = pairs.rows[i];
    for (std::size_t v = 0; v < variants.size(); ++v) {
      table.records.push_back({r.segment, r.system, r.language, variants[v].name, scores[v][i]});
    }
  }
  table.validate();

  std::string names;
  for (const auto& v : variants) names += (names.empty() ? "" : " ") + v.name;
  const auto text = metadata("score --batch", effective_seed(ctx, o.common),
                             {{"pairs", o.batch->string()}, {"metrics", names}}) +
                    format_score_table(table);
  if (o.out) {
    write_text_file(*o.out, text);
  } else {
    ctx.out << text;
  }
}

}  // namespace

Action add_score(CLI::App& app, Context& ctx) {
  auto o = std::make_shared<ScoreOptions>();
  auto* sub = app.add_subcommand("score", "Score hypothesis pose sequences against references");
  add_common_options(*sub, o->common);
  sub->add_option("-m,--metric", o->metrics, "Metric alias or variant name (repeatable)")->required();
  sub->add_option("--preprocess", o->preprocess,
                  "Replace the metric's preprocessing with a [preprocess.NAME] section");
  sub->add_option("--batch", o->batch, "TSV with columns segment, system, language, hyp, ref");
  sub->add_option("-o,--out", o->out, "Score table CSV for --batch (default: stdout)");
  sub->add_option("files", o->files, "REF HYP pose files")->expected(0, 2);
  return [&ctx, o] {
    if (o->batch) {
      score_batch(ctx, *o);
    } else {
      score_single(ctx, *o);
    }
  };
}

}  // namespace pose_eval::cli
