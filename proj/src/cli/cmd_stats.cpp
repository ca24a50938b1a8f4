#include <memory>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "commands.hpp"
#include "pose_eval/csv.hpp"
#include "pose_eval/error.hpp"
#include "pose_eval/stats.hpp"
#include "pose_eval/text_util.hpp"
#include "pose_eval/variant.hpp"

namespace pose_eval::cli {
namespace {

struct CorrelateOptions {
  CommonOptions common;
  std::optional<std::filesystem::path> ratings;
  std::vector<std::filesystem::path> scores;
  std::vector<std::string> externals;
  std::vector<std::string> polarity_of;
  std::vector<std::string> group_by;
  std::optional<std::filesystem::path> out;
};

struct ExternalSpec {
  std::string metric;
  std::string system;
  Polarity polarity = Polarity::HigherBetter;
  std::filesystem::path path;
};

/// NAME[@SYSTEM]:POLARITY:PATH
ExternalSpec parse_external_spec(const std::string& s) {
  const auto a = s.find(':');
  const auto b = a == std::string::npos ? a : s.find(':', a + 1);
  if (b == std::string::npos || a == 0 || b + 1 >= s.size()) {
    fail(ErrorCode::InvalidConfig, "--external '" + s + "' is not NAME[@SYSTEM]:POLARITY:PATH");
  }
  ExternalSpec e;
  e.metric = s.substr(0, a);
  if (const auto at = e.metric.find('@'); at != std::string::npos) {
    e.system = e.metric.substr(at + 1);
    e.metric.resize(at);
  }
  e.polarity = parse_polarity(s.substr(a + 1, b - a - 1));
  e.path = s.substr(b + 1);
  return e;
}

/// Metric names that parse as pose distance variants are errors (lower is
/// better); everything else defaults to higher-is-better.
Polarity inferred_polarity(const Context& ctx, const std::string& metric) {
  try {
    named_config(metric, ctx.library);
    return Polarity::LowerBetter;
  } catch (const Error&) {
    return Polarity::HigherBetter;
  }
}

ScoreTable layout_from_ratings(const RatingSet& ratings) {
  ScoreTable layout;
  std::set<SegmentKey> seen;
  for (const auto& r : ratings.records) {
    if (seen.emplace(r.segment, r.system).second) {
      layout.records.push_back({r.segment, r.system, r.language, "", 0.0});
    }
  }
  return layout;
}

void run_correlate(Context& ctx, const CorrelateOptions& o) {
  const auto ratings_path = path_setting(ctx, o.ratings, "ratings");
  if (!ratings_path) fail(ErrorCode::InvalidConfig, "correlate needs --ratings or [paths] ratings");
  std::vector<ExternalSpec> externals;
  for (const auto& e : o.externals) externals.push_back(parse_external_spec(e));
  if (o.scores.empty() && externals.empty()) {
    fail(ErrorCode::InvalidConfig, "correlate needs at least one --scores or --external file");
  }
  std::vector<GroupBy> group_bys;
  for (const auto& g : o.group_by) group_bys.push_back(parse_group_by(g));
  if (group_bys.empty()) group_bys = {GroupBy::System, GroupBy::Language, GroupBy::Overall};

  std::vector<std::filesystem::path> inputs{*ratings_path};
  inputs.insert(inputs.end(), o.scores.begin(), o.scores.end());
  for (const auto& e : externals) inputs.push_back(e.path);
  require_files(inputs);

  const auto ratings = read_ratings(*ratings_path);
  ScoreTable table;
  for (const auto& p : o.scores) table.merge(read_score_table(p));
  const auto layout = layout_from_ratings(ratings);
  for (const auto& e : externals) {
    table.merge(score_table_from_external(read_external_scores(e.path, e.metric, e.polarity), layout,
                                          e.system));
  }
  for (const auto& m : table.metrics()) {
    if (!table.polarity.count(m)) table.polarity[m] = inferred_polarity(ctx, m);
  }
  for (const auto& spec : o.polarity_of) {
    const auto eq = spec.rfind('=');
    if (eq == std::string::npos || eq == 0) {
      fail(ErrorCode::InvalidConfig, "--polarity-of '" + spec + "' is not METRIC=higher|lower");
    }
    table.polarity[spec.substr(0, eq)] = parse_polarity(spec.substr(eq + 1));
  }

  const auto report = correlate(table, average_human(ratings), group_bys);
  for (const auto& g : report.skipped_groups) {
    ctx.err << "warning: EmptyJoin: no metric scores joined the ratings for group " << g << "\n";
  }

  std::string groups, polarities, sources;
  for (const auto g : group_bys) groups += (groups.empty() ? "" : " ") + std::string(to_string(g));
  for (const auto& m : table.metrics()) {
    polarities += fmt::format("{}{}={}", polarities.empty() ? "" : " ", m,
                              table.polarity_of(m) == Polarity::LowerBetter ? "lower" : "higher");
  }
  for (const auto& p : o.scores) sources += (sources.empty() ? "" : " ") + p.string();
  for (const auto& e : o.externals) sources += (sources.empty() ? "" : " ") + e;
  const auto head = metadata("correlate", effective_seed(ctx, o.common),
                             {{"ratings", ratings_path->string()},
                              {"scores", sources},
                              {"group_by", groups},
                              {"polarity", polarities}});
  const auto corr = head + format_correlation_csv(report);
  const auto absolute = head + format_absolute_csv(absolute_score_table(table));
  if (const auto out_dir = path_setting(ctx, o.out, "out")) {
    write_text_file(*out_dir / "correlation.csv", corr);
    write_text_file(*out_dir / "absolute.csv", absolute);
  }
  ctx.out << corr;
}

struct AgreementOptions {
  CommonOptions common;
  std::optional<std::filesystem::path> ratings;
  std::optional<std::filesystem::path> repeats;
  int bins = 7;
  std::optional<std::filesystem::path> out;
};

void run_agreement(Context& ctx, const AgreementOptions& o) {
  const auto ratings_path = path_setting(ctx, o.ratings, "ratings");
  if (!ratings_path) fail(ErrorCode::InvalidConfig, "agreement needs --ratings or [paths] ratings");
  const auto repeats_path = path_setting(ctx, o.repeats, "repeats");
  if (o.bins < 2) fail(ErrorCode::InvalidConfig, "--bins must be at least 2");
  std::vector<std::filesystem::path> inputs{*ratings_path};
  if (repeats_path) inputs.push_back(*repeats_path);
  require_files(inputs);

  const auto ratings = read_ratings(*ratings_path);
  std::ostringstream text;
  text << metadata("agreement", effective_seed(ctx, o.common),
                   {{"ratings", ratings_path->string()},
                    {"repeats", repeats_path ? repeats_path->string() : "none"},
                    {"bins", std::to_string(o.bins)}});

  text << "[inter-rater]\n";
  write_csv_row(text, {"language", "kappa", "p_bar", "pe_bar", "items"});
  for (const auto& g : kappa_by_language(ratings, o.bins)) {
    if (g.result) {
      write_csv_row(text, {g.group, format_fixed(g.result->kappa, 6), format_fixed(g.result->p_bar, 6),
                           format_fixed(g.result->pe_bar, 6), std::to_string(g.result->items)});
    } else {
      write_csv_row(text, {g.group, "ERR:" + g.error, "", "", "0"});
    }
  }

  if (repeats_path) {
    const auto repeats = read_ratings(*repeats_path, true);
    text << "\n[intra-rater]\n";
    write_csv_row(text, {"rater", "kappa", "repeats"});
    try {
      const auto intra = intra_rater_kappa(ratings, repeats, o.bins);
      for (const auto& r : intra.raters) {
        write_csv_row(text, {r.rater, format_fixed(r.kappa, 6), std::to_string(r.repeats)});
      }
      text << fmt::format("mean,{},\nsd,{},\n", format_fixed(intra.mean, 6), format_fixed(intra.sd, 6));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoRepeats) throw;
      ctx.err << "warning: " << e.what() << "\n";
      text << "ERR:NoRepeats,,\n";
    }
  }

  if (const auto out = path_setting(ctx, o.out, "agreement_out")) write_text_file(*out, text.str());
  ctx.out << text.str();
}

}  // namespace

Action add_correlate(CLI::App& app, Context& ctx) {
  auto o = std::make_shared<CorrelateOptions>();
  auto* sub = app.add_subcommand("correlate", "Correlate metric scores with human ratings");
  add_common_options(*sub, o->common);
  sub->add_option("--ratings", o->ratings, "Ratings CSV: segment, system, language, rater, score");
  sub->add_option("--scores", o->scores, "Score table CSV (repeatable)");
  sub->add_option("--external", o->externals,
                  "External scores as NAME[@SYSTEM]:POLARITY:PATH with an id,score CSV (repeatable)");
  sub->add_option("--polarity-of", o->polarity_of, "Declare METRIC=higher|lower (repeatable)");
  sub->add_option("--group-by", o->group_by, "system, language or overall (repeatable; default all)");
  sub->add_option("-o,--out", o->out, "Directory for correlation.csv and absolute.csv");
  return [&ctx, o] { run_correlate(ctx, *o); };
}

Action add_agreement(CLI::App& app, Context& ctx) {
  auto o = std::make_shared<AgreementOptions>();
  auto* sub = app.add_subcommand("agreement", "Inter- and intra-rater agreement (binned Fleiss kappa)");
  add_common_options(*sub, o->common);
  sub->add_option("--ratings", o->ratings, "Ratings CSV: segment, system, language, rater, score");
  sub->add_option("--repeats", o->repeats, "Repeated ratings CSV with a pass column");
  sub->add_option("--bins", o->bins, "Number of score bins")->capture_default_str();
  sub->add_option("-o,--out", o->out, "Write the report to this file as well");
  return [&ctx, o] { run_agreement(ctx, *o); };
}

}  // namespace pose_eval::cli
