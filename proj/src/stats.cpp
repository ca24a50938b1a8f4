#include "pose_eval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "pose_eval/csv.hpp"
#include "pose_eval/error.hpp"
#include "pose_eval/text_util.hpp"

namespace pose_eval {
namespace {

double parse_value(const CsvTable& table, const CsvRow& row, std::size_t col) {
  const auto v = parse_double(trim(row.fields[col]));
  if (!v) {
    fail(ErrorCode::MalformedFile,
         table.where(row) + ": '" + row.fields[col] + "' is not a number");
  }
  if (!std::isfinite(*v)) fail(ErrorCode::NonFiniteValue, table.where(row) + ": non-finite value");
  return *v;
}

void require_field(const CsvTable& table, const CsvRow& row, std::size_t col, const char* name) {
  if (trim(row.fields[col]).empty()) {
    fail(ErrorCode::MalformedFile, table.where(row) + ": empty " + name);
  }
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string cell_text(const CorrelationCell& c) {
  return c.value ? format_fixed(*c.value, 6) : "ERR:" + c.error;
}

}  // namespace

RatingSet parse_ratings(std::string_view text, bool repeats, const std::string& origin) {
  const auto table = parse_csv(text, origin);
  if (repeats) {
    table.require_header({"segment", "system", "language", "rater", "score", "pass"});
  } else {
    table.require_header({"segment", "system", "language", "rater", "score"});
  }
  RatingSet out;
  out.records.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    Rating r;
    require_field(table, row, 0, "segment");
    require_field(table, row, 1, "system");
    require_field(table, row, 3, "rater");
    r.segment = row.fields[0];
    r.system = row.fields[1];
    r.language = row.fields[2];
    r.rater = row.fields[3];
    r.score = parse_value(table, row, 4);
    if (r.score < 0.0 || r.score > 100.0) {
      fail(ErrorCode::MalformedFile, table.where(row) + ": score outside [0,100]");
    }
    if (repeats) {
      const auto pass = parse_int(trim(row.fields[5]));
      if (!pass || (*pass != 1 && *pass != 2)) {
        fail(ErrorCode::MalformedFile, table.where(row) + ": pass must be 1 or 2");
      }
      r.pass = static_cast<int>(*pass);
    }
    out.records.push_back(std::move(r));
  }
  return out;
}

RatingSet read_ratings(const std::filesystem::path& path, bool repeats) {
  return parse_ratings(read_text_file(path), repeats, path.string());
}

Polarity ScoreTable::polarity_of(const std::string& metric) const {
  const auto it = polarity.find(metric);
  return it == polarity.end() ? Polarity::HigherBetter : it->second;
}

std::vector<std::string> ScoreTable::metrics() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& r : records) {
    if (seen.insert(r.metric).second) out.push_back(r.metric);
  }
  return out;
}

void ScoreTable::validate() const {
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  for (const auto& r : records) {
    if (!seen.emplace(r.segment, r.system, r.metric).second) {
      fail(ErrorCode::DuplicateSegment, "score for segment '" + r.segment + "', system '" +
                                            r.system + "', metric '" + r.metric + "' repeats");
    }
  }
}

void ScoreTable::merge(const ScoreTable& other) {
  records.insert(records.end(), other.records.begin(), other.records.end());
  for (const auto& [m, p] : other.polarity) polarity[m] = p;
  validate();
}

ScoreTable parse_score_table(std::string_view text, const std::string& origin) {
  const auto table = parse_csv(text, origin);
  table.require_header({"segment", "system", "language", "metric", "value"});
  ScoreTable out;
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  for (const auto& row : table.rows) {
    require_field(table, row, 0, "segment");
    require_field(table, row, 3, "metric");
    ScoreRow r{row.fields[0], row.fields[1], row.fields[2], row.fields[3],
               parse_value(table, row, 4)};
    if (!seen.emplace(r.segment, r.system, r.metric).second) {
      fail(ErrorCode::DuplicateSegment, table.where(row) + ": (segment, system, metric) repeats");
    }
    out.records.push_back(std::move(r));
  }
  return out;
}

ScoreTable read_score_table(const std::filesystem::path& path) {
  return parse_score_table(read_text_file(path), path.string());
}

std::string format_score_table(const ScoreTable& table) {
  std::ostringstream out;
  write_csv_row(out, {"segment", "system", "language", "metric", "value"});
  for (const auto& r : table.records) {
    write_csv_row(out, {r.segment, r.system, r.language, r.metric, format_shortest(r.value)});
  }
  return std::move(out).str();
}

ScoreTable score_table_from_external(const ExternalScoreSet& set, const ScoreTable& layout,
                                     const std::string& system) {
  ScoreTable out;
  out.polarity[set.metric_name] = set.polarity;
  std::set<SegmentKey> done;
  for (const auto& r : layout.records) {
    if (!system.empty() && r.system != system) continue;
    const auto it = set.scores.find(r.segment);
    if (it == set.scores.end() || !done.emplace(r.segment, r.system).second) continue;
    out.records.push_back({r.segment, r.system, r.language, set.metric_name, it->second});
  }
  return out;
}

std::map<SegmentKey, double> average_human(const RatingSet& ratings) {
  std::map<SegmentKey, std::pair<double, std::size_t>> acc;
  for (const auto& r : ratings.records) {
    auto& a = acc[{r.segment, r.system}];
    a.first += r.score;
    ++a.second;
  }
  std::map<SegmentKey, double> out;
  for (const auto& [k, a] : acc) out.emplace(k, a.first / static_cast<double>(a.second));
  return out;
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && v[order[j]] == v[order[i]]) ++j;
    // Positions i..j-1 hold ranks i+1..j; their mean is (i + 1 + j) / 2.
    const double r = static_cast<double>(i + 1 + j) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) {
    fail(ErrorCode::LengthMismatch, "lengths " + std::to_string(x.size()) + " and " +
                                        std::to_string(y.size()));
  }
  if (x.size() < 2) fail(ErrorCode::LengthMismatch, "need at least two values");
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) fail(ErrorCode::DegenerateVariance, "constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) {
    fail(ErrorCode::LengthMismatch, "lengths " + std::to_string(x.size()) + " and " +
                                        std::to_string(y.size()));
  }
  if (x.size() < 3) {
    fail(ErrorCode::LengthMismatch, "need at least three pairs, got " + std::to_string(x.size()));
  }
  return pearson(average_ranks(x), average_ranks(y));
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) fail(ErrorCode::LengthMismatch, "standard deviation needs two values");
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::string_view to_string(GroupBy g) noexcept {
  switch (g) {
    case GroupBy::System: return "system";
    case GroupBy::Language: return "language";
    case GroupBy::Overall: return "overall";
  }
  return "?";
}

GroupBy parse_group_by(std::string_view s) {
  const auto v = to_lower_ascii(trim(s));
  if (v == "system") return GroupBy::System;
  if (v == "language") return GroupBy::Language;
  if (v == "overall") return GroupBy::Overall;
  fail(ErrorCode::InvalidConfig, "unknown grouping '" + std::string(s) + "'");
}

CorrelationReport correlate(const ScoreTable& table, const std::map<SegmentKey, double>& human,
                            const std::vector<GroupBy>& group_bys) {
  CorrelationReport report;
  report.metrics = table.metrics();
  std::map<std::string, std::size_t> metric_index;
  for (std::size_t m = 0; m < report.metrics.size(); ++m) metric_index[report.metrics[m]] = m;

  for (auto gb : group_bys) {
    // group -> metric -> (metric values, human means)
    std::map<std::string, std::vector<std::pair<std::vector<double>, std::vector<double>>>> groups;
    for (const auto& r : table.records) {
      const std::string group = gb == GroupBy::System     ? r.system
                                : gb == GroupBy::Language ? r.language
                                                          : std::string("Overall");
      auto& cols = groups[group];
      cols.resize(report.metrics.size());
      const auto h = human.find({r.segment, r.system});
      if (h == human.end()) continue;
      auto& col = cols[metric_index.at(r.metric)];
      const bool flip = table.polarity_of(r.metric) == Polarity::LowerBetter;
      col.first.push_back(flip ? -r.value : r.value);
      col.second.push_back(h->second);
    }
    for (const auto& [group, cols] : groups) {
      CorrelationRow row;
      row.group_by = gb;
      row.group = group;
      bool any_join = false;
      for (const auto& [xs, ys] : cols) {
        CorrelationCell cell;
        cell.n = xs.size();
        if (xs.empty()) {
          cell.error = std::string(to_string(ErrorCode::EmptyJoin));
        } else {
          any_join = true;
          try {
            cell.value = spearman(xs, ys);
          } catch (const Error& e) {
            cell.error = std::string(to_string(e.code()));
          }
        }
        row.cells.push_back(std::move(cell));
      }
      if (!any_join) {
        report.skipped_groups.push_back(std::string(to_string(gb)) + ":" + group);
        continue;
      }
      report.rows.push_back(std::move(row));
    }
  }

  for (std::size_t m = 0; m < report.metrics.size(); ++m) {
    std::vector<double> col;
    for (const auto& row : report.rows) {
      if (row.cells[m].value) col.push_back(*row.cells[m].value);
    }
    CorrelationCell cell;
    cell.n = col.size();
    if (col.size() < 2) {
      cell.error = std::string(to_string(ErrorCode::LengthMismatch));
    } else {
      cell.value = sample_sd(col);
    }
    report.sd.push_back(std::move(cell));
  }
  return report;
}

std::string format_correlation_csv(const CorrelationReport& report) {
  std::ostringstream out;
  std::vector<std::string> header{"group_by", "group"};
  header.insert(header.end(), report.metrics.begin(), report.metrics.end());
  write_csv_row(out, header);
  for (const auto& row : report.rows) {
    std::vector<std::string> fields{std::string(to_string(row.group_by)), row.group};
    for (const auto& c : row.cells) fields.push_back(cell_text(c));
    write_csv_row(out, fields);
  }
  std::vector<std::string> sd{"sd", "SD"};
  for (const auto& c : report.sd) sd.push_back(cell_text(c));
  write_csv_row(out, sd);
  return std::move(out).str();
}

int score_bin(double score, int bins) {
  const auto b = static_cast<int>(std::floor(score * bins / 100.0));
  return std::clamp(b, 0, bins - 1);
}

FleissResult fleiss_kappa(const std::vector<std::vector<int>>& counts) {
  FleissResult res;
  std::vector<double> category_totals;
  double total_ratings = 0.0;
  double p_sum = 0.0;
  for (const auto& row : counts) {
    const int n = std::accumulate(row.begin(), row.end(), 0);
    if (n < 2) continue;
    if (category_totals.size() < row.size()) category_totals.resize(row.size(), 0.0);
    double agree = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      agree += static_cast<double>(row[j]) * static_cast<double>(row[j] - 1);
      category_totals[j] += row[j];
    }
    p_sum += agree / (static_cast<double>(n) * static_cast<double>(n - 1));
    total_ratings += n;
    ++res.items;
  }
  if (res.items == 0) {
    fail(ErrorCode::InsufficientRaters, "no item has ratings from two or more raters");
  }
  res.p_bar = p_sum / static_cast<double>(res.items);
  for (double t : category_totals) res.pe_bar += (t / total_ratings) * (t / total_ratings);
  res.kappa = res.pe_bar == 1.0 ? 1.0 : (res.p_bar - res.pe_bar) / (1.0 - res.pe_bar);
  return res;
}

FleissResult fleiss_kappa_binned(const RatingSet& ratings, int bins) {
  if (bins < 2) fail(ErrorCode::InvalidConfig, "need at least two bins");
  std::map<SegmentKey, std::vector<int>> items;
  for (const auto& r : ratings.records) {
    auto& row = items[{r.segment, r.system}];
    row.resize(static_cast<std::size_t>(bins), 0);
    ++row[static_cast<std::size_t>(score_bin(r.score, bins))];
  }
  std::vector<std::vector<int>> counts;
  counts.reserve(items.size());
  for (auto& [k, row] : items) counts.push_back(std::move(row));
  return fleiss_kappa(counts);
}

std::vector<GroupKappa> kappa_by_language(const RatingSet& ratings, int bins) {
  std::map<std::string, RatingSet> by_lang;
  for (const auto& r : ratings.records) by_lang[r.language].records.push_back(r);
  std::vector<GroupKappa> out;
  for (const auto& [lang, set] : by_lang) {
    GroupKappa g;
    g.group = lang;
    try {
      g.result = fleiss_kappa_binned(set, bins);
    } catch (const Error& e) {
      g.error = std::string(to_string(e.code()));
    }
    out.push_back(std::move(g));
  }
  return out;
}

IntraRaterResult intra_rater_kappa(const RatingSet& original, const RatingSet& repeats, int bins) {
  using ItemKey = std::tuple<std::string, std::string, std::string>;  // rater, segment, system
  std::map<ItemKey, double> first_original;
  for (const auto& r : original.records) first_original.emplace(ItemKey{r.rater, r.segment, r.system}, r.score);
  std::map<ItemKey, double> pass1;
  std::map<ItemKey, double> pass2;
  for (const auto& r : repeats.records) {
    const ItemKey k{r.rater, r.segment, r.system};
    (r.pass == 1 ? pass1 : pass2).emplace(k, r.score);
  }

  std::map<std::string, std::vector<std::vector<int>>> per_rater;
  for (const auto& [k, second] : pass2) {
    double first = 0.0;
    if (auto it = pass1.find(k); it != pass1.end()) {
      first = it->second;
    } else if (auto jt = first_original.find(k); jt != first_original.end()) {
      first = jt->second;
    } else {
      fail(ErrorCode::MalformedFile, "repeat of segment '" + std::get<1>(k) + "' by rater '" +
                                         std::get<0>(k) + "' has no first rating");
    }
    std::vector<int> row(static_cast<std::size_t>(bins), 0);
    ++row[static_cast<std::size_t>(score_bin(first, bins))];
    ++row[static_cast<std::size_t>(score_bin(second, bins))];
    per_rater[std::get<0>(k)].push_back(std::move(row));
  }
  if (per_rater.empty()) fail(ErrorCode::NoRepeats, "no repeated ratings found");

  IntraRaterResult out;
  std::vector<double> kappas;
  for (const auto& [rater, rows] : per_rater) {
    const auto res = fleiss_kappa(rows);
    out.raters.push_back({rater, rows.size(), res.kappa});
    kappas.push_back(res.kappa);
  }
  out.mean = mean_of(kappas);
  out.sd = kappas.size() > 1 ? sample_sd(kappas) : 0.0;
  return out;
}

AbsoluteScores absolute_score_table(const ScoreTable& table) {
  AbsoluteScores out;
  out.metrics = table.metrics();
  std::map<std::pair<std::string, std::string>, std::pair<double, std::size_t>> acc;
  std::set<std::string> systems;
  for (const auto& r : table.records) {
    auto& a = acc[{r.system, r.metric}];
    a.first += r.value;
    ++a.second;
    systems.insert(r.system);
  }
  out.systems.assign(systems.begin(), systems.end());
  for (const auto& [k, a] : acc) out.mean.emplace(k, a.first / static_cast<double>(a.second));
  for (const auto& m : out.metrics) out.polarity[m] = table.polarity_of(m);
  return out;
}

std::string format_absolute_csv(const AbsoluteScores& s) {
  std::ostringstream out;
  std::vector<std::string> header{"system"};
  for (const auto& m : s.metrics) {
    header.push_back(m + (s.polarity.at(m) == Polarity::HigherBetter ? " ↑" : " ↓"));
  }
  write_csv_row(out, header);
  for (const auto& sys : s.systems) {
    std::vector<std::string> row{sys};
    for (const auto& m : s.metrics) {
      const auto it = s.mean.find({sys, m});
      row.push_back(it == s.mean.end() ? "" : format_fixed(it->second, 6));
    }
    write_csv_row(out, row);
  }
  return std::move(out).str();
}

}  // namespace pose_eval
