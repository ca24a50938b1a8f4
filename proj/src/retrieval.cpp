#include "pose_eval/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>

#include "pose_eval/csv.hpp"
#include "pose_eval/error.hpp"
#include "pose_eval/parallel.hpp"
#include "pose_eval/text_util.hpp"
#include "pose_eval/version.hpp"

namespace pose_eval {
namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform in [0, bound) by rejection sampling, identical on every standard library.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  while (true) {
    const std::uint64_t x = rng();
    if (x < limit) return x % bound;
  }
}

}  // namespace

void RetrievalDataset::validate() const {
  std::set<std::string> ids;
  for (const auto& item : items) {
    if (!ids.insert(item.id).second) {
      fail(ErrorCode::DuplicateSegment, "dataset id '" + item.id + "' repeats");
    }
  }
}

RetrievalDataset parse_manifest(std::string_view text, const std::filesystem::path& base_dir,
                                std::uint64_t seed, const std::string& origin) {
  RetrievalDataset ds;
  ds.seed = seed;
  std::size_t line_no = 0;
  bool header = true;
  std::set<std::string> ids;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    const auto where = origin + ":line " + std::to_string(line_no);
    const auto cols = split(line, '\t');
    if (header) {
      if (cols.size() != 3 || cols[0] != "id" || cols[1] != "gloss" || cols[2] != "path") {
        fail(ErrorCode::MalformedFile, where + ": expected header 'id<TAB>gloss<TAB>path'");
      }
      header = false;
      continue;
    }
    if (cols.size() != 3) {
      fail(ErrorCode::MalformedFile, where + ": expected 3 tab-separated fields, got " +
                                         std::to_string(cols.size()));
    }
    RetrievalItem item{std::string(trim(cols[0])), std::string(trim(cols[1])),
                       std::filesystem::path(std::string(trim(cols[2])))};
    if (item.id.empty() || item.gloss.empty() || item.path.empty()) {
      fail(ErrorCode::MalformedFile, where + ": empty field");
    }
    if (!ids.insert(item.id).second) {
      fail(ErrorCode::DuplicateSegment, where + ": id '" + item.id + "' repeats");
    }
    if (item.path.is_relative()) item.path = base_dir / item.path;
    ds.items.push_back(std::move(item));
  }
  if (header) fail(ErrorCode::MalformedFile, origin + ":line 1: missing header");
  return ds;
}

RetrievalDataset read_manifest(const std::filesystem::path& path, std::uint64_t seed) {
  return parse_manifest(read_text_file(path), path.parent_path(), seed, path.string());
}

std::uint64_t pool_seed(std::uint64_t seed, std::string_view gloss) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : gloss) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return splitmix64(splitmix64(seed) ^ h);
}

std::vector<RetrievalPool> build_pools(const RetrievalDataset& ds, std::size_t ratio) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> by_gloss;
  for (std::size_t i = 0; i < ds.items.size(); ++i) {
    auto& members = by_gloss[ds.items[i].gloss];
    if (members.empty()) order.push_back(ds.items[i].gloss);
    members.push_back(i);
  }
  if (order.size() < 2) {
    fail(ErrorCode::InvalidConfig, "retrieval needs at least two glosses, found " +
                                       std::to_string(order.size()));
  }

  std::vector<RetrievalPool> pools;
  pools.reserve(order.size());
  for (const auto& gloss : order) {
    RetrievalPool pool;
    pool.gloss = gloss;
    pool.targets = by_gloss[gloss];
    pool.wanted_distractors = ratio * pool.targets.size();

    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < ds.items.size(); ++i) {
      if (ds.items[i].gloss != gloss) others.push_back(i);
    }
    const auto take = std::min(pool.wanted_distractors, others.size());
    std::mt19937_64 rng(pool_seed(ds.seed, gloss));
    for (std::size_t i = 0; i < take; ++i) {
      const auto j = i + bounded(rng, others.size() - i);
      std::swap(others[i], others[j]);
    }
    others.resize(take);
    pool.distractors = std::move(others);
    pools.push_back(std::move(pool));
  }
  return pools;
}

double average_precision(const std::vector<std::string>& ranked,
                         const std::set<std::string>& relevant) {
  if (relevant.empty()) fail(ErrorCode::NoRelevant, "query has no relevant candidates");
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    if (relevant.count(ranked[r])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(r + 1);
    }
  }
  return sum / static_cast<double>(relevant.size());
}

double precision_at_k(const std::vector<std::string>& ranked, const std::set<std::string>& relevant,
                      std::size_t k) {
  const auto n = std::min(k, ranked.size());
  if (n == 0) return 0.0;
  std::size_t hits = 0;
  for (std::size_t r = 0; r < n; ++r) hits += relevant.count(ranked[r]);
  return static_cast<double>(hits) / static_cast<double>(n);
}

RetrievalReport run_retrieval(const RetrievalDataset& ds, const std::vector<RetrievalPool>& pools,
                              const PairScorer& scorer, const RetrievalOptions& opts) {
  RetrievalReport report;
  report.variant = opts.variant;
  report.seed = ds.seed;
  report.k = opts.k;

  // Every (hyp = candidate, ref = query) pair, keyed so that symmetric
  // metrics compute each unordered pair once.
  struct Key {
    std::size_t a, b;
    auto operator<=>(const Key&) const = default;
  };
  const auto key = [&](std::size_t hyp, std::size_t ref) {
    return opts.symmetric ? Key{std::min(hyp, ref), std::max(hyp, ref)} : Key{hyp, ref};
  };
  std::map<Key, std::size_t> slots;
  std::vector<Key> jobs;
  for (const auto& pool : pools) {
    for (auto q : pool.targets) {
      const auto add = [&](std::size_t c) {
        if (c == q) return;
        const auto k = key(c, q);
        if (slots.emplace(k, jobs.size()).second) jobs.push_back(k);
      };
      for (auto c : pool.targets) add(c);
      for (auto c : pool.distractors) add(c);
    }
  }
  std::vector<double> scores(jobs.size(), 0.0);
  std::vector<std::string> errors(jobs.size());
  parallel_for(jobs.size(), opts.threads, [&](std::size_t j) {
    try {
      scores[j] = scorer(jobs[j].a, jobs[j].b);
      if (std::isnan(scores[j])) errors[j] = "metric returned NaN";
    } catch (const std::exception& e) {
      errors[j] = e.what();
    }
  });
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    if (!errors[j].empty()) {
      report.pair_errors.push_back(ds.items[jobs[j].a].id + " vs " + ds.items[jobs[j].b].id +
                                   ": " + errors[j]);
    }
  }

  double ap_total = 0.0;
  double pk_total = 0.0;
  for (const auto& pool : pools) {
    GlossSummary g;
    g.gloss = pool.gloss;
    g.n_targets = pool.targets.size();
    g.n_distractors = pool.distractors.size();
    g.shortfall = pool.shortfall();
    for (auto q : pool.targets) {
      std::vector<std::pair<double, std::size_t>> cands;
      std::set<std::string> relevant;
      bool failed = false;
      const auto add = [&](std::size_t c, bool target) {
        if (c == q) return;
        const auto slot = slots.at(key(c, q));
        if (!errors[slot].empty()) failed = true;
        cands.emplace_back(scores[slot], c);
        if (target) relevant.insert(ds.items[c].id);
      };
      for (auto c : pool.targets) add(c, true);
      for (auto c : pool.distractors) add(c, false);
      if (failed || relevant.empty()) {
        ++report.skipped_queries;
        continue;
      }
      std::sort(cands.begin(), cands.end(), [&](const auto& x, const auto& y) {
        if (x.first != y.first) return opts.lower_is_better ? x.first < y.first : x.first > y.first;
        return ds.items[x.second].id < ds.items[y.second].id;
      });
      std::vector<std::string> ranked;
      ranked.reserve(cands.size());
      for (const auto& c : cands) ranked.push_back(ds.items[c.second].id);

      QueryResult r;
      r.id = ds.items[q].id;
      r.gloss = pool.gloss;
      r.candidates = ranked.size();
      r.ap = average_precision(ranked, relevant);
      r.p_at_k = precision_at_k(ranked, relevant, opts.k);
      g.mean_ap += r.ap;
      g.p_at_k += r.p_at_k;
      ++g.queries;
      ap_total += r.ap;
      pk_total += r.p_at_k;
      report.queries.push_back(std::move(r));
    }
    if (g.queries > 0) {
      g.mean_ap /= static_cast<double>(g.queries);
      g.p_at_k /= static_cast<double>(g.queries);
    }
    report.glosses.push_back(std::move(g));
  }
  if (!report.queries.empty()) {
    report.mean_ap = ap_total / static_cast<double>(report.queries.size());
    report.mean_p_at_k = pk_total / static_cast<double>(report.queries.size());
  }
  return report;
}

std::string format_report_text(const RetrievalReport& r) {
  std::string out;
  out += fmt::format("# pose-eval {} retrieval report\n", kVersion);
  out += fmt::format("variant: {}\n", r.variant);
  out += fmt::format("seed: {}\n", r.seed);
  out += fmt::format("distractor_ratio: {}\n", kDistractorRatio);
  out += fmt::format("k: {}\n", r.k);
  out += fmt::format("ap: un-truncated; ties broken by ascending id; P@k uses min(k, candidates)\n\n");
  out += fmt::format("{:<24} {:>9} {:>13} {:>7} {:>9} {:>9}  note\n", "gloss", "n_targets",
                     "n_distractors", "queries", "mean_ap", fmt::format("p_at_{}", r.k));
  for (const auto& g : r.glosses) {
    std::string note;
    if (g.shortfall) note += "distractor shortfall";
    if (g.queries == 0) note += std::string(note.empty() ? "" : "; ") + "no scored queries";
    out += fmt::format("{:<24} {:>9} {:>13} {:>7} {:>9} {:>9}  {}\n", g.gloss, g.n_targets,
                       g.n_distractors, g.queries, format_fixed(g.mean_ap, 6),
                       format_fixed(g.p_at_k, 6), note);
  }
  out += "\n[summary]\n";
  out += fmt::format("queries: {}\n", r.queries.size());
  out += fmt::format("skipped_queries: {}\n", r.skipped_queries);
  out += fmt::format("failed_pairs: {}\n", r.pair_errors.size());
  out += fmt::format("mAP: {}\n", format_fixed(r.mean_ap, 6));
  out += fmt::format("P@{}: {}\n", r.k, format_fixed(r.mean_p_at_k, 6));
  for (const auto& e : r.pair_errors) out += "error: " + e + "\n";
  return out;
}

std::string format_report_csv(const RetrievalReport& r) {
  std::ostringstream out;
  write_csv_row(out, {"gloss", "n_targets", "n_distractors", "mean_ap", "p_at_10"});
  for (const auto& g : r.glosses) {
    write_csv_row(out, {g.gloss, std::to_string(g.n_targets), std::to_string(g.n_distractors),
                        format_fixed(g.mean_ap, 6), format_fixed(g.p_at_k, 6)});
  }
  return std::move(out).str();
}

}  // namespace pose_eval
