#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <vector>

namespace pose_eval {

struct RetrievalItem {
  std::string id;
  std::string gloss;
  std::filesystem::path path;
};

struct RetrievalDataset {
  std::vector<RetrievalItem> items;
  std::uint64_t seed = 0;

  /// Throws DuplicateSegment on repeated ids.
  void validate() const;
};

/// TSV manifest with header `id<TAB>gloss<TAB>path`; relative paths resolve
/// against the manifest's directory. Throws MalformedFile, DuplicateSegment.
RetrievalDataset parse_manifest(std::string_view text, const std::filesystem::path& base_dir,
                                std::uint64_t seed, const std::string& origin = "<memory>");
RetrievalDataset read_manifest(const std::filesystem::path& path, std::uint64_t seed);

struct RetrievalPool {
  std::string gloss;
  std::vector<std::size_t> targets;      // item indices, dataset order
  std::vector<std::size_t> distractors;  // item indices, sampled order
  std::size_t wanted_distractors = 0;

  bool shortfall() const noexcept { return distractors.size() < wanted_distractors; }
};

inline constexpr std::size_t kDistractorRatio = 4;

/// One pool per gloss (first-appearance order). Distractors are drawn without
/// replacement from other glosses' items with an RNG seeded from
/// (seed, gloss), so pools of one gloss do not depend on the others.
/// Throws InvalidConfig with fewer than two glosses.
std::vector<RetrievalPool> build_pools(const RetrievalDataset& ds,
                                       std::size_t ratio = kDistractorRatio);

/// Seed used for a gloss's distractor draw.
std::uint64_t pool_seed(std::uint64_t seed, std::string_view gloss) noexcept;

/// Un-truncated AP over `ranked` (candidate ids, best first). Throws NoRelevant.
double average_precision(const std::vector<std::string>& ranked, const std::set<std::string>& relevant);

/// |top-min(k,n) ∩ relevant| / min(k,n); 0 for an empty ranking.
double precision_at_k(const std::vector<std::string>& ranked, const std::set<std::string>& relevant,
                      std::size_t k);

/// score(hyp_index, ref_index); the query is the reference.
using PairScorer = std::function<double(std::size_t hyp, std::size_t ref)>;

struct RetrievalOptions {
  bool lower_is_better = true;
  /// Cache each unordered pair once. Disable for asymmetric metrics.
  bool symmetric = true;
  std::size_t k = 10;
  unsigned threads = 1;
  std::string variant;
};

struct QueryResult {
  std::string id;
  std::string gloss;
  std::size_t candidates = 0;
  double ap = 0.0;
  double p_at_k = 0.0;
};

struct GlossSummary {
  std::string gloss;
  std::size_t n_targets = 0;
  std::size_t n_distractors = 0;
  std::size_t queries = 0;
  double mean_ap = 0.0;
  double p_at_k = 0.0;
  bool shortfall = false;
};

struct RetrievalReport {
  std::string variant;
  std::uint64_t seed = 0;
  std::size_t k = 10;
  std::vector<QueryResult> queries;
  std::vector<GlossSummary> glosses;
  double mean_ap = 0.0;
  double mean_p_at_k = 0.0;
  std::size_t skipped_queries = 0;  // no other target, or a failed pair
  std::vector<std::string> pair_errors;
};

RetrievalReport run_retrieval(const RetrievalDataset& ds, const std::vector<RetrievalPool>& pools,
                              const PairScorer& scorer, const RetrievalOptions& opts);

/// Structured text: header block, one line per gloss, summary block.
std::string format_report_text(const RetrievalReport& report);
/// `gloss,n_targets,n_distractors,mean_ap,p_at_10`.
std::string format_report_csv(const RetrievalReport& report);

}  // namespace pose_eval
