#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "pose_eval/retrieval.hpp"
#include "test_support.hpp"

namespace pose_eval {
namespace {

using testing::error_code_of;

TEST(AveragePrecision, WorkedExamples) {
  EXPECT_DOUBLE_EQ(average_precision({"d1", "d2", "d3", "d4", "t"}, {"t"}), 0.2);
  EXPECT_DOUBLE_EQ(average_precision({"t1", "d", "t2"}, {"t1", "t2"}), 5.0 / 6.0);
  EXPECT_DOUBLE_EQ(average_precision({"t"}, {"t"}), 1.0);
  EXPECT_EQ(error_code_of([] { average_precision({"a"}, {}); }), ErrorCode::NoRelevant);
}

TEST(PrecisionAtK, UsesTheShorterOfKAndTheRanking) {
  const std::vector<std::string> ranked{"t1", "d1", "t2", "d2", "d3", "t3"};
  EXPECT_DOUBLE_EQ(precision_at_k(ranked, {"t1", "t2", "t3"}, 5), 0.4);
  EXPECT_DOUBLE_EQ(precision_at_k(ranked, {"t1", "t2", "t3"}, 10), 0.5);
  EXPECT_EQ(precision_at_k({}, {"t"}, 10), 0.0);
}

RetrievalDataset dataset(std::size_t glosses, std::size_t per_gloss, std::uint64_t seed) {
  RetrievalDataset ds;
  ds.seed = seed;
  for (std::size_t g = 0; g < glosses; ++g) {
    for (std::size_t i = 0; i < per_gloss; ++i) {
      ds.items.push_back({"g" + std::to_string(g) + "_" + std::to_string(i), "G" + std::to_string(g), ""});
    }
  }
  return ds;
}

TEST(Pools, RatioAndDeterminism) {
  const auto ds = dataset(5, 40, 13);
  const auto pools = build_pools(ds);
  ASSERT_EQ(pools.size(), 5u);
  for (const auto& p : pools) {
    EXPECT_EQ(p.targets.size(), 40u);
    EXPECT_EQ(p.distractors.size(), 160u);
    EXPECT_FALSE(p.shortfall());
    std::set<std::size_t> uniq(p.distractors.begin(), p.distractors.end());
    EXPECT_EQ(uniq.size(), 160u);
    for (auto d : p.distractors) EXPECT_NE(ds.items[d].gloss, p.gloss);
  }
  const auto again = build_pools(ds);
  EXPECT_EQ(again[2].distractors, pools[2].distractors);
  auto other = ds;
  other.seed = 14;
  EXPECT_NE(build_pools(other)[2].distractors, pools[2].distractors);
}

TEST(Pools, ShortfallAndSingleGloss) {
  const auto pools = build_pools(dataset(2, 10, 1));
  EXPECT_EQ(pools[0].distractors.size(), 10u);
  EXPECT_EQ(pools[0].wanted_distractors, 40u);
  EXPECT_TRUE(pools[0].shortfall());
  EXPECT_EQ(error_code_of([] { build_pools(dataset(1, 5, 1)); }), ErrorCode::InvalidConfig);
}

TEST(Manifest, ParsesAndRejectsDuplicates) {
  const auto ds = parse_manifest("id\tgloss\tpath\na\tHELLO\ta.posec\nb\tBYE\t/abs/b.posec\n", "/data", 3);
  ASSERT_EQ(ds.items.size(), 2u);
  EXPECT_EQ(ds.items[0].path, std::filesystem::path("/data/a.posec"));
  EXPECT_EQ(ds.items[1].path, std::filesystem::path("/abs/b.posec"));
  EXPECT_EQ(error_code_of([] { parse_manifest("id\tgloss\tpath\na\tX\tp\na\tY\tq\n", "", 0); }),
            ErrorCode::DuplicateSegment);
}

// Scores derived from a hash of the (unordered) pair, so rankings are arbitrary.
double pair_score(std::size_t a, std::size_t b) {
  const auto lo = std::min(a, b), hi = std::max(a, b);
  std::mt19937_64 rng(lo * 1000003 + hi);
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

TEST(RunRetrieval, MatchesDirectComputation) {
  const auto ds = dataset(4, 6, 21);
  const auto pools = build_pools(ds);
  RetrievalOptions opts;
  opts.threads = 3;
  const auto report = run_retrieval(ds, pools, pair_score, opts);
  ASSERT_EQ(report.queries.size(), 24u);
  double total = 0.0;
  std::size_t qi = 0;
  for (const auto& pool : pools) {
    for (auto q : pool.targets) {
      std::vector<std::pair<double, std::string>> cands;
      std::set<std::string> relevant;
      for (auto t : pool.targets) {
        if (t == q) continue;
        cands.emplace_back(pair_score(t, q), ds.items[t].id);
        relevant.insert(ds.items[t].id);
      }
      for (auto d : pool.distractors) cands.emplace_back(pair_score(d, q), ds.items[d].id);
      std::sort(cands.begin(), cands.end());
      std::vector<std::string> ranked;
      for (const auto& c : cands) ranked.push_back(c.second);
      const auto& r = report.queries[qi++];
      EXPECT_EQ(r.id, ds.items[q].id);
      EXPECT_EQ(r.candidates, ranked.size());
      EXPECT_NEAR(r.ap, average_precision(ranked, relevant), 1e-12);
      EXPECT_NEAR(r.p_at_k, precision_at_k(ranked, relevant, 10), 1e-12);
      total += r.ap;
    }
  }
  EXPECT_NEAR(report.mean_ap, total / 24.0, 1e-12);
}

TEST(RunRetrieval, HigherIsBetterReversesTheRanking) {
  const auto ds = dataset(3, 4, 2);
  const auto pools = build_pools(ds);
  // Targets of the same gloss score 1, everything else 0.
  auto scorer = [&](std::size_t h, std::size_t r) { return ds.items[h].gloss == ds.items[r].gloss ? 1.0 : 0.0; };
  RetrievalOptions opts;
  opts.lower_is_better = false;
  EXPECT_DOUBLE_EQ(run_retrieval(ds, pools, scorer, opts).mean_ap, 1.0);
  opts.lower_is_better = true;
  EXPECT_LT(run_retrieval(ds, pools, scorer, opts).mean_ap, 0.5);
}

TEST(RunRetrieval, FailedPairsSkipTheQuery) {
  const auto ds = dataset(2, 3, 2);
  const auto pools = build_pools(ds);
  auto scorer = [](std::size_t h, std::size_t r) {
    if (h == 0 || r == 0) fail(ErrorCode::EmptySequence, "empty");
    return static_cast<double>(h + r);
  };
  const auto report = run_retrieval(ds, pools, scorer, {});
  EXPECT_GT(report.skipped_queries, 0u);
  EXPECT_FALSE(report.pair_errors.empty());
}

}  // namespace
}  // namespace pose_eval
