#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pose_eval/embedding.hpp"

namespace pose_eval {

struct Rating {
  std::string segment;
  std::string system;
  std::string language;
  std::string rater;
  double score = 0.0;
  int pass = 0;  // 1 or 2 in a repeats file, 0 otherwise
};

struct RatingSet {
  std::vector<Rating> records;
};

/// Header `segment,system,language,rater,score` (plus `pass` when `repeats`).
/// Throws MalformedFile, NonFiniteValue.
RatingSet parse_ratings(std::string_view text, bool repeats = false,
                        const std::string& origin = "<memory>");
RatingSet read_ratings(const std::filesystem::path& path, bool repeats = false);

struct ScoreRow {
  std::string segment;
  std::string system;
  std::string language;
  std::string metric;
  double value = 0.0;
};

struct ScoreTable {
  std::vector<ScoreRow> records;
  std::map<std::string, Polarity> polarity;  // undeclared metrics are higher-better

  Polarity polarity_of(const std::string& metric) const;
  /// Metric names in first-appearance order.
  std::vector<std::string> metrics() const;
  /// Throws DuplicateSegment when (segment, system, metric) repeats.
  void validate() const;
  /// Appends another table's rows and polarity declarations, then validates.
  void merge(const ScoreTable& other);
};

/// Header `segment,system,language,metric,value`. Throws MalformedFile,
/// NonFiniteValue, DuplicateSegment.
ScoreTable parse_score_table(std::string_view text, const std::string& origin = "<memory>");
ScoreTable read_score_table(const std::filesystem::path& path);
std::string format_score_table(const ScoreTable& table);

/// External per-segment scores joined to (system, language) through the
/// segment ids of `layout`; segments absent from the layout are dropped.
ScoreTable score_table_from_external(const ExternalScoreSet& set, const ScoreTable& layout,
                                     const std::string& system = "");

using SegmentKey = std::pair<std::string, std::string>;  // (segment, system)

/// Mean human score per (segment, system).
std::map<SegmentKey, double> average_human(const RatingSet& ratings);

/// Average ranks (1-based; ties get the mean of their rank range).
std::vector<double> average_ranks(const std::vector<double>& v);

/// Two-pass Pearson correlation. Throws LengthMismatch, DegenerateVariance.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

/// Pearson of average ranks. Throws LengthMismatch (unequal or fewer than
/// three values) and DegenerateVariance (constant input).
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Sample standard deviation (n - 1). Throws LengthMismatch below two values.
double sample_sd(const std::vector<double>& v);

enum class GroupBy { System, Language, Overall };
std::string_view to_string(GroupBy g) noexcept;
GroupBy parse_group_by(std::string_view s);

struct CorrelationCell {
  std::optional<double> value;
  std::string error;  // error code name when value is empty
  std::size_t n = 0;  // joined records
};

struct CorrelationRow {
  GroupBy group_by = GroupBy::Overall;
  std::string group;
  std::vector<CorrelationCell> cells;  // one per metric
};

struct CorrelationReport {
  std::vector<std::string> metrics;
  std::vector<CorrelationRow> rows;
  std::vector<CorrelationCell> sd;  // sample SD down each column over all rows
  std::vector<std::string> skipped_groups;  // groups where no metric joined
};

/// Spearman between sign-flipped metric values and human means, per group.
/// Rows follow `group_bys` order, groups sorted by name within a section.
CorrelationReport correlate(const ScoreTable& table, const std::map<SegmentKey, double>& human,
                            const std::vector<GroupBy>& group_bys);

std::string format_correlation_csv(const CorrelationReport& report);

struct FleissResult {
  double kappa = 0.0;
  double p_bar = 0.0;   // mean observed agreement
  double pe_bar = 0.0;  // expected agreement
  std::size_t items = 0;
};

/// Bin index floor(score * bins / 100), clamped to [0, bins - 1].
int score_bin(double score, int bins = 7);

/// Fleiss kappa with per-item rater counts over count rows (items x categories).
/// Items with fewer than two ratings are ignored. Throws InsufficientRaters.
FleissResult fleiss_kappa(const std::vector<std::vector<int>>& counts);

/// Items are (segment, system) pairs. Throws InsufficientRaters.
FleissResult fleiss_kappa_binned(const RatingSet& ratings, int bins = 7);

struct GroupKappa {
  std::string group;
  std::optional<FleissResult> result;
  std::string error;
};

/// Inter-rater kappa per language pair, languages sorted.
std::vector<GroupKappa> kappa_by_language(const RatingSet& ratings, int bins = 7);

struct RaterKappa {
  std::string rater;
  std::size_t repeats = 0;
  double kappa = 0.0;
};

struct IntraRaterResult {
  std::vector<RaterKappa> raters;  // sorted by rater id
  double mean = 0.0;
  double sd = 0.0;  // sample SD; 0 with a single rater
};

/// Per rater, two-rater Fleiss kappa between first and second pass of each
/// repeated item. The first pass comes from a `pass` 1 row when present,
/// otherwise from the rater's rating in `original`. Throws NoRepeats,
/// MalformedFile (a repeat without a first pass).
IntraRaterResult intra_rater_kappa(const RatingSet& original, const RatingSet& repeats, int bins = 7);

struct AbsoluteScores {
  std::vector<std::string> metrics;
  std::vector<std::string> systems;                      // sorted
  std::map<std::pair<std::string, std::string>, double> mean;  // (system, metric)
  std::map<std::string, Polarity> polarity;
};

AbsoluteScores absolute_score_table(const ScoreTable& table);

/// Rows = systems, columns = metrics headed `<metric> ↑` or `<metric> ↓`.
std::string format_absolute_csv(const AbsoluteScores& scores);

}  // namespace pose_eval
