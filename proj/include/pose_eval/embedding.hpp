#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace pose_eval {

enum class EmbeddingSource { Pose, Text };

struct EmbeddingVector {
  std::string id;
  std::vector<double> values;
  EmbeddingSource source = EmbeddingSource::Pose;

  bool operator==(const EmbeddingVector&) const = default;
};

std::string_view to_string(EmbeddingSource s) noexcept;

/// Pose-to-pose score: plain dot product, no re-normalization.
/// Throws SourceMismatch unless both are POSE, DimensionMismatch.
double signclip_score_pp(const EmbeddingVector& ref, const EmbeddingVector& hyp);

/// Reference-free text-to-pose score. Throws SourceMismatch unless the first
/// argument is TEXT and the second POSE, DimensionMismatch.
double signclip_score_pt(const EmbeddingVector& text_emb, const EmbeddingVector& pose_emb);

/// Throws ZeroVector, DimensionMismatch.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

/// CSV with header `id,source,v0,...,v{d-1}`; source is POSE or TEXT.
/// Throws MalformedFile, NonFiniteValue, InconsistentDimension.
std::vector<EmbeddingVector> parse_embedding_set(std::string_view text,
                                                 const std::string& origin = "<memory>");
std::vector<EmbeddingVector> read_embedding_set(const std::filesystem::path& path);
std::string format_embedding_set(const std::vector<EmbeddingVector>& set);
void write_embedding_set(const std::filesystem::path& path, const std::vector<EmbeddingVector>& set);

enum class Polarity { HigherBetter, LowerBetter };

std::string_view to_string(Polarity p) noexcept;
/// Accepts "higher"/"higher_better"/"up" and "lower"/"lower_better"/"down".
Polarity parse_polarity(std::string_view s);

/// Per-segment scores produced by an external model or scorer.
struct ExternalScoreSet {
  std::string metric_name;
  Polarity polarity = Polarity::HigherBetter;
  std::map<std::string, double> scores;
};

/// CSV with header `id,score`. Throws MalformedFile, NonFiniteValue, DuplicateSegment.
ExternalScoreSet parse_external_scores(std::string_view text, std::string metric_name,
                                       Polarity polarity, const std::string& origin = "<memory>");
ExternalScoreSet read_external_scores(const std::filesystem::path& path, std::string metric_name,
                                      Polarity polarity);

}  // namespace pose_eval
