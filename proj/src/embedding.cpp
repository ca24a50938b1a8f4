#include "pose_eval/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pose_eval/csv.hpp"
#include "pose_eval/error.hpp"
#include "pose_eval/kernels.hpp"
#include "pose_eval/text_util.hpp"

namespace pose_eval {
namespace {

double checked_dot(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.values.size() != b.values.size()) {
    fail(ErrorCode::DimensionMismatch, "embeddings '" + a.id + "' and '" + b.id + "' have " +
                                           std::to_string(a.values.size()) + " and " +
                                           std::to_string(b.values.size()) + " dimensions");
  }
  return kernels::active().dot(a.values.data(), b.values.data(), a.values.size());
}

double parse_finite(std::string_view s, const std::string& where) {
  const auto v = parse_double(trim(s));
  if (!v) fail(ErrorCode::MalformedFile, where + ": '" + std::string(s) + "' is not a number");
  if (!std::isfinite(*v)) fail(ErrorCode::NonFiniteValue, where + ": non-finite value");
  return *v;
}

}  // namespace

std::string_view to_string(EmbeddingSource s) noexcept {
  return s == EmbeddingSource::Pose ? "POSE" : "TEXT";
}

std::string_view to_string(Polarity p) noexcept {
  return p == Polarity::HigherBetter ? "higher_better" : "lower_better";
}

Polarity parse_polarity(std::string_view s) {
  const auto v = to_lower_ascii(trim(s));
  if (v == "higher" || v == "higher_better" || v == "up") return Polarity::HigherBetter;
  if (v == "lower" || v == "lower_better" || v == "down") return Polarity::LowerBetter;
  fail(ErrorCode::InvalidConfig, "unknown polarity '" + std::string(s) + "'");
}

double signclip_score_pp(const EmbeddingVector& ref, const EmbeddingVector& hyp) {
  if (ref.source != EmbeddingSource::Pose || hyp.source != EmbeddingSource::Pose) {
    fail(ErrorCode::SourceMismatch, "pose-to-pose scoring needs two POSE embeddings");
  }
  return checked_dot(ref, hyp);
}

double signclip_score_pt(const EmbeddingVector& text_emb, const EmbeddingVector& pose_emb) {
  if (text_emb.source != EmbeddingSource::Text || pose_emb.source != EmbeddingSource::Pose) {
    fail(ErrorCode::SourceMismatch, "text-to-pose scoring needs a TEXT and a POSE embedding");
  }
  return checked_dot(text_emb, pose_emb);
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  const double ab = checked_dot(a, b);
  const double na = std::sqrt(checked_dot(a, a));
  const double nb = std::sqrt(checked_dot(b, b));
  if (na == 0.0 || nb == 0.0) fail(ErrorCode::ZeroVector, "cosine of a zero vector");
  return std::clamp(ab / (na * nb), -1.0, 1.0);
}

std::vector<EmbeddingVector> parse_embedding_set(std::string_view text, const std::string& origin) {
  const auto table = parse_csv(text, origin, true);
  table.require_header({"id", "source"});
  for (std::size_t c = 2; c < table.header.size(); ++c) {
    if (table.header[c] != "v" + std::to_string(c - 2)) {
      fail(ErrorCode::MalformedFile, origin + ":line 1: column " + std::to_string(c + 1) +
                                         " should be 'v" + std::to_string(c - 2) + "'");
    }
  }
  std::vector<EmbeddingVector> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    EmbeddingVector v;
    if (row.fields.size() < 2) fail(ErrorCode::MalformedFile, table.where(row) + ": too few fields");
    v.id = row.fields[0];
    if (v.id.empty()) fail(ErrorCode::MalformedFile, table.where(row) + ": empty id");
    const auto src = to_upper_ascii(trim(row.fields[1]));
    if (src == "POSE") v.source = EmbeddingSource::Pose;
    else if (src == "TEXT") v.source = EmbeddingSource::Text;
    else fail(ErrorCode::MalformedFile, table.where(row) + ": source must be POSE or TEXT");
    // Trailing empty cells let rows of a shorter dimension share a wider header.
    std::size_t n = row.fields.size();
    while (n > 2 && trim(row.fields[n - 1]).empty()) --n;
    for (std::size_t c = 2; c < n; ++c) {
      v.values.push_back(parse_finite(row.fields[c], table.where(row)));
    }
    if (v.values.empty()) fail(ErrorCode::MalformedFile, table.where(row) + ": no values");
    if (!out.empty() && out.front().values.size() != v.values.size()) {
      fail(ErrorCode::InconsistentDimension,
           table.where(row) + ": dimension " + std::to_string(v.values.size()) + " differs from " +
               std::to_string(out.front().values.size()));
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<EmbeddingVector> read_embedding_set(const std::filesystem::path& path) {
  return parse_embedding_set(read_text_file(path), path.string());
}

std::string format_embedding_set(const std::vector<EmbeddingVector>& set) {
  std::ostringstream out;
  std::vector<std::string> header{"id", "source"};
  const std::size_t dim = set.empty() ? 0 : set.front().values.size();
  for (std::size_t i = 0; i < dim; ++i) header.push_back("v" + std::to_string(i));
  write_csv_row(out, header);
  for (const auto& v : set) {
    if (v.values.size() != dim) {
      fail(ErrorCode::InconsistentDimension, "embedding '" + v.id + "' has dimension " +
                                                 std::to_string(v.values.size()));
    }
    std::vector<std::string> row{v.id, std::string(to_string(v.source))};
    for (double x : v.values) row.push_back(format_shortest(x));
    write_csv_row(out, row);
  }
  return std::move(out).str();
}

void write_embedding_set(const std::filesystem::path& path, const std::vector<EmbeddingVector>& set) {
  write_text_file(path, format_embedding_set(set));
}

ExternalScoreSet parse_external_scores(std::string_view text, std::string metric_name,
                                       Polarity polarity, const std::string& origin) {
  const auto table = parse_csv(text, origin);
  table.require_header({"id", "score"});
  if (table.header.size() != 2) {
    fail(ErrorCode::MalformedFile, origin + ":line 1: expected exactly two columns");
  }
  ExternalScoreSet out;
  out.metric_name = std::move(metric_name);
  out.polarity = polarity;
  for (const auto& row : table.rows) {
    const auto& id = row.fields[0];
    if (id.empty()) fail(ErrorCode::MalformedFile, table.where(row) + ": empty id");
    const double v = parse_finite(row.fields[1], table.where(row));
    if (!out.scores.emplace(id, v).second) {
      fail(ErrorCode::DuplicateSegment, table.where(row) + ": segment '" + id + "' repeats");
    }
  }
  return out;
}

ExternalScoreSet read_external_scores(const std::filesystem::path& path, std::string metric_name,
                                      Polarity polarity) {
  return parse_external_scores(read_text_file(path), std::move(metric_name), polarity,
                               path.string());
}

}  // namespace pose_eval
