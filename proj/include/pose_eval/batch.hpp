#pragma once

#include <cstddef>
#include <exception>
#include <optional>
#include <vector>

#include "pose_eval/distance.hpp"

namespace pose_eval {

/// A corpus preprocessed once under one metric configuration, for scoring
/// many pairs. Preprocessing failures are kept per item and rethrown when a
/// pair involving that item is scored.
class PreparedCorpus {
 public:
  PreparedCorpus(const std::vector<PoseSequence>& sequences, const MetricConfig& cfg,
                 const SelectionLibrary& library = SelectionLibrary::builtin(),
                 unsigned threads = 1);

  std::size_t size() const noexcept { return items_.size(); }

  /// Same value as score_pair(raw[hyp], raw[ref], cfg).score.
  double score(std::size_t hyp, std::size_t ref) const;

 private:
  const std::vector<PoseSequence>* raw_;
  MetricConfig cfg_;
  const SelectionLibrary* library_;
  std::vector<std::optional<PreparedSequence>> items_;
  std::vector<std::exception_ptr> errors_;
};

}  // namespace pose_eval
