#include "pose_eval/batch.hpp"

#include "pose_eval/parallel.hpp"

namespace pose_eval {

PreparedCorpus::PreparedCorpus(const std::vector<PoseSequence>& sequences, const MetricConfig& cfg,
                               const SelectionLibrary& library, unsigned threads)
    : raw_(&sequences),
      cfg_(cfg),
      library_(&library),
      items_(sequences.size()),
      errors_(sequences.size()) {
  cfg_.validate();
  parallel_for(sequences.size(), threads, [&](std::size_t i) {
    try {
      items_[i] = prepare(sequences[i], cfg_, std::nullopt, library);
    } catch (...) {
      errors_[i] = std::current_exception();
    }
  });
}

double PreparedCorpus::score(std::size_t hyp, std::size_t ref) const {
  const auto& h = (*raw_)[hyp];
  const auto& r = (*raw_)[ref];
  if (!cfg_.preprocess.target_fps && h.header().fps() != r.header().fps()) {
    return score_pair(h, r, cfg_, *library_).score;
  }
  if (errors_[ref]) std::rethrow_exception(errors_[ref]);
  if (errors_[hyp]) std::rethrow_exception(errors_[hyp]);
  return score_prepared(*items_[hyp], *items_[ref], cfg_);
}

}  // namespace pose_eval
