#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "pose_eval/pose.hpp"

namespace pose_eval {

/// Portable random source for generated data: mt19937_64 with explicit
/// conversions, so corpora are identical across standard libraries.
class SynthRng {
 public:
  explicit SynthRng(std::uint64_t seed) : engine_(seed) {}
  double uniform();                     // [0, 1)
  double uniform(double lo, double hi);
  std::uint64_t below(std::uint64_t n);  // [0, n)
  double normal();                      // Box-Muller

 private:
  std::mt19937_64 engine_;
};

/// MediaPipe Holistic layout: POSE(33), FACE(478), LEFT_HAND(21), RIGHT_HAND(21)
/// and optionally POSE_WORLD(33).
PoseHeader holistic_header(double fps, int dims = 2, bool with_world = false);

struct SynthCorpusSpec {
  std::size_t glosses = 10;
  std::size_t per_gloss = 10;
  std::uint64_t seed = 7;
  double fps = 25.0;
  std::size_t min_frames = 28;
  std::size_t max_frames = 36;
  /// Radius of the circle on which gloss hand positions are spread.
  double gloss_spread = 0.12;
  /// Amplitude of the gloss-specific hand oscillation.
  double motion = 0.05;
  /// Gaussian jitter added to every coordinate.
  double noise = 0.002;
  /// Strength of the per-sample non-linear time warp (0 = uniform speed).
  double warp = 0.0;
  /// Probability that a whole hand is masked in a frame.
  double dropout = 0.0;
  /// Up to this many leading and trailing frames have both hands masked.
  std::size_t max_idle_frames = 2;
};

struct SynthItem {
  std::string id;
  std::string gloss;
  PoseSequence sequence;
};

/// Every coordinate is float32-representable, so files round-trip exactly.
std::vector<SynthItem> generate_corpus(const SynthCorpusSpec& spec);

/// 10 glosses x 10 samples, no idle frames; intra-gloss jitter far below
/// inter-gloss distance.
SynthCorpusSpec separable_corpus_spec();
/// Closer glosses, time warps, variable lengths and keypoint dropout.
SynthCorpusSpec noisy_corpus_spec();

/// Writes <id>.posec files and manifest.tsv into `dir`; returns the manifest path.
std::filesystem::path write_corpus(const std::vector<SynthItem>& items,
                                   const std::filesystem::path& dir);

}  // namespace pose_eval
