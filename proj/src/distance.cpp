#include "pose_eval/distance.hpp"

#include <cmath>
#include <limits>

#include "pose_eval/error.hpp"
#include "pose_eval/text_util.hpp"
#include "pose_eval/variant.hpp"

namespace pose_eval {

std::string_view to_string(MetricBase b) noexcept {
  switch (b) {
    case MetricBase::APE: return "APE";
    case MetricBase::MSE: return "MSE";
    case MetricBase::DTW: return "DTW";
    case MetricBase::NDTW: return "NDTW";
  }
  return "?";
}

std::string_view to_string(Padding p) noexcept {
  switch (p) {
    case Padding::None: return "none";
    case Padding::Zero: return "zero";
    case Padding::FirstFrame: return "first-frame";
  }
  return "?";
}

void MetricConfig::validate() const {
  if (is_dtw(base) != (padding == Padding::None)) {
    fail(ErrorCode::InvalidConfig, is_dtw(base) ? "DTW bases take no padding"
                                                : "APE and MSE need a padding strategy");
  }
  if (pairwise_zero_fill && preprocess.fill_value) {
    fail(ErrorCode::InvalidConfig, "pairwise zero fill and a fill value are mutually exclusive");
  }
  if (pairwise_zero_fill && is_dtw(base)) {
    fail(ErrorCode::InvalidConfig, "pairwise zero fill needs padded equal-length sequences");
  }
  if (pointwise == kernels::PointDistance::SquaredL2) {
    fail(ErrorCode::InvalidConfig, "pointwise distance must be L2 or L1");
  }
  if (base == MetricBase::MSE && pointwise != kernels::PointDistance::L2) {
    fail(ErrorCode::InvalidConfig, "MSE is defined on squared Euclidean distance only");
  }
  if (const auto& h = preprocess.hide_below_confidence; h && !(*h >= 0.0 && *h <= 1.0)) {
    fail(ErrorCode::InvalidConfig, "hide threshold must lie in [0,1]");
  }
  if (const auto& f = preprocess.target_fps; f && !(*f > 0.0 && std::isfinite(*f))) {
    fail(ErrorCode::InvalidConfig, "target fps must be positive");
  }
  if (const auto& f = preprocess.fill_value; f && !std::isfinite(*f)) {
    fail(ErrorCode::InvalidConfig, "fill value must be finite");
  }
  if (default_distance && !(*default_distance >= 0.0 && std::isfinite(*default_distance))) {
    fail(ErrorCode::InvalidConfig, "default distance must be finite and non-negative");
  }
}

PlanarSequence::PlanarSequence(const PoseSequence& seq)
    : frames_(seq.frames()),
      points_(seq.points()),
      stride_(kernels::padded_stride(seq.points())),
      dims_(seq.dims()),
      data_(frames_ * frame_size(), 0.0) {
  for (std::size_t t = 0; t < frames_; ++t) {
    double* frame = data_.data() + t * frame_size();
    for (std::size_t p = 0; p < points_; ++p) {
      for (int c = 0; c < dims_; ++c) {
        frame[static_cast<std::size_t>(c) * stride_ + p] = seq.coord(t, p, c);
      }
      frame[static_cast<std::size_t>(dims_) * stride_ + p] = seq.masked(t, p) ? 0.0 : 1.0;
    }
  }
}

double frame_cost(const PlanarSequence& a, std::size_t i, const PlanarSequence& b, std::size_t j,
                  kernels::PointDistance kind, std::optional<double> default_distance,
                  const kernels::KernelSet& k) {
  const auto s =
      k.frame_cost(a.coords(i), a.valid(i), b.coords(j), b.valid(j), a.stride(), a.dims(), kind);
  if (default_distance) {
    const auto n = static_cast<double>(a.points());
    if (n == 0.0) return 0.0;
    return (s.sum + (n - s.pairs) * *default_distance) / n;
  }
  return s.pairs > 0.0 ? s.sum / s.pairs : 0.0;
}

namespace {

void require_same_shape(const PoseSequence& a, const PoseSequence& b) {
  if (a.points() != b.points() || a.dims() != b.dims()) {
    fail(ErrorCode::ShapeMismatch, "sequences have " + std::to_string(a.points()) + "x" +
                                       std::to_string(a.dims()) + " and " +
                                       std::to_string(b.points()) + "x" +
                                       std::to_string(b.dims()) + " points x dims");
  }
}

PoseSequence extend(const PoseSequence& s, std::size_t frames, Padding strategy) {
  if (s.frames() >= frames) return s;
  const std::size_t per = s.points() * static_cast<std::size_t>(s.dims());
  std::vector<double> coords(s.coords().begin(), s.coords().end());
  std::vector<double> conf(s.confidence().begin(), s.confidence().end());
  coords.reserve(frames * per);
  conf.reserve(frames * s.points());
  for (std::size_t t = s.frames(); t < frames; ++t) {
    if (strategy == Padding::FirstFrame && s.frames() > 0) {
      coords.insert(coords.end(), s.coords().begin(), s.coords().begin() + static_cast<std::ptrdiff_t>(per));
      conf.insert(conf.end(), s.confidence().begin(),
                  s.confidence().begin() + static_cast<std::ptrdiff_t>(s.points()));
    } else {
      coords.insert(coords.end(), per, 0.0);
      conf.insert(conf.end(), s.points(), 1.0);
    }
  }
  return PoseSequence(s.header(), frames, std::move(coords), std::move(conf));
}

std::pair<PoseSequence, PoseSequence> align_lengths(const PoseSequence& a, const PoseSequence& b,
                                                    const MetricConfig& cfg) {
  require_same_shape(a, b);
  std::pair<PoseSequence, PoseSequence> out{a, b};
  if (a.frames() != b.frames()) {
    if (cfg.padding == Padding::None) {
      fail(ErrorCode::ShapeMismatch, "unequal lengths " + std::to_string(a.frames()) + " and " +
                                         std::to_string(b.frames()) + " without padding");
    }
    out = pad_sequences(a, b, cfg.padding);
  }
  if (cfg.pairwise_zero_fill) out = pairwise_zero_fill(out.first, out.second);
  return out;
}

double mean_frame_error(const PoseSequence& a, const PoseSequence& b,
                        kernels::PointDistance kind, std::optional<double> default_distance) {
  if (a.frames() == 0) return 0.0;
  const PlanarSequence pa(a);
  const PlanarSequence pb(b);
  const auto& k = kernels::active();
  double total = 0.0;
  for (std::size_t t = 0; t < a.frames(); ++t) total += frame_cost(pa, t, pb, t, kind, default_distance, k);
  return total / static_cast<double>(a.frames());
}

}  // namespace

std::pair<PoseSequence, PoseSequence> pad_sequences(const PoseSequence& a, const PoseSequence& b,
                                                    Padding strategy) {
  require_same_shape(a, b);
  if (strategy == Padding::None) {
    if (a.frames() != b.frames()) fail(ErrorCode::ShapeMismatch, "padding strategy is none");
    return {a, b};
  }
  const auto n = std::max(a.frames(), b.frames());
  return {extend(a, n, strategy), extend(b, n, strategy)};
}

std::pair<PoseSequence, PoseSequence> pairwise_zero_fill(const PoseSequence& a,
                                                         const PoseSequence& b) {
  require_same_shape(a, b);
  if (a.frames() != b.frames()) {
    fail(ErrorCode::ShapeMismatch, "pairwise zero fill needs equal lengths");
  }
  std::vector<double> ca(a.coords().begin(), a.coords().end());
  std::vector<double> cb(b.coords().begin(), b.coords().end());
  std::vector<double> wa(a.confidence().begin(), a.confidence().end());
  std::vector<double> wb(b.confidence().begin(), b.confidence().end());
  const auto d = static_cast<std::size_t>(a.dims());
  for (std::size_t i = 0; i < wa.size(); ++i) {
    if (wa[i] != 0.0 && wb[i] != 0.0) continue;
    wa[i] = wb[i] = 1.0;
    for (std::size_t c = 0; c < d; ++c) ca[i * d + c] = cb[i * d + c] = 0.0;
  }
  return {PoseSequence(a.header(), a.frames(), std::move(ca), std::move(wa)),
          PoseSequence(b.header(), b.frames(), std::move(cb), std::move(wb))};
}

double ape(const PoseSequence& a, const PoseSequence& b, const MetricConfig& cfg) {
  const auto [x, y] = align_lengths(a, b, cfg);
  return mean_frame_error(x, y, cfg.pointwise, cfg.default_distance);
}

double mse(const PoseSequence& a, const PoseSequence& b, const MetricConfig& cfg) {
  const auto [x, y] = align_lengths(a, b, cfg);
  return mean_frame_error(x, y, kernels::PointDistance::SquaredL2, cfg.default_distance);
}

DtwResult dtw_align(const PlanarSequence& a, const PlanarSequence& b, const MetricConfig& cfg,
                    const kernels::KernelSet& k) {
  const std::size_t n = a.frames();
  const std::size_t m = b.frames();
  if (n == 0 || m == 0) fail(ErrorCode::EmptySequence, "DTW needs non-empty sequences");
  if (a.points() != b.points() || a.dims() != b.dims()) {
    fail(ErrorCode::ShapeMismatch, "DTW inputs differ in points or dims");
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  // Row i holds D(i, 0..m); column 0 is the +inf border except D(0,0) = 0.
  std::vector<double> prev(m + 1, inf), cur(m + 1, inf);
  std::vector<std::size_t> prev_len(m + 1, 0), cur_len(m + 1, 0);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = inf;
    for (std::size_t j = 1; j <= m; ++j) {
      double best = prev[j - 1];
      std::size_t len = prev_len[j - 1];
      if (prev[j] < best) {
        best = prev[j];
        len = prev_len[j];
      }
      if (cur[j - 1] < best) {
        best = cur[j - 1];
        len = cur_len[j - 1];
      }
      cur[j] = best + frame_cost(a, i - 1, b, j - 1, cfg.pointwise, cfg.default_distance, k);
      cur_len[j] = len + 1;
    }
    std::swap(prev, cur);
    std::swap(prev_len, cur_len);
  }
  return {prev[m], prev_len[m]};
}

double dtw_mje(const PoseSequence& a, const PoseSequence& b, const MetricConfig& cfg) {
  require_same_shape(a, b);
  return dtw_align(PlanarSequence(a), PlanarSequence(b), cfg).cost;
}

double ndtw_mje(const PoseSequence& a, const PoseSequence& b, const MetricConfig& cfg) {
  require_same_shape(a, b);
  const auto r = dtw_align(PlanarSequence(a), PlanarSequence(b), cfg);
  return r.cost / static_cast<double>(r.path_length);
}

double compute_base_metric(const PoseSequence& hyp, const PoseSequence& ref,
                           const MetricConfig& cfg) {
  switch (cfg.base) {
    case MetricBase::APE: return ape(hyp, ref, cfg);
    case MetricBase::MSE: return mse(hyp, ref, cfg);
    case MetricBase::DTW: return dtw_mje(hyp, ref, cfg);
    case MetricBase::NDTW: return ndtw_mje(hyp, ref, cfg);
  }
  return 0.0;
}

PreparedSequence prepare(const PoseSequence& seq, const MetricConfig& cfg,
                         std::optional<double> fps_override, const SelectionLibrary& library) {
  auto pre = cfg.preprocess;
  if (!pre.target_fps && fps_override && *fps_override != seq.header().fps()) {
    pre.target_fps = fps_override;
  }
  auto result = run_pipeline(seq, pre, library);
  PreparedSequence out{std::move(result.sequence), std::move(result.audit), std::nullopt};
  if (is_dtw(cfg.base)) out.planar.emplace(out.sequence);
  return out;
}

double score_prepared(const PreparedSequence& hyp, const PreparedSequence& ref,
                      const MetricConfig& cfg) {
  if (hyp.sequence.points() != ref.sequence.points() ||
      hyp.sequence.dims() != ref.sequence.dims()) {
    fail(ErrorCode::IncompatibleSelections,
         "after preprocessing the hypothesis has " + std::to_string(hyp.sequence.points()) +
             " points and the reference " + std::to_string(ref.sequence.points()));
  }
  if (!is_dtw(cfg.base)) return compute_base_metric(hyp.sequence, ref.sequence, cfg);
  const auto r = dtw_align(*hyp.planar, *ref.planar, cfg);
  return cfg.base == MetricBase::DTW ? r.cost : r.cost / static_cast<double>(r.path_length);
}

ScoreRecord score_pair(const PoseSequence& hyp, const PoseSequence& ref, const MetricConfig& cfg,
                       const SelectionLibrary& library) {
  cfg.validate();
  const auto r = prepare(ref, cfg, std::nullopt, library);
  const auto h = prepare(hyp, cfg, ref.header().fps(), library);
  ScoreRecord rec;
  rec.variant = canonical_name(cfg, library);
  rec.score = score_prepared(h, r, cfg);
  rec.hyp_audit = h.audit;
  rec.ref_audit = r.audit;
  return rec;
}

}  // namespace pose_eval
