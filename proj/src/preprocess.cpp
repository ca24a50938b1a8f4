#include "pose_eval/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "pose_eval/error.hpp"
#include "pose_eval/text_util.hpp"

namespace pose_eval {
namespace {

bool is_world_component(std::string_view name) {
  return name.ends_with("_WORLD") || name.ends_with("_WORLD_LANDMARKS");
}

bool mentions_hand(std::string_view s) { return to_upper_ascii(s).find("HAND") != std::string::npos; }

}  // namespace

PoseSequence drop_world_components(const PoseSequence& seq) {
  const auto& header = seq.header();
  std::vector<ComponentSpec> keep;
  std::vector<std::size_t> flat;
  std::size_t offset = 0;
  for (const auto& c : header.components()) {
    if (!is_world_component(c.name)) {
      keep.push_back(c);
      for (std::size_t i = 0; i < c.point_count; ++i) flat.push_back(offset + i);
    }
    offset += c.point_count;
  }
  if (keep.size() == header.components().size()) return seq;

  const auto d = static_cast<std::size_t>(seq.dims());
  std::vector<double> coords;
  std::vector<double> conf;
  coords.reserve(seq.frames() * flat.size() * d);
  conf.reserve(seq.frames() * flat.size());
  for (std::size_t t = 0; t < seq.frames(); ++t) {
    for (auto p : flat) {
      for (std::size_t c = 0; c < d; ++c) coords.push_back(seq.coord(t, p, static_cast<int>(c)));
      conf.push_back(seq.conf(t, p));
    }
  }
  return PoseSequence(PoseHeader(header.fps(), std::move(keep)), seq.frames(), std::move(coords),
                      std::move(conf));
}

PoseSequence select_keypoints(const PoseSequence& seq, const KeypointSelection& sel) {
  const auto refs = sel.expand(seq.header());
  const auto flat = resolve_selection(sel, seq.header());
  if (flat.empty()) fail(ErrorCode::InvalidConfig, "selection '" + sel.name + "' is empty");

  ComponentSpec spec;
  spec.name = sel.name;
  spec.point_count = flat.size();
  spec.dims = seq.dims();
  spec.point_names.reserve(refs.size());
  for (const auto& r : refs) {
    const auto* src = seq.header().find(r.component);
    // Selecting from an already-selected sequence keeps the original point names.
    if (!src->point_names.empty() && src->point_names[r.index].find('.') != std::string::npos) {
      spec.point_names.push_back(src->point_names[r.index]);
    } else {
      spec.point_names.push_back(r.component + "." + std::to_string(r.index));
    }
  }

  const auto d = static_cast<std::size_t>(seq.dims());
  std::vector<double> coords;
  std::vector<double> conf;
  coords.reserve(seq.frames() * flat.size() * d);
  conf.reserve(seq.frames() * flat.size());
  for (std::size_t t = 0; t < seq.frames(); ++t) {
    for (auto p : flat) {
      for (std::size_t c = 0; c < d; ++c) coords.push_back(seq.coord(t, p, static_cast<int>(c)));
      conf.push_back(seq.conf(t, p));
    }
  }
  return PoseSequence(PoseHeader(seq.header().fps(), {std::move(spec)}), seq.frames(),
                      std::move(coords), std::move(conf));
}

bool is_hand_point(const PoseHeader& header, std::size_t flat) {
  std::size_t offset = 0;
  for (const auto& c : header.components()) {
    if (flat < offset + c.point_count) {
      if (!c.point_names.empty()) {
        const auto& name = c.point_names[flat - offset];
        const auto dot = name.rfind('.');
        if (dot != std::string::npos) return mentions_hand(std::string_view(name).substr(0, dot));
      }
      return mentions_hand(c.name);
    }
    offset += c.point_count;
  }
  return false;
}

PoseSequence trim_inactive(const PoseSequence& seq) {
  std::vector<std::size_t> hands;
  for (std::size_t p = 0; p < seq.points(); ++p) {
    if (is_hand_point(seq.header(), p)) hands.push_back(p);
  }
  if (hands.empty()) fail(ErrorCode::NoHandComponent, "trimming needs hand keypoints");

  const auto active = [&](std::size_t t) {
    return std::any_of(hands.begin(), hands.end(), [&](std::size_t p) { return !seq.masked(t, p); });
  };
  std::size_t first = 0;
  while (first < seq.frames() && !active(first)) ++first;
  if (first == seq.frames()) return seq.slice_frames(0, 0);
  std::size_t last = seq.frames();
  while (last > first && !active(last - 1)) --last;
  if (first == 0 && last == seq.frames()) return seq;
  return seq.slice_frames(first, last - first);
}

PoseSequence resample_fps(const PoseSequence& seq, double target_fps) {
  if (!(target_fps > 0.0) || !std::isfinite(target_fps)) {
    fail(ErrorCode::InvalidFps, "target fps must be positive, got " + format_shortest(target_fps));
  }
  const double fps = seq.header().fps();
  auto header = seq.header().with_fps(target_fps);
  if (target_fps == fps || seq.frames() < 2) {
    return PoseSequence(std::move(header), seq.frames(),
                        std::vector<double>(seq.coords().begin(), seq.coords().end()),
                        std::vector<double>(seq.confidence().begin(), seq.confidence().end()));
  }

  // Output timestamps k / target_fps span [0, (frames-1) / fps].
  const double span = static_cast<double>(seq.frames() - 1) * target_fps / fps;
  const auto out_frames = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  const std::size_t points = seq.points();
  const auto d = static_cast<std::size_t>(seq.dims());
  std::vector<double> coords(out_frames * points * d);
  std::vector<double> conf(out_frames * points);
  for (std::size_t k = 0; k < out_frames; ++k) {
    double pos = static_cast<double>(k) * fps / target_fps;
    if (std::fabs(pos - std::round(pos)) < 1e-9) pos = std::round(pos);
    auto i0 = static_cast<std::size_t>(std::floor(pos));
    double frac = pos - static_cast<double>(i0);
    if (i0 >= seq.frames() - 1) {
      i0 = seq.frames() - 1;
      frac = 0.0;
    }
    for (std::size_t p = 0; p < points; ++p) {
      if (frac == 0.0) {
        conf[k * points + p] = seq.conf(i0, p);
        for (std::size_t c = 0; c < d; ++c) {
          coords[(k * points + p) * d + c] = seq.coord(i0, p, static_cast<int>(c));
        }
      } else {
        conf[k * points + p] = std::min(seq.conf(i0, p), seq.conf(i0 + 1, p));
        for (std::size_t c = 0; c < d; ++c) {
          const double x0 = seq.coord(i0, p, static_cast<int>(c));
          const double x1 = seq.coord(i0 + 1, p, static_cast<int>(c));
          coords[(k * points + p) * d + c] = x0 + (x1 - x0) * frac;
        }
      }
    }
  }
  return PoseSequence(std::move(header), out_frames, std::move(coords), std::move(conf));
}

ShoulderTransform shoulder_transform(const PoseSequence& seq, const PointRef& left,
                                     const PointRef& right) {
  const auto l = resolve_point(left, seq.header());
  const auto r = resolve_point(right, seq.header());
  const int dims = seq.dims();
  ShoulderTransform t;
  t.origin.assign(static_cast<std::size_t>(dims), 0.0);
  double width = 0.0;
  std::size_t visible = 0;
  for (std::size_t f = 0; f < seq.frames(); ++f) {
    if (seq.masked(f, l) || seq.masked(f, r)) continue;
    double sq = 0.0;
    for (int c = 0; c < dims; ++c) {
      const double a = seq.coord(f, l, c);
      const double b = seq.coord(f, r, c);
      t.origin[static_cast<std::size_t>(c)] += 0.5 * (a + b);
      sq += (a - b) * (a - b);
    }
    width += std::sqrt(sq);
    ++visible;
  }
  if (visible == 0) fail(ErrorCode::DegenerateSkeleton, "no frame shows both shoulders");
  for (auto& o : t.origin) o /= static_cast<double>(visible);
  t.scale = width / static_cast<double>(visible);
  if (t.scale < kShoulderEpsilon) {
    fail(ErrorCode::DegenerateSkeleton, "mean shoulder width " + format_shortest(t.scale) +
                                            " is below " + format_shortest(kShoulderEpsilon));
  }
  return t;
}

PoseSequence apply_transform(const PoseSequence& seq, const ShoulderTransform& t) {
  const auto d = static_cast<std::size_t>(seq.dims());
  std::vector<double> coords(seq.coords().begin(), seq.coords().end());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    coords[i] = (coords[i] - t.origin[i % d]) / t.scale;
  }
  return PoseSequence(seq.header(), seq.frames(), std::move(coords),
                      std::vector<double>(seq.confidence().begin(), seq.confidence().end()));
}

PoseSequence normalize_by_shoulders(const PoseSequence& seq, const PointRef& left,
                                    const PointRef& right) {
  return apply_transform(seq, shoulder_transform(seq, left, right));
}

PoseSequence hide_low_confidence(const PoseSequence& seq, double threshold) {
  std::vector<double> conf(seq.confidence().begin(), seq.confidence().end());
  bool changed = false;
  for (auto& c : conf) {
    if (c < threshold && c != 0.0) {
      c = 0.0;
      changed = true;
    }
  }
  if (!changed) return seq;
  return PoseSequence(seq.header(), seq.frames(),
                      std::vector<double>(seq.coords().begin(), seq.coords().end()), std::move(conf));
}

PoseSequence fill_masked(const PoseSequence& seq, double value) {
  std::vector<double> coords(seq.coords().begin(), seq.coords().end());
  std::vector<double> conf(seq.confidence().begin(), seq.confidence().end());
  const auto d = static_cast<std::size_t>(seq.dims());
  for (std::size_t i = 0; i < conf.size(); ++i) {
    if (conf[i] != 0.0) continue;
    conf[i] = 1.0;
    for (std::size_t c = 0; c < d; ++c) coords[i * d + c] = value;
  }
  return PoseSequence(seq.header(), seq.frames(), std::move(coords), std::move(conf));
}

PipelineResult run_pipeline(const PoseSequence& seq, const PreprocessConfig& cfg,
                            const SelectionLibrary& library) {
  PipelineResult out{seq, {}};
  auto& s = out.sequence;
  if (cfg.drop_world) {
    s = drop_world_components(s);
    out.audit.push_back("drop_world");
  }
  std::optional<ShoulderTransform> transform;
  if (cfg.normalize) transform = shoulder_transform(s, cfg.left_shoulder, cfg.right_shoulder);
  if (cfg.selection) {
    const auto& sel = library.at(*cfg.selection);
    s = select_keypoints(s, sel);
    out.audit.push_back("select:" + sel.name);
  }
  if (cfg.trim) {
    s = trim_inactive(s);
    out.audit.push_back("trim");
  }
  if (cfg.target_fps) {
    s = resample_fps(s, *cfg.target_fps);
    out.audit.push_back("resample:" + format_shortest(*cfg.target_fps));
  }
  if (cfg.hide_below_confidence) {
    s = hide_low_confidence(s, *cfg.hide_below_confidence);
    out.audit.push_back("hide:" + format_shortest(*cfg.hide_below_confidence));
  }
  if (transform) {
    s = apply_transform(s, *transform);
    out.audit.push_back("normalize");
  }
  if (cfg.fill_value) {
    s = fill_masked(s, *cfg.fill_value);
    out.audit.push_back("fill:" + format_decimal(*cfg.fill_value));
  }
  return out;
}

PreprocessConfig ham2pose_preprocess() {
  PreprocessConfig cfg;
  cfg.drop_world = true;
  cfg.selection = "REDUCED";
  cfg.normalize = true;
  cfg.hide_below_confidence = kDefaultHideThreshold;
  return cfg;
}

}  // namespace pose_eval
