#include "pose_eval/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "pose_eval/csv.hpp"
#include "pose_eval/posec_io.hpp"

namespace pose_eval {
namespace {

constexpr double kPi = std::numbers::pi;

struct Vec2 {
  double x, y;
};

double f32(double v) { return static_cast<double>(static_cast<float>(v)); }

std::string gloss_name(std::size_t g) {
  static const char* const names[] = {"HOUSE", "BOOK",   "FRIEND", "WATER", "SCHOOL",
                                      "MOTHER", "FATHER", "HELP",  "THANKS", "PLEASE"};
  if (g < std::size(names)) return names[g];
  return fmt::format("GLOSS{:03}", g);
}

Vec2 pose_point(std::size_t i) {
  switch (i) {
    case 0: return {0.50, 0.25};
    case 11: return {0.40, 0.45};
    case 12: return {0.60, 0.45};
    case 13: return {0.35, 0.60};
    case 14: return {0.65, 0.60};
    case 23: return {0.43, 0.80};
    case 24: return {0.57, 0.80};
    default: {
      const double a = static_cast<double>(i);
      return {0.5 + 0.15 * std::cos(a), 0.55 + 0.3 * std::sin(0.7 * a)};
    }
  }
}

Vec2 face_point(std::size_t k) {
  const double a = 2.0 * kPi * static_cast<double>(k) / 478.0;
  const double r = 0.02 + 0.04 * static_cast<double>(k % 7) / 6.0;
  return {0.50 + r * std::cos(7.0 * a), 0.25 + 1.3 * r * std::sin(11.0 * a)};
}

Vec2 hand_offset(std::size_t k, bool mirror) {
  if (k == 0) return {0.0, 0.0};
  const double finger = static_cast<double>((k - 1) / 4);
  const double joint = static_cast<double>((k - 1) % 4 + 1);
  const double a = -kPi / 2.0 + (finger - 2.0) * 0.35;
  const double r = 0.012 * joint;
  return {(mirror ? -1.0 : 1.0) * r * std::cos(a), r * std::sin(a)};
}

struct GlossMotion {
  double theta, freq, phase;
};

struct HandCenters {
  Vec2 left, right;
};

HandCenters hand_centers(const SynthCorpusSpec& spec, const GlossMotion& m, double tau) {
  const double s = spec.gloss_spread;
  const double w = 2.0 * kPi * m.freq * tau + m.phase;
  return {{0.38 + s * std::cos(m.theta) + spec.motion * std::sin(w),
           0.62 + s * std::sin(m.theta) + 0.5 * spec.motion * std::cos(w)},
          {0.62 + s * std::cos(m.theta + kPi / 3.0) + spec.motion * std::cos(w + 1.0),
           0.62 + s * std::sin(m.theta + kPi / 3.0) + 0.5 * spec.motion * std::sin(w + 1.0)}};
}

}  // namespace

double SynthRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double SynthRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::uint64_t SynthRng::below(std::uint64_t n) {
  const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
  while (true) {
    const auto x = engine_();
    if (x < limit) return x % n;
  }
}

double SynthRng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

PoseHeader holistic_header(double fps, int dims, bool with_world) {
  std::vector<ComponentSpec> comps{{"POSE_LANDMARKS", 33, dims, {}},
                                   {"FACE_LANDMARKS", 478, dims, {}},
                                   {"LEFT_HAND_LANDMARKS", 21, dims, {}},
                                   {"RIGHT_HAND_LANDMARKS", 21, dims, {}}};
  if (with_world) comps.push_back({"POSE_WORLD_LANDMARKS", 33, dims, {}});
  return PoseHeader(fps, std::move(comps));
}

std::vector<SynthItem> generate_corpus(const SynthCorpusSpec& spec) {
  const auto header = holistic_header(spec.fps);
  const std::size_t points = header.total_points();
  constexpr std::size_t kFace = 33;
  constexpr std::size_t kLeft = 33 + 478;
  constexpr std::size_t kRight = kLeft + 21;

  std::vector<SynthItem> items;
  SynthRng rng(spec.seed);
  for (std::size_t g = 0; g < spec.glosses; ++g) {
    const GlossMotion motion{2.0 * kPi * static_cast<double>(g) / static_cast<double>(spec.glosses),
                             1.0 + static_cast<double>(g % 3), 0.7 * static_cast<double>(g)};
    for (std::size_t s = 0; s < spec.per_gloss; ++s) {
      const auto frames =
          spec.min_frames + static_cast<std::size_t>(rng.below(spec.max_frames - spec.min_frames + 1));
      const auto lead = static_cast<std::size_t>(rng.below(spec.max_idle_frames + 1));
      const auto trail = static_cast<std::size_t>(rng.below(spec.max_idle_frames + 1));
      const double warp_dir = rng.uniform(-1.0, 1.0);
      const std::size_t active = frames - lead - trail;

      std::vector<double> coords(frames * points * 2);
      std::vector<double> conf(frames * points, f32(0.9));
      for (std::size_t t = 0; t < frames; ++t) {
        const double u = active > 1 ? std::clamp(static_cast<double>(t) - static_cast<double>(lead), 0.0,
                                                 static_cast<double>(active - 1)) /
                                          static_cast<double>(active - 1)
                                    : 0.0;
        const double tau = u + spec.warp * warp_dir * std::sin(kPi * u) / kPi;
        const auto hands = hand_centers(spec, motion, tau);
        const bool idle = t < lead || t >= lead + active;
        const bool drop_left = spec.dropout > 0.0 && rng.uniform() < spec.dropout;
        const bool drop_right = spec.dropout > 0.0 && rng.uniform() < spec.dropout;
        for (std::size_t p = 0; p < points; ++p) {
          Vec2 v;
          if (p < kFace) {
            v = p == 15 ? hands.left : p == 16 ? hands.right : pose_point(p);
          } else if (p < kLeft) {
            v = face_point(p - kFace);
          } else if (p < kRight) {
            const auto o = hand_offset(p - kLeft, false);
            v = {hands.left.x + o.x, hands.left.y + o.y};
          } else {
            const auto o = hand_offset(p - kRight, true);
            v = {hands.right.x + o.x, hands.right.y + o.y};
          }
          const std::size_t base = (t * points + p) * 2;
          coords[base] = f32(v.x + spec.noise * rng.normal());
          coords[base + 1] = f32(v.y + spec.noise * rng.normal());
          const bool masked = p >= kRight ? idle || drop_right : p >= kLeft && (idle || drop_left);
          if (masked) conf[t * points + p] = 0.0;
        }
      }
      items.push_back({fmt::format("{}_{:02}", gloss_name(g), s), gloss_name(g),
                       PoseSequence(header, frames, std::move(coords), std::move(conf))});
    }
  }
  return items;
}

SynthCorpusSpec separable_corpus_spec() {
  SynthCorpusSpec s;
  s.max_idle_frames = 0;
  return s;
}

SynthCorpusSpec noisy_corpus_spec() {
  SynthCorpusSpec s;
  s.seed = 11;
  s.min_frames = 20;
  s.max_frames = 48;
  s.gloss_spread = 0.06;
  s.motion = 0.05;
  s.noise = 0.004;
  s.warp = 0.8;
  s.dropout = 0.03;
  s.max_idle_frames = 3;
  return s;
}

std::filesystem::path write_corpus(const std::vector<SynthItem>& items,
                                   const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::string manifest = "id\tgloss\tpath\n";
  for (const auto& item : items) {
    const auto file = item.id + ".posec";
    write_pose_file(item.sequence, dir / file);
    manifest += item.id + "\t" + item.gloss + "\t" + file + "\n";
  }
  const auto path = dir / "manifest.tsv";
  write_text_file(path, manifest);
  return path;
}

}  // namespace pose_eval
