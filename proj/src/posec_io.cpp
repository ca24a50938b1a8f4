#include "pose_eval/posec_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>

#include "pose_eval/error.hpp"
#include "pose_eval/text_util.hpp"

namespace pose_eval {
namespace {

std::uint32_t to_little_endian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
  }
  return v;
}

void put_f32(std::vector<std::uint8_t>& out, float value) {
  const auto bits = to_little_endian(std::bit_cast<std::uint32_t>(value));
  std::uint8_t buf[4];
  std::memcpy(buf, &bits, 4);
  out.insert(out.end(), buf, buf + 4);
}

float get_f32(const std::uint8_t* p) {
  std::uint32_t bits;
  std::memcpy(&bits, p, 4);
  return std::bit_cast<float>(to_little_endian(bits));
}

bool valid_identifier(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

[[noreturn]] void malformed_line(std::size_t line, const std::string& what) {
  fail(ErrorCode::MalformedFile, "line " + std::to_string(line) + ": " + what);
}

std::size_t parse_count(std::string_view s, std::size_t line, const char* what) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    malformed_line(line, std::string("invalid ") + what + " '" + std::string(s) + "'");
  }
  return value;
}

ComponentSpec parse_component(std::string_view value, std::size_t line) {
  const auto parts = split(value, ':');
  if (parts.size() != 3 && parts.size() != 4) {
    malformed_line(line, "component must be <name>:<point_count>:<dims>[:<names>]");
  }
  ComponentSpec spec;
  spec.name = std::string(parts[0]);
  if (!valid_identifier(spec.name)) malformed_line(line, "invalid component name");
  spec.point_count = parse_count(parts[1], line, "point count");
  if (spec.point_count == 0) malformed_line(line, "point count must be positive");
  const auto dims = parse_count(parts[2], line, "dims");
  if (dims != 2 && dims != 3) malformed_line(line, "dims must be 2 or 3");
  spec.dims = static_cast<int>(dims);
  if (parts.size() == 4) {
    for (auto n : split(parts[3], ',')) {
      if (!valid_identifier(n)) malformed_line(line, "invalid point name '" + std::string(n) + "'");
      spec.point_names.emplace_back(n);
    }
    if (spec.point_names.size() != spec.point_count) {
      fail(ErrorCode::DimensionMismatch, "line " + std::to_string(line) + ": " +
                                             std::to_string(spec.point_names.size()) +
                                             " point names for " +
                                             std::to_string(spec.point_count) + " points");
    }
  }
  return spec;
}

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

std::map<std::string, PoseReader>& registry() {
  static std::map<std::string, PoseReader> readers{
      {".posec", [](const std::filesystem::path& p) { return read_pose_file(p); }}};
  return readers;
}

}  // namespace

PoseSequence decode_posec(std::span<const std::uint8_t> bytes) {
  const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  if (!text.starts_with(kPosecMagic)) {
    fail(ErrorCode::MalformedFile, "line 1: missing POSEC magic");
  }
  std::size_t pos = kPosecMagic.size();
  std::size_t line = 1;
  std::optional<double> fps;
  std::optional<std::size_t> frames;
  std::vector<ComponentSpec> components;
  bool terminated = false;

  while (pos < text.size()) {
    ++line;
    const auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) malformed_line(line, "header line is not terminated");
    const auto content = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (content.empty()) {
      terminated = true;
      break;
    }
    const auto eq = content.find('=');
    if (eq == std::string_view::npos) malformed_line(line, "expected key=value");
    const auto key = content.substr(0, eq);
    const auto value = content.substr(eq + 1);
    if (key == "fps") {
      if (fps) malformed_line(line, "duplicate fps");
      double v = 0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
        malformed_line(line, "invalid fps '" + std::string(value) + "'");
      }
      if (!(v > 0.0) || !std::isfinite(v)) malformed_line(line, "fps must be positive");
      fps = v;
    } else if (key == "component") {
      if (frames) malformed_line(line, "component declared after frames");
      components.push_back(parse_component(value, line));
      for (std::size_t i = 0; i + 1 < components.size(); ++i) {
        if (components[i].name == components.back().name) {
          malformed_line(line, "duplicate component '" + components.back().name + "'");
        }
      }
      if (components.back().dims != components.front().dims) {
        fail(ErrorCode::DimensionMismatch,
             "line " + std::to_string(line) + ": components disagree on dims");
      }
    } else if (key == "frames") {
      if (frames) malformed_line(line, "duplicate frames");
      frames = parse_count(value, line, "frame count");
    } else {
      malformed_line(line, "unknown header key '" + std::string(key) + "'");
    }
  }
  if (!terminated) malformed_line(line, "header is not terminated by a blank line");
  if (!fps) malformed_line(line, "header lacks fps");
  if (!frames) malformed_line(line, "header lacks frames");
  if (components.empty()) malformed_line(line, "header declares no components");

  PoseHeader header(*fps, std::move(components));
  const std::size_t points = header.total_points();
  const auto dims = static_cast<std::size_t>(header.dims());
  const std::size_t body = bytes.size() - pos;
  if (*frames > body / (points * (dims + 1) * 4) + 1) {
    fail(ErrorCode::DimensionMismatch, "byte " + std::to_string(pos) + ": body holds " +
                                           std::to_string(body) + " bytes, far fewer than " +
                                           std::to_string(*frames) + " declared frames need");
  }
  const std::size_t n_coords = *frames * points * dims;
  const std::size_t n_conf = *frames * points;
  const std::size_t expected = (n_coords + n_conf) * 4;
  if (body != expected) {
    fail(ErrorCode::DimensionMismatch,
         "byte " + std::to_string(pos) + ": body holds " + std::to_string(body) +
             " bytes, header declares " + std::to_string(expected));
  }

  std::vector<double> coords(n_coords);
  std::vector<double> conf(n_conf);
  const std::uint8_t* p = bytes.data() + pos;
  for (std::size_t i = 0; i < n_coords; ++i, p += 4) {
    const float v = get_f32(p);
    if (!std::isfinite(v)) {
      fail(ErrorCode::NonFiniteValue,
           "byte " + std::to_string(pos + i * 4) + ": non-finite coordinate");
    }
    coords[i] = v;
  }
  for (std::size_t i = 0; i < n_conf; ++i, p += 4) {
    const float v = get_f32(p);
    const std::size_t at = pos + (n_coords + i) * 4;
    if (!std::isfinite(v)) {
      fail(ErrorCode::NonFiniteValue, "byte " + std::to_string(at) + ": non-finite confidence");
    }
    if (v < 0.0f || v > 1.0f) {
      fail(ErrorCode::MalformedFile,
           "byte " + std::to_string(at) + ": confidence outside [0,1]");
    }
    conf[i] = v;
  }
  return PoseSequence(std::move(header), *frames, std::move(coords), std::move(conf));
}

std::vector<std::uint8_t> encode_posec(const PoseSequence& seq) {
  const auto& header = seq.header();
  for (std::size_t i = 0; i < seq.coords().size(); ++i) {
    const double v = seq.coords()[i];
    if (!std::isfinite(v) || std::fabs(v) > std::numeric_limits<float>::max()) {
      fail(ErrorCode::NonFiniteValue,
           "coordinate #" + std::to_string(i) + " is not representable as finite float32");
    }
  }
  std::string head(kPosecMagic);
  head += "fps=" + format_shortest(header.fps()) + "\n";
  for (const auto& c : header.components()) {
    if (!valid_identifier(c.name)) {
      fail(ErrorCode::MalformedFile, "component name '" + c.name + "' is not an identifier");
    }
    head += "component=" + c.name + ":" + std::to_string(c.point_count) + ":" +
            std::to_string(c.dims);
    if (!c.point_names.empty()) {
      head += ":";
      for (std::size_t i = 0; i < c.point_names.size(); ++i) {
        if (!valid_identifier(c.point_names[i])) {
          fail(ErrorCode::MalformedFile,
               "point name '" + c.point_names[i] + "' is not an identifier");
        }
        if (i) head += ",";
        head += c.point_names[i];
      }
    }
    head += "\n";
  }
  if (header.components().empty()) {
    fail(ErrorCode::MalformedFile, "sequence has no components");
  }
  head += "frames=" + std::to_string(seq.frames()) + "\n\n";

  std::vector<std::uint8_t> out(head.begin(), head.end());
  out.reserve(out.size() + (seq.coords().size() + seq.confidence().size()) * 4);
  for (double v : seq.coords()) put_f32(out, static_cast<float>(v));
  for (double v : seq.confidence()) put_f32(out, static_cast<float>(v));
  return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, "cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorCode::IoFailure, "failed reading '" + path.string() + "'");
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoFailure, "cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::IoFailure, "failed writing '" + path.string() + "'");
}

PoseSequence read_pose_file(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_posec(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void write_pose_file(const PoseSequence& seq, const std::filesystem::path& path) {
  const auto bytes = encode_posec(seq);
  write_file_bytes(path, bytes);
}

void register_pose_reader(const std::string& extension, PoseReader reader) {
  std::lock_guard lock(registry_mutex());
  registry()[to_lower_ascii(extension)] = std::move(reader);
}

PoseSequence load_pose(const std::filesystem::path& path) {
  PoseReader reader;
  {
    std::lock_guard lock(registry_mutex());
    const auto it = registry().find(to_lower_ascii(path.extension().string()));
    if (it == registry().end()) {
      fail(ErrorCode::MalformedFile,
           "no reader registered for extension '" + path.extension().string() + "'");
    }
    reader = it->second;
  }
  return reader(path);
}

}  // namespace pose_eval
