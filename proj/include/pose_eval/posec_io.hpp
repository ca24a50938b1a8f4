#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pose_eval/pose.hpp"

namespace pose_eval {

// .posec container:
//   "POSEC\n"
//   fps=<decimal>\n
//   component=<name>:<point_count>:<dims>[:<name>,<name>,...]\n   (one per component)
//   frames=<integer>\n
//   \n
//   frames*points*dims little-endian float32 coordinates
//   frames*points little-endian float32 confidences

inline constexpr std::string_view kPosecMagic = "POSEC\n";

/// Decodes an in-memory container. Errors carry the header line or body byte offset.
PoseSequence decode_posec(std::span<const std::uint8_t> bytes);

/// Encodes a sequence. Values are stored as float32, so exact round-trips
/// hold for every sequence whose values are float32-representable.
std::vector<std::uint8_t> encode_posec(const PoseSequence& seq);

PoseSequence read_pose_file(const std::filesystem::path& path);
void write_pose_file(const PoseSequence& seq, const std::filesystem::path& path);

/// Extension point for other container formats, keyed by lowercase file
/// extension including the dot (".posec" is pre-registered).
using PoseReader = std::function<PoseSequence(const std::filesystem::path&)>;
void register_pose_reader(const std::string& extension, PoseReader reader);
PoseSequence load_pose(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace pose_eval
