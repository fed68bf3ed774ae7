#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace seeaction::ingest {

struct Frame {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;  // row-major RGB, width * height * 3 bytes
  int64_t index = 0;            // ordinal position in the source
  double timestamp_ms = 0.0;

  uint8_t at(int x, int y, int c) const { return pixels[(static_cast<size_t>(y) * width + x) * 3 + c]; }
  bool same_pixels(const Frame& other) const {
    return width == other.width && height == other.height && pixels == other.pixels;
  }
};

struct FrameSequence {
  std::vector<Frame> frames;
  std::string source_id;

  size_t size() const { return frames.size(); }
  bool empty() const { return frames.empty(); }
};

struct SamplingConfig {
  double fps = 5.0;
  int target_length = 8;
  uint64_t seed = 0;

  void validate() const;
};

Frame make_frame(int width, int height, std::vector<uint8_t> pixels, int64_t index = 0, double timestamp_ms = 0.0);

// Loads a directory of numbered PNG/PPM frames (sorted lexicographically by
// filename) or a frame container file. Timestamps are index * 1000 / fps.
FrameSequence load_frames(const std::filesystem::path& source, const SamplingConfig& cfg);

// Drops every frame whose pixels equal the previous kept frame.
FrameSequence dedup_adjacent(const FrameSequence& seq);

// Picks exactly `target_length` frames from seq, keeping the first and last.
// Longer inputs are sub-sampled (interior frames without replacement); shorter
// inputs get random duplicates inserted next to their originals.
FrameSequence normalize_length(const FrameSequence& seq, int target_length, uint64_t seed);

// Source positions chosen by normalize_length, non-decreasing.
std::vector<size_t> normalization_positions(size_t source_length, int target_length, uint64_t seed);

// Frame container: "SAFC" magic, u32 version, u32 width, u32 height, u32 count,
// then per frame the R, G and B planes (width * height bytes each).
// All integers little-endian.
void write_container(const std::filesystem::path& path, const FrameSequence& seq);
FrameSequence read_container(const std::filesystem::path& path, const SamplingConfig& cfg);

// Writes frames as zero-padded PNG files (000000.png, ...).
void write_frame_dir(const std::filesystem::path& dir, const FrameSequence& seq);

}  // namespace seeaction::ingest
