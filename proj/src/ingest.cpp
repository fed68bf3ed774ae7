#include "seeaction/ingest.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "seeaction/error.hpp"
#include "seeaction/image_io.hpp"
#include "seeaction/rng.hpp"

namespace seeaction::ingest {
namespace fs = std::filesystem;

namespace {

constexpr char kContainerMagic[4] = {'S', 'A', 'F', 'C'};
constexpr uint32_t kContainerVersion = 1;

void put_u32(std::ostream& out, uint32_t v) {
  const uint8_t b[4] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8), static_cast<uint8_t>(v >> 16),
                        static_cast<uint8_t>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32(std::istream& in) {
  uint8_t b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw FormatError("truncated frame container");
  return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

void assign_times(FrameSequence& seq, double fps) {
  for (size_t i = 0; i < seq.frames.size(); ++i) {
    seq.frames[i].index = static_cast<int64_t>(i);
    seq.frames[i].timestamp_ms = static_cast<double>(i) * (1000.0 / fps);
  }
}

}  // namespace

void SamplingConfig::validate() const {
  if (!(fps > 0.0)) throw ValidationError("sampling fps must be > 0");
  if (target_length < 2) throw ValidationError("sampling target_length must be >= 2");
}

Frame make_frame(int width, int height, std::vector<uint8_t> pixels, int64_t index, double timestamp_ms) {
  if (width < 1 || height < 1) throw ValidationError("frame dimensions must be >= 1");
  if (pixels.size() != static_cast<size_t>(width) * height * 3) {
    throw ValidationError("frame pixel buffer length must be width * height * 3");
  }
  return Frame{width, height, std::move(pixels), index, timestamp_ms};
}

FrameSequence load_frames(const fs::path& source, const SamplingConfig& cfg) {
  cfg.validate();
  if (!fs::exists(source)) throw NotFoundError("frame source not found: " + source.string());
  if (!fs::is_directory(source)) return read_container(source, cfg);

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(source)) {
    if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  if (files.empty()) throw NotFoundError("no frames in " + source.string());

  FrameSequence seq;
  seq.source_id = source.filename().string();
  if (seq.source_id.empty()) seq.source_id = source.parent_path().filename().string();
  for (const auto& file : files) {
    RasterImage img = read_image(file, true);
    if (!seq.frames.empty() && (img.width != seq.frames.front().width || img.height != seq.frames.front().height)) {
      throw DimensionMismatchError("frame " + file.filename().string() + " is " + std::to_string(img.width) + "x" +
                                   std::to_string(img.height) + ", expected " +
                                   std::to_string(seq.frames.front().width) + "x" +
                                   std::to_string(seq.frames.front().height));
    }
    seq.frames.push_back(make_frame(img.width, img.height, std::move(img.pixels)));
  }
  assign_times(seq, cfg.fps);
  return seq;
}

FrameSequence dedup_adjacent(const FrameSequence& seq) {
  FrameSequence out;
  out.source_id = seq.source_id;
  for (const Frame& f : seq.frames) {
    if (out.frames.empty() || !out.frames.back().same_pixels(f)) out.frames.push_back(f);
  }
  return out;
}

std::vector<size_t> normalization_positions(size_t source_length, int target_length, uint64_t seed) {
  if (source_length < 2) throw TooShortError("normalize_length needs at least 2 frames, got " + std::to_string(source_length));
  if (target_length < 2) throw ValidationError("target length must be >= 2");
  const size_t m = source_length;
  const size_t s = static_cast<size_t>(target_length);
  Rng rng(seed);
  std::vector<size_t> positions;
  positions.reserve(s);
  if (s <= m) {
    std::vector<size_t> interior(m - 2);
    for (size_t i = 0; i < interior.size(); ++i) interior[i] = i + 1;
    // Partial Fisher-Yates: the first s-2 slots become a uniform sample.
    for (size_t i = 0; i < s - 2; ++i) {
      std::swap(interior[i], interior[i + rng.below(interior.size() - i)]);
    }
    interior.resize(s - 2);
    std::sort(interior.begin(), interior.end());
    positions.push_back(0);
    positions.insert(positions.end(), interior.begin(), interior.end());
    positions.push_back(m - 1);
  } else {
    std::vector<size_t> counts(m, 1);
    for (size_t k = 0; k < s - m; ++k) ++counts[rng.below(m)];
    for (size_t i = 0; i < m; ++i) positions.insert(positions.end(), counts[i], i);
  }
  return positions;
}

FrameSequence normalize_length(const FrameSequence& seq, int target_length, uint64_t seed) {
  FrameSequence out;
  out.source_id = seq.source_id;
  for (size_t pos : normalization_positions(seq.size(), target_length, seed)) out.frames.push_back(seq.frames[pos]);
  return out;
}

void write_container(const fs::path& path, const FrameSequence& seq) {
  if (seq.empty()) throw ValidationError("cannot write an empty frame container");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write container: " + path.string());
  const Frame& first = seq.frames.front();
  out.write(kContainerMagic, 4);
  put_u32(out, kContainerVersion);
  put_u32(out, static_cast<uint32_t>(first.width));
  put_u32(out, static_cast<uint32_t>(first.height));
  put_u32(out, static_cast<uint32_t>(seq.size()));
  const size_t plane = static_cast<size_t>(first.width) * first.height;
  std::vector<uint8_t> buf(plane);
  for (const Frame& f : seq.frames) {
    if (f.width != first.width || f.height != first.height) {
      throw DimensionMismatchError("container frames must share dimensions");
    }
    for (int c = 0; c < 3; ++c) {
      for (size_t i = 0; i < plane; ++i) buf[i] = f.pixels[3 * i + c];
      out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(plane));
    }
  }
}

FrameSequence read_container(const fs::path& path, const SamplingConfig& cfg) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open container: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kContainerMagic, 4) != 0) throw FormatError("bad container magic: " + path.string());
  if (get_u32(in) != kContainerVersion) throw FormatError("unsupported container version: " + path.string());
  const int width = static_cast<int>(get_u32(in));
  const int height = static_cast<int>(get_u32(in));
  const uint32_t count = get_u32(in);
  if (width < 1 || height < 1 || count < 1) throw FormatError("empty container: " + path.string());
  const size_t plane = static_cast<size_t>(width) * height;
  FrameSequence seq;
  seq.source_id = path.stem().string();
  std::vector<uint8_t> buf(plane);
  for (uint32_t k = 0; k < count; ++k) {
    std::vector<uint8_t> pixels(plane * 3);
    for (int c = 0; c < 3; ++c) {
      in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(plane));
      if (!in) throw FormatError("truncated container: " + path.string());
      for (size_t i = 0; i < plane; ++i) pixels[3 * i + c] = buf[i];
    }
    seq.frames.push_back(make_frame(width, height, std::move(pixels)));
  }
  assign_times(seq, cfg.fps);
  return seq;
}

void write_frame_dir(const fs::path& dir, const FrameSequence& seq) {
  fs::create_directories(dir);
  char name[32];
  for (size_t i = 0; i < seq.size(); ++i) {
    std::snprintf(name, sizeof(name), "%06zu.png", i);
    const Frame& f = seq.frames[i];
    write_png(dir / name, RasterImage{f.width, f.height, 3, f.pixels});
  }
}

}  // namespace seeaction::ingest
