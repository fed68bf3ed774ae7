#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "seeaction/ingest.hpp"
#include "seeaction/rng.hpp"

namespace testing {

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("seeaction_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline seeaction::ingest::Frame solid(int w, int h, uint8_t r, uint8_t g, uint8_t b, int64_t index = 0) {
  std::vector<uint8_t> px(static_cast<size_t>(w) * h * 3);
  for (size_t i = 0; i < px.size(); i += 3) {
    px[i] = r;
    px[i + 1] = g;
    px[i + 2] = b;
  }
  return seeaction::ingest::make_frame(w, h, std::move(px), index);
}

inline seeaction::ingest::Frame noise(seeaction::Rng& rng, int w, int h, int64_t index = 0) {
  std::vector<uint8_t> px(static_cast<size_t>(w) * h * 3);
  for (auto& p : px) p = static_cast<uint8_t>(rng.below(256));
  return seeaction::ingest::make_frame(w, h, std::move(px), index);
}

inline void fill_rect(seeaction::ingest::Frame& f, int x0, int y0, int w, int h, uint8_t v) {
  for (int y = y0; y < y0 + h; ++y)
    for (int x = x0; x < x0 + w; ++x)
      for (int c = 0; c < 3; ++c) f.pixels[(static_cast<size_t>(y) * f.width + x) * 3 + c] = v;
}

inline seeaction::ingest::FrameSequence sequence(std::vector<seeaction::ingest::Frame> frames) {
  for (size_t i = 0; i < frames.size(); ++i) frames[i].index = static_cast<int64_t>(i);
  seeaction::ingest::FrameSequence s;
  s.frames = std::move(frames);
  s.source_id = "test";
  return s;
}

}  // namespace testing
