#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace seeaction {

// 8-bit interleaved image as read from or written to disk.
struct RasterImage {
  int width = 0;
  int height = 0;
  int channels = 3;  // 1 (gray) or 3 (RGB)
  std::vector<uint8_t> pixels;
};

// Reads a PNG or binary PPM (P6) / PGM (P5) file. Gray inputs are expanded
// to RGB when `force_rgb` is set.
RasterImage read_image(const std::filesystem::path& path, bool force_rgb = true);

void write_png(const std::filesystem::path& path, const RasterImage& image);
void write_ppm(const std::filesystem::path& path, const RasterImage& image);

bool is_image_file(const std::filesystem::path& path);

}  // namespace seeaction
