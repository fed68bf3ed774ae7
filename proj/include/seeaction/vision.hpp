#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "seeaction/image_io.hpp"
#include "seeaction/ingest.hpp"

namespace seeaction::vision {

using ingest::Frame;
using ingest::FrameSequence;

struct BBox {
  int x = 0;
  int y = 0;
  int w = 1;
  int h = 1;

  int64_t area() const { return static_cast<int64_t>(w) * h; }
  int right() const { return x + w; }
  int bottom() const { return y + h; }
  bool intersects(const BBox& o) const { return x < o.right() && o.x < right() && y < o.bottom() && o.y < bottom(); }
  double iou(const BBox& o) const;
  bool within(int width, int height) const {
    return x >= 0 && y >= 0 && w >= 1 && h >= 1 && right() <= width && bottom() <= height;
  }
  bool operator==(const BBox&) const = default;
};

// Interleaved float image, channel values in [0, 1].
struct FloatImage {
  int width = 0;
  int height = 0;
  int channels = 3;
  std::vector<float> data;

  float at(int x, int y, int c) const { return data[(static_cast<size_t>(y) * width + x) * channels + c]; }
};

struct SimilarityMap {
  int width = 0;
  int height = 0;
  std::vector<float> values;  // dissimilarity, 0 = identical, 1 = maximally different
  std::pair<int64_t, int64_t> pair{0, 0};

  float at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
  double mean() const;
};

struct SsimConfig {
  int window = 7;
  double c1 = (0.01 * 255) * (0.01 * 255);
  double c2 = (0.03 * 255) * (0.03 * 255);
  double region_threshold = 0.05;

  void validate() const;
};

// The three model input streams for one normalized sequence. Pair streams hold
// S-1 entries padded to S by repeating the last one.
struct StreamBundle {
  std::vector<FloatImage> originals;     // side x side x 3
  std::vector<FloatImage> change_crops;  // side x side x 3
  std::vector<FloatImage> sim_maps;      // side x side x 1
  int side = 64;
  // Largest change region per adjacent pair (S-1 entries), in source pixels.
  std::vector<std::optional<BBox>> regions;
};

// Luma (BT.601) of every pixel, row-major.
std::vector<double> grayscale(const Frame& f);

// Mirror index into [0, n) without repeating the edge sample.
int reflect_index(int i, int n);

SimilarityMap ssim_map(const Frame& a, const Frame& b, const SsimConfig& cfg);

// Tight boxes of the 8-connected components of pixels with value > threshold,
// in raster order of each component's first pixel.
std::vector<BBox> detect_change_regions(const SimilarityMap& map, double threshold);

// Largest box by area; ties go to smaller y, then smaller x.
std::optional<BBox> largest_region(const std::vector<BBox>& regions);

FloatImage to_float(const Frame& f);
FloatImage to_float(const SimilarityMap& m);
FloatImage crop(const FloatImage& img, const BBox& box);
FloatImage resize_bilinear(const FloatImage& img, int width, int height);

StreamBundle build_streams(const FrameSequence& seq, const SsimConfig& cfg, int side);

// Converts a float image (values in [0,1]) to an 8-bit raster for export.
RasterImage to_raster(const FloatImage& img);

}  // namespace seeaction::vision
