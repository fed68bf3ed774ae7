#include "seeaction/vision.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "seeaction/error.hpp"

namespace seeaction::vision {

double BBox::iou(const BBox& o) const {
  const int ix0 = std::max(x, o.x);
  const int iy0 = std::max(y, o.y);
  const int ix1 = std::min(right(), o.right());
  const int iy1 = std::min(bottom(), o.bottom());
  if (ix1 <= ix0 || iy1 <= iy0) return 0.0;
  const double inter = static_cast<double>(ix1 - ix0) * (iy1 - iy0);
  return inter / (static_cast<double>(area()) + static_cast<double>(o.area()) - inter);
}

double SimilarityMap::mean() const {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (float v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

void SsimConfig::validate() const {
  if (window < 3 || window % 2 == 0) throw ValidationError("ssim window must be odd and >= 3");
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw ValidationError("ssim constants must be positive");
  if (region_threshold < 0.0 || region_threshold > 1.0) throw ValidationError("region threshold must be in [0,1]");
}

std::vector<double> grayscale(const Frame& f) {
  std::vector<double> g(static_cast<size_t>(f.width) * f.height);
  for (size_t i = 0; i < g.size(); ++i) {
    g[i] = 0.299 * f.pixels[3 * i] + 0.587 * f.pixels[3 * i + 1] + 0.114 * f.pixels[3 * i + 2];
  }
  return g;
}

int reflect_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * n - 2;
  i = std::abs(i) % period;
  return i < n ? i : period - i;
}

namespace {

// Summed-area table over the mirror-padded image; (w+1) x (h+1) with a zero row/col.
struct Integral {
  int w = 0;
  int h = 0;
  std::vector<double> sum;

  double at(int x, int y) const { return sum[static_cast<size_t>(y) * (w + 1) + x]; }
  double box(int x0, int y0, int x1, int y1) const { return at(x1, y1) - at(x0, y1) - at(x1, y0) + at(x0, y0); }
};

template <typename F>
Integral integrate(int pw, int ph, F value) {
  Integral ii{pw, ph, std::vector<double>(static_cast<size_t>(pw + 1) * (ph + 1), 0.0)};
  for (int y = 0; y < ph; ++y) {
    double row = 0.0;
    for (int x = 0; x < pw; ++x) {
      row += value(x, y);
      ii.sum[static_cast<size_t>(y + 1) * (pw + 1) + x + 1] = ii.sum[static_cast<size_t>(y) * (pw + 1) + x + 1] + row;
    }
  }
  return ii;
}

}  // namespace

SimilarityMap ssim_map(const Frame& a, const Frame& b, const SsimConfig& cfg) {
  cfg.validate();
  if (a.width != b.width || a.height != b.height) {
    throw DimensionMismatchError("ssim_map: frames differ in size");
  }
  const int w = a.width;
  const int h = a.height;
  SimilarityMap map{w, h, std::vector<float>(static_cast<size_t>(w) * h, 0.0f), {a.index, b.index}};
  if (a.pixels == b.pixels) return map;

  const std::vector<double> ga = grayscale(a);
  const std::vector<double> gb = grayscale(b);
  const int r = cfg.window / 2;
  const int pw = w + 2 * r;
  const int ph = h + 2 * r;
  std::vector<size_t> src(static_cast<size_t>(pw) * ph);
  for (int y = 0; y < ph; ++y) {
    const int sy = reflect_index(y - r, h);
    for (int x = 0; x < pw; ++x) src[static_cast<size_t>(y) * pw + x] = static_cast<size_t>(sy) * w + reflect_index(x - r, w);
  }
  auto pa = [&](int x, int y) { return ga[src[static_cast<size_t>(y) * pw + x]]; };
  auto pb = [&](int x, int y) { return gb[src[static_cast<size_t>(y) * pw + x]]; };
  const Integral sa = integrate(pw, ph, pa);
  const Integral sb = integrate(pw, ph, pb);
  const Integral saa = integrate(pw, ph, [&](int x, int y) { return pa(x, y) * pa(x, y); });
  const Integral sbb = integrate(pw, ph, [&](int x, int y) { return pb(x, y) * pb(x, y); });
  const Integral sab = integrate(pw, ph, [&](int x, int y) { return pa(x, y) * pb(x, y); });

  const double n = static_cast<double>(cfg.window) * cfg.window;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int x1 = x + cfg.window;
      const int y1 = y + cfg.window;
      const double mu_a = sa.box(x, y, x1, y1) / n;
      const double mu_b = sb.box(x, y, x1, y1) / n;
      const double var_a = saa.box(x, y, x1, y1) / n - mu_a * mu_a;
      const double var_b = sbb.box(x, y, x1, y1) / n - mu_b * mu_b;
      const double cov = sab.box(x, y, x1, y1) / n - mu_a * mu_b;
      const double ssim = ((2.0 * mu_a * mu_b + cfg.c1) * (2.0 * cov + cfg.c2)) /
                          ((mu_a * mu_a + mu_b * mu_b + cfg.c1) * (var_a + var_b + cfg.c2));
      map.values[static_cast<size_t>(y) * w + x] = static_cast<float>(std::clamp((1.0 - ssim) / 2.0, 0.0, 1.0));
    }
  }
  return map;
}

std::vector<BBox> detect_change_regions(const SimilarityMap& map, double threshold) {
  const int w = map.width;
  const int h = map.height;
  std::vector<uint8_t> visited(static_cast<size_t>(w) * h, 0);
  std::vector<BBox> boxes;
  std::vector<int> stack;
  for (int y0 = 0; y0 < h; ++y0) {
    for (int x0 = 0; x0 < w; ++x0) {
      const size_t i0 = static_cast<size_t>(y0) * w + x0;
      if (visited[i0] || !(map.values[i0] > threshold)) continue;
      int min_x = x0, max_x = x0, min_y = y0, max_y = y0;
      visited[i0] = 1;
      stack.assign(1, static_cast<int>(i0));
      while (!stack.empty()) {
        const int i = stack.back();
        stack.pop_back();
        const int x = i % w;
        const int y = i / w;
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
        min_y = std::min(min_y, y);
        max_y = std::max(max_y, y);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx;
            const int ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const size_t j = static_cast<size_t>(ny) * w + nx;
            if (visited[j] || !(map.values[j] > threshold)) continue;
            visited[j] = 1;
            stack.push_back(static_cast<int>(j));
          }
        }
      }
      boxes.push_back(BBox{min_x, min_y, max_x - min_x + 1, max_y - min_y + 1});
    }
  }
  return boxes;
}

std::optional<BBox> largest_region(const std::vector<BBox>& regions) {
  std::optional<BBox> best;
  for (const BBox& b : regions) {
    if (!best || b.area() > best->area() ||
        (b.area() == best->area() && (b.y < best->y || (b.y == best->y && b.x < best->x)))) {
      best = b;
    }
  }
  return best;
}

FloatImage to_float(const Frame& f) {
  FloatImage img{f.width, f.height, 3, std::vector<float>(f.pixels.size())};
  for (size_t i = 0; i < f.pixels.size(); ++i) img.data[i] = static_cast<float>(f.pixels[i]) / 255.0f;
  return img;
}

FloatImage to_float(const SimilarityMap& m) { return FloatImage{m.width, m.height, 1, m.values}; }

FloatImage crop(const FloatImage& img, const BBox& box) {
  if (!box.within(img.width, img.height)) throw ValidationError("crop box outside image");
  FloatImage out{box.w, box.h, img.channels, std::vector<float>(static_cast<size_t>(box.w) * box.h * img.channels)};
  const size_t row = static_cast<size_t>(box.w) * img.channels;
  for (int y = 0; y < box.h; ++y) {
    const float* src = img.data.data() + (static_cast<size_t>(box.y + y) * img.width + box.x) * img.channels;
    std::copy(src, src + row, out.data.begin() + static_cast<std::ptrdiff_t>(y * row));
  }
  return out;
}

FloatImage resize_bilinear(const FloatImage& img, int width, int height) {
  FloatImage out{width, height, img.channels, std::vector<float>(static_cast<size_t>(width) * height * img.channels)};
  const double sx = static_cast<double>(img.width) / width;
  const double sy = static_cast<double>(img.height) / height;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(img.height - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double ty = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(img.width - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, img.width - 1);
      const double tx = fx - x0;
      for (int c = 0; c < img.channels; ++c) {
        const double top = img.at(x0, y0, c) * (1.0 - tx) + img.at(x1, y0, c) * tx;
        const double bot = img.at(x0, y1, c) * (1.0 - tx) + img.at(x1, y1, c) * tx;
        out.data[(static_cast<size_t>(y) * width + x) * img.channels + c] = static_cast<float>(top * (1.0 - ty) + bot * ty);
      }
    }
  }
  return out;
}

StreamBundle build_streams(const FrameSequence& seq, const SsimConfig& cfg, int side) {
  if (seq.size() < 2) throw TooShortError("build_streams needs at least 2 frames");
  if (side < 1) throw ValidationError("stream side must be >= 1");
  cfg.validate();
  StreamBundle bundle;
  bundle.side = side;
  for (const Frame& f : seq.frames) bundle.originals.push_back(resize_bilinear(to_float(f), side, side));
  for (size_t i = 0; i + 1 < seq.size(); ++i) {
    const Frame& later = seq.frames[i + 1];
    SimilarityMap map = ssim_map(seq.frames[i], later, cfg);
    std::optional<BBox> region = largest_region(detect_change_regions(map, cfg.region_threshold));
    FloatImage later_f = to_float(later);
    if (region) {
      bundle.change_crops.push_back(resize_bilinear(crop(later_f, *region), side, side));
    } else {
      std::fill(map.values.begin(), map.values.end(), 0.0f);
      bundle.change_crops.push_back(resize_bilinear(later_f, side, side));
    }
    bundle.sim_maps.push_back(resize_bilinear(to_float(map), side, side));
    bundle.regions.push_back(region);
  }
  bundle.change_crops.push_back(bundle.change_crops.back());
  bundle.sim_maps.push_back(bundle.sim_maps.back());
  return bundle;
}

RasterImage to_raster(const FloatImage& img) {
  RasterImage out{img.width, img.height, img.channels, std::vector<uint8_t>(img.data.size())};
  for (size_t i = 0; i < img.data.size(); ++i) {
    out.pixels[i] = static_cast<uint8_t>(std::lround(std::clamp(img.data[i], 0.0f, 1.0f) * 255.0f));
  }
  return out;
}

}  // namespace seeaction::vision
