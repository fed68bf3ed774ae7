#include "seeaction/detector.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>

namespace seeaction::s2as {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

uint32_t pack(const ingest::Frame& f, size_t i) {
  return static_cast<uint32_t>(f.pixels[i * 3]) << 16 | static_cast<uint32_t>(f.pixels[i * 3 + 1]) << 8 |
         f.pixels[i * 3 + 2];
}

int color_diff(uint32_t a, uint32_t b) {
  int d = 0;
  for (int s = 0; s < 24; s += 8) d += std::abs(static_cast<int>(a >> s & 0xFF) - static_cast<int>(b >> s & 0xFF));
  return d;
}

std::vector<uint8_t> mask_of(const ingest::Frame& f, const DetectorConfig& cfg) {
  const size_t n = static_cast<size_t>(f.width) * f.height;
  std::vector<uint8_t> m(n, 0);
  for (size_t i = 0; i < n; ++i) {
    for (const auto& c : cfg.mask_colors) {
      if (f.pixels[i * 3] == c[0] && f.pixels[i * 3 + 1] == c[1] && f.pixels[i * 3 + 2] == c[2]) {
        m[i] = 1;
        break;
      }
    }
  }
  return m;
}

double luma(const ingest::Frame& f, int x, int y) {
  return 0.299 * f.at(x, y, 0) + 0.587 * f.at(x, y, 1) + 0.114 * f.at(x, y, 2);
}

struct Acc {
  double sum = 0, sq = 0, max = -1;
  int n = 0;
  void add(double v) {
    sum += v;
    sq += v * v;
    max = std::max(max, v);
    ++n;
  }
  double mean() const { return n ? sum / n : kNaN; }
  double stddev() const {
    if (!n) return kNaN;
    double m = sum / n;
    return std::sqrt(std::max(0.0, sq / n - m * m));
  }
};

}  // namespace

BoxFeatures box_features(const ingest::Frame& frame, const BBox& b, const DetectorConfig& cfg) {
  const auto mask = mask_of(frame, cfg);
  Acc ring[3], inner, inner2, top, title, mid, right, left;
  const int midy = b.h / 2, rx = b.w - 5, tx = 2;
  for (int dy = 0; dy < b.h; ++dy) {
    for (int dx = 0; dx < b.w; ++dx) {
      const int x = b.x + dx, y = b.y + dy;
      if (mask[static_cast<size_t>(y) * frame.width + x]) continue;
      const double l = luma(frame, x, y);
      const int d = std::min({dx, dy, b.w - 1 - dx, b.h - 1 - dy});
      if (d < 3) ring[d].add(l);
      if (d >= 1) inner.add(l);
      if (d >= 2) inner2.add(l);
      if (dy <= 1) top.add(l);
      const bool body_col = dx >= 1 && dx <= b.w - 2;
      if (dy >= 1 && dy <= 3 && body_col) title.add(l);
      if (dy == midy && body_col) mid.add(l);
      if (dy >= 2 && dy <= b.h - 3) {
        if (dx == rx) right.add(l);
        if (dx == tx) left.add(l);
      }
    }
  }
  BoxFeatures f;
  f.ring1 = ring[0].mean();
  f.ring2 = ring[1].mean();
  f.ring3 = ring[2].mean();
  f.inner = inner.mean();
  f.top_rows = top.mean();
  f.title_rows = title.mean();
  f.mid_row = mid.mean();
  f.right_col = right.mean();
  f.right_col_max = right.max;
  f.left_col = left.mean();
  f.inner_std = inner2.stddev();
  const double ref = ring[1].n ? f.ring2 : f.inner;
  f.thick = f.ring1 < 110 && f.ring2 < 110 && std::abs(f.ring1 - f.ring2) < 30 && f.ring3 - f.ring2 > 40;
  f.border = f.thick || (f.ring1 < 110 && ref - f.ring1 > 40);
  return f;
}

std::pair<WidgetClass, double> classify_box(const BoxFeatures& f, const BBox& b) {
  const int w = b.w, h = b.h;
  if (f.thick) return {WidgetClass::Popup, 0.9};
  if (f.border) {
    if (w >= 30 && h >= 18 && f.title_rows < 140 && f.mid_row - f.title_rows > 60) return {WidgetClass::Window, 0.9};
    if (w <= 13 && h <= 13) return {WidgetClass::Checkbox, 0.9};
    if (h <= 14 && f.right_col < 110 && f.right_col_max < 140 && f.left_col > 180) return {WidgetClass::Dropdown, 0.85};
    if (w >= 29) return {WidgetClass::Text, 0.8};
    return {WidgetClass::Button, 0.8};
  }
  if (w >= 40 && h >= 24) return {WidgetClass::Page, 0.85};
  if (std::abs(w - h) <= 1 && w >= 11 && w <= 15) return {WidgetClass::Icon, 0.85};
  if (h <= 13 && std::abs(f.top_rows - f.mid_row) > 30) return {WidgetClass::Tab, 0.8};
  if (h <= 13 && w >= 2 * h) return {WidgetClass::Others, 0.75};
  if (f.inner_std > 25) return {WidgetClass::Image, 0.8};
  return {WidgetClass::Others, 0.4};
}

std::vector<DetectedWidget> builtin_detect(const ingest::Frame& frame, const DetectorConfig& cfg) {
  const int W = frame.width, H = frame.height;
  const size_t n = static_cast<size_t>(W) * H;
  if (n == 0) return {};
  const auto mask = mask_of(frame, cfg);

  std::map<uint32_t, int> counts;
  for (size_t i = 0; i < n; ++i)
    if (!mask[i]) counts[pack(frame, i)]++;
  if (counts.empty()) return {};
  uint32_t bg = counts.begin()->first;
  int best = 0;
  for (auto [c, k] : counts)
    if (k > best) {
      best = k;
      bg = c;
    }

  std::vector<uint8_t> edge(n, 0);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const size_t i = static_cast<size_t>(y) * W + x;
      if (mask[i]) continue;
      const uint32_t p = pack(frame, i);
      if (color_diff(p, bg) <= cfg.color_threshold) continue;
      const int nx[] = {x - 1, x + 1, x, x};
      const int ny[] = {y, y, y - 1, y + 1};
      for (int k = 0; k < 4; ++k) {
        if (nx[k] < 0 || ny[k] < 0 || nx[k] >= W || ny[k] >= H) {
          edge[i] = 1;
          break;
        }
        const size_t j = static_cast<size_t>(ny[k]) * W + nx[k];
        if (!mask[j] && color_diff(p, pack(frame, j)) > cfg.color_threshold) {
          edge[i] = 1;
          break;
        }
      }
    }
  }

  std::vector<BBox> boxes;
  std::vector<uint8_t> seen(n, 0);
  std::deque<size_t> queue;
  for (size_t s = 0; s < n; ++s) {
    if (!edge[s] || seen[s]) continue;
    int x0 = W, y0 = H, x1 = -1, y1 = -1;
    seen[s] = 1;
    queue.push_back(s);
    while (!queue.empty()) {
      const size_t i = queue.front();
      queue.pop_front();
      const int x = static_cast<int>(i % W), y = static_cast<int>(i / W);
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int qx = x + dx, qy = y + dy;
          if (qx < 0 || qy < 0 || qx >= W || qy >= H) continue;
          const size_t j = static_cast<size_t>(qy) * W + qx;
          if (edge[j] && !seen[j]) {
            seen[j] = 1;
            queue.push_back(j);
          }
        }
    }
    BBox b{x0, y0, x1 - x0 + 1, y1 - y0 + 1};
    if (b.area() >= cfg.min_area) boxes.push_back(b);
  }

  auto contains = [](const BBox& outer, const BBox& in) {
    return in.x >= outer.x && in.y >= outer.y && in.right() <= outer.right() && in.bottom() <= outer.bottom();
  };
  std::vector<DetectedWidget> out;
  for (size_t i = 0; i < boxes.size(); ++i) {
    bool nested = false;
    for (size_t j = 0; j < boxes.size() && !nested; ++j) {
      if (i == j || !contains(boxes[j], boxes[i])) continue;
      // Equal boxes: keep the earlier one.
      nested = !(boxes[i] == boxes[j]) || j < i;
    }
    if (nested) continue;
    auto [cls, conf] = classify_box(box_features(frame, boxes[i], cfg), boxes[i]);
    out.push_back({boxes[i], cls, conf, std::nullopt});
  }
  std::sort(out.begin(), out.end(), [](const DetectedWidget& a, const DetectedWidget& b) {
    return a.bbox.y != b.bbox.y ? a.bbox.y < b.bbox.y : a.bbox.x < b.bbox.x;
  });
  return out;
}

}  // namespace seeaction::s2as
