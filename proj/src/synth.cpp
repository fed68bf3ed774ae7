#include "seeaction/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "seeaction/error.hpp"

namespace seeaction::synth {

namespace {

using json = nlohmann::json;

constexpr int kGap = 4;          // minimum spacing between widgets
constexpr int kCursorHalf = 4;   // cursor is 9x9
constexpr int kMinCursorStep = 11;
constexpr int kTooltipW = 22;
constexpr int kTooltipH = 5;

const Rgb kBorder{60, 60, 60};
const Rgb kInk{32, 32, 32};
const Rgb kWhite{255, 255, 255};
const Rgb kSelect{170, 200, 250};

int floordiv(int a, int b) {
  int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

uint32_t mix(uint32_t a, uint32_t b, uint32_t c) {
  uint32_t h = a * 0x9E3779B1u ^ (b + 0x7F4A7C15u) * 0x85EBCA77u ^ (c + 0x165667B1u) * 0xC2B2AE3Du;
  h ^= h >> 15;
  h *= 0x2C1B3C6Du;
  h ^= h >> 12;
  h *= 0x297A2D39u;
  h ^= h >> 15;
  return h;
}

Rgb scale(Rgb c, int num, int den) {
  return {static_cast<uint8_t>(c.r * num / den), static_cast<uint8_t>(c.g * num / den),
          static_cast<uint8_t>(c.b * num / den)};
}

Rgb lighten(Rgb c) {
  return {static_cast<uint8_t>((c.r + 255) / 2), static_cast<uint8_t>((c.g + 255) / 2),
          static_cast<uint8_t>((c.b + 255) / 2)};
}

class Canvas {
 public:
  Canvas(int w, int h, Rgb bg) : w_(w), h_(h), px_(static_cast<size_t>(w) * h * 3) {
    fill(BBox{0, 0, w, h}, bg);
  }

  void set(int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= w_ || y >= h_) return;
    size_t i = (static_cast<size_t>(y) * w_ + x) * 3;
    px_[i] = c.r;
    px_[i + 1] = c.g;
    px_[i + 2] = c.b;
  }

  void fill(const BBox& b, Rgb c) {
    for (int y = b.y; y < b.bottom(); ++y)
      for (int x = b.x; x < b.right(); ++x) set(x, y, c);
  }

  void frame(const BBox& b, Rgb c, int thickness = 1) {
    for (int t = 0; t < thickness; ++t) {
      BBox r{b.x + t, b.y + t, b.w - 2 * t, b.h - 2 * t};
      if (r.w <= 0 || r.h <= 0) return;
      fill({r.x, r.y, r.w, 1}, c);
      fill({r.x, r.bottom() - 1, r.w, 1}, c);
      fill({r.x, r.y, 1, r.h}, c);
      fill({r.right() - 1, r.y, 1, r.h}, c);
    }
  }

  std::vector<uint8_t> take() { return std::move(px_); }

 private:
  int w_, h_;
  std::vector<uint8_t> px_;
};

// 3x5 glyph bitmap; never empty, varies with the seed.
uint32_t glyph_bits(uint32_t seed, uint32_t i) { return (mix(seed, i, 17) | 0x0090u) & 0x7FFFu; }

void draw_glyph(Canvas& cv, int x, int y, uint32_t bits) {
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 3; ++c)
      if (bits >> (r * 3 + c) & 1u) cv.set(x + c, y + r, kInk);
}

int text_slots(const Widget& w) { return std::max(1, (w.box.w - 6) / 4); }

int text_extent(const Widget& w) { return 4 * std::min(w.glyphs, text_slots(w)); }

int text_lines(const Widget& w) { return std::max(1, (w.box.h - 4) / 7); }

// First visible line; full lines scroll out of the top.
int text_first_line(const Widget& w) {
  int slots = text_slots(w);
  int used = (w.glyphs + slots - 1) / slots;
  return std::max(0, used - text_lines(w));
}

int text_row_y(const Widget& w, int visible_line) {
  if (text_lines(w) == 1) return w.box.y + (w.box.h - 5) / 2;
  return w.box.y + 3 + 7 * visible_line;
}

// Cursor spot right after the last glyph.
std::pair<int, int> text_caret(const Widget& w) {
  int slots = text_slots(w);
  int last = std::max(0, w.glyphs - 1);
  int line = last / slots - text_first_line(w);
  int col = w.glyphs == 0 ? 0 : last % slots + 1;
  int x = std::min(w.box.x + 3 + 4 * col + 2, w.box.right() - 6);
  return {x, text_row_y(w, std::max(0, line)) + 2};
}

// Boxes of the content words of a popup or window, in reading order.
std::vector<BBox> content_layout(const Widget& w) {
  std::vector<BBox> words;
  const int top = w.cls == WidgetClass::Window ? 7 : 4;
  const int left = w.box.x + 4;
  const int right = w.box.right() - 4;
  int i = 0;
  for (int y = w.box.y + top; y + 5 <= w.box.bottom() - 3; y += 7) {
    int x = left;
    for (;;) {
      int glyphs = 2 + static_cast<int>(mix(w.pattern, static_cast<uint32_t>(i), 5) % 2);
      int width = 4 * glyphs - 1;
      if (x + width > right) break;
      words.push_back({x, y, width, 5});
      x += width + 4;
      ++i;
    }
  }
  return words;
}

void draw_words(Canvas& cv, const Widget& w, int count) {
  auto words = content_layout(w);
  for (int i = 0; i < std::min<int>(count, static_cast<int>(words.size())); ++i) {
    const BBox& b = words[static_cast<size_t>(i)];
    for (int g = 0; g * 4 < b.w; ++g) draw_glyph(cv, b.x + g * 4, b.y, glyph_bits(w.pattern, static_cast<uint32_t>(i * 8 + g)));
  }
}

void draw_page(Canvas& cv, const Widget& w) {
  const BBox& b = w.box;
  cv.fill(b, kWhite);
  const int x0 = b.x + 2, y0 = b.y + 2;
  const int lines_visible = (b.h - 4) / 7;
  if (w.highlight > 0 && w.highlight_row >= 0 && w.highlight_row < lines_visible) {
    int by = y0 + 7 * w.highlight_row - 1;
    cv.fill({x0, by, std::min(w.highlight, b.w - 4), 6}, kSelect);
  }
  for (int py = y0; py < b.bottom() - 2; ++py) {
    int v = floordiv((py - y0) * kZoomUnit, w.zoom) + w.scroll;
    int line = floordiv(v, 7);
    if (v - 7 * line >= 4) continue;
    int line_len = 6 + static_cast<int>(mix(w.pattern, static_cast<uint32_t>(line), 3) % 6);
    for (int px = x0; px < b.right() - 2; ++px) {
      int u = floordiv((px - x0) * kZoomUnit, w.zoom);
      int cell = u / 4;
      if (u % 4 == 3 || cell >= line_len) continue;
      if (mix(w.pattern, static_cast<uint32_t>(line), static_cast<uint32_t>(cell)) % 5 == 0) continue;
      cv.set(px, py, kInk);
    }
  }
}

void draw_image(Canvas& cv, const Widget& w) {
  static const Rgb pairs[][3] = {
      {{80, 140, 210}, {235, 230, 160}, {200, 60, 60}},
      {{60, 150, 90}, {240, 220, 200}, {40, 60, 140}},
      {{170, 90, 160}, {230, 240, 240}, {240, 170, 40}},
      {{120, 100, 70}, {200, 230, 250}, {30, 30, 30}},
  };
  const auto& pal = pairs[w.pattern % 4];
  const BBox& b = w.box;
  const int cx = b.x + b.w / 2, cy = b.y + b.h / 2;
  const int ox = 2 + static_cast<int>(w.pattern / 4 % 5), oy = 1 + static_cast<int>(w.pattern / 32 % 3);
  for (int y = b.y; y < b.bottom(); ++y) {
    for (int x = b.x; x < b.right(); ++x) {
      int u = floordiv((x - cx) * kZoomUnit, w.zoom);
      int v = floordiv((y - cy) * kZoomUnit, w.zoom);
      int du = u - ox, dv = v - oy;
      Rgb c;
      if (du * du + dv * dv <= 16) {
        c = pal[2];
      } else {
        c = ((floordiv(u, 4) + floordiv(v, 4)) & 1) ? pal[0] : pal[1];
      }
      cv.set(x, y, c);
    }
  }
}

void draw_widget(Canvas& cv, const Widget& w) {
  const BBox& b = w.box;
  switch (w.cls) {
    case WidgetClass::Button:
      cv.fill(b, w.active ? scale(w.fill, 3, 4) : w.fill);
      cv.frame(b, kBorder);
      break;
    case WidgetClass::Checkbox:
      cv.fill(b, kWhite);
      cv.frame(b, kBorder);
      if (w.active) cv.fill({b.x + 2, b.y + 2, b.w - 4, b.h - 4}, kInk);
      break;
    case WidgetClass::Icon: {
      cv.fill(b, w.active ? lighten(w.fill) : w.fill);
      int g = b.w / 3;
      cv.fill({b.x + (b.w - g) / 2, b.y + (b.h - g) / 2, g, g}, kWhite);
      break;
    }
    case WidgetClass::Tab:
      cv.fill(b, w.active ? Rgb{250, 250, 250} : Rgb{175, 175, 175});
      cv.fill({b.x, b.y, b.w, 2}, w.accent);
      break;
    case WidgetClass::Dropdown:
      cv.fill(b, kWhite);
      cv.frame(b, kBorder);
      cv.fill({b.right() - 7, b.y + 2, 5, b.h - 4}, w.active ? Rgb{40, 80, 170} : Rgb{70, 70, 70});
      break;
    case WidgetClass::Text: {
      cv.fill(b, kWhite);
      if (w.highlight > 0) cv.fill({b.x + 2, b.y + 2, std::min(w.highlight, b.w - 4), b.h - 4}, kSelect);
      cv.frame(b, w.active ? Rgb{30, 70, 190} : kBorder);
      int slots = text_slots(w);
      int first = text_first_line(w) * slots;
      for (int i = first; i < w.glyphs; ++i)
        draw_glyph(cv, b.x + 3 + 4 * (i % slots), text_row_y(w, i / slots - first / slots),
                   glyph_bits(w.pattern, static_cast<uint32_t>(i)));
      break;
    }
    case WidgetClass::Image:
      draw_image(cv, w);
      break;
    case WidgetClass::Window:
      cv.fill(b, {244, 244, 244});
      cv.frame(b, {50, 50, 50});
      cv.fill({b.x, b.y, b.w, 5}, w.accent);
      draw_words(cv, w, w.glyphs);
      break;
    case WidgetClass::Page:
      draw_page(cv, w);
      break;
    case WidgetClass::Popup:
      cv.fill(b, {255, 248, 205});
      cv.frame(b, {50, 50, 50}, 2);
      draw_words(cv, w, w.glyphs);
      break;
    case WidgetClass::Others:
      cv.fill(b, {150, 150, 150});
      cv.fill({b.x + w.slider, b.y, 4, b.h}, {50, 50, 50});
      break;
  }
}

BBox expanded(const BBox& b, int m) { return {b.x - m, b.y - m, b.w + 2 * m, b.h + 2 * m}; }

bool fits(const SceneSpec& s, const BBox& b, int ignore = -1) {
  if (!b.within(s.width, s.height) || b.x < 1 || b.y < 1 || b.right() > s.width - 1 || b.bottom() > s.height - 1)
    return false;
  for (size_t i = 0; i < s.widgets.size(); ++i) {
    if (static_cast<int>(i) == ignore) continue;
    if (expanded(s.widgets[i].box, kGap).intersects(b)) return false;
  }
  return true;
}

std::pair<int, int> center(const BBox& b) { return {b.x + b.w / 2, b.y + b.h / 2}; }

using Point = std::pair<int, int>;

double dist(Point a, Point b) { return std::hypot(a.first - b.first, a.second - b.second); }

// Cursor positions for steps 1..steps, ending on `to`; consecutive positions
// are at least one cursor width apart unless the route is too short.
std::vector<Point> cursor_path(const SceneSpec& s, Point from, Point to, int steps) {
  std::vector<Point> pts{from};
  if (dist(from, to) < kMinCursorStep * steps) {
    const Point corners[] = {{8, 8}, {s.width - 9, 8}, {8, s.height - 9}, {s.width - 9, s.height - 9}};
    Point best = corners[0];
    double best_score = -1;
    for (Point c : corners) {
      double score = std::min(dist(from, c), dist(c, to));
      if (score > best_score) {
        best_score = score;
        best = c;
      }
    }
    pts.push_back(best);
  }
  pts.push_back(to);
  std::vector<double> cum{0.0};
  for (size_t i = 1; i < pts.size(); ++i) cum.push_back(cum.back() + dist(pts[i - 1], pts[i]));
  std::vector<Point> out;
  for (int t = 1; t <= steps; ++t) {
    if (t == steps) {
      out.push_back(to);
      break;
    }
    double d = cum.back() * t / steps;
    size_t seg = 1;
    while (seg + 1 < pts.size() && cum[seg] < d) ++seg;
    double len = cum[seg] - cum[seg - 1];
    double f = len > 0 ? (d - cum[seg - 1]) / len : 1.0;
    int x = static_cast<int>(std::lround(pts[seg - 1].first + f * (pts[seg].first - pts[seg - 1].first)));
    int y = static_cast<int>(std::lround(pts[seg - 1].second + f * (pts[seg].second - pts[seg - 1].second)));
    out.push_back({x, y});
  }
  return out;
}

// Nearest free spot at least `min_dist` away; nullopt when the canvas is full.
std::optional<BBox> drag_destination(const SceneSpec& s, int idx, int min_dist) {
  const BBox& b = s.widgets[static_cast<size_t>(idx)].box;
  std::optional<BBox> best;
  double best_d = 0;
  bool best_far = false;
  for (int y = 1; y + b.h <= s.height - 1; y += 2) {
    for (int x = 1; x + b.w <= s.width - 1; x += 2) {
      BBox c{x, y, b.w, b.h};
      if (!fits(s, c, idx)) continue;
      double d = dist({x, y}, {b.x, b.y});
      if (d < kMinCursorStep) continue;
      bool far = d >= min_dist;
      bool better = !best || (far && !best_far) || (far && best_far && d < best_d) || (!far && !best_far && d > best_d);
      if (better) {
        best = c;
        best_d = d;
        best_far = far;
      }
    }
  }
  return best;
}

int content_words(const Widget& w) { return static_cast<int>(content_layout(w).size()); }

// Transitions the command can fill with visible change.
int max_transitions(const SceneSpec& s, int idx, CommandClass c) {
  const Widget& w = s.widgets[static_cast<size_t>(idx)];
  if (c == CommandClass::Appear || c == CommandClass::Disappear) return 1 + content_words(w) / 3;
  (void)s;
  return 9;
}

void toggle(Widget& w, Point cursor) {
  switch (w.cls) {
    case WidgetClass::Others:
      w.slider = std::clamp(cursor.first - w.box.x - 2, 0, w.box.w - 4);
      break;
    default:
      w.active = !w.active;
  }
}

Point click_point(const Widget& w) {
  if (w.cls == WidgetClass::Others) {
    int x = w.slider < w.box.w / 2 ? w.box.right() - 6 : w.box.x + 5;
    return {x, w.box.y + w.box.h / 2};
  }
  return center(w.box);
}

BBox tooltip_box(const SceneSpec& s, const BBox& t) {
  int x = std::clamp(t.x, 1, s.width - kTooltipW - 1);
  int y = t.bottom() + 3;
  if (y + kTooltipH > s.height - 1) y = t.y - 3 - kTooltipH;
  return {x, y, kTooltipW, kTooltipH};
}

int ceil_div(int a, int b) { return (a + b - 1) / b; }

}  // namespace

ingest::Frame render(const SceneSpec& scene) {
  Canvas cv(scene.width, scene.height, scene.background);
  for (const Widget& w : scene.widgets)
    if (w.visible) draw_widget(cv, w);
  if (scene.tooltip) {
    cv.fill(*scene.tooltip, {255, 255, 170});
  }
  if (scene.cursor.visible) {
    const int x = scene.cursor.x - kCursorHalf, y = scene.cursor.y - kCursorHalf;
    cv.fill({x, y, 9, 9}, kCursorOuter);
    cv.fill({x + 3, y + 3, 3, 3}, kCursorCore);
  }
  return ingest::make_frame(scene.width, scene.height, cv.take());
}

std::vector<std::string> location_phrase(const SceneSpec& scene, const Widget& target) {
  auto [cx, cy] = center(target.box);
  if (cy < scene.height / 5) return {"in", "toolbar"};
  if (cy >= scene.height - scene.height / 6) return {"in", "status", "bar"};
  std::string v = cy < scene.height / 2 ? "upper" : "lower";
  std::string h = cx < scene.width / 3 ? "left" : (cx < 2 * scene.width / 3 ? "center" : "right");
  return {"at", v, h};
}

bool can_apply(const SceneSpec& scene, int index, CommandClass command) {
  if (index < 0 || index >= static_cast<int>(scene.widgets.size())) return false;
  const Widget& w = scene.widgets[static_cast<size_t>(index)];
  if (!is_compatible(command, w.cls)) return false;
  if (command == CommandClass::Appear) return !w.visible;
  if (!w.visible) return false;
  switch (command) {
    case CommandClass::Select:
      return w.cls == WidgetClass::Page || w.glyphs >= 3;
    case CommandClass::Drag:
      return drag_destination(scene, index, kMinCursorStep).has_value();
    case CommandClass::Disappear:
      return content_words(w) >= 3;
    default:
      return true;
  }
}

RenderedAction render_action(const SceneSpec& scene, const ActionSpec& action) {
  if (action.duration < 2) throw ValidationError("action duration must be at least 2 frames");
  if (action.target < 0 || action.target >= static_cast<int>(scene.widgets.size()))
    throw ValidationError("action target out of range");
  const WidgetClass cls = scene.widgets[static_cast<size_t>(action.target)].cls;
  if (!is_compatible(action.command, cls))
    throw ValidationError(std::string("incompatible action: ") + std::string(command_name(action.command)) + " on " +
                          std::string(widget_name(cls)));
  if (!can_apply(scene, action.target, action.command))
    throw ValidationError(std::string("widget state does not allow ") + std::string(command_name(action.command)));
  const int T = action.duration - 1;
  if (T > max_transitions(scene, action.target, action.command))
    throw ValidationError("duration too long for this action");

  SceneSpec s = scene;
  RenderedAction out;
  out.frames.frames.push_back(render(s));
  auto W = [&]() -> Widget& { return s.widgets[static_cast<size_t>(action.target)]; };
  const Point start_cursor{s.cursor.x, s.cursor.y};
  auto place_cursor = [&](Point p) {
    s.cursor.x = p.first;
    s.cursor.y = p.second;
  };

  BBox gt = W().box;
  std::vector<Point> path;
  std::optional<BBox> dest;
  int band_steps = 0, extent = 0;
  switch (action.command) {
    case CommandClass::Click:
      path = cursor_path(s, start_cursor, click_point(W()), T);
      break;
    case CommandClass::Hover:
      path = cursor_path(s, start_cursor, center(W().box), T);
      break;
    case CommandClass::Drag:
      dest = drag_destination(s, action.target, kMinCursorStep * std::max(T - 1, 1));
      break;
    case CommandClass::Select: {
      const Widget& w = W();
      extent = w.cls == WidgetClass::Page ? w.box.w - 4 : text_extent(w);
      const int step = w.cls == WidgetClass::Page ? 14 : 12;
      band_steps = std::clamp(extent / step, 1, T);
      const int moves = T - band_steps;
      if (moves > 0) {
        Point anchor{w.box.x + 3, w.cls == WidgetClass::Page ? w.box.y + 4 + 7 * w.highlight_row : center(w.box).second};
        path = cursor_path(s, start_cursor, anchor, moves);
      }
      break;
    }
    default:
      break;
  }

  for (int t = 1; t <= T; ++t) {
    if (t == 1) s.tooltip.reset();
    Widget& w = W();
    switch (action.command) {
      case CommandClass::Click:
        place_cursor(path[static_cast<size_t>(t - 1)]);
        if (t == T) toggle(w, path.back());
        break;
      case CommandClass::Hover:
        place_cursor(path[static_cast<size_t>(t - 1)]);
        if (t == T) s.tooltip = tooltip_box(s, w.box);
        break;
      case CommandClass::Drag: {
        const BBox from = gt;
        if (T == 1) {
          w.box = *dest;
        } else if (t >= 2) {
          int k = t - 1, n = T - 1;
          w.box.x = from.x + (dest->x - from.x) * k / n;
          w.box.y = from.y + (dest->y - from.y) * k / n;
        }
        place_cursor(center(w.box));
        break;
      }
      case CommandClass::ScrollDown:
      case CommandClass::ScrollUp:
        if (t == 1) place_cursor(center(w.box));
        w.scroll += action.command == CommandClass::ScrollDown ? 5 : -5;
        break;
      case CommandClass::ZoomIn:
      case CommandClass::ZoomOut:
        if (t == 1) place_cursor(center(w.box));
        w.zoom = action.command == CommandClass::ZoomIn ? w.zoom * 13 / 10 : std::max(32, w.zoom * 10 / 13);
        break;
      case CommandClass::Type: {
        w.glyphs += 3;
        w.highlight = 0;
        place_cursor(text_caret(w));
        break;
      }
      case CommandClass::Select: {
        const int moves = T - band_steps;
        if (t <= moves) {
          place_cursor(path[static_cast<size_t>(t - 1)]);
          w.highlight = 0;
        } else {
          int b = t - moves;
          w.highlight = std::max(1, extent * b / band_steps);
          int cy = w.cls == WidgetClass::Page ? w.box.y + 4 + 7 * w.highlight_row : center(w.box).second;
          place_cursor({std::min(w.box.x + 2 + w.highlight, w.box.right() - 6), cy});
        }
        break;
      }
      case CommandClass::Appear: {
        const int total = content_words(w);
        w.visible = true;
        w.glyphs = T == 1 ? total : ceil_div(total * (t - 1), T - 1);
        break;
      }
      case CommandClass::Disappear: {
        const int total = content_words(w);
        if (t == T) {
          w.visible = false;
          w.glyphs = 0;
        } else {
          w.glyphs = total - ceil_div(total * t, T);
        }
        break;
      }
    }
    out.frames.frames.push_back(render(s));
  }

  for (size_t i = 0; i < out.frames.frames.size(); ++i) out.frames.frames[i].index = static_cast<int64_t>(i);
  if (action.command != CommandClass::Disappear) gt = W().box;
  out.target_box = gt;
  out.label.command = action.command;
  out.label.widget = cls;
  Widget located = W();
  located.box = gt;
  out.label.location = location_phrase(s, located);
  out.final_scene = std::move(s);
  return out;
}

namespace {

struct SizeRange {
  int w0, w1, h0, h1;
};

SizeRange size_range(WidgetClass c) {
  switch (c) {
    case WidgetClass::Button: return {16, 20, 11, 12};
    case WidgetClass::Checkbox: return {12, 12, 12, 12};
    case WidgetClass::Dropdown: return {24, 28, 11, 12};
    case WidgetClass::Icon: return {12, 14, 12, 14};
    case WidgetClass::Image: return {18, 22, 14, 16};
    case WidgetClass::Text: return {30, 36, 11, 12};
    case WidgetClass::Window: return {36, 42, 24, 28};
    case WidgetClass::Page: return {44, 50, 28, 32};
    case WidgetClass::Tab: return {17, 19, 11, 11};
    case WidgetClass::Popup: return {32, 38, 20, 24};
    case WidgetClass::Others: return {24, 28, 11, 12};
  }
  return {10, 10, 10, 10};
}

Widget make_widget(Rng& rng, WidgetClass c) {
  static const Rgb button_fills[] = {{170, 200, 235}, {190, 230, 190}, {235, 210, 170}, {215, 190, 230}};
  static const Rgb icon_fills[] = {{210, 60, 60}, {60, 150, 70}, {50, 90, 200}, {220, 140, 30}, {140, 60, 170}};
  static const Rgb accents[] = {{60, 100, 200}, {40, 140, 110}, {170, 60, 90}, {90, 70, 160}};
  SizeRange r = size_range(c);
  Widget w;
  w.cls = c;
  w.box.w = rng.range(r.w0, r.w1);
  w.box.h = c == WidgetClass::Icon ? w.box.w : rng.range(r.h0, r.h1);
  if (c == WidgetClass::Text && rng.chance(0.4)) w.box.h = rng.range(25, 26);
  w.pattern = static_cast<uint32_t>(rng.next());
  w.fill = c == WidgetClass::Icon ? icon_fills[rng.below(5)] : button_fills[rng.below(4)];
  w.accent = accents[rng.below(4)];
  if (c == WidgetClass::Text) w.glyphs = rng.range(0, 5);
  if (c == WidgetClass::Popup || c == WidgetClass::Window) {
    w.content_words = 0;
  }
  if (c == WidgetClass::Others) w.slider = rng.range(0, w.box.w - 4);
  if (c == WidgetClass::Page) w.scroll = rng.range(0, 20);
  return w;
}

bool place(Rng& rng, SceneSpec& s, Widget w) {
  for (int attempt = 0; attempt < 60; ++attempt) {
    w.box.x = rng.range(1, s.width - w.box.w - 1);
    w.box.y = rng.range(1, s.height - w.box.h - 1);
    if (fits(s, w.box)) {
      if (w.cls == WidgetClass::Popup || w.cls == WidgetClass::Window) {
        w.content_words = content_words(w);
        w.glyphs = w.content_words;
      }
      s.widgets.push_back(w);
      return true;
    }
  }
  return false;
}

void prepare_target(Rng& rng, Widget& w, CommandClass c) {
  switch (c) {
    case CommandClass::Appear:
      w.visible = false;
      w.glyphs = 0;
      break;
    case CommandClass::Select:
      if (w.cls == WidgetClass::Text) w.glyphs = rng.range(4, text_slots(w));
      if (w.cls == WidgetClass::Page) {
        w.highlight_row = rng.range(0, std::max(0, (w.box.h - 4) / 7 - 1));
        w.zoom = kZoomUnit;
      }
      break;
    case CommandClass::ZoomIn:
      w.zoom = rng.range(72, 96);
      break;
    case CommandClass::ZoomOut:
      w.zoom = rng.range(420, 640);
      break;
    default:
      break;
  }
}

void place_cursor_away(Rng& rng, SceneSpec& s, const BBox& avoid) {
  BBox keep_out = expanded(avoid, 8);
  for (int attempt = 0; attempt < 200; ++attempt) {
    int x = rng.range(4, s.width - 5), y = rng.range(4, s.height - 5);
    BBox c{x - kCursorHalf, y - kCursorHalf, 9, 9};
    if (c.intersects(keep_out)) continue;
    if (dist({x, y}, center(avoid)) < 20) continue;
    s.cursor = {x, y, true};
    return;
  }
  s.cursor = {4, 4, true};
}

}  // namespace

SceneSpec random_scene(Rng& rng, CommandClass command, WidgetClass target_class, int& target) {
  if (!is_compatible(command, target_class))
    throw ValidationError(std::string("incompatible action: ") + std::string(command_name(command)) + " on " +
                          std::string(widget_name(target_class)));
  for (int attempt = 0; attempt < 100; ++attempt) {
    SceneSpec s;
    s.seed = rng.next();
    Widget t = make_widget(rng, target_class);
    if (!place(rng, s, t)) continue;
    prepare_target(rng, s.widgets[0], command);
    const int distractors = rng.range(2, 4);
    for (int i = 0; i < distractors; ++i) {
      WidgetClass c = widget_from_id(static_cast<int>(rng.below(kNumWidgets)));
      place(rng, s, make_widget(rng, c));
    }
    // Keep the target at a random index so it is not always drawn first.
    size_t ti = rng.below(s.widgets.size());
    std::swap(s.widgets[0], s.widgets[ti]);
    target = static_cast<int>(ti);
    if (!can_apply(s, target, command)) continue;
    place_cursor_away(rng, s, s.widgets[ti].box);
    return s;
  }
  throw ValidationError("could not lay out a scene for " + std::string(command_name(command)));
}

int sample_duration(Rng& rng) {
  int n = 2;
  for (int i = 0; i < 8; ++i)
    if (rng.chance(0.4)) ++n;
  return n;
}

std::string manifest_line(const ManifestEntry& e) {
  json j;
  j["id"] = e.id;
  j["frame_dir"] = e.frame_dir;
  j["command"] = std::string(command_name(e.label.command));
  j["widget"] = std::string(widget_name(e.label.widget));
  j["location"] = join_words(e.label.location);
  j["start"] = e.start;
  j["end"] = e.end;
  j["scene_seed"] = e.scene_seed;
  return j.dump();
}

ManifestEntry parse_manifest_line(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& ex) {
    throw FormatError(std::string("bad manifest line: ") + ex.what());
  }
  ManifestEntry e;
  try {
    e.id = j.at("id").get<std::string>();
    e.frame_dir = j.at("frame_dir").get<std::string>();
    auto c = parse_command(j.at("command").get<std::string>());
    auto w = parse_widget(j.at("widget").get<std::string>());
    if (!c) throw FormatError("unknown command in manifest: " + j.at("command").get<std::string>());
    if (!w) throw FormatError("unknown widget in manifest: " + j.at("widget").get<std::string>());
    e.label.command = *c;
    e.label.widget = *w;
    e.label.location = split_words(j.at("location").get<std::string>());
    e.start = j.value("start", int64_t{0});
    e.end = j.value("end", int64_t{-1});
    e.scene_seed = j.value("scene_seed", uint64_t{0});
  } catch (const json::exception& ex) {
    throw FormatError(std::string("bad manifest entry: ") + ex.what());
  }
  return e;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open manifest " + path.string());
  std::vector<ManifestEntry> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos || is_provenance_line(line)) continue;
    out.push_back(parse_manifest_line(line));
  }
  return out;
}

std::vector<CommandClass> command_schedule(uint64_t seed, int n, const std::vector<double>& class_balance) {
  if (n < 0) throw ValidationError("fragment count must be non-negative");
  std::vector<double> w = class_balance.empty() ? std::vector<double>(kNumCommands, 1.0) : class_balance;
  if (w.size() != static_cast<size_t>(kNumCommands)) throw ValidationError("class balance needs 11 weights");
  double total = 0;
  for (double x : w) {
    if (!(x >= 0)) throw ValidationError("class balance weights must be non-negative");
    total += x;
  }
  if (total <= 0) throw ValidationError("class balance weights sum to zero");
  std::vector<int> counts(kNumCommands);
  std::vector<std::pair<double, int>> rem;
  int assigned = 0;
  for (int c = 0; c < kNumCommands; ++c) {
    double exact = n * w[static_cast<size_t>(c)] / total;
    counts[static_cast<size_t>(c)] = static_cast<int>(std::floor(exact));
    assigned += counts[static_cast<size_t>(c)];
    rem.push_back({exact - std::floor(exact), c});
  }
  std::stable_sort(rem.begin(), rem.end(), [](auto& a, auto& b) { return a.first > b.first; });
  for (int i = 0; assigned < n; ++i, ++assigned) counts[static_cast<size_t>(rem[static_cast<size_t>(i)].second)]++;
  std::vector<CommandClass> out;
  for (int c = 0; c < kNumCommands; ++c)
    for (int k = 0; k < counts[static_cast<size_t>(c)]; ++k) out.push_back(command_from_id(c));
  Rng rng(derive_seed(seed, 0xC0FFEE));
  rng.shuffle(out);
  return out;
}

GeneratedFragment generate_fragment(uint64_t seed, int index, CommandClass command) {
  const uint64_t scene_seed = derive_seed(seed, static_cast<uint64_t>(index));
  Rng rng(scene_seed);
  const auto& widgets = compatible_widgets(command);
  WidgetClass wc = widgets[rng.below(widgets.size())];
  int target = 0;
  SceneSpec scene = random_scene(rng, command, wc, target);
  scene.seed = scene_seed;
  int n = sample_duration(rng);
  n = std::min(n, 1 + max_transitions(scene, target, command));
  RenderedAction r = render_action(scene, {command, target, n});
  GeneratedFragment g;
  char id[32];
  std::snprintf(id, sizeof id, "frag_%06d", index);
  g.entry.id = id;
  g.entry.frame_dir = std::string("frames/") + id;
  g.entry.label = r.label;
  g.entry.start = 0;
  g.entry.end = static_cast<int64_t>(r.frames.size()) - 1;
  g.entry.scene_seed = scene_seed;
  g.frames = std::move(r.frames);
  g.frames.source_id = id;
  g.target_box = r.target_box;
  return g;
}

bool is_provenance_line(const std::string& line) { return line.rfind("{\"provenance\":", 0) == 0; }

std::string provenance_line(const std::string& provenance_json) {
  return json{{"provenance", json::parse(provenance_json)}}.dump();
}

DatasetSummary generate_dataset(uint64_t seed, int n_fragments, const std::vector<double>& class_balance,
                                const std::filesystem::path& out_dir, const std::string& provenance_json) {
  auto schedule = command_schedule(seed, n_fragments, class_balance);
  std::filesystem::create_directories(out_dir / "frames");
  DatasetSummary sum;
  sum.manifest = out_dir / "manifest.jsonl";
  sum.command_counts.assign(kNumCommands, 0);
  sum.widget_counts.assign(kNumWidgets, 0);
  std::set<std::string> words;
  std::ofstream man(sum.manifest);
  if (!man) throw ValidationError("cannot write " + sum.manifest.string());
  if (!provenance_json.empty()) man << provenance_line(provenance_json) << "\n";
  for (int i = 0; i < n_fragments; ++i) {
    GeneratedFragment g = generate_fragment(seed, i, schedule[static_cast<size_t>(i)]);
    ingest::write_frame_dir(out_dir / g.entry.frame_dir, g.frames);
    man << manifest_line(g.entry) << "\n";
    sum.command_counts[static_cast<size_t>(g.entry.label.command)]++;
    sum.widget_counts[static_cast<size_t>(g.entry.label.widget)]++;
    for (auto& w : g.entry.label.location) words.insert(w);
    ++sum.fragments;
  }
  sum.vocabulary.assign(words.begin(), words.end());
  return sum;
}

namespace {

SceneSpec screencast_scene(Rng& rng) {
  static const WidgetClass majors[] = {WidgetClass::Page, WidgetClass::Window, WidgetClass::Popup, WidgetClass::Image};
  static const WidgetClass extras[] = {WidgetClass::Button, WidgetClass::Checkbox, WidgetClass::Icon,
                                       WidgetClass::Tab,    WidgetClass::Dropdown, WidgetClass::Image,
                                       WidgetClass::Others};
  for (int attempt = 0; attempt < 200; ++attempt) {
    SceneSpec s;
    s.seed = rng.next();
    Widget major = make_widget(rng, majors[rng.below(4)]);
    if (!place(rng, s, major)) continue;
    Widget& m = s.widgets.back();
    if (m.cls == WidgetClass::Popup && rng.chance(0.5)) {
      m.visible = false;
      m.glyphs = 0;
    }
    if (!place(rng, s, make_widget(rng, WidgetClass::Text))) continue;
    for (int i = 0; i < 4; ++i) place(rng, s, make_widget(rng, extras[rng.below(7)]));
    if (s.widgets.size() < 4) continue;
    place_cursor_away(rng, s, s.widgets[0].box);
    return s;
  }
  throw ValidationError("could not lay out a screencast scene");
}

}  // namespace

Screencast generate_screencast(uint64_t seed, int n_actions) {
  if (n_actions < 1) throw ValidationError("screencast needs at least one action");
  Rng rng(derive_seed(seed, 0x5C4EE7));
  Screencast sc;
  sc.seed = seed;
  SceneSpec scene = screencast_scene(rng);
  auto& frames = sc.frames.frames;
  ingest::Frame first = render(scene);
  for (int i = 0; i < 3; ++i) frames.push_back(first);
  for (int a = 0; a < n_actions; ++a) {
    std::map<int, std::vector<int>> feasible;
    for (int c = 0; c < kNumCommands; ++c)
      for (int i = 0; i < static_cast<int>(scene.widgets.size()); ++i)
        if (can_apply(scene, i, command_from_id(c))) feasible[c].push_back(i);
    if (feasible.empty()) break;
    auto it = feasible.begin();
    std::advance(it, static_cast<long>(rng.below(feasible.size())));
    CommandClass cmd = command_from_id(it->first);
    int target = it->second[rng.below(it->second.size())];
    int n = std::min(sample_duration(rng), 1 + max_transitions(scene, target, cmd));
    RenderedAction r = render_action(scene, {cmd, target, n});
    GroundTruthAction gt;
    gt.start = static_cast<int64_t>(frames.size()) - 1;
    for (size_t k = 1; k < r.frames.size(); ++k) frames.push_back(r.frames.frames[k]);
    gt.end = static_cast<int64_t>(frames.size()) - 1;
    gt.label = r.label;
    gt.target_box = r.target_box;
    sc.actions.push_back(gt);
    scene = std::move(r.final_scene);
    const int gap = rng.range(3, 5);
    ingest::Frame last = frames.back();
    for (int k = 0; k < gap; ++k) frames.push_back(last);
  }
  for (size_t i = 0; i < frames.size(); ++i) {
    frames[i].index = static_cast<int64_t>(i);
    frames[i].timestamp_ms = static_cast<double>(i) * 200.0;
  }
  char id[40];
  std::snprintf(id, sizeof id, "screencast_%llu", static_cast<unsigned long long>(seed));
  sc.frames.source_id = id;
  return sc;
}

void write_screencast(const Screencast& sc, const std::filesystem::path& dir, const std::string& provenance_json) {
  ingest::write_frame_dir(dir / "frames", sc.frames);
  std::ofstream out(dir / "truth.jsonl");
  if (!out) throw ValidationError("cannot write " + (dir / "truth.jsonl").string());
  if (!provenance_json.empty()) out << provenance_line(provenance_json) << "\n";
  for (const auto& a : sc.actions) {
    json j;
    j["start"] = a.start;
    j["end"] = a.end;
    j["command"] = std::string(command_name(a.label.command));
    j["widget"] = std::string(widget_name(a.label.widget));
    j["location"] = join_words(a.label.location);
    j["bbox"] = {a.target_box.x, a.target_box.y, a.target_box.w, a.target_box.h};
    out << j.dump() << "\n";
  }
}

std::vector<GroundTruthAction> read_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open " + path.string());
  std::vector<GroundTruthAction> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos || is_provenance_line(line)) continue;
    try {
      json j = json::parse(line);
      GroundTruthAction a;
      a.start = j.at("start").get<int64_t>();
      a.end = j.at("end").get<int64_t>();
      auto c = parse_command(j.at("command").get<std::string>());
      auto w = parse_widget(j.at("widget").get<std::string>());
      if (!c || !w) throw FormatError("unknown class in truth file");
      a.label = {*c, *w, split_words(j.at("location").get<std::string>())};
      auto b = j.at("bbox");
      a.target_box = {b.at(0).get<int>(), b.at(1).get<int>(), b.at(2).get<int>(), b.at(3).get<int>()};
      out.push_back(a);
    } catch (const json::exception& ex) {
      throw FormatError(std::string("bad truth line: ") + ex.what());
    }
  }
  return out;
}

}  // namespace seeaction::synth
