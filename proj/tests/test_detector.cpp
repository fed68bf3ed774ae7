#include <doctest.h>

#include "seeaction/detector.hpp"
#include "seeaction/synth.hpp"
#include "support.hpp"

using namespace seeaction;
using namespace seeaction::s2as;

namespace {

synth::Widget widget(WidgetClass cls, BBox box, synth::Rgb fill, synth::Rgb accent, uint32_t pattern = 7) {
  synth::Widget w;
  w.cls = cls;
  w.box = box;
  w.fill = fill;
  w.accent = accent;
  w.pattern = pattern;
  return w;
}

double best_iou(const BBox& truth, const std::vector<DetectedWidget>& dets) {
  double best = 0;
  for (const auto& d : dets) best = std::max(best, d.bbox.iou(truth));
  return best;
}

}  // namespace

TEST_CASE("blank frames have no widgets") {
  CHECK(builtin_detect(testing::solid(80, 60, 222, 222, 222)).empty());
}

TEST_CASE("three-widget scene: every widget is found with IoU >= 0.7") {
  synth::SceneSpec s;
  s.cursor.visible = false;
  s.widgets = {widget(WidgetClass::Button, {6, 6, 18, 9}, {70, 130, 200}, {30, 60, 120}),
               widget(WidgetClass::Text, {36, 6, 36, 9}, {255, 255, 255}, {90, 90, 90}),
               widget(WidgetClass::Icon, {12, 32, 11, 11}, {200, 120, 40}, {120, 60, 10})};
  auto dets = builtin_detect(synth::render(s));
  CHECK(dets.size() >= 3);
  for (const auto& w : s.widgets) CHECK(best_iou(w.box, dets) >= 0.7);
}

TEST_CASE("property: detections are ordered, in bounds, and cover generated scenes") {
  int hits = 0, total = 0;
  for (int i = 0; i < 40; ++i) {
    auto g = synth::generate_fragment(31, i, command_from_id(i % kNumCommands));
    const auto& last = g.frames.frames.back();
    auto dets = builtin_detect(last);
    for (size_t k = 0; k < dets.size(); ++k) {
      CHECK(dets[k].bbox.within(last.width, last.height));
      CHECK(dets[k].confidence >= 0.0);
      CHECK(dets[k].confidence <= 1.0);
      if (k > 0) {
        const auto& a = dets[k - 1].bbox;
        const auto& b = dets[k].bbox;
        CHECK((a.y < b.y || (a.y == b.y && a.x <= b.x)));
      }
    }
    if (g.entry.label.command == CommandClass::Disappear) continue;
    ++total;
    hits += best_iou(g.target_box, dets) >= 0.5;
  }
  CHECK(hits >= total * 8 / 10);
}

TEST_CASE("pointer pixels do not split or grow boxes") {
  synth::SceneSpec s;
  s.widgets = {widget(WidgetClass::Button, {20, 20, 20, 10}, {70, 130, 200}, {30, 60, 120})};
  s.cursor = {30, 25, true};
  auto with = builtin_detect(synth::render(s));
  s.cursor.visible = false;
  auto without = builtin_detect(synth::render(s));
  REQUIRE(with.size() == 1);
  REQUIRE(without.size() == 1);
  CHECK(with[0].bbox == without[0].bbox);
}
