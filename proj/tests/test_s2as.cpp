#include <doctest.h>

#include <map>

#include "seeaction/error.hpp"
#include "seeaction/s2as.hpp"
#include "seeaction/synth.hpp"
#include "support.hpp"

using namespace seeaction;
using namespace seeaction::s2as;

namespace {

// Hands out canned detections keyed by frame index.
class FakeDetector : public WidgetDetector {
 public:
  std::map<int64_t, std::vector<DetectedWidget>> by_frame;
  std::vector<DetectedWidget> detect(const ingest::Frame& f) const override {
    auto it = by_frame.find(f.index);
    return it == by_frame.end() ? std::vector<DetectedWidget>{} : it->second;
  }
};

segment::ActionFragment fragment(int n) {
  segment::ActionFragment f;
  f.frames = testing::sequence(std::vector<ingest::Frame>(static_cast<size_t>(n), testing::solid(40, 40, 200, 200, 200)));
  f.start_index = 0;
  f.end_index = n - 1;
  f.mean_dissim_trace.assign(static_cast<size_t>(n - 1), 0.0);
  return f;
}

const StructuredAction kClickButton{CommandClass::Click, WidgetClass::Button, {"in", "toolbar"}};
const BBox kRegion{10, 10, 10, 10};

}  // namespace

TEST_CASE("identify_target returns a matching detection on the last frame") {
  FakeDetector d;
  d.by_frame[2] = {{{12, 12, 6, 6}, WidgetClass::Button, 0.6, std::nullopt}};
  d.by_frame[1] = {{{10, 10, 5, 5}, WidgetClass::Button, 0.9, std::nullopt}};
  auto t = identify_target(fragment(3), kClickButton, kRegion, d);
  REQUIRE(t.has_value());
  CHECK(t->bbox == BBox{12, 12, 6, 6});
}

TEST_CASE("identify_target skips the wrong class and walks back a frame") {
  FakeDetector d;
  d.by_frame[2] = {{{12, 12, 6, 6}, WidgetClass::Icon, 0.9, std::nullopt},
                   {{30, 30, 6, 6}, WidgetClass::Button, 0.9, std::nullopt}};
  d.by_frame[1] = {{{8, 8, 4, 4}, WidgetClass::Button, 0.4, std::nullopt},
                   {{15, 15, 4, 4}, WidgetClass::Button, 0.7, std::nullopt}};
  auto t = identify_target(fragment(3), kClickButton, kRegion, d);
  REQUIRE(t.has_value());
  CHECK(t->bbox == BBox{15, 15, 4, 4});

  d.by_frame[1].clear();
  CHECK_FALSE(identify_target(fragment(3), kClickButton, kRegion, d).has_value());
}

TEST_CASE("identify_target honours min_iou and per-frame regions") {
  FakeDetector d;
  d.by_frame[1] = {{{19, 19, 10, 10}, WidgetClass::Button, 0.5, std::nullopt}};
  CHECK(identify_target(fragment(2), kClickButton, kRegion, d).has_value());
  CHECK_FALSE(identify_target(fragment(2), kClickButton, kRegion, d, 0.5).has_value());

  std::vector<std::optional<BBox>> regions{kRegion, std::nullopt};
  CHECK_FALSE(identify_target(fragment(2), kClickButton, regions, d).has_value());
  CHECK_THROWS_AS(identify_target(fragment(2), kClickButton, std::vector<std::optional<BBox>>{kRegion}, d),
                  DimensionMismatchError);
}

TEST_CASE("text fields from the detector are carried through") {
  FakeDetector d;
  d.by_frame[1] = {{{10, 10, 20, 6}, WidgetClass::Text, 0.8, std::string("hello")}};
  auto t = identify_target(fragment(2), {CommandClass::Type, WidgetClass::Text, {"in", "form"}}, kRegion, d);
  REQUIRE(t.has_value());
  CHECK(t->text == "hello");
}

TEST_CASE("static screencast gives an empty script") {
  auto seq = testing::sequence(std::vector<ingest::Frame>(6, testing::solid(30, 30, 10, 10, 10)));
  FunctionPredictor p([](const segment::ActionFragment&, size_t) { return std::optional<StructuredAction>{}; });
  S2asConfig cfg;
  cfg.side = 16;
  auto script = build_script(seq, p, BuiltinDetector{}, cfg);
  CHECK(script.actions.empty());
  CHECK(script.source_id == "test");
}

TEST_CASE("oracle predictions on a 5-action screencast match every target") {
  auto sc = synth::generate_screencast(4, 5);
  FunctionPredictor oracle([&](const segment::ActionFragment& f, size_t) -> std::optional<StructuredAction> {
    for (const auto& a : sc.actions)
      if (f.start_index <= a.end && a.start <= f.end_index) return a.label;
    return std::nullopt;
  });
  S2asConfig cfg;
  cfg.side = 16;
  cfg.frames = 4;
  auto script = build_script(sc.frames, oracle, BuiltinDetector{}, cfg);
  REQUIRE(script.actions.size() == 5);
  for (size_t i = 0; i < 5; ++i) {
    const auto& a = script.actions[i];
    CHECK(a.parsed);
    CHECK(a.structured == sc.actions[i].label);
    REQUIRE(a.target.has_value());
    CHECK(a.target->cls == a.structured.widget);
    if (i > 0) CHECK(script.actions[i - 1].span.end < a.span.start);
  }
}

TEST_CASE("malformed predictions are kept without a target") {
  auto sc = synth::generate_screencast(6, 2);
  FunctionPredictor none([](const segment::ActionFragment&, size_t) { return std::optional<StructuredAction>{}; });
  S2asConfig cfg;
  cfg.side = 16;
  cfg.frames = 4;
  auto script = build_script(sc.frames, none, BuiltinDetector{}, cfg);
  REQUIRE(script.actions.size() == 2);
  for (const auto& a : script.actions) {
    CHECK_FALSE(a.parsed);
    CHECK_FALSE(a.target.has_value());
  }
}

TEST_CASE("script serialization round trips exactly") {
  ActionScript s;
  s.source_id = "demo";
  s.tool_version = "1.2.3";
  s.provenance = R"({"seed":5})";
  CompleteAction a;
  a.structured = {CommandClass::Click, WidgetClass::Button, {"in", "popup"}};
  a.target = DetectedWidget{{3, 4, 10, 6}, WidgetClass::Button, 0.8125, std::nullopt};
  a.crop_path = "crops/0003.png";
  a.span = {3, 9};
  CompleteAction b;
  b.structured = {CommandClass::Type, WidgetClass::Text, {"at", "upper", "left"}};
  b.target = DetectedWidget{{1, 2, 30, 5}, WidgetClass::Text, 0.1, std::string("abc")};
  b.span = {12, 15};
  CompleteAction c;
  c.parsed = false;
  c.span = {20, 22};
  s.actions = {a, b, c};
  auto back = script_from_jsonl(script_to_jsonl(s));
  CHECK(back == s);
  CHECK(script_to_jsonl(back) == script_to_jsonl(s));
  auto text = script_to_text(s);
  CHECK(text.find("[click] [Button] [crop:0003.png] [in popup]") != std::string::npos);
  CHECK_THROWS_AS(script_from_jsonl("not json\n"), ValidationError);
}
