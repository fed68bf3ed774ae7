#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "seeaction/error.hpp"
#include "seeaction/segment.hpp"
#include "seeaction/synth.hpp"
#include "support.hpp"

using namespace seeaction;
using namespace seeaction::synth;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool cursor_colored(const ingest::Frame& f, int x, int y) {
  const Rgb px{f.at(x, y, 0), f.at(x, y, 1), f.at(x, y, 2)};
  return px == kCursorOuter || px == kCursorCore;
}

SceneSpec scene_for(CommandClass c, WidgetClass w, uint64_t seed, int& target) {
  Rng rng(seed);
  return random_scene(rng, c, w, target);
}

}  // namespace

TEST_CASE("click on a button only changes pixels near the button and the pointer") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    int target = 0;
    auto scene = scene_for(CommandClass::Click, WidgetClass::Button, seed, target);
    auto r = render_action(scene, {CommandClass::Click, target, 5});
    CHECK(r.label.command == CommandClass::Click);
    CHECK(r.label.widget == WidgetClass::Button);
    const auto& a = r.frames.frames.front();
    const auto& b = r.frames.frames.back();
    const BBox box = r.target_box;
    for (int y = 0; y < a.height; ++y)
      for (int x = 0; x < a.width; ++x) {
        if (a.at(x, y, 0) == b.at(x, y, 0) && a.at(x, y, 1) == b.at(x, y, 1) && a.at(x, y, 2) == b.at(x, y, 2)) continue;
        const bool near = x >= box.x - 2 && x < box.right() + 2 && y >= box.y - 2 && y < box.bottom() + 2;
        if (!near) CHECK((cursor_colored(a, x, y) || cursor_colored(b, x, y)));
      }
  }
}

TEST_CASE("appear draws the popup that was absent") {
  int target = 0;
  auto scene = scene_for(CommandClass::Appear, WidgetClass::Popup, 3, target);
  CHECK_FALSE(scene.widgets[static_cast<size_t>(target)].visible);
  auto r = render_action(scene, {CommandClass::Appear, target, 2});
  CHECK(r.final_scene.widgets[static_cast<size_t>(target)].visible);
  const auto& first = r.frames.frames.front();
  const auto& last = r.frames.frames.back();
  CHECK(first.pixels != last.pixels);
  auto hidden = scene;
  CHECK(render(hidden).pixels == first.pixels);
  int differing = 0;
  const BBox b = r.target_box;
  for (int y = b.y; y < b.bottom(); ++y)
    for (int x = b.x; x < b.right(); ++x) differing += first.at(x, y, 0) != last.at(x, y, 0);
  CHECK(differing > b.area() / 2);
}

TEST_CASE("incompatible pairs are rejected") {
  int target = 0;
  auto scene = scene_for(CommandClass::Click, WidgetClass::Button, 1, target);
  CHECK_FALSE(is_compatible(CommandClass::Type, WidgetClass::Button));
  CHECK_THROWS_AS(render_action(scene, {CommandClass::Type, target, 4}), ValidationError);
}

TEST_CASE("durations span 2..10 frames with mean near 5") {
  Rng rng(17);
  double total = 0;
  int lo = 100, hi = 0;
  for (int i = 0; i < 20000; ++i) {
    const int d = sample_duration(rng);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
    total += d;
  }
  CHECK(lo == 2);
  CHECK(hi == 10);
  CHECK(total / 20000 == doctest::Approx(5.2).epsilon(0.03));
}

TEST_CASE("command schedule follows the requested balance") {
  auto s = command_schedule(4, 600, {});
  std::vector<int> counts(kNumCommands, 0);
  for (auto c : s) ++counts[static_cast<size_t>(c)];
  for (int c : counts) CHECK(c >= 50);

  std::vector<double> w(kNumCommands, 1.0);
  w[0] = 4.0;
  auto skew = command_schedule(4, 280, w);
  int clicks = 0;
  for (auto c : skew) clicks += c == CommandClass::Click;
  CHECK(std::abs(clicks / 280.0 - 4.0 / 14.0) <= 0.05);
}

TEST_CASE("property: generated fragments are well formed and deterministic") {
  auto sched = command_schedule(8, 66, {});
  for (int i = 0; i < 66; ++i) {
    const auto c = sched[static_cast<size_t>(i)];
    auto g = generate_fragment(8, i, c);
    CHECK(g.entry.label.command == c);
    CHECK(is_compatible(c, g.entry.label.widget));
    CHECK(g.frames.size() >= 2);
    CHECK(g.frames.size() <= 10);
    CHECK(g.entry.end - g.entry.start + 1 == static_cast<int64_t>(g.frames.size()));
    CHECK_FALSE(g.entry.label.location.empty());
    const auto& f = g.frames.frames[0];
    CHECK(g.target_box.x >= 0);
    CHECK(g.target_box.right() <= f.width);
    CHECK(g.target_box.bottom() <= f.height);
    auto again = generate_fragment(8, i, c);
    CHECK(again.frames.frames.back().pixels == g.frames.frames.back().pixels);
    CHECK(again.entry.scene_seed == g.entry.scene_seed);
  }
}

TEST_CASE("datasets are byte-identical per seed") {
  testing::TempDir a, b, c;
  auto s1 = generate_dataset(11, 12, {}, a.path());
  generate_dataset(11, 12, {}, b.path());
  generate_dataset(12, 12, {}, c.path());
  CHECK(slurp(a / "manifest.jsonl") == slurp(b / "manifest.jsonl"));
  CHECK(slurp(a / "manifest.jsonl") != slurp(c / "manifest.jsonl"));
  CHECK(s1.fragments == 12);
  CHECK_FALSE(s1.vocabulary.empty());
  auto entries = read_manifest(a / "manifest.jsonl");
  REQUIRE(entries.size() == 12);
  CHECK(std::filesystem::exists(a / entries[0].frame_dir));
}

TEST_CASE("manifest lines round trip and the provenance header is skipped") {
  ManifestEntry e{"frag_000001", "frames/frag_000001", {CommandClass::ScrollUp, WidgetClass::Page, {"in", "page"}}, 0, 4, 99};
  auto back = parse_manifest_line(manifest_line(e));
  CHECK(back.id == e.id);
  CHECK(back.frame_dir == e.frame_dir);
  CHECK(back.label == e.label);
  CHECK(back.end == 4);
  CHECK(back.scene_seed == 99);
  CHECK_THROWS_AS(parse_manifest_line("{\"id\": 3}"), ValidationError);

  testing::TempDir d;
  {
    std::ofstream out(d / "m.jsonl");
    out << provenance_line(R"({"seed": 1})") << "\n" << manifest_line(e) << "\n";
  }
  CHECK(read_manifest(d / "m.jsonl").size() == 1);
}

TEST_CASE("screencasts separate actions by static gaps") {
  for (uint64_t seed : {1, 2, 3}) {
    auto sc = generate_screencast(seed, 5);
    REQUIRE(sc.actions.size() == 5);
    auto series = segment::dissim_series(sc.frames, {});
    for (size_t k = 0; k + 1 < sc.actions.size(); ++k) {
      const auto& cur = sc.actions[k];
      const auto& next = sc.actions[k + 1];
      CHECK(next.start - cur.end >= 3);
      for (int64_t p = cur.end; p < next.start; ++p) CHECK(series[static_cast<size_t>(p)] == 0.0);
      CHECK(is_compatible(cur.label.command, cur.label.widget));
    }
    for (int64_t p = 0; p < sc.actions[0].start; ++p) CHECK(series[static_cast<size_t>(p)] == 0.0);
  }
}

TEST_CASE("screencast truth round trips through disk") {
  auto sc = generate_screencast(21, 3);
  testing::TempDir d;
  write_screencast(sc, d.path(), R"({"seed": 21})");
  auto truth = read_truth(d / "truth.jsonl");
  REQUIRE(truth.size() == sc.actions.size());
  for (size_t i = 0; i < truth.size(); ++i) {
    CHECK(truth[i].start == sc.actions[i].start);
    CHECK(truth[i].end == sc.actions[i].end);
    CHECK(truth[i].label == sc.actions[i].label);
    CHECK(truth[i].target_box == sc.actions[i].target_box);
  }
  auto frames = ingest::load_frames(d / "frames", {});
  CHECK(frames.size() == sc.frames.size());
  CHECK(frames.frames[5].pixels == sc.frames.frames[5].pixels);
}
