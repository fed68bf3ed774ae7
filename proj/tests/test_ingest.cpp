#include <doctest.h>

#include <algorithm>
#include <set>

#include "seeaction/error.hpp"
#include "seeaction/image_io.hpp"
#include "seeaction/ingest.hpp"
#include "support.hpp"

using namespace seeaction;
using namespace seeaction::ingest;
using testing::solid;

namespace {

void write_frame_png(const std::filesystem::path& p, const Frame& f) {
  write_png(p, RasterImage{f.width, f.height, 3, f.pixels});
}

// Each frame is a distinct solid color keyed by its label.
FrameSequence labeled(const std::vector<int>& labels) {
  std::vector<Frame> frames;
  for (int l : labels) frames.push_back(solid(4, 3, static_cast<uint8_t>(l * 40), 0, 0));
  return testing::sequence(frames);
}

std::vector<int> labels_of(const FrameSequence& s) {
  std::vector<int> out;
  for (const auto& f : s.frames) out.push_back(f.pixels[0] / 40);
  return out;
}

}  // namespace

TEST_CASE("load_frames reads a numbered PNG directory with fps timestamps") {
  testing::TempDir dir;
  for (int i = 0; i < 3; ++i) write_frame_png(dir / ("frame_" + std::to_string(i) + ".png"), solid(64, 64, 10, 20, 30 + i));
  SamplingConfig cfg;
  cfg.fps = 5.0;
  FrameSequence seq = load_frames(dir.path(), cfg);
  REQUIRE(seq.size() == 3);
  CHECK(seq.frames[0].timestamp_ms == doctest::Approx(0.0));
  CHECK(seq.frames[1].timestamp_ms == doctest::Approx(200.0));
  CHECK(seq.frames[2].timestamp_ms == doctest::Approx(400.0));
  CHECK(seq.frames[2].at(5, 5, 2) == 32);
  CHECK(seq.frames[1].index == 1);
}

TEST_CASE("load_frames accepts a single frame and rejects mixed sizes") {
  testing::TempDir one;
  write_frame_png(one / "0.png", solid(8, 8, 1, 2, 3));
  CHECK(load_frames(one.path(), {}).size() == 1);

  testing::TempDir mixed;
  write_frame_png(mixed / "a.png", solid(64, 64, 0, 0, 0));
  write_frame_png(mixed / "b.png", solid(32, 32, 0, 0, 0));
  CHECK_THROWS_AS(load_frames(mixed.path(), {}), DimensionMismatchError);
  CHECK_THROWS_AS(load_frames(mixed / "missing", {}), NotFoundError);
}

TEST_CASE("frame container round trip") {
  testing::TempDir dir;
  Rng rng(4);
  FrameSequence seq = testing::sequence({testing::noise(rng, 5, 4), testing::noise(rng, 5, 4), testing::noise(rng, 5, 4)});
  write_container(dir / "clip.saf", seq);
  FrameSequence back = load_frames(dir / "clip.saf", {});
  REQUIRE(back.size() == 3);
  for (size_t i = 0; i < 3; ++i) CHECK(back.frames[i].pixels == seq.frames[i].pixels);
}

TEST_CASE("dedup_adjacent collapses runs only") {
  CHECK(labels_of(dedup_adjacent(labeled({0, 0, 1, 1, 1, 2}))) == std::vector<int>{0, 1, 2});
  CHECK(labels_of(dedup_adjacent(labeled({0, 1, 0}))) == std::vector<int>{0, 1, 0});
}

TEST_CASE("normalize_length examples") {
  SUBCASE("M = S is the identity") {
    auto seq = labeled({0, 1, 2, 3, 4, 5, 6, 5});
    CHECK(labels_of(normalize_length(seq, 8, 1)) == labels_of(seq));
  }
  SUBCASE("M = 20 down-samples with endpoints kept") {
    auto pos = normalization_positions(20, 8, 3);
    REQUIRE(pos.size() == 8);
    CHECK(pos.front() == 0);
    CHECK(pos.back() == 19);
    CHECK(std::adjacent_find(pos.begin(), pos.end(), [](size_t a, size_t b) { return a >= b; }) == pos.end());
  }
  SUBCASE("M = 2 duplicates in blocks") {
    auto out = labels_of(normalize_length(labeled({1, 2}), 8, 9));
    REQUIRE(out.size() == 8);
    CHECK(std::is_sorted(out.begin(), out.end()));
    CHECK(out.front() == 1);
    CHECK(out.back() == 2);
  }
  CHECK_THROWS_AS(normalize_length(labeled({1}), 8, 0), TooShortError);
}

TEST_CASE("property: dedup is idempotent and leaves no equal neighbours") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> labels(1 + rng.below(30));
    for (auto& l : labels) l = static_cast<int>(rng.below(3));
    auto once = dedup_adjacent(labeled(labels));
    auto twice = dedup_adjacent(once);
    CHECK(labels_of(once) == labels_of(twice));
    auto l = labels_of(once);
    CHECK(std::adjacent_find(l.begin(), l.end()) == l.end());
  }
}

TEST_CASE("property: normalize_length returns S frames, endpoints kept, indices non-decreasing") {
  Rng rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const size_t m = 2 + rng.below(40);
    const int s = 2 + static_cast<int>(rng.below(20));
    const uint64_t seed = rng.next();
    auto pos = normalization_positions(m, s, seed);
    REQUIRE(pos.size() == static_cast<size_t>(s));
    CHECK(pos.front() == 0);
    CHECK(pos.back() == m - 1);
    CHECK(std::is_sorted(pos.begin(), pos.end()));
    CHECK(pos == normalization_positions(m, s, seed));
    if (static_cast<size_t>(s) >= m) {
      // Up-sampling keeps every source frame.
      CHECK(std::set<size_t>(pos.begin(), pos.end()).size() == m);
    } else {
      CHECK(std::adjacent_find(pos.begin(), pos.end()) == pos.end());
    }
  }
}
