#include <doctest.h>

#include <algorithm>

#include "oracles.hpp"
#include "seeaction/error.hpp"
#include "seeaction/vision.hpp"
#include "support.hpp"

using namespace seeaction;
using namespace seeaction::vision;
using testing::solid;

namespace {

SimilarityMap binary_map(const std::vector<uint8_t>& on, int w, int h) {
  SimilarityMap m{w, h, std::vector<float>(on.size()), {0, 1}};
  for (size_t i = 0; i < on.size(); ++i) m.values[i] = on[i] ? 1.0f : 0.0f;
  return m;
}

}  // namespace

TEST_CASE("ssim_map of identical frames is all zero") {
  Rng rng(1);
  auto a = testing::noise(rng, 16, 12);
  auto m = ssim_map(a, a, {});
  CHECK(std::all_of(m.values.begin(), m.values.end(), [](float v) { return v == 0.0f; }));
}

TEST_CASE("ssim_map of black against white matches the closed form") {
  SsimConfig cfg;
  auto m = ssim_map(solid(20, 20, 0, 0, 0), solid(20, 20, 255, 255, 255), cfg);
  // Constant windows: sigma terms vanish, SSIM = C1 / (255^2 + C1).
  const double white = 0.299 * 255 + 0.587 * 255 + 0.114 * 255;
  const double ssim = cfg.c1 / (white * white + cfg.c1);
  const double expected = (1.0 - ssim) / 2.0;
  for (float v : m.values) CHECK(v == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("ssim_map change stays inside the dilated block") {
  auto a = solid(40, 40, 200, 200, 200);
  auto b = a;
  testing::fill_rect(b, 15, 12, 10, 10, 30);
  auto m = ssim_map(a, b, {});
  const int r = 3;
  bool inside_nonzero = false;
  for (int y = 0; y < 40; ++y)
    for (int x = 0; x < 40; ++x) {
      const bool in = x >= 15 - r && x < 25 + r && y >= 12 - r && y < 22 + r;
      if (!in) CHECK(m.at(x, y) == 0.0f);
      if (in && m.at(x, y) > 0.0f) inside_nonzero = true;
    }
  CHECK(inside_nonzero);
  auto ref = oracle::ssim_dissim(a, b, {});
  for (size_t i = 0; i < ref.size(); ++i) CHECK(m.values[i] == doctest::Approx(ref[i]).epsilon(1e-6));
}

TEST_CASE("ssim_map matches the brute-force window oracle on random pairs") {
  Rng rng(77);
  SsimConfig cfg;
  for (int trial = 0; trial < 5; ++trial) {
    auto a = testing::noise(rng, 32, 32);
    auto b = testing::noise(rng, 32, 32);
    auto m = ssim_map(a, b, cfg);
    auto ref = oracle::ssim_dissim(a, b, cfg);
    double worst = 0;
    for (size_t i = 0; i < ref.size(); ++i) worst = std::max(worst, std::abs(m.values[i] - ref[i]));
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("property: ssim_map is symmetric") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int w = 3 + static_cast<int>(rng.below(20)), h = 3 + static_cast<int>(rng.below(20));
    auto a = testing::noise(rng, w, h);
    auto b = testing::noise(rng, w, h);
    auto ab = ssim_map(a, b, {});
    auto ba = ssim_map(b, a, {});
    for (size_t i = 0; i < ab.values.size(); ++i) CHECK(ab.values[i] == doctest::Approx(ba.values[i]).epsilon(1e-6));
  }
}

TEST_CASE("ssim_map rejects mismatched sizes") {
  CHECK_THROWS_AS(ssim_map(solid(4, 4, 0, 0, 0), solid(5, 4, 0, 0, 0), {}), DimensionMismatchError);
}

TEST_CASE("detect_change_regions examples") {
  CHECK(detect_change_regions(binary_map(std::vector<uint8_t>(100, 0), 10, 10), 0.5).empty());

  std::vector<uint8_t> on(20 * 20, 0);
  for (int y = 2; y < 5; ++y)
    for (int x = 3; x < 7; ++x) on[y * 20 + x] = 1;
  for (int y = 10; y < 18; ++y)
    for (int x = 12; x < 14; ++x) on[y * 20 + x] = 1;
  auto boxes = oracle::sorted(detect_change_regions(binary_map(on, 20, 20), 0.5));
  REQUIRE(boxes.size() == 2);
  CHECK(boxes[0] == BBox{3, 2, 4, 3});
  CHECK(boxes[1] == BBox{12, 10, 2, 8});

  std::vector<uint8_t> edge(10 * 10, 0);
  for (int y = 0; y < 4; ++y)
    for (int x = 7; x < 10; ++x) edge[y * 10 + x] = 1;
  auto e = detect_change_regions(binary_map(edge, 10, 10), 0.5);
  REQUIRE(e.size() == 1);
  CHECK(e[0] == BBox{7, 0, 3, 4});
}

TEST_CASE("property: change regions equal the union-find component oracle") {
  Rng rng(303);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = 1 + static_cast<int>(rng.below(32)), h = 1 + static_cast<int>(rng.below(32));
    const double density = rng.uniform(0.05, 0.6);
    std::vector<uint8_t> on(static_cast<size_t>(w) * h);
    for (auto& v : on) v = rng.chance(density) ? 1 : 0;
    auto got = oracle::sorted(detect_change_regions(binary_map(on, w, h), 0.5));
    CHECK(got == oracle::components(on, w, h));
    for (const BBox& b : got) {
      CHECK(b.x >= 0);
      CHECK(b.y >= 0);
      CHECK(b.w >= 1);
      CHECK(b.h >= 1);
      CHECK(b.right() <= w);
      CHECK(b.bottom() <= h);
    }
  }
}

TEST_CASE("property: region boxes stay in bounds on arbitrary float maps") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = 1 + static_cast<int>(rng.below(40)), h = 1 + static_cast<int>(rng.below(40));
    SimilarityMap m{w, h, std::vector<float>(static_cast<size_t>(w) * h), {0, 1}};
    for (auto& v : m.values) v = static_cast<float>(rng.uniform());
    for (const BBox& b : detect_change_regions(m, rng.uniform())) {
      CHECK(b.x >= 0);
      CHECK(b.y >= 0);
      CHECK(b.right() <= w);
      CHECK(b.bottom() <= h);
    }
  }
}

TEST_CASE("largest_region picks the biggest, ties to the top-left") {
  CHECK_FALSE(largest_region({}).has_value());
  CHECK(*largest_region({{0, 0, 10, 10}, {50, 50, 5, 5}}) == BBox{0, 0, 10, 10});
  CHECK(*largest_region({{0, 20, 10, 10}, {0, 10, 10, 10}}) == BBox{0, 10, 10, 10});
}

TEST_CASE("build_streams on identical frames uses full-frame crops and zero maps") {
  auto f = solid(30, 20, 90, 120, 150);
  auto seq = testing::sequence(std::vector<ingest::Frame>(8, f));
  auto b = build_streams(seq, {}, 16);
  REQUIRE(b.originals.size() == 8);
  REQUIRE(b.change_crops.size() == 8);
  REQUIRE(b.sim_maps.size() == 8);
  for (const auto& m : b.sim_maps) {
    CHECK(m.width == 16);
    CHECK(m.channels == 1);
    CHECK(std::all_of(m.data.begin(), m.data.end(), [](float v) { return v == 0.0f; }));
  }
  auto full = resize_bilinear(to_float(f), 16, 16);
  CHECK(b.change_crops[0].data == full.data);
  for (const auto& o : b.originals) CHECK(o.channels == 3);
}

TEST_CASE("build_streams crops the changed block within the window radius") {
  auto a = solid(60, 40, 220, 220, 220);
  auto b = a;
  testing::fill_rect(b, 20, 10, 14, 8, 40);
  auto bundle = build_streams(testing::sequence({a, b}), {}, 32);
  REQUIRE(bundle.regions[0].has_value());
  // Pixel-diff bounding box of the change.
  int x0 = 60, y0 = 40, x1 = -1, y1 = -1;
  for (int y = 0; y < 40; ++y)
    for (int x = 0; x < 60; ++x)
      if (a.at(x, y, 0) != b.at(x, y, 0)) {
        x0 = std::min(x0, x), y0 = std::min(y0, y), x1 = std::max(x1, x), y1 = std::max(y1, y);
      }
  const BBox r = *bundle.regions[0];
  const int rad = SsimConfig{}.window / 2;
  CHECK(r.x >= x0 - rad);
  CHECK(r.x <= x0);
  CHECK(r.y >= y0 - rad);
  CHECK(r.y <= y0);
  CHECK(r.right() - 1 <= x1 + rad);
  CHECK(r.right() - 1 >= x1);
  CHECK(r.bottom() - 1 <= y1 + rad);
  CHECK(r.bottom() - 1 >= y1);
}

TEST_CASE("resize_bilinear shape and constant preservation") {
  auto img = to_float(solid(100, 100, 10, 20, 30));
  auto r = resize_bilinear(img, 64, 64);
  CHECK(r.width == 64);
  CHECK(r.height == 64);
  CHECK(r.at(17, 40, 1) == doctest::Approx(img.at(0, 0, 1)));
}
