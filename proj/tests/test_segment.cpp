#include <doctest.h>

#include <numeric>

#include "oracles.hpp"
#include "seeaction/error.hpp"
#include "seeaction/segment.hpp"
#include "support.hpp"

using namespace seeaction;
using namespace seeaction::segment;
using testing::solid;

namespace {

// Straight reading of the rules: a burst opens on an active pair, absorbs
// later active pairs until `quiet` calm pairs in a row, and ends two frames
// after its last active pair. Overlaps are trimmed, then short spans dropped.
std::vector<Span> reference_segments(const std::vector<double>& s, double t, int quiet, int min_frames) {
  const int64_t n = static_cast<int64_t>(s.size());
  std::vector<Span> raw;
  int64_t i = 0;
  while (i < n) {
    if (!(s[i] > t)) {
      ++i;
      continue;
    }
    int64_t last = i, j = i + 1;
    int calm = 0;
    while (j < n && calm < quiet) {
      if (s[j] > t) {
        last = j;
        calm = 0;
      } else {
        ++calm;
      }
      ++j;
    }
    raw.push_back({i, std::min(last + 2, n)});
    i = j;
  }
  for (size_t k = 1; k < raw.size(); ++k)
    if (raw[k].start <= raw[k - 1].end) raw[k - 1].end = raw[k].start - 1;
  std::vector<Span> out;
  for (const Span& sp : raw)
    if (sp.end - sp.start + 1 >= min_frames) out.push_back(sp);
  return out;
}

}  // namespace

TEST_CASE("dissim_series shape and values") {
  auto grey = solid(24, 16, 128, 128, 128);
  auto seq = testing::sequence(std::vector<ingest::Frame>(6, grey));
  auto s = dissim_series(seq, {});
  CHECK(s.size() == 5);
  for (double v : s) CHECK(v == 0.0);

  auto white = solid(24, 16, 255, 255, 255);
  auto flash = testing::sequence({grey, grey, grey, white, white, white});
  auto f = dissim_series(flash, {});
  auto ref = oracle::ssim_dissim(grey, white, {});
  const double mean = std::accumulate(ref.begin(), ref.end(), 0.0) / static_cast<double>(ref.size());
  for (size_t k = 0; k < f.size(); ++k) {
    if (k == 2) {
      CHECK(f[k] == doctest::Approx(mean).epsilon(1e-6));
    } else {
      CHECK(f[k] == 0.0);
    }
  }
}

TEST_CASE("segment_series hand-traced example") {
  SegmenterConfig cfg;
  auto spans = segment_series({0, 0, 0.5, 0.6, 0.1, 0, 0, 0}, cfg);
  REQUIRE(spans.size() == 1);
  CHECK(spans[0] == Span{2, 6});
  CHECK(segment_series(std::vector<double>(10, 0.0), cfg).empty());

  auto two = segment_series({0.3, 0.2, 0, 0, 0, 0.4, 0, 0}, cfg);
  REQUIRE(two.size() == 2);
  CHECK(two[0].end < two[1].start);
  CHECK(two == reference_segments({0.3, 0.2, 0, 0, 0, 0.4, 0, 0}, 0.01, 2, 2));
}

TEST_CASE("property: segment_series agrees with the reference rules") {
  Rng rng(91);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> s(1 + rng.below(60));
    const double p = rng.uniform(0.1, 0.6);
    for (auto& v : s) v = rng.chance(p) ? rng.uniform(0.011, 0.5) : (rng.chance(0.5) ? 0.0 : rng.uniform(0.0, 0.01));
    SegmenterConfig cfg;
    cfg.quiet_pairs = 1 + static_cast<int>(rng.below(3));
    cfg.min_frames = 2 + static_cast<int>(rng.below(3));
    cfg.max_frames = 100000;
    CHECK(segment_series(s, cfg) == reference_segments(s, cfg.activity_threshold, cfg.quiet_pairs, cfg.min_frames));
  }
}

TEST_CASE("property: fragments are ordered, disjoint, and within length bounds") {
  Rng rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> s(1 + rng.below(80));
    for (auto& v : s) v = rng.chance(0.5) ? rng.uniform(0.02, 0.4) : 0.0;
    SegmenterConfig cfg;
    cfg.max_frames = 2 + static_cast<int>(rng.below(12));
    cfg.quiet_pairs = 1 + static_cast<int>(rng.below(3));
    auto spans = segment_series(s, cfg);
    for (size_t k = 0; k < spans.size(); ++k) {
      const auto len = spans[k].end - spans[k].start + 1;
      CHECK(len >= cfg.min_frames);
      CHECK(len <= cfg.max_frames);
      CHECK(spans[k].start >= 0);
      CHECK(spans[k].end <= static_cast<int64_t>(s.size()));
      if (k > 0) CHECK(spans[k - 1].end < spans[k].start);
    }
  }
}

TEST_CASE("segment returns the frames of each span") {
  auto grey = solid(20, 20, 128, 128, 128);
  std::vector<ingest::Frame> frames(4, grey);
  for (int v : {60, 90, 20}) {
    auto f = grey;
    testing::fill_rect(f, 4, 4, 8, 8, static_cast<uint8_t>(v));
    frames.push_back(f);
  }
  for (int k = 0; k < 5; ++k) frames.push_back(frames.back());
  auto seq = testing::sequence(frames);
  auto frags = segment::segment(seq, {}, {});
  REQUIRE(frags.size() == 1);
  const auto& f = frags[0];
  CHECK(f.start_index == 3);
  CHECK(f.frames.size() == static_cast<size_t>(f.length()));
  CHECK(f.mean_dissim_trace.size() == static_cast<size_t>(f.length() - 1));
  for (int64_t k = 0; k < f.length(); ++k) CHECK(f.frames.frames[k].index == f.start_index + k);
  CHECK(segment::segment(testing::sequence(std::vector<ingest::Frame>(5, grey)), {}, {}).empty());
}

TEST_CASE("segmenter config validation") {
  SegmenterConfig cfg;
  cfg.min_frames = 1;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = {};
  cfg.activity_threshold = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}
