#pragma once

#include <cstdint>
#include <vector>

#include "seeaction/ingest.hpp"
#include "seeaction/vision.hpp"

namespace seeaction::segment {

struct ActionFragment {
  int64_t start_index = 0;  // inclusive frame positions in the segmented sequence
  int64_t end_index = 0;
  ingest::FrameSequence frames;
  std::vector<double> mean_dissim_trace;  // one value per adjacent pair inside the fragment

  int64_t length() const { return end_index - start_index + 1; }
};

struct SegmenterConfig {
  double activity_threshold = 0.01;
  int quiet_pairs = 2;
  int min_frames = 2;
  int max_frames = 50;

  void validate() const;
};

struct Span {
  int64_t start = 0;
  int64_t end = 0;
  bool operator==(const Span&) const = default;
};

// Mean ssim dissimilarity of every adjacent pair; length M-1.
std::vector<double> dissim_series(const ingest::FrameSequence& seq, const vision::SsimConfig& cfg);

// Runs the segmentation state machine over a precomputed pair series.
// A fragment opens on the first pair above the activity threshold and closes
// after `quiet_pairs` consecutive pairs at or below it; it ends on the frame
// that closes the first quiet pair (the first stable frame after the change).
std::vector<Span> segment_series(const std::vector<double>& series, const SegmenterConfig& cfg);

std::vector<ActionFragment> segment(const ingest::FrameSequence& seq, const SegmenterConfig& scfg,
                                    const vision::SsimConfig& vcfg);

}  // namespace seeaction::segment
