#include "seeaction/segment.hpp"

#include <algorithm>

#include "seeaction/error.hpp"

namespace seeaction::segment {

void SegmenterConfig::validate() const {
  if (activity_threshold < 0.0 || activity_threshold > 1.0) throw ValidationError("activity_threshold must be in [0,1]");
  if (quiet_pairs < 1) throw ValidationError("quiet_pairs must be >= 1");
  if (min_frames < 2) throw ValidationError("min_frames must be >= 2");
  if (max_frames < min_frames) throw ValidationError("max_frames must be >= min_frames");
}

std::vector<double> dissim_series(const ingest::FrameSequence& seq, const vision::SsimConfig& cfg) {
  if (seq.size() < 2) throw TooShortError("dissim_series needs at least 2 frames");
  std::vector<double> out(seq.size() - 1);
  for (size_t i = 0; i + 1 < seq.size(); ++i) out[i] = vision::ssim_map(seq.frames[i], seq.frames[i + 1], cfg).mean();
  return out;
}

std::vector<Span> segment_series(const std::vector<double>& series, const SegmenterConfig& cfg) {
  cfg.validate();
  const int64_t last_frame = static_cast<int64_t>(series.size());
  std::vector<Span> spans;
  bool active = false;
  int64_t start = 0;
  int64_t last_active = 0;
  int quiet = 0;

  auto close = [&](int64_t end) {
    end = std::min({end, last_frame, start + cfg.max_frames - 1});
    if (!spans.empty() && start <= spans.back().end) spans.back().end = start - 1;
    if (!spans.empty() && spans.back().end - spans.back().start + 1 < cfg.min_frames) spans.pop_back();
    if (end - start + 1 >= cfg.min_frames) spans.push_back(Span{start, end});
    active = false;
  };

  for (int64_t i = 0; i < static_cast<int64_t>(series.size()); ++i) {
    if (series[i] > cfg.activity_threshold) {
      if (!active) {
        active = true;
        start = i;
      } else if (i + 2 - start + 1 > cfg.max_frames) {
        // Ending two frames after pair i would pass max_frames: cut at frame i.
        close(i);
        active = true;
        start = i;
      }
      last_active = i;
      quiet = 0;
    } else if (active) {
      if (++quiet == cfg.quiet_pairs) close(last_active + 2);
    }
  }
  if (active) close(last_active + 2);
  return spans;
}

std::vector<ActionFragment> segment(const ingest::FrameSequence& seq, const SegmenterConfig& scfg,
                                    const vision::SsimConfig& vcfg) {
  scfg.validate();
  if (seq.size() < 2) throw TooShortError("segment needs at least 2 frames");
  const std::vector<double> series = dissim_series(seq, vcfg);
  std::vector<ActionFragment> fragments;
  for (const Span& span : segment_series(series, scfg)) {
    ActionFragment frag;
    frag.start_index = span.start;
    frag.end_index = span.end;
    frag.frames.source_id = seq.source_id;
    frag.frames.frames.assign(seq.frames.begin() + span.start, seq.frames.begin() + span.end + 1);
    frag.mean_dissim_trace.assign(series.begin() + span.start, series.begin() + span.end);
    fragments.push_back(std::move(frag));
  }
  return fragments;
}

}  // namespace seeaction::segment
