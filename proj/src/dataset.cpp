#include "seeaction/dataset.hpp"

#include "seeaction/error.hpp"
#include "seeaction/parallel.hpp"
#include "seeaction/rng.hpp"

namespace seeaction::dataset {

Sample prepare_sample(const ingest::FrameSequence& fragment, const StructuredAction& label, const std::string& id,
                      size_t index, const PrepareConfig& cfg) {
  ingest::FrameSequence unique = ingest::dedup_adjacent(fragment);
  if (unique.size() < 2) throw TooShortError("fragment " + id + " has fewer than 2 distinct frames");
  ingest::FrameSequence norm = ingest::normalize_length(unique, cfg.frames, derive_seed(cfg.seed, index));
  vision::StreamBundle bundle = vision::build_streams(norm, cfg.ssim, cfg.side);
  return {id, label, model::make_input(bundle)};
}

std::vector<Sample> load_samples(const std::filesystem::path& manifest, const PrepareConfig& cfg) {
  const auto entries = synth::read_manifest(manifest);
  const auto root = manifest.parent_path();
  std::vector<Sample> out(entries.size());
  parallel_for(entries.size(), cfg.jobs, [&](size_t i) {
    const auto& e = entries[i];
    ingest::FrameSequence all = ingest::load_frames(root / e.frame_dir, {});
    const int64_t last = e.end < 0 ? static_cast<int64_t>(all.size()) - 1 : e.end;
    if (e.start < 0 || last >= static_cast<int64_t>(all.size()) || e.start > last)
      throw ValidationError("manifest span out of range for " + e.id);
    ingest::FrameSequence frag;
    frag.source_id = e.id;
    for (int64_t k = e.start; k <= last; ++k) frag.frames.push_back(std::move(all.frames[static_cast<size_t>(k)]));
    out[i] = prepare_sample(frag, e.label, e.id, i, cfg);
  });
  return out;
}

std::vector<Sample> prepare_samples(const std::vector<synth::GeneratedFragment>& fragments, const PrepareConfig& cfg) {
  std::vector<Sample> out(fragments.size());
  parallel_for(fragments.size(), cfg.jobs, [&](size_t i) {
    const auto& g = fragments[i];
    out[i] = prepare_sample(g.frames, g.entry.label, g.entry.id, i, cfg);
  });
  return out;
}

model::Vocabulary location_vocabulary(const std::vector<Sample>& samples, const std::vector<size_t>& indices) {
  std::vector<std::vector<std::string>> phrases;
  for (size_t i : indices) phrases.push_back(samples.at(i).label.location);
  return model::Vocabulary::build(phrases);
}

}  // namespace seeaction::dataset
