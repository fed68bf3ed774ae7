#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "seeaction/ingest.hpp"
#include "seeaction/model.hpp"
#include "seeaction/synth.hpp"
#include "seeaction/taxonomy.hpp"
#include "seeaction/vision.hpp"
#include "seeaction/vocabulary.hpp"

namespace seeaction::dataset {

struct Sample {
  std::string id;
  StructuredAction label;
  model::ModelInput input;
};

struct PrepareConfig {
  int frames = 8;  // normalized sequence length S
  int side = 64;
  uint64_t seed = 0;
  vision::SsimConfig ssim;
  int jobs = 1;
};

// Dedup -> normalize to S frames -> three streams. The normalization seed is
// derived from (cfg.seed, index) so every sample is reproducible on its own.
Sample prepare_sample(const ingest::FrameSequence& fragment, const StructuredAction& label, const std::string& id,
                      size_t index, const PrepareConfig& cfg);

// Reads a manifest and prepares every entry. Frame directories are resolved
// relative to the manifest; start/end select the fragment's frames.
std::vector<Sample> load_samples(const std::filesystem::path& manifest, const PrepareConfig& cfg);

// Same as load_samples but straight from in-memory fragments.
std::vector<Sample> prepare_samples(const std::vector<synth::GeneratedFragment>& fragments, const PrepareConfig& cfg);

model::Vocabulary location_vocabulary(const std::vector<Sample>& samples, const std::vector<size_t>& indices);

}  // namespace seeaction::dataset
