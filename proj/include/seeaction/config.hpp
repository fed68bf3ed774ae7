#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "seeaction/ingest.hpp"
#include "seeaction/segment.hpp"
#include "seeaction/trainer.hpp"
#include "seeaction/vision.hpp"

namespace seeaction::config {

// Flat "section.key = value" text; '#' starts a comment.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text);
  static KeyValueConfig load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  // "key=value"
  void set_assignment(const std::string& assignment);
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::string& get(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

struct RunConfig {
  ingest::SamplingConfig sampling;
  vision::SsimConfig ssim;
  segment::SegmenterConfig segmenter;
  train::TrainConfig train;
  int side = 64;
  uint64_t seed = 0;
  int jobs = 1;

  // Applies every key; unknown keys and unparsable values are validation errors.
  void apply(const KeyValueConfig& kv);
  void validate() const;
  // Every setting as flat keys, the same names apply() accepts.
  KeyValueConfig to_kv() const;
  // Settings, seed, tool version and the producing subcommand.
  nlohmann::json provenance(const std::string& command) const;
};

}  // namespace seeaction::config
