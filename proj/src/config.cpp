#include "seeaction/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "seeaction/error.hpp"
#include "seeaction/version.hpp"

namespace seeaction::config {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ValidationError("bad integer for " + key + ": " + v);
  return out;
}

uint64_t to_u64(const std::string& key, const std::string& v) {
  uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ValidationError("bad unsigned integer for " + key + ": " + v);
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ValidationError("bad number for " + key + ": " + v);
  }
}

std::string fmt(double d) {
  std::ostringstream o;
  o.precision(17);
  o << d;
  return o.str();
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
  KeyValueConfig kv;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError("config line " + std::to_string(n) + " has no '='");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ValidationError("config line " + std::to_string(n) + " has an empty key");
    kv.values_[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void KeyValueConfig::set_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ValidationError("expected key=value, got " + assignment);
  values_[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

const std::string& KeyValueConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw NotFoundError("missing config key " + key);
  return it->second;
}

void RunConfig::apply(const KeyValueConfig& kv) {
  for (const auto& [k, v] : kv.values()) {
    if (k == "run.seed") {
      seed = to_u64(k, v);
    } else if (k == "run.jobs") {
      jobs = to_int(k, v);
    } else if (k == "model.side") {
      side = to_int(k, v);
    } else if (k == "sampling.fps") {
      sampling.fps = to_double(k, v);
    } else if (k == "sampling.target_length") {
      sampling.target_length = to_int(k, v);
    } else if (k == "ssim.window") {
      ssim.window = to_int(k, v);
    } else if (k == "ssim.c1") {
      ssim.c1 = to_double(k, v);
    } else if (k == "ssim.c2") {
      ssim.c2 = to_double(k, v);
    } else if (k == "ssim.region_threshold") {
      ssim.region_threshold = to_double(k, v);
    } else if (k == "segmenter.activity_threshold") {
      segmenter.activity_threshold = to_double(k, v);
    } else if (k == "segmenter.quiet_pairs") {
      segmenter.quiet_pairs = to_int(k, v);
    } else if (k == "segmenter.min_frames") {
      segmenter.min_frames = to_int(k, v);
    } else if (k == "segmenter.max_frames") {
      segmenter.max_frames = to_int(k, v);
    } else if (k == "train.mode") {
      auto m = model::parse_mode(v);
      if (!m) throw ValidationError("unknown train.mode: " + v);
      train.mode = *m;
    } else if (k == "train.streams") {
      train.streams = model::parse_stream_list(v);
    } else if (k == "train.epochs") {
      train.epochs = to_int(k, v);
    } else if (k == "train.folds") {
      train.folds = to_int(k, v);
    } else if (k == "train.split") {
      train.split = to_double(k, v);
    } else if (k == "train.max_len") {
      train.max_len = to_int(k, v);
    } else if (k == "train.batch_size") {
      train.batch_size = to_int(k, v);
    } else if (k == "train.learning_rate") {
      train.learning_rate = to_double(k, v);
    } else if (k == "train.embed_dim") {
      train.embed_dim = to_int(k, v);
    } else if (k == "train.head_hidden") {
      train.head_hidden = to_int(k, v);
    } else if (k == "train.channels") {
      train.channels.clear();
      std::stringstream ss(v);
      std::string item;
      while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) train.channels.push_back(to_int(k, item));
      }
    } else {
      throw ValidationError("unknown config key: " + k);
    }
  }
  train.seed = seed;
  train.side = side;
  train.frames = sampling.target_length;
  sampling.seed = seed;
}

void RunConfig::validate() const {
  sampling.validate();
  ssim.validate();
  segmenter.validate();
  train.validate();
  if (jobs < 1) throw ValidationError("run.jobs must be >= 1");
}

KeyValueConfig RunConfig::to_kv() const {
  KeyValueConfig kv;
  kv.set("run.seed", std::to_string(seed));
  kv.set("run.jobs", std::to_string(jobs));
  kv.set("model.side", std::to_string(side));
  kv.set("sampling.fps", fmt(sampling.fps));
  kv.set("sampling.target_length", std::to_string(sampling.target_length));
  kv.set("ssim.window", std::to_string(ssim.window));
  kv.set("ssim.c1", fmt(ssim.c1));
  kv.set("ssim.c2", fmt(ssim.c2));
  kv.set("ssim.region_threshold", fmt(ssim.region_threshold));
  kv.set("segmenter.activity_threshold", fmt(segmenter.activity_threshold));
  kv.set("segmenter.quiet_pairs", std::to_string(segmenter.quiet_pairs));
  kv.set("segmenter.min_frames", std::to_string(segmenter.min_frames));
  kv.set("segmenter.max_frames", std::to_string(segmenter.max_frames));
  kv.set("train.mode", std::string(model::mode_name(train.mode)));
  kv.set("train.streams", model::stream_list_string(train.streams));
  kv.set("train.epochs", std::to_string(train.epochs));
  kv.set("train.folds", std::to_string(train.folds));
  kv.set("train.split", fmt(train.split));
  kv.set("train.max_len", std::to_string(train.max_len));
  kv.set("train.batch_size", std::to_string(train.batch_size));
  kv.set("train.learning_rate", fmt(train.learning_rate));
  kv.set("train.embed_dim", std::to_string(train.embed_dim));
  kv.set("train.head_hidden", std::to_string(train.head_hidden));
  std::string ch;
  for (int c : train.channels) ch += (ch.empty() ? "" : ",") + std::to_string(c);
  kv.set("train.channels", ch);
  return kv;
}

nlohmann::json RunConfig::provenance(const std::string& command) const {
  nlohmann::json j;
  j["tool"] = "seeaction";
  j["version"] = std::string(kToolVersion);
  j["command"] = command;
  j["seed"] = seed;
  nlohmann::json cfg = nlohmann::json::object();
  const KeyValueConfig kv = to_kv();
  for (const auto& [k, v] : kv.values()) cfg[k] = v;
  j["config"] = cfg;
  return j;
}

}  // namespace seeaction::config
