#include "seeaction/s2as.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "seeaction/error.hpp"
#include "seeaction/image_io.hpp"
#include "seeaction/parallel.hpp"
#include "seeaction/rng.hpp"
#include "seeaction/version.hpp"

namespace seeaction::s2as {

using json = nlohmann::json;

std::vector<std::optional<BBox>> frame_regions(const ingest::FrameSequence& frames, const vision::SsimConfig& cfg) {
  std::vector<std::optional<BBox>> out(frames.size());
  for (size_t j = 1; j < frames.size(); ++j) {
    const auto map = vision::ssim_map(frames.frames[j - 1], frames.frames[j], cfg);
    out[j] = vision::largest_region(vision::detect_change_regions(map, cfg.region_threshold));
  }
  if (frames.size() > 1) out[0] = out[1];
  return out;
}

std::optional<DetectedWidget> identify_target(const segment::ActionFragment& fragment, const StructuredAction& predicted,
                                              const std::vector<std::optional<BBox>>& regions,
                                              const WidgetDetector& detector, double min_iou) {
  const auto& frames = fragment.frames.frames;
  if (regions.size() != frames.size()) throw DimensionMismatchError("need one region slot per fragment frame");
  for (size_t j = frames.size(); j-- > 0;) {
    if (!regions[j]) continue;
    const BBox& region = *regions[j];
    std::optional<DetectedWidget> best;
    for (const DetectedWidget& d : detector.detect(frames[j])) {
      if (d.cls != predicted.widget || !d.bbox.intersects(region)) continue;
      if (min_iou > 0.0 && d.bbox.iou(region) < min_iou) continue;
      if (!best || d.confidence > best->confidence) best = d;
    }
    if (best) return best;
  }
  return std::nullopt;
}

std::optional<DetectedWidget> identify_target(const segment::ActionFragment& fragment, const StructuredAction& predicted,
                                              const BBox& region, const WidgetDetector& detector, double min_iou) {
  std::vector<std::optional<BBox>> regions(fragment.frames.size(), region);
  return identify_target(fragment, predicted, regions, detector, min_iou);
}

namespace {

ingest::Frame crop_frame(const ingest::Frame& f, const BBox& b) {
  std::vector<uint8_t> px(static_cast<size_t>(b.w) * b.h * 3);
  for (int y = 0; y < b.h; ++y)
    for (int x = 0; x < b.w; ++x)
      for (int c = 0; c < 3; ++c) px[(static_cast<size_t>(y) * b.w + x) * 3 + c] = f.at(b.x + x, b.y + y, c);
  return ingest::make_frame(b.w, b.h, std::move(px));
}

}  // namespace

ActionScript build_script(const ingest::FrameSequence& source, const ActionPredictor& predictor,
                          const WidgetDetector& detector, const S2asConfig& cfg) {
  cfg.segmenter.validate();
  cfg.ssim.validate();
  auto fragments = segment::segment(source, cfg.segmenter, cfg.ssim);
  ActionScript script;
  script.source_id = source.source_id;
  script.tool_version = std::string(kToolVersion);
  script.actions.resize(fragments.size());
  if (!cfg.crop_dir.empty()) std::filesystem::create_directories(cfg.crop_dir);

  parallel_for(fragments.size(), cfg.jobs, [&](size_t i) {
    const segment::ActionFragment& raw = fragments[i];
    segment::ActionFragment frag = raw;
    ingest::FrameSequence unique = ingest::dedup_adjacent(raw.frames);
    if (unique.size() >= 2) frag.frames = std::move(unique);
    ingest::FrameSequence norm = ingest::normalize_length(frag.frames, cfg.frames, derive_seed(cfg.seed, i));
    model::ModelInput input = model::make_input(vision::build_streams(norm, cfg.ssim, cfg.side));

    CompleteAction& a = script.actions[i];
    a.span = {raw.start_index, raw.end_index};
    auto predicted = predictor.predict(input, frag, i);
    if (!predicted) {
      a.parsed = false;
      return;
    }
    a.structured = *predicted;
    a.target = identify_target(frag, *predicted, frame_regions(frag.frames, cfg.ssim), detector, cfg.min_iou);
    if (a.target && !cfg.crop_dir.empty()) {
      char name[32];
      std::snprintf(name, sizeof name, "%04zu.png", i);
      ingest::Frame c = crop_frame(frag.frames.frames.back(), a.target->bbox);
      write_png(cfg.crop_dir / name, RasterImage{c.width, c.height, 3, c.pixels});
      a.crop_path = name;
    }
  });
  return script;
}

std::string script_to_jsonl(const ActionScript& script) {
  std::ostringstream out;
  json head;
  head["source_id"] = script.source_id;
  head["tool_version"] = script.tool_version;
  head["provenance"] = json::parse(script.provenance);
  out << head.dump() << "\n";
  for (size_t i = 0; i < script.actions.size(); ++i) {
    const CompleteAction& a = script.actions[i];
    json j;
    j["index"] = i;
    j["command"] = std::string(command_name(a.structured.command));
    j["widget"] = std::string(widget_name(a.structured.widget));
    j["location"] = join_words(a.structured.location);
    if (!a.parsed) j["malformed"] = true;
    if (a.target) {
      j["bbox"] = {a.target->bbox.x, a.target->bbox.y, a.target->bbox.w, a.target->bbox.h};
      j["confidence"] = a.target->confidence;
      if (a.target->text) j["text"] = *a.target->text;
    }
    if (a.crop_path) j["crop_path"] = *a.crop_path;
    j["span"] = {a.span.start, a.span.end};
    out << j.dump() << "\n";
  }
  return out.str();
}

ActionScript script_from_jsonl(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  ActionScript s;
  bool header = false;
  try {
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      json j = json::parse(line);
      if (!header) {
        if (!j.contains("tool_version")) throw FormatError("script is missing its header line");
        s.source_id = j.value("source_id", "");
        s.tool_version = j.at("tool_version").get<std::string>();
        s.provenance = j.contains("provenance") ? j["provenance"].dump() : "{}";
        header = true;
        continue;
      }
      CompleteAction a;
      auto c = parse_command(j.at("command").get<std::string>());
      auto w = parse_widget(j.at("widget").get<std::string>());
      if (!c || !w) throw FormatError("unknown class in script line");
      a.structured = {*c, *w, split_words(j.at("location").get<std::string>())};
      a.parsed = !j.value("malformed", false);
      if (j.contains("bbox")) {
        const auto& b = j["bbox"];
        DetectedWidget d;
        d.bbox = {b.at(0).get<int>(), b.at(1).get<int>(), b.at(2).get<int>(), b.at(3).get<int>()};
        d.cls = *w;
        d.confidence = j.value("confidence", 0.0);
        if (j.contains("text")) d.text = j["text"].get<std::string>();
        a.target = d;
      }
      if (j.contains("crop_path")) a.crop_path = j["crop_path"].get<std::string>();
      a.span = {j.at("span").at(0).get<int64_t>(), j.at("span").at(1).get<int64_t>()};
      s.actions.push_back(std::move(a));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad script: ") + e.what());
  }
  if (!header) throw FormatError("empty script");
  return s;
}

std::string script_to_text(const ActionScript& script) {
  std::ostringstream out;
  for (const CompleteAction& a : script.actions) {
    if (!a.parsed) {
      out << "[malformed] [" << join_words(a.structured.location) << "]\n";
      continue;
    }
    out << "[" << command_name(a.structured.command) << "] [" << widget_name(a.structured.widget) << "] ";
    if (a.crop_path) {
      out << "[crop:" << std::filesystem::path(*a.crop_path).filename().string() << "] ";
    } else if (!a.target) {
      out << "[crop:none] ";
    }
    out << "[" << join_words(a.structured.location) << "]\n";
  }
  return out.str();
}

}  // namespace seeaction::s2as
