#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "seeaction/detector.hpp"
#include "seeaction/ingest.hpp"
#include "seeaction/model.hpp"
#include "seeaction/segment.hpp"
#include "seeaction/vision.hpp"

namespace seeaction::s2as {

struct CompleteAction {
  StructuredAction structured;
  // False when the model's sentence did not parse; structured is then left
  // at its defaults and there is no target.
  bool parsed = true;
  std::optional<DetectedWidget> target;
  std::optional<std::string> crop_path;
  segment::Span span;

  bool operator==(const CompleteAction&) const = default;
};

struct ActionScript {
  std::vector<CompleteAction> actions;
  std::string source_id;
  std::string tool_version;
  std::string provenance = "{}";  // JSON object

  bool operator==(const ActionScript&) const = default;
};

// Change region for every frame of a sequence: frame j gets the largest
// region of pair (j-1, j); frame 0 borrows pair (0, 1).
std::vector<std::optional<BBox>> frame_regions(const ingest::FrameSequence& frames, const vision::SsimConfig& cfg);

// Scans frames last to first; on each, keeps detections whose box intersects
// the region (and reaches min_iou with it, when > 0) and whose class equals
// predicted.widget. Returns the highest-confidence one on the first frame
// that has any.
std::optional<DetectedWidget> identify_target(const segment::ActionFragment& fragment, const StructuredAction& predicted,
                                              const BBox& region, const WidgetDetector& detector, double min_iou = 0.0);

// Same rule with one region per fragment frame; frames without a region are skipped.
std::optional<DetectedWidget> identify_target(const segment::ActionFragment& fragment, const StructuredAction& predicted,
                                              const std::vector<std::optional<BBox>>& regions,
                                              const WidgetDetector& detector, double min_iou = 0.0);

// Maps one fragment's model input to a structured action (nullopt: malformed).
class ActionPredictor {
 public:
  virtual ~ActionPredictor() = default;
  virtual std::optional<StructuredAction> predict(const model::ModelInput& input, const segment::ActionFragment& fragment,
                                                  size_t fragment_index) const = 0;
};

class ModelPredictor : public ActionPredictor {
 public:
  explicit ModelPredictor(const model::SeeActionModel& m) : model_(m) {}
  std::optional<StructuredAction> predict(const model::ModelInput& input, const segment::ActionFragment&,
                                          size_t) const override {
    return model_.predict(input).action;
  }

 private:
  const model::SeeActionModel& model_;
};

class FunctionPredictor : public ActionPredictor {
 public:
  using Fn = std::function<std::optional<StructuredAction>(const segment::ActionFragment&, size_t)>;
  explicit FunctionPredictor(Fn fn) : fn_(std::move(fn)) {}
  std::optional<StructuredAction> predict(const model::ModelInput&, const segment::ActionFragment& fragment,
                                          size_t index) const override {
    return fn_(fragment, index);
  }

 private:
  Fn fn_;
};

struct S2asConfig {
  segment::SegmenterConfig segmenter;
  vision::SsimConfig ssim;
  int frames = 8;
  int side = 64;
  uint64_t seed = 0;
  double min_iou = 0.0;
  std::filesystem::path crop_dir;  // empty: no crops written
  int jobs = 1;
};

// Segments the source, predicts each fragment, identifies its target and
// crops it from the fragment's last frame.
ActionScript build_script(const ingest::FrameSequence& source, const ActionPredictor& predictor,
                          const WidgetDetector& detector, const S2asConfig& cfg);

// First line carries source id, tool version and provenance; then one action per line.
std::string script_to_jsonl(const ActionScript& script);
ActionScript script_from_jsonl(const std::string& text);
// `[click] [Button] [crop:0003.png] [in popup]`
std::string script_to_text(const ActionScript& script);

}  // namespace seeaction::s2as
