#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "seeaction/ingest.hpp"
#include "seeaction/taxonomy.hpp"
#include "seeaction/vision.hpp"

namespace seeaction::s2as {

using vision::BBox;

struct DetectedWidget {
  BBox bbox;
  WidgetClass cls = WidgetClass::Others;
  double confidence = 0.0;
  std::optional<std::string> text;

  bool operator==(const DetectedWidget&) const = default;
};

// Pure per frame; implementations must be safe to share read-only.
class WidgetDetector {
 public:
  virtual ~WidgetDetector() = default;
  virtual std::vector<DetectedWidget> detect(const ingest::Frame& frame) const = 0;
};

struct DetectorConfig {
  int min_area = 50;
  int color_threshold = 24;  // summed absolute RGB difference
  // Pixels of these exact colors (the pointer) are treated as unknown.
  std::vector<std::array<uint8_t, 3>> mask_colors{{20, 20, 20}, {255, 0, 255}};
};

// Shape features of one candidate box; luma means skip masked pixels.
struct BoxFeatures {
  double ring1 = 0.0;   // outermost 1-px ring
  double ring2 = 0.0;
  double ring3 = 0.0;
  double inner = 0.0;   // everything inside ring1
  double top_rows = 0.0;   // rows 0-1
  double title_rows = 0.0; // rows 1-3
  double mid_row = 0.0;
  double right_col = 0.0;  // column w-5, rows 2..h-3
  double right_col_max = 0.0;
  double left_col = 0.0;   // column 2, rows 2..h-3
  double inner_std = 0.0;
  bool border = false;
  bool thick = false;
};

BoxFeatures box_features(const ingest::Frame& frame, const BBox& box, const DetectorConfig& cfg);
// Class and heuristic confidence for a box.
std::pair<WidgetClass, double> classify_box(const BoxFeatures& f, const BBox& box);

// Edge map of non-background pixels -> 8-connected components -> boxes.
// Boxes nested in another box and boxes under min_area are dropped; the rest
// are classified by shape and ordered by (y, x).
std::vector<DetectedWidget> builtin_detect(const ingest::Frame& frame, const DetectorConfig& cfg = {});

class BuiltinDetector : public WidgetDetector {
 public:
  explicit BuiltinDetector(DetectorConfig cfg = {}) : cfg_(std::move(cfg)) {}
  std::vector<DetectedWidget> detect(const ingest::Frame& frame) const override { return builtin_detect(frame, cfg_); }

 private:
  DetectorConfig cfg_;
};

}  // namespace seeaction::s2as
