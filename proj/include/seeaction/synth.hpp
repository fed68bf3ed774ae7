#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "seeaction/ingest.hpp"
#include "seeaction/rng.hpp"
#include "seeaction/taxonomy.hpp"
#include "seeaction/vision.hpp"

namespace seeaction::synth {

using vision::BBox;

struct Rgb {
  uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

// The cursor is drawn in two colors no widget uses, so a detector can mask it.
inline constexpr Rgb kCursorOuter{20, 20, 20};
inline constexpr Rgb kCursorCore{255, 0, 255};

// Fixed-point scale unit for procedural content zoom.
inline constexpr int kZoomUnit = 256;

struct Widget {
  WidgetClass cls = WidgetClass::Button;
  BBox box;
  Rgb fill;
  Rgb accent;
  bool visible = true;
  bool active = false;  // pressed / checked / selected / focused
  int glyphs = 0;       // Text: typed glyph count; Popup/Window: visible content words
  int content_words = 0;  // Popup/Window: total content words when fully shown
  int scroll = 0;         // Page: vertical content offset in pixels
  int zoom = kZoomUnit;   // Image/Page content scale
  int highlight = 0;      // selection band width in pixels (0 = none)
  int highlight_row = 0;  // Page: content line the band sits on
  int slider = 0;         // Others: thumb offset
  uint32_t pattern = 0;   // procedural content seed
};

struct Cursor {
  int x = 0;  // center
  int y = 0;
  bool visible = true;
};

struct SceneSpec {
  uint64_t seed = 0;
  int width = 80;
  int height = 60;
  Rgb background{222, 222, 222};
  std::vector<Widget> widgets;
  Cursor cursor;
  std::optional<BBox> tooltip;
};

struct ActionSpec {
  CommandClass command = CommandClass::Click;
  int target = 0;  // index into SceneSpec::widgets
  int duration = 5;  // frames, including the pre-action frame; >= 2
};

struct RenderedAction {
  ingest::FrameSequence frames;
  StructuredAction label;
  SceneSpec final_scene;
  BBox target_box;  // ground-truth box of the target (before removal for Disappear)
};

// Rasterizes the scene with integer arithmetic only.
ingest::Frame render(const SceneSpec& scene);

// Location phrase for a box on the canvas, e.g. {"in", "toolbar"} or {"at", "upper", "left"}.
std::vector<std::string> location_phrase(const SceneSpec& scene, const Widget& target);

// Throws ValidationError for incompatible (command, widget) pairs or a target
// in the wrong state (e.g. Appear on a visible popup).
RenderedAction render_action(const SceneSpec& scene, const ActionSpec& action);

// Whether `command` can be applied to widget `index` in its current state.
bool can_apply(const SceneSpec& scene, int index, CommandClass command);

// A random scene containing a widget of `target_class` prepared for `command`;
// returns the target index through `target`.
SceneSpec random_scene(Rng& rng, CommandClass command, WidgetClass target_class, int& target);

// 2..10 frames, mean 5.2 before per-action caps.
int sample_duration(Rng& rng);

struct ManifestEntry {
  std::string id;
  std::string frame_dir;  // relative to the manifest's directory
  StructuredAction label;
  int64_t start = 0;
  int64_t end = 0;
  uint64_t scene_seed = 0;
};

std::string manifest_line(const ManifestEntry& e);
ManifestEntry parse_manifest_line(const std::string& line);
// `{"provenance": {...}}` header lines, skipped by the readers.
bool is_provenance_line(const std::string& line);
std::string provenance_line(const std::string& provenance_json);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

struct GeneratedFragment {
  ManifestEntry entry;
  ingest::FrameSequence frames;
  BBox target_box;
};

// Per-command weights (11 entries, empty = balanced). Counts follow the
// weights by largest remainder, so the realized distribution matches exactly
// up to rounding.
std::vector<CommandClass> command_schedule(uint64_t seed, int n, const std::vector<double>& class_balance);

GeneratedFragment generate_fragment(uint64_t seed, int index, CommandClass command);

struct DatasetSummary {
  std::filesystem::path manifest;
  int fragments = 0;
  std::vector<int> command_counts;
  std::vector<int> widget_counts;
  std::vector<std::string> vocabulary;  // distinct location words, sorted
};

// Writes <out>/frames/<id>/NNNNNN.png and <out>/manifest.jsonl.
// A non-empty provenance JSON object becomes the manifest's first line.
DatasetSummary generate_dataset(uint64_t seed, int n_fragments, const std::vector<double>& class_balance,
                                const std::filesystem::path& out_dir, const std::string& provenance_json = "");

struct GroundTruthAction {
  int64_t start = 0;  // frame before the first change
  int64_t end = 0;    // last frame of the action
  StructuredAction label;
  BBox target_box;
};

struct Screencast {
  ingest::FrameSequence frames;
  std::vector<GroundTruthAction> actions;
  uint64_t seed = 0;
};

// Actions separated by 3..5 identical frames, with static lead-in/out.
Screencast generate_screencast(uint64_t seed, int n_actions);

// Writes frames as PNGs under <dir>/frames and ground truth to <dir>/truth.jsonl.
void write_screencast(const Screencast& sc, const std::filesystem::path& dir, const std::string& provenance_json = "");
std::vector<GroundTruthAction> read_truth(const std::filesystem::path& path);

}  // namespace seeaction::synth
