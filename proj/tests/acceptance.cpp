// Acceptance run: one PASS/FAIL line per criterion. Artifacts land under
// ./acceptance_artifacts (run1, run2) so the determinism check can compare them.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "metric_table.hpp"
#include "oracles.hpp"
#include "seeaction/dataset.hpp"
#include "seeaction/nn/gradcheck.hpp"
#include "seeaction/rng.hpp"
#include "seeaction/s2as.hpp"
#include "seeaction/segment.hpp"
#include "seeaction/synth.hpp"
#include "seeaction/trainer.hpp"
#include "seeaction/vision.hpp"
#include "support.hpp"

using namespace seeaction;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kSide = 32;
constexpr uint64_t kOverfitSeed = 11;
constexpr uint64_t kBenchSeed = 2024;
constexpr int kBenchFragments = 600;
constexpr int kBenchEpochs = 20;

struct Clock {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
};

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void write_text(const fs::path& p, const std::string& s) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void log_line(const std::string& s) {
  std::printf("  %s\n", s.c_str());
  std::fflush(stdout);
}

// ---- 1: gradients ----

void criterion1() {
  Clock c;
  auto results = nn::run_gradcheck_suite(5, 1);
  double worst = 0;
  bool ok = true;
  for (const auto& r : results) {
    worst = std::max(worst, r.max_rel_error);
    ok = ok && r.passed && r.max_rel_error <= 1e-4;
    if (!r.passed) log_line(fmt("%s seed %llu rel %.3g", r.op.c_str(), static_cast<unsigned long long>(r.seed), r.max_rel_error));
  }
  const double t = c.seconds();
  report(1, ok && t <= 120.0, fmt("%zu cases, worst relative error %.2e, %.1f s", results.size(), worst, t));
}

// ---- 2: metric oracles ----

void criterion2() {
  Clock c;
  auto table = testing::metric_table();
  int bad = 0;
  for (const auto& m : table)
    if (!(std::abs(m.got - m.expected) <= 1e-6)) {
      ++bad;
      log_line(fmt("%s: got %.9f expected %.9f", m.name.c_str(), m.got, m.expected));
    }
  const double t = c.seconds();
  report(2, bad == 0 && t <= 1.0, fmt("%zu table entries, %d off, %.3f s", table.size(), bad, t));
}

// ---- 3: vision oracles ----

void criterion3() {
  Clock c;
  Rng rng(303);
  double worst = 0;
  for (int i = 0; i < 10; ++i) {
    auto a = testing::noise(rng, 32, 32), b = testing::noise(rng, 32, 32);
    if (i % 2) {
      b = a;
      testing::fill_rect(b, static_cast<int>(rng.below(20)), static_cast<int>(rng.below(20)), 10, 10,
                         static_cast<uint8_t>(rng.below(256)));
    }
    auto m = vision::ssim_map(a, b, {});
    auto ref = oracle::ssim_dissim(a, b, {});
    for (size_t k = 0; k < ref.size(); ++k) worst = std::max(worst, std::abs(m.values[k] - ref[k]));
  }
  int mismatched = 0;
  for (int i = 0; i < 100; ++i) {
    const int w = 1 + static_cast<int>(rng.below(48)), h = 1 + static_cast<int>(rng.below(48));
    const double density = rng.uniform(0.05, 0.7);
    std::vector<uint8_t> on(static_cast<size_t>(w) * h);
    for (auto& v : on) v = rng.chance(density) ? 1 : 0;
    vision::SimilarityMap map{w, h, std::vector<float>(on.size()), {0, 1}};
    for (size_t k = 0; k < on.size(); ++k) map.values[k] = on[k];
    if (oracle::sorted(vision::detect_change_regions(map, 0.5)) != oracle::components(on, w, h)) ++mismatched;
  }
  const double t = c.seconds();
  report(3, worst <= 1e-6 && mismatched == 0 && t <= 60.0,
         fmt("ssim worst deviation %.2e on 10 pairs, %d/100 region maps differ, %.1f s", worst, mismatched, t));
}

// ---- shared dataset helpers ----

std::vector<dataset::Sample> synthetic_samples(uint64_t seed, int n) {
  auto sched = synth::command_schedule(seed, n, {});
  std::vector<synth::GeneratedFragment> frags;
  frags.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) frags.push_back(synth::generate_fragment(seed, i, sched[static_cast<size_t>(i)]));
  dataset::PrepareConfig pc;
  pc.side = kSide;
  pc.seed = seed;
  return dataset::prepare_samples(frags, pc);
}

json history_json(const std::vector<train::EpochStats>& h) {
  json out = json::array();
  for (const auto& s : h) {
    json j{{"epoch", s.epoch}, {"loss", s.loss}, {"command_loss", s.command_loss}, {"widget_loss", s.widget_loss},
           {"location_loss", s.location_loss}};
    if (s.train_eval) {
      j["train_command_acc"] = s.train_eval->command.accuracy;
      j["train_widget_acc"] = s.train_eval->widget.accuracy;
      j["train_token_acc"] = s.train_eval->token_accuracy;
    }
    out.push_back(j);
  }
  return out;
}

// ---- 4: overfit ----

struct OverfitOutcome {
  bool pass = false;
  std::string detail;
};

OverfitOutcome run_overfit(const fs::path& dir) {
  Clock c;
  auto samples = synthetic_samples(kOverfitSeed, 32);
  train::TrainConfig tc;
  tc.side = kSide;
  tc.epochs = 200;
  tc.seed = kOverfitSeed;
  tc.stop_command_acc = 0.95;
  tc.stop_widget_acc = 0.95;
  tc.stop_token_acc = 0.90;
  std::vector<size_t> all(samples.size());
  std::iota(all.begin(), all.end(), size_t{0});
  auto r = train::train(samples, all, tc);
  auto e = train::evaluate(r.model, samples, all);
  r.model.save(dir / "overfit_model", R"({"criterion": 4})");
  write_text(dir / "overfit_history.json", history_json(r.history).dump(1) + "\n");
  write_text(dir / "overfit_eval.json", train::to_json(e, false).dump(1) + "\n");
  const double t = c.seconds();
  OverfitOutcome o;
  o.pass = e.command.accuracy >= 0.95 && e.widget.accuracy >= 0.95 && e.token_accuracy >= 0.90 && t <= 600.0;
  o.detail = fmt("train cmd %.3f wid %.3f token %.3f after %zu epochs, %.1f s", e.command.accuracy, e.widget.accuracy,
                 e.token_accuracy, r.history.size(), t);
  return o;
}

// ---- 5: stream ablation ----

struct BenchOutcome {
  std::vector<std::pair<std::string, double>> accuracy;  // variant -> test command accuracy
  std::optional<model::SeeActionModel> full;
  double seconds = 0;
};

BenchOutcome run_benchmark(const fs::path& dir, const std::vector<dataset::Sample>& samples,
                           const std::vector<size_t>& train_idx, const std::vector<size_t>& test_idx) {
  Clock c;
  BenchOutcome out;
  std::vector<std::vector<model::Stream>> variants{
      {model::Stream::CropCR}, {model::Stream::Origin}, {model::Stream::SimMap}, model::all_streams()};
  for (const auto& v : variants) {
    const std::string name = model::stream_list_string(v);
    train::TrainConfig tc;
    tc.side = kSide;
    tc.epochs = kBenchEpochs;
    tc.seed = kBenchSeed;
    tc.streams = v;
    auto r = train::train(samples, train_idx, tc);
    auto e = train::evaluate(r.model, samples, test_idx);
    std::string tag = name;
    std::replace(tag.begin(), tag.end(), ',', '_');
    r.model.save(dir / ("bench_" + tag), R"({"criterion": 5})");
    write_text(dir / ("bench_" + tag + "_eval.json"), train::to_json(e, false).dump(1) + "\n");
    write_text(dir / ("bench_" + tag + "_history.json"), history_json(r.history).dump(1) + "\n");
    log_line(fmt("%-18s test cmd %.3f wid %.3f token %.3f  (%.0f s)", name.c_str(), e.command.accuracy,
                 e.widget.accuracy, e.token_accuracy, c.seconds()));
    out.accuracy.emplace_back(name, e.command.accuracy);
    if (v.size() == 3) out.full.emplace(std::move(r.model));
  }
  out.seconds = c.seconds();
  return out;
}

// ---- 7: segmentation ----

struct Boundaries {
  int truth = 0, found = 0, matched_truth = 0, matched_found = 0;
};

bool close_span(const segment::Span& s, const synth::GroundTruthAction& a) {
  return std::abs(s.start - a.start) <= 1 && std::abs(s.end - a.end) <= 1;
}

Boundaries run_segmentation(const fs::path& dir) {
  Boundaries b;
  json all = json::array();
  for (int i = 0; i < 20; ++i) {
    auto sc = synth::generate_screencast(derive_seed(7000, static_cast<uint64_t>(i)), 5);
    auto series = segment::dissim_series(sc.frames, {});
    auto spans = segment::segment_series(series, {});
    b.truth += static_cast<int>(sc.actions.size());
    b.found += static_cast<int>(spans.size());
    for (const auto& a : sc.actions)
      b.matched_truth += std::any_of(spans.begin(), spans.end(), [&](const segment::Span& s) { return close_span(s, a); });
    for (const auto& s : spans)
      b.matched_found += std::any_of(sc.actions.begin(), sc.actions.end(),
                                     [&](const synth::GroundTruthAction& a) { return close_span(s, a); });
    json j{{"screencast", i}, {"truth", json::array()}, {"spans", json::array()}};
    for (const auto& a : sc.actions) j["truth"].push_back({a.start, a.end});
    for (const auto& s : spans) j["spans"].push_back({s.start, s.end});
    all.push_back(j);
  }
  write_text(dir / "segmentation.json", all.dump(1) + "\n");
  return b;
}

// ---- 8: end to end ----

struct EndToEnd {
  int actions = 0, matched = 0;
};

EndToEnd run_end_to_end(const fs::path& dir, const model::SeeActionModel& m) {
  EndToEnd out;
  s2as::ModelPredictor predictor(m);
  s2as::BuiltinDetector detector;
  for (int i = 0; i < 10; ++i) {
    auto sc = synth::generate_screencast(derive_seed(8000, static_cast<uint64_t>(i)), 5);
    s2as::S2asConfig cfg;
    cfg.side = m.config().side;
    cfg.frames = m.config().frames;
    cfg.seed = kBenchSeed;
    char name[32];
    std::snprintf(name, sizeof name, "e2e_%02d", i);
    cfg.crop_dir = dir / name / "crops";
    auto script = s2as::build_script(sc.frames, predictor, detector, cfg);
    write_text(dir / name / "script.jsonl", s2as::script_to_jsonl(script));
    write_text(dir / name / "script.txt", s2as::script_to_text(script));
    for (const auto& a : sc.actions) {
      ++out.actions;
      const s2as::CompleteAction* best = nullptr;
      int64_t best_overlap = 0;
      for (const auto& ca : script.actions) {
        const int64_t ov = std::min(ca.span.end, a.end) - std::max(ca.span.start, a.start) + 1;
        if (ov > best_overlap) best_overlap = ov, best = &ca;
      }
      if (best && best->target && best->target->cls == a.label.widget && best->target->bbox.iou(a.target_box) >= 0.5)
        ++out.matched;
    }
  }
  return out;
}

// ---- 6: structure of outputs ----

void criterion6(const model::SeeActionModel& full, const std::vector<dataset::Sample>& samples,
                const std::vector<size_t>& train_idx, const std::vector<size_t>& test_idx) {
  Clock c;
  const auto sentence_vocab = model::sentence_vocabulary(full.location_vocab());
  int structural_violations = 0;
  for (size_t i : test_idx) {
    auto p = full.predict(samples[i].input);
    const bool has_action = p.action.has_value();
    const int w = has_action ? static_cast<int>(p.action->widget) : -1;
    if (!has_action || w < 0 || w >= kNumWidgets || p.widget_probs.size() != kNumWidgets) ++structural_violations;
    for (const auto& t : p.tokens)
      if (t.rfind("cmd:", 0) == 0 || t.rfind("wid:", 0) == 0) ++structural_violations;
  }

  train::TrainConfig tc;
  tc.side = kSide;
  tc.epochs = kBenchEpochs;
  tc.seed = kBenchSeed;
  tc.mode = model::TrainMode::UnsentGen;
  auto r = train::train(samples, train_idx, tc);
  auto e = train::evaluate(r.model, samples, test_idx);
  int parser_disagreements = 0;
  for (size_t k = 0; k < test_idx.size(); ++k) {
    auto p = r.model.predict(samples[test_idx[k]].input);
    if (p.action.has_value() != model::parse_sentence(p.tokens).has_value()) ++parser_disagreements;
  }
  report(6, structural_violations == 0 && parser_disagreements == 0,
         fmt("multitask: %d structural violations in %zu predictions; unsent_gen malformed rate %.3f "
             "(cmd %.3f wid %.3f), %.0f s",
             structural_violations, test_idx.size(), e.malformed_rate, e.command.accuracy, e.widget.accuracy,
             c.seconds()));
}

struct RunOutcome {
  OverfitOutcome overfit;
  BenchOutcome bench;
  Boundaries seg;
  double seg_seconds = 0;
  EndToEnd e2e;
  double e2e_seconds = 0;
};

RunOutcome run_trained_criteria(const fs::path& dir, const std::vector<dataset::Sample>& bench,
                                const std::vector<size_t>& train_idx, const std::vector<size_t>& test_idx) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  RunOutcome o;
  o.overfit = run_overfit(dir);
  o.bench = run_benchmark(dir, bench, train_idx, test_idx);
  Clock c;
  o.seg = run_segmentation(dir);
  o.seg_seconds = c.seconds();
  Clock c2;
  if (o.bench.full) o.e2e = run_end_to_end(dir, *o.bench.full);
  o.e2e_seconds = c2.seconds();
  return o;
}

std::vector<std::string> differing_files(const fs::path& a, const fs::path& b) {
  std::vector<std::string> diff;
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(a))
    if (e.is_regular_file()) files.push_back(fs::relative(e.path(), a));
  for (const auto& e : fs::recursive_directory_iterator(b))
    if (e.is_regular_file() && !fs::exists(a / fs::relative(e.path(), b))) diff.push_back(fs::relative(e.path(), b).string());
  std::sort(files.begin(), files.end());
  for (const auto& f : files)
    if (!fs::exists(b / f) || slurp(a / f) != slurp(b / f)) diff.push_back(f.string());
  return diff;
}

}  // namespace

int main() {
  const fs::path root = fs::current_path() / "acceptance_artifacts";
  criterion1();
  criterion2();
  criterion3();

  Clock prep;
  auto bench = synthetic_samples(kBenchSeed, kBenchFragments);
  auto [train_idx, test_idx] = train::split_indices(bench.size(), 0.8, kBenchSeed);
  log_line(fmt("benchmark: %zu fragments, %zu train / %zu test, prepared in %.1f s", bench.size(), train_idx.size(),
               test_idx.size(), prep.seconds()));

  auto first = run_trained_criteria(root / "run1", bench, train_idx, test_idx);

  report(4, first.overfit.pass, first.overfit.detail);

  {
    const auto& acc = first.bench.accuracy;
    double full = -1, best_single = -1, worst_single = 2;
    std::string parts;
    for (const auto& [name, a] : acc) {
      parts += fmt("%s %.3f; ", name.c_str(), a);
      if (name == model::stream_list_string(model::all_streams())) {
        full = a;
      } else {
        best_single = std::max(best_single, a);
        worst_single = std::min(worst_single, a);
      }
    }
    const bool pass = full >= best_single && full - worst_single >= 0.02 && first.bench.seconds <= 3600.0;
    report(5, pass, parts + fmt("margin over worst %.1f pp, %.0f s", 100 * (full - worst_single), first.bench.seconds));
  }

  if (first.bench.full) {
    criterion6(*first.bench.full, bench, train_idx, test_idx);
  } else {
    report(6, false, "no three-stream model");
  }

  {
    const auto& b = first.seg;
    const double recall = b.truth ? static_cast<double>(b.matched_truth) / b.truth : 0.0;
    const double precision = b.found ? static_cast<double>(b.matched_found) / b.found : 0.0;
    report(7, recall >= 0.9 && precision >= 0.9 && first.seg_seconds <= 120.0,
           fmt("recall %.3f (%d/%d), precision %.3f (%d/%d), %.1f s", recall, b.matched_truth, b.truth, precision,
               b.matched_found, b.found, first.seg_seconds));
  }

  {
    const auto& e = first.e2e;
    const double rate = e.actions ? static_cast<double>(e.matched) / e.actions : 0.0;
    report(8, rate >= 0.7 && first.e2e_seconds <= 600.0,
           fmt("%d/%d actions matched (%.3f), %.1f s", e.matched, e.actions, rate, first.e2e_seconds));
  }

  {
    Clock c;
    run_trained_criteria(root / "run2", bench, train_idx, test_idx);
    auto diff = differing_files(root / "run1", root / "run2");
    size_t files = 0;
    for (const auto& e : fs::recursive_directory_iterator(root / "run1")) files += e.is_regular_file();
    for (const auto& d : diff) log_line("differs: " + d);
    report(9, diff.empty() && files > 0, fmt("%zu artifacts compared, %zu differ, rerun %.0f s", files, diff.size(), c.seconds()));
  }

  std::printf("%s\n", failures ? "acceptance: FAIL" : "acceptance: PASS");
  return failures ? 1 : 0;
}
