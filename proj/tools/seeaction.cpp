#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "seeaction/config.hpp"
#include "seeaction/dataset.hpp"
#include "seeaction/detector.hpp"
#include "seeaction/error.hpp"
#include "seeaction/eval.hpp"
#include "seeaction/image_io.hpp"
#include "seeaction/nn/gradcheck.hpp"
#include "seeaction/rng.hpp"
#include "seeaction/s2as.hpp"
#include "seeaction/synth.hpp"
#include "seeaction/trainer.hpp"
#include "seeaction/version.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace seeaction;

namespace {

struct Common {
  std::string config_file;
  std::vector<std::string> sets;
  std::optional<uint64_t> seed;
  std::optional<int> jobs;
  std::string out;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_file, "Key-value config file");
  app->add_option("--set", c.sets, "Override a config key (section.key=value); repeatable");
  app->add_option("--seed", c.seed, "Seed for all randomness (run.seed)");
  app->add_option("--jobs", c.jobs, "Worker threads for per-fragment stages (run.jobs)");
}

config::RunConfig resolve(const Common& c) {
  config::KeyValueConfig kv;
  if (!c.config_file.empty()) kv = config::KeyValueConfig::load(c.config_file);
  for (const auto& s : c.sets) kv.set_assignment(s);
  if (c.seed) kv.set("run.seed", std::to_string(*c.seed));
  if (c.jobs) kv.set("run.jobs", std::to_string(*c.jobs));
  config::RunConfig rc;
  rc.apply(kv);
  rc.validate();
  return rc;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Report subcommands: with --out the JSON goes to the file and the summary to
// stdout; without it the JSON goes to stdout and the summary to stderr.
void emit(const Common& c, const json& result, const std::string& summary) {
  if (c.out.empty()) {
    std::cerr << summary;
    std::cout << result.dump(2) << "\n";
  } else {
    write_text(c.out, result.dump(2) + "\n");
    std::cout << summary;
  }
}

dataset::PrepareConfig prepare_config(const config::RunConfig& rc) {
  dataset::PrepareConfig pc;
  pc.frames = rc.sampling.target_length;
  pc.side = rc.side;
  pc.seed = rc.seed;
  pc.ssim = rc.ssim;
  pc.jobs = rc.jobs;
  return pc;
}

json action_json(const StructuredAction& a) {
  return {{"command", std::string(command_name(a.command))},
          {"widget", std::string(widget_name(a.widget))},
          {"location", join_words(a.location)}};
}

std::vector<StructuredAction> read_actions(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::vector<StructuredAction> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos || synth::is_provenance_line(line)) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError(path.string() + ": " + e.what());
    }
    if (j.contains("tool_version")) continue;  // action script header
    const json& a = j.contains("label") ? j["label"] : j;
    auto cmd = parse_command(a.value("command", ""));
    auto wid = parse_widget(a.value("widget", ""));
    if (!cmd || !wid) throw FormatError(path.string() + ": unknown command or widget in " + line);
    out.push_back({*cmd, *wid, split_words(a.value("location", ""))});
  }
  return out;
}

int run_synth(const Common& c, int fragments, int screencasts, int actions) {
  const auto rc = resolve(c);
  if (c.out.empty()) throw ValidationError("synth needs --out");
  const std::string prov = rc.provenance("synth").dump();
  json result;
  result["provenance"] = json::parse(prov);
  std::ostringstream summary;
  if (fragments > 0) {
    auto sum = synth::generate_dataset(rc.seed, fragments, {}, c.out, prov);
    result["manifest"] = sum.manifest.string();
    result["fragments"] = sum.fragments;
    json cmds, wids;
    for (CommandClass k : all_commands()) cmds[std::string(command_name(k))] = sum.command_counts[static_cast<size_t>(k)];
    for (WidgetClass k : all_widgets()) wids[std::string(widget_name(k))] = sum.widget_counts[static_cast<size_t>(k)];
    result["command_counts"] = cmds;
    result["widget_counts"] = wids;
    result["vocabulary"] = sum.vocabulary;
    summary << "wrote " << sum.fragments << " fragments to " << sum.manifest.string() << " (" << sum.vocabulary.size()
            << " location words)\n";
  }
  if (screencasts > 0) {
    json list = json::array();
    for (int i = 0; i < screencasts; ++i) {
      auto sc = synth::generate_screencast(derive_seed(rc.seed, 5000 + static_cast<uint64_t>(i)), actions);
      char name[32];
      std::snprintf(name, sizeof name, "screencast_%03d", i);
      synth::write_screencast(sc, fs::path(c.out) / name, prov);
      list.push_back({{"dir", name}, {"frames", sc.frames.size()}, {"actions", sc.actions.size()}});
    }
    result["screencasts"] = list;
    summary << "wrote " << screencasts << " screencasts of " << actions << " actions under " << c.out << "\n";
  }
  if (fragments <= 0 && screencasts <= 0) throw ValidationError("synth needs --fragments or --screencasts");
  write_text(fs::path(c.out) / "synth.json", result.dump(2) + "\n");
  std::cout << summary.str();
  return 0;
}

int run_segment(const Common& c, const std::string& input) {
  const auto rc = resolve(c);
  auto seq = ingest::load_frames(input, rc.sampling);
  auto frags = segment::segment(seq, rc.segmenter, rc.ssim);
  json result;
  result["provenance"] = rc.provenance("segment");
  result["source"] = input;
  result["frames"] = seq.size();
  json list = json::array();
  std::ostringstream summary;
  summary << seq.size() << " frames, " << frags.size() << " fragments\n";
  for (size_t i = 0; i < frags.size(); ++i) {
    const auto& f = frags[i];
    list.push_back({{"index", i}, {"start", f.start_index}, {"end", f.end_index}, {"trace", f.mean_dissim_trace}});
    summary << "  " << i << ": frames " << f.start_index << ".." << f.end_index << "\n";
  }
  result["fragments"] = list;
  emit(c, result, summary.str());
  return 0;
}

int run_streams(const Common& c, const std::string& input) {
  const auto rc = resolve(c);
  if (c.out.empty()) throw ValidationError("streams needs --out");
  auto seq = ingest::dedup_adjacent(ingest::load_frames(input, rc.sampling));
  if (seq.size() < 2) throw TooShortError("fragment has fewer than 2 distinct frames");
  auto norm = ingest::normalize_length(seq, rc.sampling.target_length, rc.seed);
  auto bundle = vision::build_streams(norm, rc.ssim, rc.side);
  const fs::path out(c.out);
  for (const char* d : {"origin", "crop", "simmap"}) fs::create_directories(out / d);
  json regions = json::array();
  for (size_t i = 0; i < bundle.originals.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "%04zu.png", i);
    write_png(out / "origin" / name, vision::to_raster(bundle.originals[i]));
    write_png(out / "crop" / name, vision::to_raster(bundle.change_crops[i]));
    write_png(out / "simmap" / name, vision::to_raster(bundle.sim_maps[i]));
    const auto& r = bundle.regions[i];
    regions.push_back(r ? json{r->x, r->y, r->w, r->h} : json(nullptr));
  }
  json result{{"provenance", rc.provenance("streams")}, {"source", input}, {"frames", bundle.originals.size()},
              {"side", bundle.side}, {"regions", regions}};
  write_text(out / "streams.json", result.dump(2) + "\n");
  std::cout << "wrote " << bundle.originals.size() << " frames per stream to " << c.out << "\n";
  return 0;
}

std::string eval_summary(const train::EvalResult& r, bool unsent) {
  std::ostringstream s;
  s << "command acc " << r.command.accuracy << " macro-F1 " << r.command.macro_f1 << "\n"
    << "widget  acc " << r.widget.accuracy << " macro-F1 " << r.widget.macro_f1 << "\n"
    << "location BLEU " << r.location.bleu1 << " ROUGE " << r.location.rouge1 << " METEOR " << r.location.meteor
    << " CIDEr " << r.location.cider << " token acc " << r.token_accuracy << "\n";
  if (unsent) s << "malformed sentences " << r.malformed_rate << "\n";
  return s.str();
}

json history_json(const train::EpochStats& st) {
  return {{"epoch", st.epoch},
          {"loss", st.loss},
          {"command_loss", st.command_loss},
          {"widget_loss", st.widget_loss},
          {"location_loss", st.location_loss}};
}

int run_train(const Common& c, const std::string& manifest, bool quiet) {
  const auto rc = resolve(c);
  if (c.out.empty()) throw ValidationError("train needs --out (model path without extension)");
  auto samples = dataset::load_samples(manifest, prepare_config(rc));
  auto [tr, te] = train::split_indices(samples.size(), rc.train.split, rc.seed);
  const auto prov = rc.provenance("train");
  std::ostringstream hist;
  hist << synth::provenance_line(prov.dump()) << "\n";
  auto result = train::train(samples, tr, rc.train, [&](const train::EpochStats& st) {
    hist << history_json(st).dump() << "\n";
    if (!quiet) std::cerr << "epoch " << st.epoch << " loss " << st.loss << "\n";
  });
  const fs::path base(c.out);
  if (base.has_parent_path()) fs::create_directories(base.parent_path());
  result.model.save(base, prov.dump());
  write_text(base.string() + ".history.jsonl", hist.str());
  const bool unsent = rc.train.mode == model::TrainMode::UnsentGen;
  json report{{"provenance", prov}, {"train_size", tr.size()}, {"test_size", te.size()}};
  std::string summary = "trained on " + std::to_string(tr.size()) + " fragments, model at " + base.string() + "\n";
  if (!te.empty()) {
    auto ev = train::evaluate(result.model, samples, te, rc.jobs);
    report["test"] = train::to_json(ev, unsent);
    summary += "held-out " + std::to_string(te.size()) + " fragments:\n" + eval_summary(ev, unsent);
  }
  write_text(base.string() + ".eval.json", report.dump(2) + "\n");
  std::cout << summary;
  return 0;
}

int run_eval(const Common& c, const std::string& manifest) {
  const auto rc = resolve(c);
  auto samples = dataset::load_samples(manifest, prepare_config(rc));
  auto folds = train::cross_validate(samples, rc.train);
  const bool unsent = rc.train.mode == model::TrainMode::UnsentGen;
  json result{{"provenance", rc.provenance("eval")}};
  json list = json::array();
  std::ostringstream summary;
  double cmd = 0, wid = 0;
  for (size_t f = 0; f < folds.size(); ++f) {
    list.push_back(train::to_json(folds[f].test, unsent));
    summary << "fold " << f << ":\n" << eval_summary(folds[f].test, unsent);
    cmd += folds[f].test.command.accuracy;
    wid += folds[f].test.widget.accuracy;
  }
  const double k = static_cast<double>(folds.size());
  result["folds"] = list;
  result["mean_command_accuracy"] = cmd / k;
  result["mean_widget_accuracy"] = wid / k;
  summary << "mean command acc " << cmd / k << ", widget acc " << wid / k << "\n";
  emit(c, result, summary.str());
  return 0;
}

int run_infer(const Common& c, const std::string& model_path, const std::string& input) {
  const auto rc = resolve(c);
  auto m = model::SeeActionModel::load(model_path);
  const auto& mc = m.config();
  auto pc = prepare_config(rc);
  pc.frames = mc.frames;
  pc.side = mc.side;
  auto sample = dataset::prepare_sample(ingest::load_frames(input, rc.sampling), {}, input, 0, pc);
  auto p = m.predict(sample.input);
  json result{{"provenance", rc.provenance("infer")}, {"source", input}, {"tokens", p.tokens}};
  std::string summary;
  if (p.action) {
    result["action"] = action_json(*p.action);
    summary = "[" + std::string(command_name(p.action->command)) + "] [" + std::string(widget_name(p.action->widget)) +
              "] [" + join_words(p.action->location) + "]\n";
  } else {
    result["malformed"] = true;
    summary = "[malformed] [" + join_words(p.tokens) + "]\n";
  }
  if (!p.command_probs.empty()) {
    result["command_probs"] = p.command_probs;
    result["widget_probs"] = p.widget_probs;
  }
  emit(c, result, summary);
  return 0;
}

int run_s2as(const Common& c, const std::string& model_path, const std::string& input, double min_iou) {
  const auto rc = resolve(c);
  if (c.out.empty()) throw ValidationError("s2as needs --out");
  auto m = model::SeeActionModel::load(model_path);
  auto seq = ingest::load_frames(input, rc.sampling);
  s2as::S2asConfig sc;
  sc.segmenter = rc.segmenter;
  sc.ssim = rc.ssim;
  sc.frames = m.config().frames;
  sc.side = m.config().side;
  sc.seed = rc.seed;
  sc.min_iou = min_iou;
  sc.crop_dir = fs::path(c.out) / "crops";
  sc.jobs = rc.jobs;
  s2as::ModelPredictor predictor(m);
  s2as::BuiltinDetector detector;
  auto script = s2as::build_script(seq, predictor, detector, sc);
  script.provenance = rc.provenance("s2as").dump();
  write_text(fs::path(c.out) / "script.jsonl", s2as::script_to_jsonl(script));
  const std::string text = s2as::script_to_text(script);
  write_text(fs::path(c.out) / "script.txt", text);
  std::cout << text;
  return 0;
}

int run_metrics(const Common& c, const std::string& pred_path, const std::string& ref_path) {
  const auto rc = resolve(c);
  auto preds = read_actions(pred_path);
  auto refs = read_actions(ref_path);
  if (preds.size() != refs.size()) {
    throw DimensionMismatchError("predictions (" + std::to_string(preds.size()) + ") and references (" +
                                 std::to_string(refs.size()) + ") differ in length");
  }
  if (preds.empty()) throw ValidationError("no actions to score");
  std::vector<int> pc, lc, pw, lw;
  std::vector<std::vector<std::string>> cand, ref;
  for (size_t i = 0; i < preds.size(); ++i) {
    pc.push_back(static_cast<int>(preds[i].command));
    lc.push_back(static_cast<int>(refs[i].command));
    pw.push_back(static_cast<int>(preds[i].widget));
    lw.push_back(static_cast<int>(refs[i].widget));
    cand.push_back(preds[i].location);
    ref.push_back(refs[i].location);
  }
  auto cmd = eval::classification_report(pc, lc, kNumCommands);
  auto wid = eval::classification_report(pw, lw, kNumWidgets);
  auto loc = eval::caption_scores(cand, ref);
  std::vector<std::string> cn, wn;
  for (CommandClass k : all_commands()) cn.emplace_back(command_name(k));
  for (WidgetClass k : all_widgets()) wn.emplace_back(widget_name(k));
  json result{{"provenance", rc.provenance("metrics")},
              {"command", eval::to_json(cmd, cn)},
              {"widget", eval::to_json(wid, wn)},
              {"location", eval::to_json(loc)},
              {"token_accuracy", train::token_accuracy(cand, ref)}};
  std::ostringstream summary;
  summary << "commands\n" << eval::format_table(cmd, cn) << "widgets\n" << eval::format_table(wid, wn)
          << "location BLEU " << loc.bleu1 << " ROUGE " << loc.rouge1 << " METEOR " << loc.meteor << " CIDEr "
          << loc.cider << "\n";
  emit(c, result, summary.str());
  return 0;
}

int run_gradcheck(const Common& c, int seeds) {
  const auto rc = resolve(c);
  if (seeds < 1) throw ValidationError("--seeds must be >= 1");
  auto results = nn::run_gradcheck_suite(seeds, rc.seed);
  json list = json::array();
  std::ostringstream summary;
  bool ok = true;
  for (const auto& r : results) {
    list.push_back(nn::to_json(r));
    ok = ok && r.passed;
    char line[160];
    std::snprintf(line, sizeof line, "%-4s %-13s %-40s rel %.2e\n", r.passed ? "ok" : "FAIL", r.op.c_str(),
                  r.shape.c_str(), r.max_rel_error);
    summary << line;
  }
  summary << (ok ? "all gradient checks passed\n" : "gradient checks FAILED\n");
  emit(c, json{{"provenance", rc.provenance("gradcheck")}, {"passed", ok}, {"checks", list}}, summary.str());
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recovers structured GUI actions from screen recordings"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  Common c;
  int fragments = 0, screencasts = 0, actions = 5, seeds = 5;
  std::string input, manifest, model_path, pred_path, ref_path;
  double min_iou = 0.0;
  bool quiet = false;

  auto* synth_cmd = app.add_subcommand("synth", "Generate a labeled fragment dataset and/or screencasts");
  add_common(synth_cmd, c);
  synth_cmd->add_option("--out", c.out, "Output directory")->required();
  synth_cmd->add_option("--fragments", fragments, "Number of labeled fragments");
  synth_cmd->add_option("--screencasts", screencasts, "Number of screencasts");
  synth_cmd->add_option("--actions", actions, "Actions per screencast")->check(CLI::PositiveNumber);

  auto* seg_cmd = app.add_subcommand("segment", "Split a recording into action fragments");
  add_common(seg_cmd, c);
  seg_cmd->add_option("--input", input, "Frame directory or container")->required();
  seg_cmd->add_option("--out", c.out, "Result JSON path");

  auto* streams_cmd = app.add_subcommand("streams", "Dump the three model input streams of one fragment");
  add_common(streams_cmd, c);
  streams_cmd->add_option("--input", input, "Fragment frame directory or container")->required();
  streams_cmd->add_option("--out", c.out, "Output directory")->required();

  auto* train_cmd = app.add_subcommand("train", "Train on a manifest (train.split held out) and save the model");
  add_common(train_cmd, c);
  train_cmd->add_option("--manifest", manifest, "Dataset manifest")->required();
  train_cmd->add_option("--out", c.out, "Model path without extension")->required();
  train_cmd->add_flag("--quiet", quiet, "No per-epoch progress on stderr");

  auto* eval_cmd = app.add_subcommand("eval", "k-fold cross-validation report");
  add_common(eval_cmd, c);
  eval_cmd->add_option("--manifest", manifest, "Dataset manifest")->required();
  eval_cmd->add_option("--out", c.out, "Result JSON path");

  auto* infer_cmd = app.add_subcommand("infer", "Predict the structured action of one fragment");
  add_common(infer_cmd, c);
  infer_cmd->add_option("--model", model_path, "Model path without extension")->required();
  infer_cmd->add_option("--input", input, "Fragment frame directory or container")->required();
  infer_cmd->add_option("--out", c.out, "Result JSON path");

  auto* s2as_cmd = app.add_subcommand("s2as", "Turn a recording into an action script");
  add_common(s2as_cmd, c);
  s2as_cmd->add_option("--model", model_path, "Model path without extension")->required();
  s2as_cmd->add_option("--input", input, "Frame directory or container")->required();
  s2as_cmd->add_option("--out", c.out, "Output directory (script.jsonl, script.txt, crops/)")->required();
  s2as_cmd->add_option("--min-iou", min_iou, "Minimum IoU between detection and change region");

  auto* metrics_cmd = app.add_subcommand("metrics", "Score predicted actions against references");
  add_common(metrics_cmd, c);
  metrics_cmd->add_option("--predictions", pred_path, "JSONL with command, widget, location")->required();
  metrics_cmd->add_option("--references", ref_path, "JSONL with command, widget, location")->required();
  metrics_cmd->add_option("--out", c.out, "Result JSON path");

  auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference check of every differentiable op");
  add_common(grad_cmd, c);
  grad_cmd->add_option("--seeds", seeds, "Random cases per op");
  grad_cmd->add_option("--out", c.out, "Result JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (synth_cmd->parsed()) return run_synth(c, fragments, screencasts, actions);
    if (seg_cmd->parsed()) return run_segment(c, input);
    if (streams_cmd->parsed()) return run_streams(c, input);
    if (train_cmd->parsed()) return run_train(c, manifest, quiet);
    if (eval_cmd->parsed()) return run_eval(c, manifest);
    if (infer_cmd->parsed()) return run_infer(c, model_path, input);
    if (s2as_cmd->parsed()) return run_s2as(c, model_path, input, min_iou);
    if (metrics_cmd->parsed()) return run_metrics(c, pred_path, ref_path);
    if (grad_cmd->parsed()) return run_gradcheck(c, seeds);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
