#include "seeaction/trainer.hpp"

#include <algorithm>
#include <cmath>

#include "seeaction/error.hpp"
#include "seeaction/parallel.hpp"
#include "seeaction/rng.hpp"

namespace seeaction::train {

using json = nlohmann::json;

void TrainConfig::validate() const {
  if (epochs < 1) throw ValidationError("epochs must be >= 1");
  if (folds < 2) throw ValidationError("folds must be >= 2");
  if (!(split > 0.0 && split < 1.0)) throw ValidationError("split must be in (0, 1)");
  if (batch_size < 1) throw ValidationError("batch size must be >= 1");
  if (!(learning_rate > 0.0)) throw ValidationError("learning rate must be positive");
  if (max_len < 1) throw ValidationError("max_len must be >= 1");
  model_config().validate();
}

model::ModelConfig TrainConfig::model_config() const {
  model::ModelConfig m;
  m.side = side;
  m.frames = frames;
  if (!channels.empty()) m.channels = channels;
  m.embed_dim = embed_dim;
  m.head_hidden = head_hidden;
  m.max_len = max_len;
  m.mode = mode;
  m.streams = streams;
  return m;
}

double token_accuracy(const std::vector<std::vector<std::string>>& predicted,
                      const std::vector<std::vector<std::string>>& reference) {
  if (predicted.size() != reference.size()) throw ValidationError("token accuracy: length mismatch");
  long correct = 0, total = 0;
  for (size_t i = 0; i < reference.size(); ++i) {
    const auto& p = predicted[i];
    const auto& r = reference[i];
    for (size_t k = 0; k < r.size(); ++k) {
      if (k < p.size() && p[k] == r[k]) ++correct;
    }
    if (p.size() == r.size()) ++correct;  // <end> in the right place
    total += static_cast<long>(r.size()) + 1;
  }
  return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
}

EvalResult evaluate(const model::SeeActionModel& m, const std::vector<dataset::Sample>& samples,
                    const std::vector<size_t>& indices, int jobs) {
  if (indices.empty()) throw ValidationError("evaluation needs at least one sample");
  const bool unsent = m.config().mode == model::TrainMode::UnsentGen;
  std::vector<model::Prediction> preds(indices.size());
  parallel_for(indices.size(), jobs, [&](size_t i) { preds[i] = m.predict(samples.at(indices[i]).input); });

  EvalResult r;
  std::vector<int> pc, lc, pw, lw;
  std::vector<std::vector<std::string>> cand, refs;
  int malformed = 0;
  for (size_t i = 0; i < indices.size(); ++i) {
    const StructuredAction& label = samples[indices[i]].label;
    const auto& p = preds[i];
    r.labels.push_back(label);
    lc.push_back(static_cast<int>(label.command));
    lw.push_back(static_cast<int>(label.widget));
    refs.push_back(label.location);
    if (p.action) {
      pc.push_back(static_cast<int>(p.action->command));
      pw.push_back(static_cast<int>(p.action->widget));
      cand.push_back(p.action->location);
      r.predictions.push_back(*p.action);
      r.malformed.push_back(false);
    } else {
      // Malformed sentences count against an extra class so they are always wrong.
      ++malformed;
      pc.push_back(kNumCommands);
      pw.push_back(kNumWidgets);
      cand.push_back(p.tokens);
      r.predictions.push_back({CommandClass::Click, WidgetClass::Others, p.tokens});
      r.malformed.push_back(true);
    }
  }
  const int extra = unsent ? 1 : 0;
  r.command = eval::classification_report(pc, lc, kNumCommands + extra);
  r.widget = eval::classification_report(pw, lw, kNumWidgets + extra);
  r.location = eval::caption_scores(cand, refs);
  r.token_accuracy = token_accuracy(cand, refs);
  r.malformed_rate = static_cast<double>(malformed) / static_cast<double>(indices.size());
  return r;
}

TrainResult train(const std::vector<dataset::Sample>& samples, const std::vector<size_t>& train_idx,
                  const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  if (train_idx.empty()) throw ValidationError("training set is empty");
  model::Vocabulary vocab = dataset::location_vocabulary(samples, train_idx);
  TrainResult result{model::SeeActionModel(cfg.model_config(), vocab, derive_seed(cfg.seed, 1)), {}};
  model::SeeActionModel& m = result.model;

  std::vector<model::Target> targets;
  targets.reserve(train_idx.size());
  for (size_t i : train_idx) targets.push_back(m.target_for(samples.at(i).label));

  nn::Adam opt(cfg.learning_rate);
  Rng rng(derive_seed(cfg.seed, 2));
  std::vector<size_t> order(train_idx.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  const bool early_stop = cfg.stop_command_acc || cfg.stop_widget_acc || cfg.stop_token_acc;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(order);
    EpochStats st;
    st.epoch = epoch;
    for (size_t b = 0; b < order.size(); b += static_cast<size_t>(cfg.batch_size)) {
      const size_t e = std::min(order.size(), b + static_cast<size_t>(cfg.batch_size));
      std::vector<const model::ModelInput*> in;
      std::vector<const model::Target*> tg;
      for (size_t k = b; k < e; ++k) {
        in.push_back(&samples[train_idx[order[k]]].input);
        tg.push_back(&targets[order[k]]);
      }
      m.params().zero_grad();
      model::LossParts lp = model::batch_loss<float>(m.params(), m.config(), in, tg, true);
      opt.step(m.params());
      const double w = static_cast<double>(e - b) / static_cast<double>(order.size());
      st.loss += lp.total * w;
      st.command_loss += lp.command * w;
      st.widget_loss += lp.widget * w;
      st.location_loss += lp.location * w;
    }
    bool done = false;
    if (early_stop) {
      st.train_eval = evaluate(m, samples, train_idx);
      const auto& ev = *st.train_eval;
      done = (!cfg.stop_command_acc || ev.command.accuracy >= *cfg.stop_command_acc) &&
             (!cfg.stop_widget_acc || ev.widget.accuracy >= *cfg.stop_widget_acc) &&
             (!cfg.stop_token_acc || ev.token_accuracy >= *cfg.stop_token_acc);
    }
    result.history.push_back(st);
    if (on_epoch) on_epoch(st);
    if (done) break;
  }
  return result;
}

std::pair<std::vector<size_t>, std::vector<size_t>> split_indices(size_t n, double split, uint64_t seed) {
  if (!(split > 0.0 && split < 1.0)) throw ValidationError("split must be in (0, 1)");
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = i;
  Rng rng(derive_seed(seed, 3));
  rng.shuffle(idx);
  const size_t n_train = static_cast<size_t>(std::lround(split * static_cast<double>(n)));
  std::vector<size_t> tr(idx.begin(), idx.begin() + static_cast<long>(n_train));
  std::vector<size_t> te(idx.begin() + static_cast<long>(n_train), idx.end());
  return {tr, te};
}

std::vector<FoldResult> cross_validate(const std::vector<dataset::Sample>& samples, const TrainConfig& cfg,
                                       const EpochCallback& on_epoch) {
  cfg.validate();
  const auto folds = eval::kfold_split(samples.size(), cfg.folds, cfg.seed);
  std::vector<FoldResult> out;
  for (size_t f = 0; f < folds.size(); ++f) {
    std::vector<size_t> tr;
    for (size_t g = 0; g < folds.size(); ++g)
      if (g != f) tr.insert(tr.end(), folds[g].begin(), folds[g].end());
    std::sort(tr.begin(), tr.end());
    TrainConfig fc = cfg;
    fc.seed = derive_seed(cfg.seed, 100 + f);
    TrainResult t = train(samples, tr, fc, on_epoch);
    out.push_back({evaluate(t.model, samples, folds[f]), std::move(t.history)});
  }
  return out;
}

json to_json(const EvalResult& r, bool unsent) {
  std::vector<std::string> cmds, wids;
  for (CommandClass c : all_commands()) cmds.emplace_back(command_name(c));
  for (WidgetClass w : all_widgets()) wids.emplace_back(widget_name(w));
  if (unsent) {
    cmds.emplace_back("(malformed)");
    wids.emplace_back("(malformed)");
  }
  json j;
  j["command"] = eval::to_json(r.command, cmds);
  j["widget"] = eval::to_json(r.widget, wids);
  j["location"] = eval::to_json(r.location);
  j["token_accuracy"] = r.token_accuracy;
  if (unsent) j["malformed_rate"] = r.malformed_rate;
  return j;
}

}  // namespace seeaction::train
