#include "seeaction/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "seeaction/model.hpp"

namespace seeaction::nn {

using json = nlohmann::json;

double relative_error(const std::vector<double>& analytic, const std::vector<double>& numeric) {
  double diff = 0, na = 0, nn = 0;
  for (size_t i = 0; i < analytic.size(); ++i) {
    diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
    na += analytic[i] * analytic[i];
    nn += numeric[i] * numeric[i];
  }
  const double denom = std::max(std::sqrt(na), std::sqrt(nn));
  if (denom < 1e-12) return 0.0;
  return std::sqrt(diff) / denom;
}

std::pair<double, size_t> check_gradients(ParamStore<double>& store, const StoreLoss& loss, Rng& rng,
                                          const GradcheckOptions& opt) {
  store.zero_grad();
  loss(store, true);
  double worst = 0;
  size_t probes = 0;
  for (size_t p = 0; p < store.count(); ++p) {
    BasicTensor<double>& v = store.value_at(p);
    std::vector<size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), size_t{0});
    if (idx.size() > opt.max_probes) {
      rng.shuffle(idx);
      idx.resize(opt.max_probes);
      std::sort(idx.begin(), idx.end());
    }
    std::vector<double> analytic, numeric;
    for (size_t i : idx) {
      const double orig = v[i];
      v[i] = orig + opt.step;
      const double up = loss(store, false);
      v[i] = orig - opt.step;
      const double down = loss(store, false);
      v[i] = orig;
      numeric.push_back((up - down) / (2 * opt.step));
      analytic.push_back(store.grad_at(p)[i]);
    }
    worst = std::max(worst, relative_error(analytic, numeric));
    probes += idx.size();
  }
  return {worst, probes};
}

std::pair<double, size_t> check_gradients(ParamStore<double>& store, const TapeLoss& loss, Rng& rng,
                                          const GradcheckOptions& opt) {
  StoreLoss wrapped = [&](ParamStore<double>& s, bool grad) {
    Tape<double> tape;
    const Var out = loss(tape, s);
    if (grad) tape.backward(out);
    return tape.value(out)[0];
  };
  return check_gradients(store, wrapped, rng, opt);
}

namespace {

BasicTensor<double> random_tensor(Rng& rng, Shape shape, double lo = -1.0, double hi = 1.0) {
  BasicTensor<double> t(std::move(shape));
  for (size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(lo, hi);
  return t;
}

std::string dims(std::initializer_list<int> d) {
  std::string s;
  for (int v : d) s += (s.empty() ? "" : "x") + std::to_string(v);
  return s;
}

GradcheckResult run_case(const std::string& op, uint64_t seed, const std::string& shape, ParamStore<double>& store,
                         const TapeLoss& loss, Rng& rng, const GradcheckOptions& opt) {
  auto [err, probes] = check_gradients(store, loss, rng, opt);
  return {op, seed, shape, err, probes, err <= opt.tolerance};
}

GradcheckResult conv_case(uint64_t seed, const GradcheckOptions& opt) {
  Rng rng(seed);
  const int ci = rng.range(1, 3), co = rng.range(1, 3);
  const int d = rng.range(2, 4), h = rng.range(3, 5), w = rng.range(3, 5);
  const int kd = 1 + 2 * rng.range(0, 1), kh = 1 + 2 * rng.range(0, 1), kw = 3;
  ParamStore<double> st;
  st.add("x", random_tensor(rng, {ci, d, h, w}));
  st.add("k", random_tensor(rng, {co, ci, kd, kh, kw}));
  st.add("b", random_tensor(rng, {co}));
  const auto readout = random_tensor(rng, {1, co * d * h * w});
  TapeLoss loss = [readout](Tape<double>& t, ParamStore<double>& s) {
    const Var y = t.conv3d(t.param(s, "x"), t.param(s, "k"), t.param(s, "b"));
    return t.dense(t.reshape(y, {static_cast<int>(t.value(y).size())}), t.constant(readout));
  };
  return run_case("conv3d", seed, "in " + dims({ci, d, h, w}) + " k " + dims({co, ci, kd, kh, kw}), st, loss, rng, opt);
}

GradcheckResult pool_case(uint64_t seed, const GradcheckOptions& opt) {
  Rng rng(seed);
  const int c = rng.range(1, 3), d = rng.range(1, 5), h = rng.range(2, 5), w = rng.range(2, 5);
  ParamStore<double> st;
  st.add("x", random_tensor(rng, {c, d, h, w}));
  const int n_out = c * ((d + 1) / 2) * ((h + 1) / 2) * ((w + 1) / 2);
  const auto readout = random_tensor(rng, {1, n_out});
  TapeLoss loss = [readout](Tape<double>& t, ParamStore<double>& s) {
    const Var y = t.maxpool3d(t.param(s, "x"));
    return t.dense(t.reshape(y, {static_cast<int>(t.value(y).size())}), t.constant(readout));
  };
  return run_case("maxpool3d", seed, "in " + dims({c, d, h, w}), st, loss, rng, opt);
}

GradcheckResult dense_case(uint64_t seed, const GradcheckOptions& opt) {
  Rng rng(seed);
  const int n = rng.range(1, 9), m = rng.range(1, 9);
  ParamStore<double> st;
  st.add("x", random_tensor(rng, {n}));
  st.add("w", random_tensor(rng, {m, n}));
  st.add("b", random_tensor(rng, {m}));
  const auto readout = random_tensor(rng, {1, m});
  TapeLoss loss = [readout](Tape<double>& t, ParamStore<double>& s) {
    const Var y = t.dense(t.param(s, "x"), t.param(s, "w"), t.param(s, "b"));
    return t.dense(y, t.constant(readout));
  };
  return run_case("dense", seed, "w " + dims({m, n}), st, loss, rng, opt);
}

GradcheckResult relu_case(uint64_t seed, const GradcheckOptions& opt) {
  Rng rng(seed);
  const int n = rng.range(2, 8), h = rng.range(2, 8), m = rng.range(2, 6);
  ParamStore<double> st;
  st.add("x", random_tensor(rng, {n}));
  st.add("w1", random_tensor(rng, {h, n}));
  st.add("b1", random_tensor(rng, {h}));
  st.add("w2", random_tensor(rng, {m, h}));
  st.add("b2", random_tensor(rng, {m}));
  const int target = rng.range(0, m - 1);
  TapeLoss loss = [target](Tape<double>& t, ParamStore<double>& s) {
    const Var a = t.relu(t.dense(t.param(s, "x"), t.param(s, "w1"), t.param(s, "b1")));
    const Var z = t.dense(a, t.param(s, "w2"), t.param(s, "b2"));
    return t.softmax_xent(t.add(z, t.scale(t.relu(z), 0.5)), target);
  };
  return run_case("relu", seed, dims({n, h, m}), st, loss, rng, opt);
}

GradcheckResult xent_case(uint64_t seed, const GradcheckOptions& opt) {
  Rng rng(seed);
  const int k = rng.range(2, 12);
  ParamStore<double> st;
  st.add("z", random_tensor(rng, {k}, -3.0, 3.0));
  const int target = rng.range(0, k - 1);
  TapeLoss loss = [target](Tape<double>& t, ParamStore<double>& s) { return t.softmax_xent(t.param(s, "z"), target); };
  return run_case("softmax_xent", seed, "k " + std::to_string(k), st, loss, rng, opt);
}

GradcheckResult lstm_case(uint64_t seed, const GradcheckOptions& opt) {
  Rng rng(seed);
  const int x = rng.range(1, 5), hid = rng.range(1, 5);
  constexpr int kSteps = 4;
  ParamStore<double> st;
  st.add("wx", random_tensor(rng, {4 * hid, x}));
  st.add("wh", random_tensor(rng, {4 * hid, hid}));
  st.add("b", random_tensor(rng, {4 * hid}));
  st.add("h0", random_tensor(rng, {hid}));
  st.add("c0", random_tensor(rng, {hid}));
  for (int s = 0; s < kSteps; ++s) st.add("x" + std::to_string(s), random_tensor(rng, {x}));
  std::vector<BasicTensor<double>> readouts;
  for (int s = 0; s < kSteps; ++s) readouts.push_back(random_tensor(rng, {1, hid}));
  TapeLoss loss = [readouts](Tape<double>& t, ParamStore<double>& s) {
    const LstmParams p{t.param(s, "wx"), t.param(s, "wh"), t.param(s, "b")};
    LstmVars state{t.param(s, "h0"), t.param(s, "c0")};
    std::vector<Var> terms;
    for (int k = 0; k < kSteps; ++k) {
      state = lstm_step(t, t.param(s, "x" + std::to_string(k)), state, p);
      terms.push_back(t.dense(state.hidden, t.constant(readouts[static_cast<size_t>(k)])));
    }
    terms.push_back(t.dense(state.cell, t.constant(readouts.back())));
    return t.sum(terms);
  };
  return run_case("lstm_step", seed, "x " + std::to_string(x) + " h " + std::to_string(hid) + " steps 4", st, loss, rng,
                  opt);
}

GradcheckResult model_case(uint64_t seed, const GradcheckOptions& opt, int variant) {
  Rng rng(seed);
  model::ModelConfig cfg;
  cfg.side = rng.range(3, 5);
  cfg.frames = rng.range(2, 3);
  cfg.channels = {2, 3};
  cfg.embed_dim = 4;
  cfg.head_hidden = 5;
  cfg.word_dim = 3;
  cfg.lstm_hidden = 3;
  cfg.max_len = 3;
  const model::TrainMode modes[] = {model::TrainMode::Multitask, model::TrainMode::Independent,
                                    model::TrainMode::UnsentGen};
  cfg.mode = modes[variant % 3];
  const model::Vocabulary loc = model::Vocabulary::build({{"in", "toolbar"}, {"at", "upper", "left"}});
  const model::Vocabulary dec = cfg.mode == model::TrainMode::UnsentGen ? model::sentence_vocabulary(loc) : loc;

  ParamStore<double> st;
  model::init_params(st, cfg, dec.size(), derive_seed(seed, 1));
  for (size_t i = 0; i < st.count(); ++i) {
    if (st.value_at(i).rank() == 1) st.value_at(i) = random_tensor(rng, st.value_at(i).shape(), -0.2, 0.2);
  }

  std::vector<model::BasicModelInput<double>> inputs(2);
  std::vector<model::Target> targets;
  const StructuredAction labels[] = {{CommandClass::Click, WidgetClass::Button, {"in", "toolbar"}},
                                     {CommandClass::Type, WidgetClass::Text, {"at", "upper", "left"}}};
  for (int b = 0; b < 2; ++b) {
    auto& in = inputs[static_cast<size_t>(b)];
    in.crop = random_tensor(rng, {3, cfg.frames, cfg.side, cfg.side});
    in.origin = random_tensor(rng, {3, cfg.frames, cfg.side, cfg.side});
    in.simmap = random_tensor(rng, {1, cfg.frames, cfg.side, cfg.side}, 0.0, 1.0);
    targets.push_back(model::make_target(labels[b], dec, cfg));
  }
  const std::vector<const model::BasicModelInput<double>*> in_ptrs{&inputs[0], &inputs[1]};
  const std::vector<const model::Target*> tg_ptrs{&targets[0], &targets[1]};
  StoreLoss loss = [&](ParamStore<double>& s, bool grad) {
    return model::batch_loss<double>(s, cfg, in_ptrs, tg_ptrs, grad).total;
  };
  auto [err, probes] = check_gradients(st, loss, rng, opt);
  const std::string shape = std::string(model::mode_name(cfg.mode)) + " side " + std::to_string(cfg.side) +
                            " frames " + std::to_string(cfg.frames) + " batch 2";
  return {"model_loss", seed, shape, err, probes, err <= opt.tolerance};
}

}  // namespace

std::vector<GradcheckResult> run_gradcheck_suite(int seeds, uint64_t base_seed, const GradcheckOptions& opt) {
  using CaseFn = GradcheckResult (*)(uint64_t, const GradcheckOptions&);
  const CaseFn cases[] = {conv_case, pool_case, dense_case, relu_case, xent_case, lstm_case};
  std::vector<GradcheckResult> out;
  auto seed_for = [&](size_t c, int s) { return derive_seed(base_seed, c * 1000 + static_cast<uint64_t>(s)); };
  for (size_t c = 0; c < std::size(cases); ++c) {
    for (int s = 0; s < seeds; ++s) out.push_back(cases[c](seed_for(c, s), opt));
  }
  // Cycles through the three training modes.
  for (int s = 0; s < seeds; ++s) out.push_back(model_case(seed_for(std::size(cases), s), opt, s));
  return out;
}

json to_json(const GradcheckResult& r) {
  return json{{"op", r.op},
              {"seed", r.seed},
              {"case", r.shape},
              {"max_rel_error", r.max_rel_error},
              {"probes", r.probes},
              {"passed", r.passed}};
}

}  // namespace seeaction::nn
