#include "seeaction/model.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "seeaction/error.hpp"

namespace seeaction::model {

using nn::Var;
using json = nlohmann::json;

namespace {

constexpr std::string_view kCmdPrefix = "cmd:";
constexpr std::string_view kWidPrefix = "wid:";

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

// "scroll down" -> "scroll_down" so sentence tokens stay single words.
std::string token_form(std::string_view name) {
  std::string out = lower(name);
  std::replace(out.begin(), out.end(), ' ', '_');
  return out;
}

std::string enc_name(const std::string& prefix, Stream s, const std::string& leaf) {
  return prefix + "enc." + std::string(stream_name(s)) + "." + leaf;
}

}  // namespace

std::string_view stream_name(Stream s) {
  switch (s) {
    case Stream::CropCR: return "crop";
    case Stream::Origin: return "origin";
    case Stream::SimMap: return "simmap";
  }
  return "?";
}

std::optional<Stream> parse_stream(std::string_view s) {
  const std::string k = lower(s);
  if (k == "crop" || k == "cropcr" || k == "chreg") return Stream::CropCR;
  if (k == "origin" || k == "orig") return Stream::Origin;
  if (k == "simmap" || k == "sim") return Stream::SimMap;
  return std::nullopt;
}

std::vector<Stream> all_streams() { return {Stream::CropCR, Stream::Origin, Stream::SimMap}; }

std::vector<Stream> canonical_streams(std::vector<Stream> streams) {
  std::sort(streams.begin(), streams.end());
  streams.erase(std::unique(streams.begin(), streams.end()), streams.end());
  if (streams.empty()) throw ValidationError("at least one input stream must be active");
  return streams;
}

std::vector<Stream> parse_stream_list(std::string_view list) {
  std::vector<Stream> out;
  std::stringstream ss{std::string(list)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto s = parse_stream(item);
    if (!s) throw ValidationError("unknown stream: " + item);
    out.push_back(*s);
  }
  return canonical_streams(out);
}

std::string stream_list_string(const std::vector<Stream>& streams) {
  std::string out;
  for (Stream s : streams) {
    if (!out.empty()) out += ',';
    out += stream_name(s);
  }
  return out;
}

std::string_view mode_name(TrainMode m) {
  switch (m) {
    case TrainMode::Multitask: return "multitask";
    case TrainMode::Independent: return "independent";
    case TrainMode::UnsentGen: return "unsent_gen";
  }
  return "?";
}

std::optional<TrainMode> parse_mode(std::string_view s) {
  const std::string k = lower(s);
  if (k == "multitask") return TrainMode::Multitask;
  if (k == "independent") return TrainMode::Independent;
  if (k == "unsent_gen" || k == "unsentgen") return TrainMode::UnsentGen;
  return std::nullopt;
}

void ModelConfig::validate() const {
  if (side < 1 || frames < 2) throw ValidationError("model side must be >= 1 and frames >= 2");
  if (channels.empty()) throw ValidationError("encoder needs at least one conv block");
  for (int c : channels) {
    if (c < 1) throw ValidationError("channel widths must be positive");
  }
  if (embed_dim < 1 || head_hidden < 1 || word_dim < 1 || lstm_hidden < 1 || max_len < 1) {
    throw ValidationError("model dimensions must be positive");
  }
  canonical_streams(streams);
}

int ModelConfig::encoder_flat_dim() const {
  int d = frames, h = side, w = side;
  for (size_t i = 0; i < channels.size(); ++i) {
    d = (d + 1) / 2;
    h = (h + 1) / 2;
    w = (w + 1) / 2;
  }
  return channels.back() * d * h * w;
}

int stream_channels(Stream s) { return s == Stream::SimMap ? 1 : 3; }

namespace {

nn::Tensor pack_stream(const std::vector<vision::FloatImage>& images, int channels, float offset) {
  const int frames = static_cast<int>(images.size());
  const int side = images.front().width;
  nn::Tensor t({channels, frames, side, side});
  const size_t plane = static_cast<size_t>(side) * side;
  for (int f = 0; f < frames; ++f) {
    const auto& img = images[static_cast<size_t>(f)];
    for (int c = 0; c < channels; ++c) {
      float* dst = t.data() + (static_cast<size_t>(c) * frames + f) * plane;
      for (size_t i = 0; i < plane; ++i) dst[i] = img.data[i * channels + c] - offset;
    }
  }
  return t;
}

}  // namespace

ModelInput make_input(const vision::StreamBundle& bundle) {
  return ModelInput{pack_stream(bundle.change_crops, 3, 0.5f), pack_stream(bundle.originals, 3, 0.5f),
                    pack_stream(bundle.sim_maps, 1, 0.0f)};
}

Vocabulary sentence_vocabulary(const Vocabulary& location_vocab) {
  std::vector<std::string> words;
  for (CommandClass c : all_commands()) words.push_back(std::string(kCmdPrefix) + token_form(command_name(c)));
  for (WidgetClass w : all_widgets()) words.push_back(std::string(kWidPrefix) + token_form(widget_name(w)));
  for (const auto& w : location_vocab.words()) words.push_back(w);
  return Vocabulary::from_words(words);
}

std::vector<std::string> sentence_tokens(const StructuredAction& action) {
  std::vector<std::string> out{std::string(kCmdPrefix) + token_form(command_name(action.command)),
                               std::string(kWidPrefix) + token_form(widget_name(action.widget))};
  out.insert(out.end(), action.location.begin(), action.location.end());
  return out;
}

std::optional<StructuredAction> parse_sentence(const std::vector<std::string>& tokens) {
  if (tokens.size() < 2) return std::nullopt;
  auto strip = [](const std::string& t, std::string_view prefix) -> std::optional<std::string> {
    if (t.rfind(prefix, 0) != 0) return std::nullopt;
    return t.substr(prefix.size());
  };
  auto c = strip(tokens[0], kCmdPrefix);
  auto w = strip(tokens[1], kWidPrefix);
  if (!c || !w) return std::nullopt;
  auto cmd = parse_command(*c);
  auto wid = parse_widget(*w);
  if (!cmd || !wid) return std::nullopt;
  StructuredAction a{*cmd, *wid, {}};
  for (size_t i = 2; i < tokens.size(); ++i) {
    if (tokens[i].rfind(kCmdPrefix, 0) == 0 || tokens[i].rfind(kWidPrefix, 0) == 0) return std::nullopt;
    a.location.push_back(tokens[i]);
  }
  return a;
}

Target make_target(const StructuredAction& action, const Vocabulary& decoder_vocab, const ModelConfig& cfg) {
  Target t;
  t.command = static_cast<int>(action.command);
  t.widget = static_cast<int>(action.widget);
  const std::vector<std::string> words =
      cfg.mode == TrainMode::UnsentGen ? sentence_tokens(action) : action.location;
  const size_t len = static_cast<size_t>(cfg.decode_len());
  t.tokens = decoder_vocab.encode(words);
  if (t.tokens.size() > len) t.tokens.resize(len);
  if (t.tokens.size() < len) t.tokens.push_back(Vocabulary::kEnd);
  t.tokens.resize(len, Vocabulary::kPad);
  return t;
}

std::vector<std::string> task_prefixes(TrainMode mode) {
  if (mode == TrainMode::Independent) return {"cmd/", "wid/", "loc/"};
  return {""};
}

template <typename T>
void init_params(nn::ParamStore<T>& params, const ModelConfig& cfg, int decoder_vocab_size, uint64_t seed) {
  cfg.validate();
  params.set_seed(seed);
  Rng rng(seed);
  const int fused = cfg.fused_dim();
  const int hid = cfg.lstm_hidden;
  auto dense = [&](const std::string& name, int out, int in) {
    params.add(name + ".w", nn::he_uniform<T>(rng, {out, in}, in));
    params.add(name + ".b", nn::BasicTensor<T>({out}));
  };
  auto encoders = [&](const std::string& prefix) {
    for (Stream s : cfg.streams) {
      int c_in = stream_channels(s);
      for (size_t i = 0; i < cfg.channels.size(); ++i) {
        const int c_out = cfg.channels[i];
        const std::string leaf = "conv" + std::to_string(i);
        params.add(enc_name(prefix, s, leaf + ".w"), nn::he_uniform<T>(rng, {c_out, c_in, 3, 3, 3}, c_in * 27));
        params.add(enc_name(prefix, s, leaf + ".b"), nn::BasicTensor<T>({c_out}));
        c_in = c_out;
      }
      dense(enc_name(prefix, s, "fc"), cfg.embed_dim, cfg.encoder_flat_dim());
    }
  };
  auto head = [&](const std::string& prefix, const std::string& which) {
    dense(prefix + "head." + which + ".fc1", cfg.head_hidden, fused);
    dense(prefix + "head." + which + ".fc2", which == "cmd" ? kNumCommands : kNumWidgets, cfg.head_hidden);
  };
  auto decoder = [&](const std::string& prefix) {
    dense(prefix + "dec.init_h", hid, fused);
    dense(prefix + "dec.init_c", hid, fused);
    params.add(prefix + "dec.embed", nn::he_uniform<T>(rng, {decoder_vocab_size, cfg.word_dim}, cfg.word_dim));
    params.add(prefix + "dec.lstm.wx", nn::he_uniform<T>(rng, {4 * hid, cfg.word_dim}, cfg.word_dim + hid));
    params.add(prefix + "dec.lstm.wh", nn::he_uniform<T>(rng, {4 * hid, hid}, cfg.word_dim + hid));
    params.add(prefix + "dec.lstm.b", nn::BasicTensor<T>({4 * hid}));
    dense(prefix + "dec.out", decoder_vocab_size, hid);
  };

  switch (cfg.mode) {
    case TrainMode::Multitask:
      encoders("");
      head("", "cmd");
      head("", "wid");
      decoder("");
      break;
    case TrainMode::Independent:
      encoders("cmd/");
      head("cmd/", "cmd");
      encoders("wid/");
      head("wid/", "wid");
      encoders("loc/");
      decoder("loc/");
      break;
    case TrainMode::UnsentGen:
      encoders("");
      decoder("");
      break;
  }
}

template <typename T>
Var encode_stream(nn::Tape<T>& tape, nn::ParamStore<T>& params, const ModelConfig& cfg, const std::string& prefix,
                  Stream s, const nn::BasicTensor<T>& input) {
  Var x = tape.constant(input);
  for (size_t i = 0; i < cfg.channels.size(); ++i) {
    const std::string leaf = "conv" + std::to_string(i);
    x = tape.conv3d(x, tape.param(params, enc_name(prefix, s, leaf + ".w")), tape.param(params, enc_name(prefix, s, leaf + ".b")));
    x = tape.maxpool3d(tape.relu(x));
  }
  x = tape.reshape(x, {static_cast<int>(tape.value(x).size())});
  return tape.dense(x, tape.param(params, enc_name(prefix, s, "fc.w")), tape.param(params, enc_name(prefix, s, "fc.b")));
}

template <typename T>
Var encode(nn::Tape<T>& tape, nn::ParamStore<T>& params, const ModelConfig& cfg, const std::string& prefix,
           const BasicModelInput<T>& input) {
  std::vector<Var> parts;
  for (Stream s : cfg.streams) parts.push_back(encode_stream(tape, params, cfg, prefix, s, input.stream(s)));
  return parts.size() == 1 ? parts.front() : tape.concat(parts);
}

template <typename T>
Var head_logits(nn::Tape<T>& tape, nn::ParamStore<T>& params, const std::string& prefix, const std::string& head,
                Var fused) {
  const std::string base = prefix + "head." + head;
  Var h = tape.relu(tape.dense(fused, tape.param(params, base + ".fc1.w"), tape.param(params, base + ".fc1.b")));
  return tape.dense(h, tape.param(params, base + ".fc2.w"), tape.param(params, base + ".fc2.b"));
}

namespace {

template <typename T>
struct Decoder {
  nn::Tape<T>& tape;
  nn::ParamStore<T>& params;
  std::string prefix;
  nn::LstmParams lstm;
  Var embed, out_w, out_b;
  nn::LstmVars state;

  Decoder(nn::Tape<T>& t, nn::ParamStore<T>& p, const std::string& pre, Var fused) : tape(t), params(p), prefix(pre) {
    lstm = {tape.param(params, prefix + "dec.lstm.wx"), tape.param(params, prefix + "dec.lstm.wh"),
            tape.param(params, prefix + "dec.lstm.b")};
    embed = tape.param(params, prefix + "dec.embed");
    out_w = tape.param(params, prefix + "dec.out.w");
    out_b = tape.param(params, prefix + "dec.out.b");
    state.hidden = tape.tanh(tape.dense(fused, tape.param(params, prefix + "dec.init_h.w"), tape.param(params, prefix + "dec.init_h.b")));
    state.cell = tape.dense(fused, tape.param(params, prefix + "dec.init_c.w"), tape.param(params, prefix + "dec.init_c.b"));
  }

  // Feeds `token`, returns next-token logits.
  Var step(int token) {
    state = nn::lstm_step(tape, tape.embedding(embed, token), state, lstm);
    return tape.dense(state.hidden, out_w, out_b);
  }
};

}  // namespace

template <typename T>
Var location_loss(nn::Tape<T>& tape, nn::ParamStore<T>& params, const ModelConfig& cfg, const std::string& prefix,
                  Var fused, const std::vector<int>& targets) {
  (void)cfg;
  std::vector<Var> terms;
  size_t active = 0;
  while (active < targets.size() && targets[active] != Vocabulary::kPad) ++active;
  if (active == 0) return tape.constant(nn::BasicTensor<T>({1}));
  Decoder<T> dec(tape, params, prefix, fused);
  int prev = Vocabulary::kStart;
  for (size_t i = 0; i < active; ++i) {
    terms.push_back(tape.softmax_xent(dec.step(prev), targets[i]));
    prev = targets[i];
  }
  return tape.sum(terms);
}

template <typename T>
LossParts batch_loss(nn::ParamStore<T>& params, const ModelConfig& cfg, std::span<const BasicModelInput<T>* const> inputs,
                     std::span<const Target* const> targets, bool accumulate_grad) {
  if (inputs.size() != targets.size() || inputs.empty()) throw ValidationError("batch inputs/targets mismatch or empty");
  LossParts parts;
  const T scale = T(1) / static_cast<T>(inputs.size());
  for (size_t n = 0; n < inputs.size(); ++n) {
    const auto& in = *inputs[n];
    const Target& tg = *targets[n];
    if (tg.command < 0 || tg.command >= kNumCommands || tg.widget < 0 || tg.widget >= kNumWidgets) {
      throw ValidationError("label out of range");
    }
    switch (cfg.mode) {
      case TrainMode::Multitask: {
        nn::Tape<T> tape;
        Var e = encode(tape, params, cfg, "", in);
        Var lc = tape.softmax_xent(head_logits(tape, params, "", "cmd", e), tg.command);
        Var lw = tape.softmax_xent(head_logits(tape, params, "", "wid", e), tg.widget);
        Var ll = location_loss(tape, params, cfg, "", e, tg.tokens);
        Var total = tape.sum({lc, lw, ll});
        if (accumulate_grad) tape.backward(total, scale);
        parts.command += tape.value(lc)[0];
        parts.widget += tape.value(lw)[0];
        parts.location += tape.value(ll)[0];
        break;
      }
      case TrainMode::Independent: {
        {
          nn::Tape<T> tape;
          Var lc = tape.softmax_xent(head_logits(tape, params, "cmd/", "cmd", encode(tape, params, cfg, "cmd/", in)), tg.command);
          if (accumulate_grad) tape.backward(lc, scale);
          parts.command += tape.value(lc)[0];
        }
        {
          nn::Tape<T> tape;
          Var lw = tape.softmax_xent(head_logits(tape, params, "wid/", "wid", encode(tape, params, cfg, "wid/", in)), tg.widget);
          if (accumulate_grad) tape.backward(lw, scale);
          parts.widget += tape.value(lw)[0];
        }
        {
          nn::Tape<T> tape;
          Var ll = location_loss(tape, params, cfg, "loc/", encode(tape, params, cfg, "loc/", in), tg.tokens);
          if (accumulate_grad && tape.value(ll)[0] != T(0)) tape.backward(ll, scale);
          parts.location += tape.value(ll)[0];
        }
        break;
      }
      case TrainMode::UnsentGen: {
        nn::Tape<T> tape;
        Var ll = location_loss(tape, params, cfg, "", encode(tape, params, cfg, "", in), tg.tokens);
        if (accumulate_grad) tape.backward(ll, scale);
        parts.location += tape.value(ll)[0];
        break;
      }
    }
  }
  const double inv = 1.0 / static_cast<double>(inputs.size());
  parts.command *= inv;
  parts.widget *= inv;
  parts.location *= inv;
  parts.total = parts.command + parts.widget + parts.location;
  return parts;
}

// ---- SeeActionModel ----

SeeActionModel::SeeActionModel(ModelConfig cfg, Vocabulary location_vocab, uint64_t seed)
    : cfg_(std::move(cfg)), location_vocab_(std::move(location_vocab)) {
  cfg_.streams = canonical_streams(cfg_.streams);
  decoder_vocab_ = cfg_.mode == TrainMode::UnsentGen ? sentence_vocabulary(location_vocab_) : location_vocab_;
  init_params(params_, cfg_, decoder_vocab_.size(), seed);
}

SeeActionModel::SeeActionModel(ModelConfig cfg, Vocabulary location_vocab, nn::ParamStore<float> params)
    : cfg_(std::move(cfg)), location_vocab_(std::move(location_vocab)), params_(std::move(params)) {
  cfg_.streams = canonical_streams(cfg_.streams);
  decoder_vocab_ = cfg_.mode == TrainMode::UnsentGen ? sentence_vocabulary(location_vocab_) : location_vocab_;
  nn::ParamStore<float> expected;
  init_params(expected, cfg_, decoder_vocab_.size(), 0);
  if (expected.names() != params_.names()) throw FormatError("parameter layout does not match model config");
  for (size_t i = 0; i < expected.count(); ++i) {
    if (expected.value_at(i).shape() != params_.value_at(i).shape()) {
      throw FormatError("parameter shape mismatch for " + expected.names()[i]);
    }
  }
}

std::vector<double> SeeActionModel::fused_embedding(const ModelInput& input) const {
  nn::Tape<float> tape;
  const std::string prefix = task_prefixes(cfg_.mode).front();
  const auto& v = tape.value(encode(tape, params_, cfg_, prefix, input));
  return std::vector<double>(v.values().begin(), v.values().end());
}

namespace {

std::vector<double> probs(const nn::Tensor& logits) {
  const auto p = nn::Tape<float>::softmax(logits.values());
  return std::vector<double>(p.begin(), p.end());
}

int argmax(const std::vector<double>& p) {
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

}  // namespace

Prediction SeeActionModel::predict(const ModelInput& input) const {
  Prediction pred;
  nn::Tape<float> tape;
  auto greedy = [&](const std::string& prefix, Var fused) {
    Decoder<float> dec(tape, params_, prefix, fused);
    std::vector<std::string> tokens;
    int prev = Vocabulary::kStart;
    for (int i = 0; i < cfg_.decode_len(); ++i) {
      const auto& logits = tape.value(dec.step(prev)).values();
      int best = Vocabulary::kEnd;
      for (int k = Vocabulary::kEnd; k < static_cast<int>(logits.size()); ++k) {
        if (logits[static_cast<size_t>(k)] > logits[static_cast<size_t>(best)]) best = k;
      }
      if (best == Vocabulary::kEnd) break;
      tokens.push_back(decoder_vocab_.word(best));
      prev = best;
    }
    return tokens;
  };

  switch (cfg_.mode) {
    case TrainMode::Multitask: {
      Var e = encode(tape, params_, cfg_, "", input);
      pred.command_probs = probs(tape.value(head_logits(tape, params_, "", "cmd", e)));
      pred.widget_probs = probs(tape.value(head_logits(tape, params_, "", "wid", e)));
      pred.tokens = greedy("", e);
      break;
    }
    case TrainMode::Independent: {
      pred.command_probs = probs(tape.value(head_logits(tape, params_, "cmd/", "cmd", encode(tape, params_, cfg_, "cmd/", input))));
      pred.widget_probs = probs(tape.value(head_logits(tape, params_, "wid/", "wid", encode(tape, params_, cfg_, "wid/", input))));
      pred.tokens = greedy("loc/", encode(tape, params_, cfg_, "loc/", input));
      break;
    }
    case TrainMode::UnsentGen: {
      pred.tokens = greedy("", encode(tape, params_, cfg_, "", input));
      pred.action = parse_sentence(pred.tokens);
      return pred;
    }
  }
  pred.action = StructuredAction{command_from_id(argmax(pred.command_probs)), widget_from_id(argmax(pred.widget_probs)),
                                 pred.tokens};
  return pred;
}

void SeeActionModel::save(const std::filesystem::path& base, const std::string& provenance_json) const {
  nn::save_params(std::filesystem::path(base.string() + ".params"), params_);
  json j;
  j["format"] = "seeaction-model";
  j["version"] = 1;
  j["provenance"] = json::parse(provenance_json);
  json c;
  c["side"] = cfg_.side;
  c["frames"] = cfg_.frames;
  c["channels"] = cfg_.channels;
  c["embed_dim"] = cfg_.embed_dim;
  c["head_hidden"] = cfg_.head_hidden;
  c["word_dim"] = cfg_.word_dim;
  c["lstm_hidden"] = cfg_.lstm_hidden;
  c["max_len"] = cfg_.max_len;
  c["mode"] = std::string(mode_name(cfg_.mode));
  c["streams"] = stream_list_string(cfg_.streams);
  j["config"] = c;
  json cmds = json::array();
  for (CommandClass cc : all_commands()) cmds.push_back(std::string(command_name(cc)));
  json wids = json::array();
  for (WidgetClass w : all_widgets()) wids.push_back(std::string(widget_name(w)));
  j["commands"] = cmds;
  j["widgets"] = wids;
  j["vocabulary"] = location_vocab_.words();
  std::ofstream out(base.string() + ".json");
  if (!out) throw ValidationError("cannot write model sidecar: " + base.string() + ".json");
  out << j.dump(2) << "\n";
}

SeeActionModel SeeActionModel::load(const std::filesystem::path& base) {
  std::ifstream in(base.string() + ".json");
  if (!in) throw NotFoundError("model sidecar not found: " + base.string() + ".json");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad model sidecar: ") + e.what());
  }
  if (j.value("format", "") != "seeaction-model") throw FormatError("not a seeaction model sidecar");
  const json& c = j.at("config");
  ModelConfig cfg;
  cfg.side = c.at("side");
  cfg.frames = c.at("frames");
  cfg.channels = c.at("channels").get<std::vector<int>>();
  cfg.embed_dim = c.at("embed_dim");
  cfg.head_hidden = c.at("head_hidden");
  cfg.word_dim = c.at("word_dim");
  cfg.lstm_hidden = c.at("lstm_hidden");
  cfg.max_len = c.at("max_len");
  auto mode = parse_mode(c.at("mode").get<std::string>());
  if (!mode) throw FormatError("unknown mode in model sidecar");
  cfg.mode = *mode;
  cfg.streams = parse_stream_list(c.at("streams").get<std::string>());
  Vocabulary vocab = Vocabulary::from_words(j.at("vocabulary").get<std::vector<std::string>>());
  return SeeActionModel(cfg, vocab, nn::load_params(base.string() + ".params"));
}

#define SEEACTION_INSTANTIATE(T)                                                                                   \
  template void init_params<T>(nn::ParamStore<T>&, const ModelConfig&, int, uint64_t);                             \
  template Var encode_stream<T>(nn::Tape<T>&, nn::ParamStore<T>&, const ModelConfig&, const std::string&, Stream,  \
                                const nn::BasicTensor<T>&);                                                        \
  template Var encode<T>(nn::Tape<T>&, nn::ParamStore<T>&, const ModelConfig&, const std::string&,                 \
                         const BasicModelInput<T>&);                                                               \
  template Var head_logits<T>(nn::Tape<T>&, nn::ParamStore<T>&, const std::string&, const std::string&, Var);      \
  template Var location_loss<T>(nn::Tape<T>&, nn::ParamStore<T>&, const ModelConfig&, const std::string&, Var,     \
                                const std::vector<int>&);                                                          \
  template LossParts batch_loss<T>(nn::ParamStore<T>&, const ModelConfig&, std::span<const BasicModelInput<T>* const>, \
                                   std::span<const Target* const>, bool);

SEEACTION_INSTANTIATE(float)
SEEACTION_INSTANTIATE(double)

#undef SEEACTION_INSTANTIATE

}  // namespace seeaction::model
