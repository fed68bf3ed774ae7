#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seeaction/nn/params.hpp"
#include "seeaction/nn/tape.hpp"
#include "seeaction/taxonomy.hpp"
#include "seeaction/vision.hpp"
#include "seeaction/vocabulary.hpp"

namespace seeaction::model {

// Input streams, in the fixed order their embeddings are concatenated.
enum class Stream : int { CropCR = 0, Origin = 1, SimMap = 2 };

std::string_view stream_name(Stream s);
std::optional<Stream> parse_stream(std::string_view s);
std::vector<Stream> all_streams();
// Sorted into fusion order, duplicates removed; throws on an empty set.
std::vector<Stream> canonical_streams(std::vector<Stream> streams);
// "crop,origin,simmap" style list.
std::vector<Stream> parse_stream_list(std::string_view list);
std::string stream_list_string(const std::vector<Stream>& streams);

enum class TrainMode { Multitask, Independent, UnsentGen };

std::string_view mode_name(TrainMode m);
std::optional<TrainMode> parse_mode(std::string_view s);

struct ModelConfig {
  int side = 64;
  int frames = 8;
  std::vector<int> channels{8, 16, 32, 64};
  int embed_dim = 512;
  int head_hidden = 256;
  int word_dim = 64;
  int lstm_hidden = 128;
  int max_len = 6;
  TrainMode mode = TrainMode::Multitask;
  std::vector<Stream> streams = all_streams();

  void validate() const;
  int fused_dim() const { return embed_dim * static_cast<int>(streams.size()); }
  // Decoder positions: location phrase (+<end>) or, for unsent_gen, the whole sentence.
  int decode_len() const { return mode == TrainMode::UnsentGen ? max_len + 2 : max_len; }
  // Flattened encoder feature size after the conv/pool blocks.
  int encoder_flat_dim() const;
};

// Model inputs per stream, each [channels, S, side, side].
template <typename T>
struct BasicModelInput {
  nn::BasicTensor<T> crop;
  nn::BasicTensor<T> origin;
  nn::BasicTensor<T> simmap;

  const nn::BasicTensor<T>& stream(Stream s) const {
    switch (s) {
      case Stream::CropCR: return crop;
      case Stream::Origin: return origin;
      case Stream::SimMap: return simmap;
    }
    return crop;
  }

  template <typename U>
  BasicModelInput<U> cast() const {
    return {crop.template cast<U>(), origin.template cast<U>(), simmap.template cast<U>()};
  }
};
using ModelInput = BasicModelInput<float>;

int stream_channels(Stream s);
ModelInput make_input(const vision::StreamBundle& bundle);

// Training target: class ids plus decoder targets padded with <pad> to decode_len.
struct Target {
  int command = 0;
  int widget = 0;
  std::vector<int> tokens;
};

// Combined vocabulary for unstructured sentence generation: command tokens
// ("cmd:click"), widget tokens ("wid:button"), then the location words.
Vocabulary sentence_vocabulary(const Vocabulary& location_vocab);
std::vector<std::string> sentence_tokens(const StructuredAction& action);
// Parses "cmd:<c> wid:<w> <location words>"; nullopt when malformed.
std::optional<StructuredAction> parse_sentence(const std::vector<std::string>& tokens);

Target make_target(const StructuredAction& action, const Vocabulary& decoder_vocab, const ModelConfig& cfg);

// Parameter names are prefixed per task in independent mode.
std::vector<std::string> task_prefixes(TrainMode mode);

template <typename T>
void init_params(nn::ParamStore<T>& params, const ModelConfig& cfg, int decoder_vocab_size, uint64_t seed);

// ---- differentiable pieces ----

template <typename T>
nn::Var encode_stream(nn::Tape<T>& tape, nn::ParamStore<T>& params, const ModelConfig& cfg, const std::string& prefix,
                      Stream s, const nn::BasicTensor<T>& input);

// Fused embedding over the active streams, concatenated in fusion order.
template <typename T>
nn::Var encode(nn::Tape<T>& tape, nn::ParamStore<T>& params, const ModelConfig& cfg, const std::string& prefix,
               const BasicModelInput<T>& input);

// head is "cmd" or "wid": dense -> ReLU -> dense, 11 logits.
template <typename T>
nn::Var head_logits(nn::Tape<T>& tape, nn::ParamStore<T>& params, const std::string& prefix, const std::string& head,
                    nn::Var fused);

// Teacher-forced decoder cross-entropy summed over non-pad target positions.
template <typename T>
nn::Var location_loss(nn::Tape<T>& tape, nn::ParamStore<T>& params, const ModelConfig& cfg, const std::string& prefix,
                      nn::Var fused, const std::vector<int>& targets);

struct LossParts {
  double total = 0.0;
  double command = 0.0;
  double widget = 0.0;
  double location = 0.0;
};

// Mean loss over a batch. With `accumulate_grad`, adds d(mean loss)/d(param)
// into params' gradient slots (which the caller zeroes). Independent mode runs
// one tape per task; unsent_gen optimizes only the sentence decoder loss.
template <typename T>
LossParts batch_loss(nn::ParamStore<T>& params, const ModelConfig& cfg, std::span<const BasicModelInput<T>* const> inputs,
                     std::span<const Target* const> targets, bool accumulate_grad);

// ---- inference ----

struct Prediction {
  std::vector<double> command_probs;  // 11 entries; empty in unsent_gen mode
  std::vector<double> widget_probs;
  std::vector<std::string> tokens;    // decoder output, <end> excluded
  std::optional<StructuredAction> action;  // nullopt when an unsent_gen sentence is malformed
};

class SeeActionModel {
 public:
  SeeActionModel(ModelConfig cfg, Vocabulary location_vocab, uint64_t seed);
  SeeActionModel(ModelConfig cfg, Vocabulary location_vocab, nn::ParamStore<float> params);

  const ModelConfig& config() const { return cfg_; }
  const Vocabulary& location_vocab() const { return location_vocab_; }
  const Vocabulary& decoder_vocab() const { return decoder_vocab_; }
  nn::ParamStore<float>& params() { return params_; }
  const nn::ParamStore<float>& params() const { return params_; }

  Target target_for(const StructuredAction& action) const { return make_target(action, decoder_vocab_, cfg_); }
  std::vector<double> fused_embedding(const ModelInput& input) const;
  Prediction predict(const ModelInput& input) const;

  // Writes <path>.params (binary) and <path>.json (config, classes, vocabulary,
  // provenance).
  void save(const std::filesystem::path& base, const std::string& provenance_json = "{}") const;
  static SeeActionModel load(const std::filesystem::path& base);

 private:
  ModelConfig cfg_;
  Vocabulary location_vocab_;
  Vocabulary decoder_vocab_;
  mutable nn::ParamStore<float> params_;
};

}  // namespace seeaction::model
