// Copyright 2026 The lyricgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lyricgen/corpus.hpp"
#include "lyricgen/kernels.hpp"

namespace lyricgen::model {

using kernels::AttentionParams;
using kernels::AttentionVariant;
using kernels::LSTMParams;

/// How the theme keywords reach the decoder. kZeroed and kMasked are
/// ablations: kZeroed replaces m_1, m_2 by zero vectors, kMasked forces their
/// attention weights to zero.
enum class ThemeChannel { kOn, kZeroed, kMasked };

std::string to_string(ThemeChannel c);
ThemeChannel theme_channel_from_string(const std::string& s);

struct ModelConfig {
  int embed_dim = 32;
  int hidden_dim = 64;
  int attention_dim = 64;
  AttentionVariant attention_variant = AttentionVariant::kAdditive;
  int vocab_size = 0;
  double init_range = 0.1;
  bool tie_theme_sentence_encoders = false;
  ThemeChannel theme_channel = ThemeChannel::kOn;

  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

/// Every trainable tensor of the network. The same type carries gradients
/// and optimizer accumulators. With tied encoders the theme_* members stay
/// empty and the sentence encoder is used for both channels.
struct ModelParams {
  ModelConfig cfg;
  Tensor embedding;                // V x E
  LSTMParams sent_fwd, sent_bwd;   // E -> H
  LSTMParams theme_fwd, theme_bwd; // E -> H
  LSTMParams dec;                  // [E ; 2H] -> H
  Tensor init_W, init_b;           // 2H -> H
  AttentionParams attn;
  Tensor pre_W, pre_b;             // [H ; 2H] -> H, ReLU
  Tensor out_W, out_b;             // H -> V

  static ModelParams zeros(const ModelConfig& cfg);

  const LSTMParams& theme_fwd_params() const {
    return cfg.tie_theme_sentence_encoders ? sent_fwd : theme_fwd;
  }
  const LSTMParams& theme_bwd_params() const {
    return cfg.tie_theme_sentence_encoders ? sent_bwd : theme_bwd;
  }
  LSTMParams& theme_fwd_params() { return cfg.tie_theme_sentence_encoders ? sent_fwd : theme_fwd; }
  LSTMParams& theme_bwd_params() { return cfg.tie_theme_sentence_encoders ? sent_bwd : theme_bwd; }

  /// Visits every live tensor in a fixed order with its checkpoint name.
  template <class Self, class F>
  static void visit(Self& p, F&& f) {
    f("embedding", p.embedding);
    auto lstm = [&](const char* prefix, auto& l) {
      f(std::string(prefix) + ".Wx", l.Wx);
      f(std::string(prefix) + ".Wh", l.Wh);
      f(std::string(prefix) + ".b", l.b);
    };
    lstm("sent_fwd", p.sent_fwd);
    lstm("sent_bwd", p.sent_bwd);
    if (!p.cfg.tie_theme_sentence_encoders) {
      lstm("theme_fwd", p.theme_fwd);
      lstm("theme_bwd", p.theme_bwd);
    }
    lstm("dec", p.dec);
    f("init.W", p.init_W);
    f("init.b", p.init_b);
    f("attn.W", p.attn.W);
    if (p.attn.variant == AttentionVariant::kAdditive) {
      f("attn.U", p.attn.U);
      f("attn.v", p.attn.v);
    }
    f("pre.W", p.pre_W);
    f("pre.b", p.pre_b);
    f("out.W", p.out_W);
    f("out.b", p.out_b);
  }
  template <class F> void for_each(F&& f) { visit(*this, f); }
  template <class F> void for_each(F&& f) const { visit(*this, f); }

  std::size_t parameter_count() const;
  bool all_finite() const;
  bool operator==(const ModelParams&) const = default;
};

/// Every weight and bias i.i.d. uniform on [-init_range, init_range].
ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed);

/// Theme id -> the two keyword token ids fed to the theme encoder.
using ThemeTable = std::vector<std::array<int, 2>>;

struct EncoderStates {
  std::vector<Vec> sentence_states;  // h_1 .. h_L, width 2H
  std::array<Vec, 2> theme_states;   // m_1, m_2, width 2H
  Vec final_state;                   // [last forward ; last backward] of the sentence encoder

  /// Attention memory: sentence states then m_1, m_2.
  std::vector<Vec> keys() const;
};

struct EncoderTrace {
  kernels::BiLstmResult sentence;
  kernels::BiLstmResult theme;
};

EncoderStates encode(std::span<const int> src, std::span<const int> theme_ids,
                     const ModelParams& params, EncoderTrace* trace = nullptr);

struct DecoderState {
  Vec s;    // decoder hidden state, width H
  Vec mem;  // decoder LSTM cell, width H
  Vec ctx;  // previous attention context, width 2H
};

/// s_0 = tanh(init_W final_state + init_b); cell and context start at zero.
DecoderState initial_decoder_state(const EncoderStates& states, const ModelParams& params);

struct StepCache {
  kernels::LstmCache lstm;
  kernels::AttnCache attn;
  Vec s_prev;
  Vec alpha;
  Vec s, ctx;
  Vec pre;     // pre-activation of the ReLU projection
  Vec hidden;  // ReLU output
};

struct StepOutput {
  Vec logits;
  DecoderState next;
  Vec alpha;
};

/// One decoder step: LSTM on [embed(y_prev) ; ctx_prev], attention queried
/// with s_prev, logits from out(ReLU(pre([s_t ; c_t]))).
StepOutput decode_step(const DecoderState& prev, int y_prev, const std::vector<Vec>& keys,
                       const ModelParams& params, StepCache* cache = nullptr);

/// Summed cross-entropy of one pair under teacher forcing (L_trg + 1 terms).
/// When grads is non-null the unscaled gradient is accumulated into it.
double pair_loss(const corpus::SentencePair& pair, const ThemeTable& themes,
                 const ModelParams& params, ModelParams* grads, long* terms = nullptr);

struct LossAndGrad {
  double loss = 0.0;  // mean per target token
  long terms = 0;
  ModelParams grads;
};

/// Mean per-token cross-entropy over the batch and its gradient. Examples are
/// processed in batch order so the summation order is fixed.
LossAndGrad forward_loss(std::span<const corpus::SentencePair> batch, const ThemeTable& themes,
                         const ModelParams& params, bool with_grads = true);

struct AdaDeltaConfig {
  double rho = 0.95;
  double epsilon = 1e-6;
  // Global step multiplier; 1.0 is the canonical update.
  double lr = 1.0;

  void validate() const;
  bool operator==(const AdaDeltaConfig&) const = default;
};

struct AdaDeltaState {
  AdaDeltaConfig cfg;
  ModelParams eg2;   // running E[g^2]
  ModelParams edx2;  // running E[dx^2]
  long steps = 0;

  static AdaDeltaState init(const ModelParams& like, const AdaDeltaConfig& cfg);
  bool operator==(const AdaDeltaState&) const = default;
};

/// Elementwise update on flat buffers of equal length.
void adadelta_update(std::span<double> x, std::span<const double> g, std::span<double> eg2,
                     std::span<double> edx2, const AdaDeltaConfig& cfg);

/// Throws DataError before touching anything if a gradient is not finite.
void adadelta_step(ModelParams& params, const ModelParams& grads, AdaDeltaState& state);

struct TrainConfig {
  int batch_size = 8;
  int epochs = 20;
  std::uint64_t seed = 1;
  double clip_norm = 0.0;  // 0 disables clipping
  bool shuffle = true;
  // Stop once an epoch's mean loss drops below this value; 0 disables.
  double stop_below = 0.0;
  AdaDeltaConfig optimizer;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

struct TrainResult {
  ModelParams params;
  AdaDeltaState optimizer;
  std::vector<double> loss_history;
};

using EpochCallback =
    std::function<void(int epoch, const ModelParams&, const AdaDeltaState&, const std::vector<double>&)>;

/// Mini-batch AdaDelta training. Each epoch shuffles with the seeded RNG,
/// groups examples of similar length, and records the epoch's mean
/// per-token loss.
TrainResult train(const std::vector<corpus::SentencePair>& dataset, const ThemeTable& themes,
                  const ModelParams& initial, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

// ---- decoding -------------------------------------------------------------

struct DecodeOptions {
  int beam_width = 1;
  int max_len = 18;
  bool mask_unk = true;
  bool suppress_eos_first = false;
};

struct Decoded {
  corpus::Ids ids;            // without EOS
  std::vector<Vec> alphas;    // one attention vector per emitted step
  double log_prob = 0.0;
};

Decoded greedy_decode(const ModelParams& params, std::span<const int> src,
                      std::span<const int> theme_ids, const DecodeOptions& opts);
Decoded beam_decode(const ModelParams& params, std::span<const int> src,
                    std::span<const int> theme_ids, const DecodeOptions& opts);

// ---- checkpoints ----------------------------------------------------------

// Config (de)serialization. The readers start from `base` and override the
// keys present, rejecting unknown keys.
nlohmann::json to_json(const ModelConfig& cfg);
nlohmann::json to_json(const TrainConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& j, ModelConfig base = {});
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});

struct Checkpoint {
  ModelConfig model_config;
  TrainConfig train_config;
  int epoch = 0;
  std::vector<double> loss_history;
  ModelParams params;
  std::optional<AdaDeltaState> optimizer;
  corpus::Vocab vocab;
  std::vector<std::string> theme_keywords;  // per theme, two characters each
  bool trg_reversed = false;                 // targets were stored reversed in training
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::string checkpoint_to_string(const Checkpoint& ckpt);
Checkpoint checkpoint_from_string(const std::string& text);

}  // namespace lyricgen::model
