// Copyright 2026 The lyricgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "lyricgen/rng.hpp"
#include "lyricgen/tensor.hpp"

namespace lyricgen::kernels {

/// Stacked gate weights in row blocks [input; forget; output; candidate],
/// each block H rows.
struct LSTMParams {
  Tensor Wx;  // 4H x E
  Tensor Wh;  // 4H x H
  Tensor b;   // 4H

  static LSTMParams zeros(std::size_t input_dim, std::size_t hidden_dim);
  std::size_t hidden() const { return Wh.cols(); }
  std::size_t input() const { return Wx.cols(); }
  void check() const;

  bool operator==(const LSTMParams&) const = default;
};

struct LstmCache {
  Vec x, h_prev, c_prev;
  Vec i, f, o, g;
  Vec c, tanh_c;
};

struct LstmStep {
  Vec h;
  Vec c;
  LstmCache cache;
};

LstmStep lstm_step(std::span<const double> x, std::span<const double> h_prev,
                   std::span<const double> c_prev, const LSTMParams& p);

struct LstmGrads {
  Vec dx, dh_prev, dc_prev;
};

/// Accumulates parameter gradients into `grad`; returns input gradients.
LstmGrads lstm_step_backward(const LstmCache& cache, std::span<const double> dh,
                             std::span<const double> dc, const LSTMParams& p, LSTMParams& grad);

struct BiLstmResult {
  // Per-position [h_fwd ; h_bwd].
  std::vector<Vec> states;
  std::vector<LstmCache> fwd;  // position order
  std::vector<LstmCache> bwd;  // position order (processed right to left)
};

BiLstmResult bilstm_encode(const std::vector<Vec>& seq, const LSTMParams& fwd,
                           const LSTMParams& bwd);

/// Returns d(seq) given d(states).
std::vector<Vec> bilstm_backward(const BiLstmResult& res, const std::vector<Vec>& dstates,
                                 const LSTMParams& fwd, const LSTMParams& bwd,
                                 LSTMParams& gfwd, LSTMParams& gbwd);

enum class AttentionVariant { kAdditive, kDot };

std::string to_string(AttentionVariant v);
AttentionVariant attention_variant_from_string(const std::string& s);

/// Additive: e_j = v . tanh(W s + U h_j) with W (A x Hd), U (A x He), v (A).
/// Dot: e_j = s . (W h_j) with W (Hd x He); U and v are empty.
struct AttentionParams {
  AttentionVariant variant = AttentionVariant::kAdditive;
  Tensor W, U, v;

  static AttentionParams zeros(AttentionVariant variant, std::size_t decoder_dim,
                               std::size_t encoder_dim, std::size_t attention_dim);
  std::size_t decoder_dim() const;
  std::size_t encoder_dim() const;
  void check() const;

  bool operator==(const AttentionParams&) const = default;
};

struct AttnCache {
  Vec query;               // dot: W^T s
  std::vector<Vec> hidden; // additive: tanh(W s + U h_j), one per key
};

/// Scores every key in order. Keys are the sentence states followed by the
/// two theme states.
Vec attn_scores(std::span<const double> s_prev, const std::vector<Vec>& keys,
                const AttentionParams& p, AttnCache* cache = nullptr);

/// Accumulates into grad and dkeys; returns d(s_prev).
Vec attn_scores_backward(std::span<const double> de, std::span<const double> s_prev,
                         const std::vector<Vec>& keys, const AttentionParams& p,
                         const AttnCache& cache, AttentionParams& grad,
                         std::vector<Vec>& dkeys);

/// Max-shifted softmax.
Vec attn_weights(std::span<const double> e);
Vec attn_weights_backward(std::span<const double> alpha, std::span<const double> dalpha);

Vec context_vector(std::span<const double> alpha, const std::vector<Vec>& keys);
/// Accumulates alpha_j * dc into dkeys; returns d(alpha).
Vec context_vector_backward(std::span<const double> alpha, const std::vector<Vec>& keys,
                            std::span<const double> dc, std::vector<Vec>& dkeys);

Vec affine(const Tensor& W, const Tensor& b, std::span<const double> x);
/// Accumulates dW, db; returns dx.
Vec affine_backward(const Tensor& W, std::span<const double> x, std::span<const double> dy,
                    Tensor& dW, Tensor& db);

struct XentResult {
  double loss = 0.0;
  Vec grad;  // softmax(logits) - onehot(target)
};

XentResult softmax_xent(std::span<const double> logits, int target);

double sigmoid(double x);

/// Fills every element uniformly on [-range, range].
void init_uniform(Tensor& t, double range, Rng& rng);

}  // namespace lyricgen::kernels
