// Copyright 2026 The lyricgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "lyricgen/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lyricgen/error.hpp"

namespace lyricgen::kernels {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw UsageError(std::string("shape mismatch: ") + what);
}

}  // namespace

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void init_uniform(Tensor& t, double range, Rng& rng) {
  for (double& v : t.data) v = rng.uniform(-range, range);
}

// ---- LSTM -----------------------------------------------------------------

LSTMParams LSTMParams::zeros(std::size_t input_dim, std::size_t hidden_dim) {
  return {Tensor::matrix(4 * hidden_dim, input_dim), Tensor::matrix(4 * hidden_dim, hidden_dim),
          Tensor::vector(4 * hidden_dim)};
}

void LSTMParams::check() const {
  const std::size_t H = Wh.cols();
  require(Wx.shape.size() == 2 && Wh.shape.size() == 2 && b.shape.size() == 1, "lstm ranks");
  require(Wx.rows() == 4 * H && Wh.rows() == 4 * H && b.size() == 4 * H, "lstm gate blocks");
}

LstmStep lstm_step(std::span<const double> x, std::span<const double> h_prev,
                   std::span<const double> c_prev, const LSTMParams& p) {
  const std::size_t H = p.hidden();
  require(x.size() == p.input(), "lstm input width");
  require(h_prev.size() == H && c_prev.size() == H, "lstm state width");
  Vec z(p.b.data);
  gemv_acc(p.Wx, x, z);
  gemv_acc(p.Wh, h_prev, z);

  LstmStep out;
  auto& k = out.cache;
  k.x.assign(x.begin(), x.end());
  k.h_prev.assign(h_prev.begin(), h_prev.end());
  k.c_prev.assign(c_prev.begin(), c_prev.end());
  k.i.resize(H);
  k.f.resize(H);
  k.o.resize(H);
  k.g.resize(H);
  k.c.resize(H);
  k.tanh_c.resize(H);
  out.h.resize(H);
  for (std::size_t j = 0; j < H; ++j) {
    k.i[j] = sigmoid(z[j]);
    k.f[j] = sigmoid(z[H + j]);
    k.o[j] = sigmoid(z[2 * H + j]);
    k.g[j] = std::tanh(z[3 * H + j]);
    k.c[j] = k.f[j] * c_prev[j] + k.i[j] * k.g[j];
    k.tanh_c[j] = std::tanh(k.c[j]);
    out.h[j] = k.o[j] * k.tanh_c[j];
  }
  out.c = k.c;
  return out;
}

LstmGrads lstm_step_backward(const LstmCache& k, std::span<const double> dh,
                             std::span<const double> dc, const LSTMParams& p, LSTMParams& grad) {
  const std::size_t H = p.hidden();
  require(dh.size() == H && dc.size() == H, "lstm backward width");
  Vec dz(4 * H);
  LstmGrads out;
  out.dc_prev.resize(H);
  for (std::size_t j = 0; j < H; ++j) {
    const double dct = dc[j] + dh[j] * k.o[j] * (1.0 - k.tanh_c[j] * k.tanh_c[j]);
    const double di = dct * k.g[j];
    const double df = dct * k.c_prev[j];
    const double d_o = dh[j] * k.tanh_c[j];
    const double dg = dct * k.i[j];
    dz[j] = di * k.i[j] * (1.0 - k.i[j]);
    dz[H + j] = df * k.f[j] * (1.0 - k.f[j]);
    dz[2 * H + j] = d_o * k.o[j] * (1.0 - k.o[j]);
    dz[3 * H + j] = dg * (1.0 - k.g[j] * k.g[j]);
    out.dc_prev[j] = dct * k.f[j];
  }
  outer_acc(dz, k.x, grad.Wx);
  outer_acc(dz, k.h_prev, grad.Wh);
  axpy(1.0, dz, grad.b.data);
  out.dx.assign(k.x.size(), 0.0);
  out.dh_prev.assign(H, 0.0);
  gemv_t_acc(p.Wx, dz, out.dx);
  gemv_t_acc(p.Wh, dz, out.dh_prev);
  return out;
}

BiLstmResult bilstm_encode(const std::vector<Vec>& seq, const LSTMParams& fwd,
                           const LSTMParams& bwd) {
  if (seq.empty()) throw UsageError("bilstm_encode: empty sequence");
  const std::size_t n = seq.size(), H = fwd.hidden();
  require(bwd.hidden() == H, "bilstm direction widths");
  BiLstmResult r;
  r.states.assign(n, Vec(2 * H));
  r.fwd.resize(n);
  r.bwd.resize(n);
  Vec h(H, 0.0), c(H, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    auto step = lstm_step(seq[t], h, c, fwd);
    std::copy(step.h.begin(), step.h.end(), r.states[t].begin());
    h = std::move(step.h);
    c = std::move(step.c);
    r.fwd[t] = std::move(step.cache);
  }
  h.assign(H, 0.0);
  c.assign(H, 0.0);
  for (std::size_t t = n; t-- > 0;) {
    auto step = lstm_step(seq[t], h, c, bwd);
    std::copy(step.h.begin(), step.h.end(), r.states[t].begin() + H);
    h = std::move(step.h);
    c = std::move(step.c);
    r.bwd[t] = std::move(step.cache);
  }
  return r;
}

std::vector<Vec> bilstm_backward(const BiLstmResult& res, const std::vector<Vec>& dstates,
                                 const LSTMParams& fwd, const LSTMParams& bwd,
                                 LSTMParams& gfwd, LSTMParams& gbwd) {
  const std::size_t n = res.states.size(), H = fwd.hidden();
  require(dstates.size() == n, "bilstm backward length");
  std::vector<Vec> dseq(n, Vec(fwd.input(), 0.0));
  Vec dh(H, 0.0), dc(H, 0.0);
  for (std::size_t t = n; t-- > 0;) {
    for (std::size_t j = 0; j < H; ++j) dh[j] += dstates[t][j];
    auto g = lstm_step_backward(res.fwd[t], dh, dc, fwd, gfwd);
    axpy(1.0, g.dx, dseq[t]);
    dh = std::move(g.dh_prev);
    dc = std::move(g.dc_prev);
  }
  dh.assign(H, 0.0);
  dc.assign(H, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t j = 0; j < H; ++j) dh[j] += dstates[t][H + j];
    auto g = lstm_step_backward(res.bwd[t], dh, dc, bwd, gbwd);
    axpy(1.0, g.dx, dseq[t]);
    dh = std::move(g.dh_prev);
    dc = std::move(g.dc_prev);
  }
  return dseq;
}

// ---- attention ------------------------------------------------------------

std::string to_string(AttentionVariant v) {
  return v == AttentionVariant::kAdditive ? "additive" : "dot";
}

AttentionVariant attention_variant_from_string(const std::string& s) {
  if (s == "additive") return AttentionVariant::kAdditive;
  if (s == "dot") return AttentionVariant::kDot;
  throw UsageError("unknown attention variant '" + s + "' (expected additive or dot)");
}

AttentionParams AttentionParams::zeros(AttentionVariant variant, std::size_t decoder_dim,
                                       std::size_t encoder_dim, std::size_t attention_dim) {
  AttentionParams p;
  p.variant = variant;
  if (variant == AttentionVariant::kAdditive) {
    p.W = Tensor::matrix(attention_dim, decoder_dim);
    p.U = Tensor::matrix(attention_dim, encoder_dim);
    p.v = Tensor::vector(attention_dim);
  } else {
    p.W = Tensor::matrix(decoder_dim, encoder_dim);
  }
  return p;
}

std::size_t AttentionParams::decoder_dim() const {
  return variant == AttentionVariant::kAdditive ? W.cols() : W.rows();
}

std::size_t AttentionParams::encoder_dim() const {
  return variant == AttentionVariant::kAdditive ? U.cols() : W.cols();
}

void AttentionParams::check() const {
  if (variant == AttentionVariant::kAdditive) {
    require(W.shape.size() == 2 && U.shape.size() == 2 && v.shape.size() == 1, "attention ranks");
    require(W.rows() == U.rows() && v.size() == W.rows(), "attention width A");
  } else {
    require(W.shape.size() == 2 && U.empty() && v.empty(), "dot attention params");
  }
}

Vec attn_scores(std::span<const double> s_prev, const std::vector<Vec>& keys,
                const AttentionParams& p, AttnCache* cache) {
  require(s_prev.size() == p.decoder_dim(), "attention query width");
  for (const auto& k : keys) require(k.size() == p.encoder_dim(), "attention key width");
  Vec e(keys.size());
  if (p.variant == AttentionVariant::kAdditive) {
    const std::size_t A = p.W.rows();
    Vec ws(A, 0.0);
    gemv_acc(p.W, s_prev, ws);
    if (cache) cache->hidden.assign(keys.size(), Vec());
    for (std::size_t j = 0; j < keys.size(); ++j) {
      Vec a = ws;
      gemv_acc(p.U, keys[j], a);
      for (double& x : a) x = std::tanh(x);
      e[j] = dot(p.v.data, a);
      if (cache) cache->hidden[j] = std::move(a);
    }
  } else {
    // s . (W h) == (W^T s) . h; the query is formed once per step.
    Vec q(p.W.cols(), 0.0);
    gemv_t_acc(p.W, s_prev, q);
    for (std::size_t j = 0; j < keys.size(); ++j) e[j] = dot(q, keys[j]);
    if (cache) cache->query = std::move(q);
  }
  return e;
}

Vec attn_scores_backward(std::span<const double> de, std::span<const double> s_prev,
                         const std::vector<Vec>& keys, const AttentionParams& p,
                         const AttnCache& cache, AttentionParams& grad,
                         std::vector<Vec>& dkeys) {
  require(de.size() == keys.size() && dkeys.size() == keys.size(), "attention backward length");
  Vec ds(s_prev.size(), 0.0);
  if (p.variant == AttentionVariant::kAdditive) {
    const std::size_t A = p.W.rows();
    Vec dws(A, 0.0);
    for (std::size_t j = 0; j < keys.size(); ++j) {
      const Vec& a = cache.hidden[j];
      axpy(de[j], a, grad.v.data);
      Vec dpre(A);
      for (std::size_t r = 0; r < A; ++r) dpre[r] = de[j] * p.v.data[r] * (1.0 - a[r] * a[r]);
      outer_acc(dpre, keys[j], grad.U);
      gemv_t_acc(p.U, dpre, dkeys[j]);
      axpy(1.0, dpre, dws);
    }
    outer_acc(dws, s_prev, grad.W);
    gemv_t_acc(p.W, dws, ds);
  } else {
    Vec dq(p.W.cols(), 0.0);
    for (std::size_t j = 0; j < keys.size(); ++j) {
      axpy(de[j], keys[j], dq);
      axpy(de[j], cache.query, dkeys[j]);
    }
    // q = W^T s  =>  dW += s dq^T, ds = W dq
    outer_acc(s_prev, dq, grad.W);
    gemv_acc(p.W, dq, ds);
  }
  return ds;
}

Vec attn_weights(std::span<const double> e) {
  Vec a(e.size());
  if (e.empty()) return a;
  const double m = *std::max_element(e.begin(), e.end());
  double sum = 0.0;
  for (std::size_t j = 0; j < e.size(); ++j) sum += (a[j] = std::exp(e[j] - m));
  for (double& x : a) x /= sum;
  return a;
}

Vec attn_weights_backward(std::span<const double> alpha, std::span<const double> dalpha) {
  const double s = dot(alpha, dalpha);
  Vec de(alpha.size());
  for (std::size_t j = 0; j < alpha.size(); ++j) de[j] = alpha[j] * (dalpha[j] - s);
  return de;
}

Vec context_vector(std::span<const double> alpha, const std::vector<Vec>& keys) {
  if (alpha.size() != keys.size() || keys.empty())
    throw UsageError("context_vector: weight count " + std::to_string(alpha.size()) +
                     " does not match state count " + std::to_string(keys.size()));
  Vec c(keys.front().size(), 0.0);
  for (std::size_t j = 0; j < keys.size(); ++j) axpy(alpha[j], keys[j], c);
  return c;
}

Vec context_vector_backward(std::span<const double> alpha, const std::vector<Vec>& keys,
                            std::span<const double> dc, std::vector<Vec>& dkeys) {
  Vec dalpha(keys.size());
  for (std::size_t j = 0; j < keys.size(); ++j) {
    dalpha[j] = dot(dc, keys[j]);
    axpy(alpha[j], dc, dkeys[j]);
  }
  return dalpha;
}

// ---- output ---------------------------------------------------------------

Vec affine(const Tensor& W, const Tensor& b, std::span<const double> x) {
  require(W.cols() == x.size() && b.size() == W.rows(), "affine");
  Vec y(b.data);
  gemv_acc(W, x, y);
  return y;
}

Vec affine_backward(const Tensor& W, std::span<const double> x, std::span<const double> dy,
                    Tensor& dW, Tensor& db) {
  outer_acc(dy, x, dW);
  axpy(1.0, dy, db.data);
  Vec dx(x.size(), 0.0);
  gemv_t_acc(W, dy, dx);
  return dx;
}

XentResult softmax_xent(std::span<const double> logits, int target) {
  if (target < 0 || static_cast<std::size_t>(target) >= logits.size())
    throw UsageError("softmax_xent: target " + std::to_string(target) + " out of range");
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  XentResult r;
  r.grad.resize(logits.size());
  for (std::size_t j = 0; j < logits.size(); ++j) sum += (r.grad[j] = std::exp(logits[j] - m));
  const double log_z = m + std::log(sum);
  for (double& g : r.grad) g /= sum;
  r.grad[target] -= 1.0;
  r.loss = log_z - logits[target];
  return r;
}

}  // namespace lyricgen::kernels
