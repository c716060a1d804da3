// Copyright 2026 The lyricgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "lyricgen/model.hpp"

#include <algorithm>
#include <cmath>

#include "lyricgen/error.hpp"

namespace lyricgen::model {

using corpus::SentencePair;
using kernels::softmax_xent;

std::string to_string(ThemeChannel c) {
  switch (c) {
    case ThemeChannel::kOn: return "on";
    case ThemeChannel::kZeroed: return "zeroed";
    case ThemeChannel::kMasked: return "masked";
  }
  return "on";
}

ThemeChannel theme_channel_from_string(const std::string& s) {
  if (s == "on") return ThemeChannel::kOn;
  if (s == "zeroed") return ThemeChannel::kZeroed;
  if (s == "masked") return ThemeChannel::kMasked;
  throw UsageError("unknown theme channel '" + s + "' (expected on, zeroed or masked)");
}

void ModelConfig::validate() const {
  if (embed_dim < 1 || hidden_dim < 1 || attention_dim < 1)
    throw UsageError("model dimensions must be >= 1");
  if (vocab_size <= corpus::kNumSpecials)
    throw UsageError("model.vocab_size must exceed the 4 reserved tokens");
  if (!(init_range > 0)) throw UsageError("model.init_range must be > 0");
}

ModelParams ModelParams::zeros(const ModelConfig& cfg) {
  cfg.validate();
  const std::size_t V = cfg.vocab_size, E = cfg.embed_dim, H = cfg.hidden_dim,
                    A = cfg.attention_dim;
  ModelParams p;
  p.cfg = cfg;
  p.embedding = Tensor::matrix(V, E);
  p.sent_fwd = LSTMParams::zeros(E, H);
  p.sent_bwd = LSTMParams::zeros(E, H);
  if (!cfg.tie_theme_sentence_encoders) {
    p.theme_fwd = LSTMParams::zeros(E, H);
    p.theme_bwd = LSTMParams::zeros(E, H);
  }
  p.dec = LSTMParams::zeros(E + 2 * H, H);
  p.init_W = Tensor::matrix(H, 2 * H);
  p.init_b = Tensor::vector(H);
  p.attn = AttentionParams::zeros(cfg.attention_variant, H, 2 * H, A);
  p.pre_W = Tensor::matrix(H, 3 * H);
  p.pre_b = Tensor::vector(H);
  p.out_W = Tensor::matrix(V, H);
  p.out_b = Tensor::vector(V);
  return p;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for_each([&](const std::string&, const Tensor& t) { n += t.size(); });
  return n;
}

bool ModelParams::all_finite() const {
  bool ok = true;
  for_each([&](const std::string&, const Tensor& t) { ok = ok && t.all_finite(); });
  return ok;
}

ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed) {
  ModelParams p = ModelParams::zeros(cfg);
  Rng rng(seed);
  p.for_each([&](const std::string&, Tensor& t) { kernels::init_uniform(t, cfg.init_range, rng); });
  return p;
}

// ---- encoder --------------------------------------------------------------

std::vector<Vec> EncoderStates::keys() const {
  std::vector<Vec> k = sentence_states;
  k.push_back(theme_states[0]);
  k.push_back(theme_states[1]);
  return k;
}

namespace {

void check_id(int id, const ModelParams& p) {
  if (id < 0 || id >= p.cfg.vocab_size)
    throw DataError("token id " + std::to_string(id) + " out of range for vocab_size " +
                    std::to_string(p.cfg.vocab_size));
}

std::vector<Vec> embed_ids(std::span<const int> ids, const ModelParams& p) {
  std::vector<Vec> out;
  out.reserve(ids.size());
  for (int id : ids) {
    check_id(id, p);
    auto row = p.embedding.row(id);
    out.emplace_back(row.begin(), row.end());
  }
  return out;
}

}  // namespace

EncoderStates encode(std::span<const int> src, std::span<const int> theme_ids,
                     const ModelParams& params, EncoderTrace* trace) {
  if (src.empty()) throw UsageError("encode: empty source line");
  if (theme_ids.size() != 2)
    throw UsageError("encode: expected exactly 2 theme keyword ids, got " +
                     std::to_string(theme_ids.size()));
  const std::size_t H = params.cfg.hidden_dim;
  EncoderStates st;
  auto sent = kernels::bilstm_encode(embed_ids(src, params), params.sent_fwd, params.sent_bwd);
  st.sentence_states = sent.states;
  st.final_state.assign(2 * H, 0.0);
  std::copy_n(sent.states.back().begin(), H, st.final_state.begin());
  std::copy_n(sent.states.front().begin() + H, H, st.final_state.begin() + H);

  kernels::BiLstmResult theme;
  if (params.cfg.theme_channel == ThemeChannel::kZeroed) {
    for (int id : theme_ids) check_id(id, params);
    st.theme_states = {Vec(2 * H, 0.0), Vec(2 * H, 0.0)};
  } else {
    theme = kernels::bilstm_encode(embed_ids(theme_ids, params), params.theme_fwd_params(),
                                   params.theme_bwd_params());
    st.theme_states = {theme.states[0], theme.states[1]};
  }
  if (trace) {
    trace->sentence = std::move(sent);
    trace->theme = std::move(theme);
  }
  return st;
}

// ---- decoder --------------------------------------------------------------

DecoderState initial_decoder_state(const EncoderStates& states, const ModelParams& params) {
  const std::size_t H = params.cfg.hidden_dim;
  DecoderState d;
  d.s = kernels::affine(params.init_W, params.init_b, states.final_state);
  for (double& x : d.s) x = std::tanh(x);
  d.mem.assign(H, 0.0);
  d.ctx.assign(2 * H, 0.0);
  return d;
}

StepOutput decode_step(const DecoderState& prev, int y_prev, const std::vector<Vec>& keys,
                       const ModelParams& params, StepCache* cache) {
  const std::size_t H = params.cfg.hidden_dim, E = params.cfg.embed_dim;
  if (prev.s.size() != H || prev.mem.size() != H || prev.ctx.size() != 2 * H)
    throw UsageError("decode_step: decoder state width mismatch");
  if (keys.size() < 3) throw UsageError("decode_step: expected sentence states plus 2 theme states");
  check_id(y_prev, params);

  Vec x(E + 2 * H);
  auto emb = params.embedding.row(y_prev);
  std::copy(emb.begin(), emb.end(), x.begin());
  std::copy(prev.ctx.begin(), prev.ctx.end(), x.begin() + E);
  auto lstm = kernels::lstm_step(x, prev.s, prev.mem, params.dec);

  kernels::AttnCache attn_cache;
  const Vec e = kernels::attn_scores(prev.s, keys, params.attn, cache ? &attn_cache : nullptr);
  Vec alpha;
  if (params.cfg.theme_channel == ThemeChannel::kMasked) {
    const std::size_t L = keys.size() - 2;
    alpha = kernels::attn_weights(std::span<const double>(e).first(L));
    alpha.push_back(0.0);
    alpha.push_back(0.0);
  } else {
    alpha = kernels::attn_weights(e);
  }
  Vec ctx = kernels::context_vector(alpha, keys);

  Vec sc(3 * H);
  std::copy(lstm.h.begin(), lstm.h.end(), sc.begin());
  std::copy(ctx.begin(), ctx.end(), sc.begin() + H);
  Vec pre = kernels::affine(params.pre_W, params.pre_b, sc);
  Vec hidden(pre.size());
  for (std::size_t i = 0; i < pre.size(); ++i) hidden[i] = pre[i] > 0.0 ? pre[i] : 0.0;

  StepOutput out;
  out.logits = kernels::affine(params.out_W, params.out_b, hidden);
  out.alpha = alpha;
  out.next.s = lstm.h;
  out.next.mem = lstm.c;
  out.next.ctx = ctx;
  if (cache) {
    cache->lstm = std::move(lstm.cache);
    cache->attn = std::move(attn_cache);
    cache->s_prev = prev.s;
    cache->alpha = std::move(alpha);
    cache->s = out.next.s;
    cache->ctx = std::move(ctx);
    cache->pre = std::move(pre);
    cache->hidden = std::move(hidden);
  }
  return out;
}

// ---- loss -----------------------------------------------------------------

double pair_loss(const SentencePair& pair, const ThemeTable& themes, const ModelParams& params,
                 ModelParams* grads, long* terms) {
  if (pair.theme < 0 || static_cast<std::size_t>(pair.theme) >= themes.size())
    throw DataError("pair theme " + std::to_string(pair.theme) + " has no keyword entry");
  const auto& kw = themes[pair.theme];
  const std::size_t H = params.cfg.hidden_dim, E = params.cfg.embed_dim;

  EncoderTrace trace;
  const EncoderStates st = encode(pair.src, kw, params, grads ? &trace : nullptr);
  const std::vector<Vec> keys = st.keys();
  const std::size_t L = st.sentence_states.size();

  std::vector<int> inputs{corpus::kSos};
  inputs.insert(inputs.end(), pair.trg.begin(), pair.trg.end());
  std::vector<int> targets(pair.trg.begin(), pair.trg.end());
  targets.push_back(corpus::kEos);
  const std::size_t T = targets.size();

  DecoderState state = initial_decoder_state(st, params);
  const Vec s0 = state.s;
  std::vector<StepCache> caches(grads ? T : 0);
  std::vector<Vec> dlogits(grads ? T : 0);
  double loss = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    check_id(targets[t], params);
    auto out = decode_step(state, inputs[t], keys, params, grads ? &caches[t] : nullptr);
    auto xe = softmax_xent(out.logits, targets[t]);
    loss += xe.loss;
    if (grads) dlogits[t] = std::move(xe.grad);
    state = std::move(out.next);
  }
  if (terms) *terms += static_cast<long>(T);
  if (!grads) return loss;

  ModelParams& g = *grads;
  std::vector<Vec> dkeys(keys.size(), Vec(2 * H, 0.0));
  Vec ds_carry(H, 0.0), dmem_carry(H, 0.0), dctx_carry(2 * H, 0.0);
  for (std::size_t t = T; t-- > 0;) {
    const StepCache& c = caches[t];
    Vec dhidden = kernels::affine_backward(params.out_W, c.hidden, dlogits[t], g.out_W, g.out_b);
    for (std::size_t i = 0; i < dhidden.size(); ++i)
      if (c.pre[i] <= 0.0) dhidden[i] = 0.0;
    Vec sc(3 * H);
    std::copy(c.s.begin(), c.s.end(), sc.begin());
    std::copy(c.ctx.begin(), c.ctx.end(), sc.begin() + H);
    const Vec dsc = kernels::affine_backward(params.pre_W, sc, dhidden, g.pre_W, g.pre_b);

    Vec ds(ds_carry);
    for (std::size_t i = 0; i < H; ++i) ds[i] += dsc[i];
    Vec dctx(dctx_carry);
    for (std::size_t i = 0; i < 2 * H; ++i) dctx[i] += dsc[H + i];

    const Vec dalpha = kernels::context_vector_backward(c.alpha, keys, dctx, dkeys);
    Vec de;
    if (params.cfg.theme_channel == ThemeChannel::kMasked) {
      de = kernels::attn_weights_backward(std::span<const double>(c.alpha).first(L),
                                          std::span<const double>(dalpha).first(L));
      de.push_back(0.0);
      de.push_back(0.0);
    } else {
      de = kernels::attn_weights_backward(c.alpha, dalpha);
    }
    const Vec ds_prev_attn =
        kernels::attn_scores_backward(de, c.s_prev, keys, params.attn, c.attn, g.attn, dkeys);

    auto lg = kernels::lstm_step_backward(c.lstm, ds, dmem_carry, params.dec, g.dec);
    axpy(1.0, std::span<const double>(lg.dx).first(E), g.embedding.row(inputs[t]));
    std::copy(lg.dx.begin() + E, lg.dx.end(), dctx_carry.begin());
    ds_carry = std::move(lg.dh_prev);
    axpy(1.0, ds_prev_attn, ds_carry);
    dmem_carry = std::move(lg.dc_prev);
  }

  // s_0 = tanh(init_W final + init_b)
  Vec da(H);
  for (std::size_t i = 0; i < H; ++i) da[i] = ds_carry[i] * (1.0 - s0[i] * s0[i]);
  const Vec dfinal = kernels::affine_backward(params.init_W, st.final_state, da, g.init_W, g.init_b);

  std::vector<Vec> dsent(dkeys.begin(), dkeys.begin() + L);
  for (std::size_t i = 0; i < H; ++i) {
    dsent[L - 1][i] += dfinal[i];
    dsent[0][H + i] += dfinal[H + i];
  }
  const auto dsrc = kernels::bilstm_backward(trace.sentence, dsent, params.sent_fwd,
                                             params.sent_bwd, g.sent_fwd, g.sent_bwd);
  for (std::size_t j = 0; j < L; ++j) axpy(1.0, dsrc[j], g.embedding.row(pair.src[j]));

  if (params.cfg.theme_channel != ThemeChannel::kZeroed) {
    const std::vector<Vec> dtheme{dkeys[L], dkeys[L + 1]};
    const auto dkw = kernels::bilstm_backward(trace.theme, dtheme, params.theme_fwd_params(),
                                              params.theme_bwd_params(), g.theme_fwd_params(),
                                              g.theme_bwd_params());
    for (std::size_t j = 0; j < 2; ++j) axpy(1.0, dkw[j], g.embedding.row(kw[j]));
  }
  return loss;
}

LossAndGrad forward_loss(std::span<const SentencePair> batch, const ThemeTable& themes,
                         const ModelParams& params, bool with_grads) {
  if (batch.empty()) throw UsageError("forward_loss: empty batch");
  LossAndGrad r;
  if (with_grads) r.grads = ModelParams::zeros(params.cfg);
  double total = 0.0;
  for (const auto& pair : batch)
    total += pair_loss(pair, themes, params, with_grads ? &r.grads : nullptr, &r.terms);
  const double scale = 1.0 / static_cast<double>(r.terms);
  r.loss = total * scale;
  if (with_grads)
    r.grads.for_each([&](const std::string&, Tensor& t) {
      for (double& v : t.data) v *= scale;
    });
  return r;
}

// ---- AdaDelta -------------------------------------------------------------

void AdaDeltaConfig::validate() const {
  if (!(rho > 0 && rho < 1)) throw UsageError("optimizer.rho must lie in (0, 1)");
  if (!(epsilon > 0)) throw UsageError("optimizer.epsilon must be > 0");
  if (!(lr > 0)) throw UsageError("optimizer.lr must be > 0");
}

AdaDeltaState AdaDeltaState::init(const ModelParams& like, const AdaDeltaConfig& cfg) {
  cfg.validate();
  return {cfg, ModelParams::zeros(like.cfg), ModelParams::zeros(like.cfg), 0};
}

void adadelta_update(std::span<double> x, std::span<const double> g, std::span<double> eg2,
                     std::span<double> edx2, const AdaDeltaConfig& cfg) {
  const double rho = cfg.rho, eps = cfg.epsilon;
  for (std::size_t i = 0; i < x.size(); ++i) {
    eg2[i] = rho * eg2[i] + (1.0 - rho) * g[i] * g[i];
    const double dx = -cfg.lr * (std::sqrt(edx2[i] + eps) / std::sqrt(eg2[i] + eps)) * g[i];
    edx2[i] = rho * edx2[i] + (1.0 - rho) * dx * dx;
    x[i] += dx;
  }
}

void adadelta_step(ModelParams& params, const ModelParams& grads, AdaDeltaState& state) {
  std::vector<const Tensor*> gs;
  grads.for_each([&](const std::string& name, const Tensor& t) {
    if (!t.all_finite()) throw DataError("non-finite gradient in " + name);
    gs.push_back(&t);
  });
  std::vector<Tensor*> ps, e1, e2;
  params.for_each([&](const std::string&, Tensor& t) { ps.push_back(&t); });
  state.eg2.for_each([&](const std::string&, Tensor& t) { e1.push_back(&t); });
  state.edx2.for_each([&](const std::string&, Tensor& t) { e2.push_back(&t); });
  if (gs.size() != ps.size() || e1.size() != ps.size() || e2.size() != ps.size())
    throw UsageError("adadelta_step: parameter layout mismatch");
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (gs[i]->shape != ps[i]->shape || e1[i]->shape != ps[i]->shape ||
        e2[i]->shape != ps[i]->shape)
      throw UsageError("adadelta_step: shape mismatch");
    adadelta_update(ps[i]->data, gs[i]->data, e1[i]->data, e2[i]->data, state.cfg);
  }
  ++state.steps;
}

// ---- training -------------------------------------------------------------

void TrainConfig::validate() const {
  if (batch_size < 1) throw UsageError("train.batch_size must be >= 1");
  if (epochs < 0) throw UsageError("train.epochs must be >= 0");
  if (clip_norm < 0) throw UsageError("train.clip_norm must be >= 0");
  optimizer.validate();
}

namespace {

// Batches drawn from a window of this many batches are grouped by length.
constexpr std::size_t kBucketWindow = 16;

void clip_gradients(ModelParams& grads, double max_norm) {
  double sq = 0.0;
  grads.for_each([&](const std::string&, const Tensor& t) {
    for (double v : t.data) sq += v * v;
  });
  const double norm = std::sqrt(sq);
  if (norm <= max_norm || norm == 0.0) return;
  const double s = max_norm / norm;
  grads.for_each([&](const std::string&, Tensor& t) {
    for (double& v : t.data) v *= s;
  });
}

}  // namespace

TrainResult train(const std::vector<SentencePair>& dataset, const ThemeTable& themes,
                  const ModelParams& initial, const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  if (dataset.empty()) throw DataError("train: empty dataset");
  TrainResult r{initial, AdaDeltaState::init(initial, cfg.optimizer), {}};
  Rng rng(cfg.seed);
  std::vector<std::size_t> order(dataset.size());
  std::vector<SentencePair> batch;
  const std::size_t B = cfg.batch_size;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    if (cfg.shuffle) rng.shuffle(std::span<std::size_t>(order));
    const std::size_t window = B * kBucketWindow;
    for (std::size_t w = 0; w < order.size(); w += window) {
      auto first = order.begin() + w;
      auto last = order.begin() + std::min(order.size(), w + window);
      std::stable_sort(first, last, [&](std::size_t a, std::size_t b) {
        return dataset[a].src.size() + dataset[a].trg.size() <
               dataset[b].src.size() + dataset[b].trg.size();
      });
    }
    double epoch_loss = 0.0;
    long epoch_terms = 0;
    for (std::size_t start = 0; start < order.size(); start += B) {
      batch.clear();
      for (std::size_t i = start; i < std::min(order.size(), start + B); ++i)
        batch.push_back(dataset[order[i]]);
      auto lg = forward_loss(batch, themes, r.params);
      epoch_loss += lg.loss * static_cast<double>(lg.terms);
      epoch_terms += lg.terms;
      if (cfg.clip_norm > 0) clip_gradients(lg.grads, cfg.clip_norm);
      adadelta_step(r.params, lg.grads, r.optimizer);
    }
    const double mean = epoch_loss / static_cast<double>(epoch_terms);
    if (!std::isfinite(mean)) throw DataError("train: non-finite loss at epoch " + std::to_string(epoch));
    r.loss_history.push_back(mean);
    if (on_epoch) on_epoch(epoch, r.params, r.optimizer, r.loss_history);
    if (cfg.stop_below > 0 && mean < cfg.stop_below) break;
  }
  return r;
}

}  // namespace lyricgen::model
