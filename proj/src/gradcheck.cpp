// Copyright 2026 The lyricgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "lyricgen/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "lyricgen/error.hpp"
#include "lyricgen/kernels.hpp"
#include "lyricgen/model.hpp"
#include "lyricgen/rng.hpp"

namespace lyricgen::gradcheck {

namespace k = kernels;

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / denom;
}

GroupResult check_blocks(const std::string& group, const std::function<double()>& loss,
                         std::vector<Block> blocks, const Options& opts) {
  GroupResult r;
  r.group = group;
  bool faulted = false;
  for (auto& b : blocks) {
    for (std::size_t i = 0; i < b.values.size(); ++i) {
      const double saved = b.values[i];
      b.values[i] = saved + opts.step;
      const double up = loss();
      b.values[i] = saved - opts.step;
      const double down = loss();
      b.values[i] = saved;
      const double numeric = (up - down) / (2.0 * opts.step);
      double analytic = b.analytic[i];
      if (!faulted && opts.inject_fault == group) {
        analytic = analytic * 1.01 + 1e-4;
        faulted = true;
      }
      r.max_rel_error = std::max(r.max_rel_error, relative_error(analytic, numeric));
      ++r.checked;
    }
  }
  r.passed = r.max_rel_error < opts.tolerance;
  return r;
}

namespace {

Vec random_vec(std::size_t n, Rng& rng, double range = 0.5) {
  Vec v(n);
  for (double& x : v) x = rng.uniform(-range, range);
  return v;
}

k::LSTMParams random_lstm(std::size_t E, std::size_t H, Rng& rng) {
  auto p = k::LSTMParams::zeros(E, H);
  k::init_uniform(p.Wx, 0.5, rng);
  k::init_uniform(p.Wh, 0.5, rng);
  k::init_uniform(p.b, 0.5, rng);
  return p;
}

GroupResult check_lstm_step(const Options& opts, Rng& rng) {
  const std::size_t E = 3, H = 4;
  auto p = random_lstm(E, H, rng);
  Vec x = random_vec(E, rng), h = random_vec(H, rng), c = random_vec(H, rng);
  const Vec wa = random_vec(H, rng, 1.0), wb = random_vec(H, rng, 1.0);
  auto loss = [&] {
    auto s = k::lstm_step(x, h, c, p);
    return dot(wa, s.h) + dot(wb, s.c);
  };
  auto g = k::LSTMParams::zeros(E, H);
  auto step = k::lstm_step(x, h, c, p);
  auto d = k::lstm_step_backward(step.cache, wa, wb, p, g);
  return check_blocks("kernel.lstm_step", loss,
                      {{"Wx", p.Wx.data, g.Wx.data}, {"Wh", p.Wh.data, g.Wh.data},
                       {"b", p.b.data, g.b.data}, {"x", x, d.dx}, {"h_prev", h, d.dh_prev},
                       {"c_prev", c, d.dc_prev}},
                      opts);
}

GroupResult check_bilstm(const Options& opts, Rng& rng) {
  const std::size_t E = 3, H = 4, n = 3;
  auto fwd = random_lstm(E, H, rng), bwd = random_lstm(E, H, rng);
  std::vector<Vec> seq;
  std::vector<Vec> w;
  for (std::size_t t = 0; t < n; ++t) {
    seq.push_back(random_vec(E, rng));
    w.push_back(random_vec(2 * H, rng, 1.0));
  }
  auto loss = [&] {
    auto r = k::bilstm_encode(seq, fwd, bwd);
    double l = 0.0;
    for (std::size_t t = 0; t < n; ++t) l += dot(w[t], r.states[t]);
    return l;
  };
  auto gf = k::LSTMParams::zeros(E, H), gb = k::LSTMParams::zeros(E, H);
  auto res = k::bilstm_encode(seq, fwd, bwd);
  auto dseq = k::bilstm_backward(res, w, fwd, bwd, gf, gb);
  std::vector<Block> blocks{{"fwd.Wx", fwd.Wx.data, gf.Wx.data}, {"fwd.Wh", fwd.Wh.data, gf.Wh.data},
                            {"fwd.b", fwd.b.data, gf.b.data},    {"bwd.Wx", bwd.Wx.data, gb.Wx.data},
                            {"bwd.Wh", bwd.Wh.data, gb.Wh.data}, {"bwd.b", bwd.b.data, gb.b.data}};
  for (std::size_t t = 0; t < n; ++t) blocks.push_back({"x" + std::to_string(t), seq[t], dseq[t]});
  return check_blocks("kernel.bilstm", loss, blocks, opts);
}

GroupResult check_attention(k::AttentionVariant variant, const Options& opts, Rng& rng) {
  const std::size_t Hd = 4, He = 6, A = 5, n = 5;
  auto p = k::AttentionParams::zeros(variant, Hd, He, A);
  k::init_uniform(p.W, 0.5, rng);
  k::init_uniform(p.U, 0.5, rng);
  k::init_uniform(p.v, 0.5, rng);
  Vec s = random_vec(Hd, rng);
  std::vector<Vec> keys;
  for (std::size_t j = 0; j < n; ++j) keys.push_back(random_vec(He, rng));
  const Vec w = random_vec(He, rng, 1.0);
  // Scores -> weights -> context, so all three attention kernels are covered.
  auto loss = [&] {
    auto e = k::attn_scores(s, keys, p);
    return dot(w, k::context_vector(k::attn_weights(e), keys));
  };
  auto g = k::AttentionParams::zeros(variant, Hd, He, A);
  k::AttnCache cache;
  auto e = k::attn_scores(s, keys, p, &cache);
  auto alpha = k::attn_weights(e);
  std::vector<Vec> dkeys(n, Vec(He, 0.0));
  auto dalpha = k::context_vector_backward(alpha, keys, w, dkeys);
  auto de = k::attn_weights_backward(alpha, dalpha);
  auto ds = k::attn_scores_backward(de, s, keys, p, cache, g, dkeys);
  std::vector<Block> blocks{{"W", p.W.data, g.W.data}, {"s_prev", s, ds}};
  if (variant == k::AttentionVariant::kAdditive) {
    blocks.push_back({"U", p.U.data, g.U.data});
    blocks.push_back({"v", p.v.data, g.v.data});
  }
  for (std::size_t j = 0; j < n; ++j) blocks.push_back({"key" + std::to_string(j), keys[j], dkeys[j]});
  return check_blocks("kernel.attention." + k::to_string(variant), loss, blocks, opts);
}

GroupResult check_attn_weights(const Options& opts, Rng& rng) {
  Vec e = random_vec(6, rng, 2.0);
  const Vec w = random_vec(6, rng, 1.0);
  auto loss = [&] { return dot(w, k::attn_weights(e)); };
  const Vec de = k::attn_weights_backward(k::attn_weights(e), w);
  return check_blocks("kernel.attn_weights", loss, {{"e", e, de}}, opts);
}

GroupResult check_context(const Options& opts, Rng& rng) {
  const std::size_t n = 4, d = 5;
  Vec alpha = random_vec(n, rng, 1.0);
  std::vector<Vec> keys;
  for (std::size_t j = 0; j < n; ++j) keys.push_back(random_vec(d, rng));
  const Vec w = random_vec(d, rng, 1.0);
  auto loss = [&] { return dot(w, k::context_vector(alpha, keys)); };
  std::vector<Vec> dkeys(n, Vec(d, 0.0));
  Vec dalpha = k::context_vector_backward(alpha, keys, w, dkeys);
  std::vector<Block> blocks{{"alpha", alpha, dalpha}};
  for (std::size_t j = 0; j < n; ++j) blocks.push_back({"key" + std::to_string(j), keys[j], dkeys[j]});
  return check_blocks("kernel.context_vector", loss, blocks, opts);
}

GroupResult check_affine(const Options& opts, Rng& rng) {
  Tensor W = Tensor::matrix(4, 3), b = Tensor::vector(4);
  k::init_uniform(W, 0.5, rng);
  k::init_uniform(b, 0.5, rng);
  Vec x = random_vec(3, rng);
  const Vec w = random_vec(4, rng, 1.0);
  auto loss = [&] { return dot(w, k::affine(W, b, x)); };
  Tensor dW = Tensor::matrix(4, 3), db = Tensor::vector(4);
  Vec dx = k::affine_backward(W, x, w, dW, db);
  return check_blocks("kernel.affine", loss, {{"W", W.data, dW.data}, {"b", b.data, db.data}, {"x", x, dx}},
                      opts);
}

GroupResult check_xent(const Options& opts, Rng& rng) {
  Vec logits = random_vec(7, rng, 2.0);
  const int target = 3;
  auto loss = [&] { return k::softmax_xent(logits, target).loss; };
  const Vec g = k::softmax_xent(logits, target).grad;
  return check_blocks("kernel.softmax_xent", loss, {{"logits", logits, g}}, opts);
}

std::vector<GroupResult> check_model(k::AttentionVariant variant, const Options& opts) {
  model::ModelConfig cfg;
  cfg.embed_dim = 4;
  cfg.hidden_dim = 6;
  cfg.attention_dim = 5;
  cfg.vocab_size = 12;
  cfg.attention_variant = variant;
  cfg.init_range = 0.5;
  auto params = model::init_params(cfg, derive_seed(opts.seed, "model." + k::to_string(variant)));
  const model::ThemeTable themes{{4, 5}, {6, 7}};
  const std::vector<corpus::SentencePair> batch{{{8, 9, 10}, {11, 4, 9}, 0, false},
                                                {{5, 11, 6}, {7, 10, 8}, 1, false}};
  auto lg = model::forward_loss(batch, themes, params);
  auto loss = [&] { return model::forward_loss(batch, themes, params, false).loss; };

  std::vector<std::pair<std::string, Tensor*>> ptensors;
  std::vector<const Tensor*> gtensors;
  params.for_each([&](const std::string& name, Tensor& t) { ptensors.emplace_back(name, &t); });
  lg.grads.for_each([&](const std::string&, const Tensor& t) { gtensors.push_back(&t); });
  std::vector<GroupResult> out;
  for (std::size_t i = 0; i < ptensors.size(); ++i) {
    const std::string group = "model." + k::to_string(variant) + "." + ptensors[i].first;
    out.push_back(check_blocks(group, loss,
                               {{ptensors[i].first, ptensors[i].second->data, gtensors[i]->data}}, opts));
  }
  return out;
}

}  // namespace

Report run_gradcheck(const Options& opts) {
  Report rep;
  Rng rng(opts.seed);
  rep.groups.push_back(check_lstm_step(opts, rng));
  rep.groups.push_back(check_bilstm(opts, rng));
  rep.groups.push_back(check_attention(k::AttentionVariant::kAdditive, opts, rng));
  rep.groups.push_back(check_attention(k::AttentionVariant::kDot, opts, rng));
  rep.groups.push_back(check_attn_weights(opts, rng));
  rep.groups.push_back(check_context(opts, rng));
  rep.groups.push_back(check_affine(opts, rng));
  rep.groups.push_back(check_xent(opts, rng));
  for (auto v : {k::AttentionVariant::kAdditive, k::AttentionVariant::kDot})
    for (auto& g : check_model(v, opts)) rep.groups.push_back(std::move(g));
  for (const auto& g : rep.groups) rep.passed = rep.passed && g.passed;
  if (!opts.inject_fault.empty() &&
      std::none_of(rep.groups.begin(), rep.groups.end(),
                   [&](const GroupResult& g) { return g.group == opts.inject_fault; }))
    throw UsageError("inject_fault: unknown gradient group '" + opts.inject_fault + "'");
  return rep;
}

}  // namespace lyricgen::gradcheck
