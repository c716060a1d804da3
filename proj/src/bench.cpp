// Copyright 2026 The lyricgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "lyricgen/bench.hpp"

#include <algorithm>
#include <chrono>

#include "lyricgen/error.hpp"
#include "lyricgen/kernels.hpp"
#include "lyricgen/rng.hpp"

namespace lyricgen::bench {

namespace k = kernels;

long additive_score_flops(long n_keys, long decoder_dim, long encoder_dim, long attention_dim) {
  // W s once, then per key: U h, add, tanh, v . a
  return 2 * attention_dim * decoder_dim + n_keys * (2 * attention_dim * encoder_dim + 4 * attention_dim);
}

long dot_score_flops(long n_keys, long decoder_dim, long encoder_dim) {
  // q = W^T s once, then per key: q . h
  return 2 * decoder_dim * encoder_dim + n_keys * 2 * encoder_dim;
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double time_variant(k::AttentionVariant variant, int src_len, int H, int reps, Rng& rng) {
  const std::size_t Hd = H, He = 2 * H, A = H, n = src_len + 2;
  auto p = k::AttentionParams::zeros(variant, Hd, He, A);
  auto g = k::AttentionParams::zeros(variant, Hd, He, A);
  k::init_uniform(p.W, 0.1, rng);
  k::init_uniform(p.U, 0.1, rng);
  k::init_uniform(p.v, 0.1, rng);
  Vec s(Hd), w(He);
  for (double& x : s) x = rng.uniform(-1, 1);
  for (double& x : w) x = rng.uniform(-1, 1);
  std::vector<Vec> keys(n, Vec(He));
  for (auto& key : keys)
    for (double& x : key) x = rng.uniform(-1, 1);

  std::vector<double> times;
  times.reserve(reps);
  double sink = 0.0;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    k::AttnCache cache;
    const Vec e = k::attn_scores(s, keys, p, &cache);
    const Vec alpha = k::attn_weights(e);
    const Vec c = k::context_vector(alpha, keys);
    std::vector<Vec> dkeys(n, Vec(He, 0.0));
    const Vec dalpha = k::context_vector_backward(alpha, keys, w, dkeys);
    const Vec de = k::attn_weights_backward(alpha, dalpha);
    const Vec ds = k::attn_scores_backward(de, s, keys, p, cache, g, dkeys);
    const auto t1 = std::chrono::steady_clock::now();
    sink += c[0] + ds[0];
    times.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
  }
  volatile double keep = sink;
  (void)keep;
  return median(std::move(times));
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
  if (cfg.repetitions < 1) throw UsageError("bench: repetitions must be >= 1");
  std::vector<BenchRow> rows;
  Rng rng(cfg.seed);
  for (int L : cfg.src_lens) {
    for (int H : cfg.hidden_dims) {
      if (L < 1 || H < 1) throw UsageError("bench: grid values must be >= 1");
      BenchRow row;
      row.src_len = L;
      row.hidden_dim = H;
      row.additive_flops = additive_score_flops(L + 2, H, 2 * H, H);
      row.dot_flops = dot_score_flops(L + 2, H, 2 * H);
      row.additive_median_us = time_variant(k::AttentionVariant::kAdditive, L, H, cfg.repetitions, rng);
      row.dot_median_us = time_variant(k::AttentionVariant::kDot, L, H, cfg.repetitions, rng);
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace lyricgen::bench
