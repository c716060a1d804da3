// Copyright 2026 The lyricgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

namespace lyricgen::bench {

// Scoring cost for one decoder step over n keys (2 flops per multiply-add,
// 1 per add or tanh).
long additive_score_flops(long n_keys, long decoder_dim, long encoder_dim, long attention_dim);
long dot_score_flops(long n_keys, long decoder_dim, long encoder_dim);

struct BenchConfig {
  std::vector<int> src_lens{3, 8, 18};
  std::vector<int> hidden_dims{16, 32, 64};
  int repetitions = 200;
  std::uint64_t seed = 3;
};

struct BenchRow {
  int src_len = 0;
  int hidden_dim = 0;
  long additive_flops = 0;
  long dot_flops = 0;
  double additive_median_us = 0.0;
  double dot_median_us = 0.0;
};

/// Times forward+backward of scoring, softmax and context for both variants
/// at each (src_len, hidden_dim) grid point. Attention width equals the
/// decoder width; keys are src_len sentence states plus two theme states.
std::vector<BenchRow> run_bench(const BenchConfig& cfg);

}  // namespace lyricgen::bench
