// Copyright 2026 The lyricgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "lyricgen/error.hpp"
#include "lyricgen/model.hpp"
#include "lyricgen/rng.hpp"

using namespace lyricgen;
using namespace lyricgen::model;

namespace {

ModelParams random_model(std::uint64_t seed, double range = 1.0) {
  ModelConfig c;
  c.embed_dim = 5;
  c.hidden_dim = 7;
  c.attention_dim = 6;
  c.vocab_size = 15;
  c.init_range = range;
  return init_params(c, seed);
}

// Log-probability of emitting ids then EOS, computed step by step from
// decode_step with a plain softmax over the unmasked tokens.
double sequence_log_prob(const ModelParams& p, const std::vector<int>& src, const std::array<int, 2>& theme,
                         const corpus::Ids& ids, bool mask_unk) {
  const auto st = encode(src, theme, p);
  auto s = initial_decoder_state(st, p);
  int y = corpus::kSos;
  double total = 0.0;
  for (std::size_t t = 0; t <= ids.size(); ++t) {
    const auto out = decode_step(s, y, st.keys(), p);
    const int target = t < ids.size() ? ids[t] : corpus::kEos;
    double z = 0.0;
    for (int k = 0; k < static_cast<int>(out.logits.size()); ++k) {
      if (k == corpus::kPad || k == corpus::kSos || (mask_unk && k == corpus::kUnk)) continue;
      z += std::exp(out.logits[k]);
    }
    total += out.logits[target] - std::log(z);
    s = out.next;
    y = target;
  }
  return total;
}

}  // namespace

TEST_SUITE("decode") {

TEST_CASE("beam width one is greedy token for token") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto p = random_model(seed);
    const std::vector<int> src{4 + static_cast<int>(seed % 11), 5, 6};
    const std::array<int, 2> theme{7, 8};
    DecodeOptions o;
    const auto g = greedy_decode(p, src, theme, o);
    const auto b = beam_decode(p, src, theme, o);
    CHECK(g.ids == b.ids);
    CHECK(g.log_prob == doctest::Approx(b.log_prob).epsilon(1e-12));
    CHECK(g.alphas == b.alphas);
  }
}

TEST_CASE("decoded lines respect the output contract") {
  Rng rng(2);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto p = random_model(seed, 2.0);
    std::vector<int> src(1 + rng.below(6));
    for (int& t : src) t = 4 + static_cast<int>(rng.below(11));
    DecodeOptions o;
    o.max_len = 1 + static_cast<int>(rng.below(18));
    o.beam_width = 1 + static_cast<int>(rng.below(4));
    const std::vector<int> theme{4, 5};
    const auto d = o.beam_width == 1 ? greedy_decode(p, src, theme, o) : beam_decode(p, src, theme, o);
    CHECK(d.ids.size() <= static_cast<std::size_t>(o.max_len));
    CHECK(d.alphas.size() == d.ids.size());
    for (int id : d.ids) {
      CHECK(id != corpus::kPad);
      CHECK(id != corpus::kSos);
      CHECK(id != corpus::kUnk);
      CHECK(id != corpus::kEos);
    }
  }
}

TEST_CASE("EOS suppression forces a non-empty first step") {
  auto p = random_model(3);
  // Bias the output heavily toward EOS.
  p.out_b.data[corpus::kEos] = 50.0;
  DecodeOptions o;
  CHECK(greedy_decode(p, std::vector<int>{4, 5, 6}, std::vector<int>{7, 8}, o).ids.empty());
  o.suppress_eos_first = true;
  const auto d = greedy_decode(p, std::vector<int>{4, 5, 6}, std::vector<int>{7, 8}, o);
  CHECK(d.ids.size() == 1);
}

TEST_CASE("reported log-probabilities match an independent rescoring") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = random_model(100 + seed);
    const std::vector<int> src{4, 9, 12};
    const std::array<int, 2> theme{5, 6};
    DecodeOptions o;
    o.max_len = 6;
    for (int width : {1, 3}) {
      o.beam_width = width;
      const auto d = width == 1 ? greedy_decode(p, src, theme, o) : beam_decode(p, src, theme, o);
      if (d.ids.size() == static_cast<std::size_t>(o.max_len)) continue;  // ended by length, not EOS
      CHECK(d.log_prob == doctest::Approx(sequence_log_prob(p, src, theme, d.ids, true)).epsilon(1e-10));
    }
  }
}

TEST_CASE("wider beams never score below greedy on short horizons") {
  // With max_len 1 every hypothesis is a single token or EOS, so the beam
  // keeps the best one exactly.
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = random_model(200 + seed);
    DecodeOptions o;
    o.max_len = 1;
    const auto g = greedy_decode(p, std::vector<int>{4, 5}, std::vector<int>{6, 7}, o);
    o.beam_width = 4;
    const auto b = beam_decode(p, std::vector<int>{4, 5}, std::vector<int>{6, 7}, o);
    CHECK(b.log_prob >= g.log_prob - 1e-12);
  }
}

TEST_CASE("invalid options are usage errors") {
  const auto p = random_model(1);
  DecodeOptions o;
  o.beam_width = 0;
  CHECK_THROWS_AS(beam_decode(p, std::vector<int>{4}, std::vector<int>{5, 6}, o), UsageError);
  o.beam_width = 1;
  o.max_len = 0;
  CHECK_THROWS_AS(greedy_decode(p, std::vector<int>{4}, std::vector<int>{5, 6}, o), UsageError);
}

}  // TEST_SUITE
