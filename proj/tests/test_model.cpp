// Copyright 2026 The lyricgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "lyricgen/error.hpp"
#include "lyricgen/gradcheck.hpp"
#include "lyricgen/model.hpp"
#include "lyricgen/rng.hpp"

using namespace lyricgen;
using namespace lyricgen::model;

namespace {

ModelConfig tiny(int vocab = 12) {
  ModelConfig c;
  c.embed_dim = 4;
  c.hidden_dim = 6;
  c.attention_dim = 5;
  c.vocab_size = vocab;
  return c;
}

const ThemeTable kThemes{{4, 5}, {6, 7}};

std::vector<corpus::SentencePair> toy_pairs() {
  return {{{8, 9, 10}, {11, 8, 9}, 0, true}, {{9, 10}, {10, 11, 8, 4}, 1, true}, {{4, 6, 8, 10}, {5}, 0, true}};
}

double sum_all(const ModelParams& p) {
  double s = 0.0;
  p.for_each([&](const std::string&, const Tensor& t) { s += std::accumulate(t.data.begin(), t.data.end(), 0.0); });
  return s;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("initial weights are bounded, seeded and centred") {
  ModelConfig c;
  c.vocab_size = 300;
  const auto a = init_params(c, 7), b = init_params(c, 7);
  CHECK(a == b);
  CHECK_FALSE(a == init_params(c, 8));
  double sum = 0.0;
  std::size_t n = 0;
  a.for_each([&](const std::string&, const Tensor& t) {
    for (double v : t.data) {
      CHECK(std::abs(v) <= 0.1);
      sum += v;
      ++n;
    }
  });
  REQUIRE(n >= 100000);
  CHECK(std::abs(sum / n) < 0.005);
  CHECK(n == a.parameter_count());
}

TEST_CASE("parameter names come in a fixed order") {
  std::vector<std::string> names;
  init_params(tiny(), 1).for_each([&](const std::string& n, const Tensor&) { names.push_back(n); });
  CHECK(names.front() == "embedding");
  CHECK(names.back() == "out.b");
  CHECK(std::find(names.begin(), names.end(), "attn.v") != names.end());

  auto dot = tiny();
  dot.attention_variant = kernels::AttentionVariant::kDot;
  names.clear();
  init_params(dot, 1).for_each([&](const std::string& n, const Tensor&) { names.push_back(n); });
  CHECK(std::find(names.begin(), names.end(), "attn.v") == names.end());
  CHECK(std::find(names.begin(), names.end(), "attn.U") == names.end());
}

TEST_CASE("tied encoders drop the theme weights") {
  auto c = tiny();
  const auto untied = init_params(c, 1);
  c.tie_theme_sentence_encoders = true;
  const auto tied = init_params(c, 1);
  CHECK(tied.parameter_count() < untied.parameter_count());
  CHECK(tied.theme_fwd.Wx.empty());
  CHECK(&tied.theme_fwd_params() == &tied.sent_fwd);
}

TEST_CASE("encoder state counts follow the source length") {
  const auto p = init_params(tiny(), 2);
  const std::vector<int> five{4, 5, 6, 7, 8};
  const auto st = encode(five, kThemes[0], p);
  CHECK(st.sentence_states.size() == 5);
  CHECK(st.keys().size() == 7);
  CHECK(st.keys()[5] == st.theme_states[0]);
  CHECK(st.keys()[6] == st.theme_states[1]);
  for (const auto& k : st.keys()) CHECK(k.size() == 12);
  CHECK(encode(std::vector<int>{9}, kThemes[0], p).sentence_states.size() == 1);
  CHECK_THROWS_AS(encode(std::vector<int>{}, kThemes[0], p), UsageError);
}

TEST_CASE("theme keyword order matters unless the keywords match") {
  const auto p = init_params(tiny(), 3);
  const std::vector<int> src{8, 9};
  const auto ab = encode(src, std::vector<int>{4, 5}, p), ba = encode(src, std::vector<int>{5, 4}, p);
  CHECK_FALSE(ab.theme_states == ba.theme_states);
  const auto aa = encode(src, std::vector<int>{4, 4}, p);
  CHECK(aa.theme_states == encode(src, std::vector<int>{4, 4}, p).theme_states);
}

TEST_CASE("attention over one word and two theme states is uniform when v is zero") {
  auto p = init_params(tiny(), 4);
  p.attn.v.fill(0.0);
  const auto st = encode(std::vector<int>{8}, kThemes[0], p);
  const auto out = decode_step(initial_decoder_state(st, p), corpus::kSos, st.keys(), p);
  REQUIRE(out.alpha.size() == 3);
  for (double a : out.alpha) CHECK(a == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("attention weights are a distribution at every step") {
  const auto p = init_params(tiny(), 5);
  const auto st = encode(std::vector<int>{8, 9, 10, 11}, kThemes[1], p);
  auto s = initial_decoder_state(st, p);
  int y = corpus::kSos;
  for (int t = 0; t < 10; ++t) {
    auto out = decode_step(s, y, st.keys(), p);
    CHECK(std::abs(std::accumulate(out.alpha.begin(), out.alpha.end(), 0.0) - 1.0) <= 1e-12);
    s = out.next;
    y = 4 + t % 8;
  }
}

TEST_CASE("masked channel gives the theme states no weight") {
  auto c = tiny();
  c.theme_channel = ThemeChannel::kMasked;
  const auto p = init_params(c, 6);
  const auto st = encode(std::vector<int>{8, 9, 10}, kThemes[0], p);
  const auto out = decode_step(initial_decoder_state(st, p), corpus::kSos, st.keys(), p);
  REQUIRE(out.alpha.size() == 5);
  CHECK(out.alpha[3] == 0.0);
  CHECK(out.alpha[4] == 0.0);
  CHECK(out.alpha[0] + out.alpha[1] + out.alpha[2] == doctest::Approx(1.0));
}

TEST_CASE("zeroed channel makes the theme irrelevant") {
  auto c = tiny();
  c.theme_channel = ThemeChannel::kZeroed;
  const auto p = init_params(c, 7);
  const auto pair = toy_pairs()[0];
  const double a = pair_loss(pair, ThemeTable{{4, 5}}, p, nullptr);
  const double b = pair_loss(pair, ThemeTable{{9, 11}}, p, nullptr);
  CHECK(a == b);
  c.theme_channel = ThemeChannel::kOn;
  const auto q = init_params(c, 7);
  CHECK(pair_loss(pair, ThemeTable{{4, 5}}, q, nullptr) != pair_loss(pair, ThemeTable{{9, 11}}, q, nullptr));
}

TEST_CASE("an untrained model is close to uniform") {
  ModelConfig c;
  c.vocab_size = 40;
  const auto p = init_params(c, 8);
  std::vector<corpus::SentencePair> batch;
  Rng rng(1);
  for (int i = 0; i < 10; ++i) {
    corpus::SentencePair s;
    for (int k = 0; k < 6; ++k) s.src.push_back(4 + static_cast<int>(rng.below(36)));
    for (int k = 0; k < 6; ++k) s.trg.push_back(4 + static_cast<int>(rng.below(36)));
    batch.push_back(s);
  }
  const auto lg = forward_loss(batch, ThemeTable{{4, 5}}, p, false);
  CHECK(lg.terms == 70);
  CHECK(std::abs(lg.loss - std::log(40.0)) / std::log(40.0) < 0.15);
}

TEST_CASE("a repeated pair has the same mean loss and gradient") {
  const auto p = init_params(tiny(), 9);
  const auto pair = toy_pairs()[1];
  const std::vector<corpus::SentencePair> one{pair}, two{pair, pair};
  const auto a = forward_loss(one, kThemes, p), b = forward_loss(two, kThemes, p);
  CHECK(a.loss == doctest::Approx(b.loss).epsilon(1e-14));
  CHECK(sum_all(a.grads) == doctest::Approx(sum_all(b.grads)).epsilon(1e-12));
  long terms = 0;
  const double summed = pair_loss(pair, kThemes, p, nullptr, &terms);
  CHECK(terms == 5);
  CHECK(a.loss == doctest::Approx(summed / 5));
}

TEST_CASE("out-of-range ids and themes are rejected") {
  const auto p = init_params(tiny(), 10);
  CHECK_THROWS(pair_loss({{99}, {4}, 0, false}, kThemes, p, nullptr));
  CHECK_THROWS(pair_loss({{4}, {4}, 7, false}, kThemes, p, nullptr));
}

TEST_CASE("the model passes its own finite-difference check and catches faults") {
  gradcheck::Options opts;
  const auto rep = gradcheck::run_gradcheck(opts);
  CHECK(rep.passed);
  for (const auto& g : rep.groups) {
    CAPTURE(g.group);
    CHECK(g.max_rel_error < 1e-4);
    CHECK(g.checked > 0);
  }
  const auto again = gradcheck::run_gradcheck(opts);
  REQUIRE(again.groups.size() == rep.groups.size());
  for (std::size_t i = 0; i < rep.groups.size(); ++i) CHECK(again.groups[i].max_rel_error == rep.groups[i].max_rel_error);

  for (const char* group : {"model.dot.dec.Wh", "kernel.attention.additive", "model.additive.attn.v"}) {
    opts.inject_fault = group;
    const auto bad = gradcheck::run_gradcheck(opts);
    CHECK_FALSE(bad.passed);
    for (const auto& g : bad.groups) CHECK(g.passed == (g.group != group));
  }
  opts.inject_fault = "no.such.group";
  CHECK_THROWS_AS(gradcheck::run_gradcheck(opts), UsageError);
}

TEST_CASE("AdaDelta single scalar step") {
  AdaDeltaConfig cfg;
  double x = 1.5, g = 1.0, eg2 = 0.0, edx2 = 0.0;
  adadelta_update({&x, 1}, {&g, 1}, {&eg2, 1}, {&edx2, 1}, cfg);
  const double expect = -std::sqrt(1e-6) / std::sqrt(0.05 + 1e-6);
  CHECK(x - 1.5 == doctest::Approx(expect).epsilon(1e-12));
  CHECK(std::abs((x - 1.5) - -4.4721e-3) < 1e-7);
  CHECK(eg2 == doctest::Approx(0.05));
  CHECK(edx2 == doctest::Approx(0.05 * expect * expect));
}

TEST_CASE("AdaDelta with a zero gradient only decays the accumulators") {
  AdaDeltaConfig cfg;
  double x = -0.25, g = 0.0, eg2 = 0.4, edx2 = 0.3;
  adadelta_update({&x, 1}, {&g, 1}, {&eg2, 1}, {&edx2, 1}, cfg);
  CHECK(x == -0.25);
  CHECK(eg2 == doctest::Approx(0.95 * 0.4).epsilon(1e-15));
  CHECK(edx2 == doctest::Approx(0.95 * 0.3).epsilon(1e-15));
}

TEST_CASE("AdaDelta steps barely depend on gradient scale") {
  AdaDeltaConfig cfg;
  double x1 = 0.0, g1 = 0.3, a1 = 0.0, b1 = 0.0;
  double x2 = 0.0, g2 = 3.0, a2 = 0.0, b2 = 0.0;
  adadelta_update({&x1, 1}, {&g1, 1}, {&a1, 1}, {&b1, 1}, cfg);
  adadelta_update({&x2, 1}, {&g2, 1}, {&a2, 1}, {&b2, 1}, cfg);
  CHECK(std::abs(std::abs(x2) - std::abs(x1)) / std::abs(x1) < 1e-3);
}

TEST_CASE("AdaDelta refuses a non-finite gradient before touching anything") {
  const auto p0 = init_params(tiny(), 11);
  auto p = p0;
  auto state = AdaDeltaState::init(p, {});
  auto grads = p;
  grads.for_each([](const std::string&, Tensor& t) { t.fill(0.1); });
  grads.out_b.data.back() = std::nan("");
  CHECK_THROWS_AS(adadelta_step(p, grads, state), DataError);
  CHECK(p == p0);
  CHECK(state.steps == 0);
}

TEST_CASE("training is finite, seeded and reduces the loss") {
  TrainConfig tc;
  tc.epochs = 15;
  tc.batch_size = 2;
  tc.seed = 3;
  const auto p = init_params(tiny(), 12);
  const auto a = train(toy_pairs(), kThemes, p, tc), b = train(toy_pairs(), kThemes, p, tc);
  CHECK(a.loss_history == b.loss_history);
  CHECK(a.params == b.params);
  for (double l : a.loss_history) CHECK(std::isfinite(l));
  CHECK(a.loss_history.back() < a.loss_history.front());
  CHECK(a.optimizer.steps == 30);

  int calls = 0;
  train(toy_pairs(), kThemes, p, tc, [&](int epoch, const ModelParams&, const AdaDeltaState&, const std::vector<double>& h) {
    CHECK(static_cast<std::size_t>(epoch + 1) == h.size());
    ++calls;
  });
  CHECK(calls == 15);

  tc.stop_below = 100.0;
  CHECK(train(toy_pairs(), kThemes, p, tc).loss_history.size() == 1);
  CHECK_THROWS_AS(train({}, kThemes, p, tc), DataError);
}

TEST_CASE("gradient clipping bounds the update direction") {
  TrainConfig tc;
  tc.epochs = 3;
  tc.seed = 4;
  tc.clip_norm = 1e-3;
  const auto p = init_params(tiny(), 13);
  const auto r = train(toy_pairs(), kThemes, p, tc);
  for (double l : r.loss_history) CHECK(std::isfinite(l));
  tc.clip_norm = -1.0;
  CHECK_THROWS_AS(tc.validate(), UsageError);
}

TEST_CASE("configs round-trip through JSON and reject unknown keys") {
  auto c = tiny();
  c.attention_variant = kernels::AttentionVariant::kDot;
  c.theme_channel = ThemeChannel::kMasked;
  CHECK(model_config_from_json(to_json(c)) == c);
  TrainConfig t;
  t.epochs = 7;
  t.clip_norm = 2.5;
  t.optimizer.lr = 0.5;
  CHECK(train_config_from_json(to_json(t)) == t);
  CHECK_THROWS_AS(model_config_from_json({{"hiden_dim", 3}}), UsageError);
  CHECK_THROWS_AS(train_config_from_json({{"epoch", 3}}), UsageError);
  CHECK_THROWS_AS(model_config_from_json({{"attention_variant", "cosine"}}), UsageError);
}

}  // TEST_SUITE
