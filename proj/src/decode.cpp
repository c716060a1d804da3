// Copyright 2026 The lyricgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>

#include "lyricgen/error.hpp"
#include "lyricgen/model.hpp"

namespace lyricgen::model {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Log-probabilities with the tokens that may never be emitted masked out.
Vec masked_log_softmax(const Vec& logits, const DecodeOptions& opts, bool first_step) {
  Vec lp = logits;
  lp[corpus::kPad] = kNegInf;
  lp[corpus::kSos] = kNegInf;
  if (opts.mask_unk) lp[corpus::kUnk] = kNegInf;
  if (first_step && opts.suppress_eos_first) lp[corpus::kEos] = kNegInf;
  const double m = *std::max_element(lp.begin(), lp.end());
  double sum = 0.0;
  for (double v : lp)
    if (v != kNegInf) sum += std::exp(v - m);
  const double lse = m + std::log(sum);
  for (double& v : lp)
    if (v != kNegInf) v -= lse;
  return lp;
}

void check_opts(const DecodeOptions& opts) {
  if (opts.beam_width < 1) throw UsageError("beam width must be >= 1");
  if (opts.max_len < 1) throw UsageError("max_len must be >= 1");
}

}  // namespace

Decoded greedy_decode(const ModelParams& params, std::span<const int> src,
                      std::span<const int> theme_ids, const DecodeOptions& opts) {
  check_opts(opts);
  const auto states = encode(src, theme_ids, params);
  const auto keys = states.keys();
  DecoderState st = initial_decoder_state(states, params);
  Decoded out;
  int y = corpus::kSos;
  for (int step = 0; step < opts.max_len; ++step) {
    auto so = decode_step(st, y, keys, params);
    const Vec lp = masked_log_softmax(so.logits, opts, step == 0);
    const int best = static_cast<int>(std::max_element(lp.begin(), lp.end()) - lp.begin());
    out.log_prob += lp[best];
    if (best == corpus::kEos) break;
    out.ids.push_back(best);
    out.alphas.push_back(std::move(so.alpha));
    st = std::move(so.next);
    y = best;
  }
  return out;
}

Decoded beam_decode(const ModelParams& params, std::span<const int> src,
                    std::span<const int> theme_ids, const DecodeOptions& opts) {
  check_opts(opts);
  const auto states = encode(src, theme_ids, params);
  const auto keys = states.keys();

  struct Hyp {
    Decoded d;
    DecoderState st;
    int last = corpus::kSos;
    bool done = false;
  };
  struct Candidate {
    double score;
    double step_score;
    std::size_t parent;
    int token;
  };

  std::vector<Hyp> beam(1);
  beam[0].st = initial_decoder_state(states, params);
  const auto width = static_cast<std::size_t>(opts.beam_width);
  for (int step = 0; step < opts.max_len; ++step) {
    if (std::all_of(beam.begin(), beam.end(), [](const Hyp& h) { return h.done; })) break;
    std::vector<Candidate> cands;
    std::vector<StepOutput> outs(beam.size());
    for (std::size_t b = 0; b < beam.size(); ++b) {
      const Hyp& h = beam[b];
      if (h.done) {
        cands.push_back({h.d.log_prob, 0.0, b, -1});
        continue;
      }
      outs[b] = decode_step(h.st, h.last, keys, params);
      const Vec lp = masked_log_softmax(outs[b].logits, opts, step == 0);
      for (int tok = 0; tok < static_cast<int>(lp.size()); ++tok)
        if (lp[tok] != kNegInf) cands.push_back({h.d.log_prob + lp[tok], lp[tok], b, tok});
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
      if (a.score != b.score) return a.score > b.score;
      if (a.step_score != b.step_score) return a.step_score > b.step_score;
      if (a.parent != b.parent) return a.parent < b.parent;
      return a.token < b.token;
    });
    std::vector<Hyp> next;
    for (const auto& c : cands) {
      if (next.size() == width) break;
      Hyp h;
      const Hyp& parent = beam[c.parent];
      h.d = parent.d;
      if (c.token < 0) {
        h.done = true;
      } else {
        h.d.log_prob = c.score;
        if (c.token == corpus::kEos) {
          h.done = true;
        } else {
          h.d.ids.push_back(c.token);
          h.d.alphas.push_back(outs[c.parent].alpha);
          h.st = outs[c.parent].next;
          h.last = c.token;
        }
      }
      next.push_back(std::move(h));
    }
    beam = std::move(next);
  }
  // The beam is kept sorted by score, so the front is the best hypothesis.
  return beam.front().d;
}

}  // namespace lyricgen::model
