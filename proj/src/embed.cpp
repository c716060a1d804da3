// Copyright 2026 The lyricgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "lyricgen/embed.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lyricgen/error.hpp"
#include "lyricgen/kernels.hpp"
#include "lyricgen/rng.hpp"

namespace lyricgen::embed {

using kernels::sigmoid;

void EmbedConfig::validate() const {
  if (dim < 1) throw UsageError("embed.dim must be >= 1");
  if (window < 1) throw UsageError("embed.window must be >= 1");
  if (negatives < 1) throw UsageError("embed.negatives must be >= 1");
  if (epochs < 0) throw UsageError("embed.epochs must be >= 0");
  if (!(learning_rate > 0)) throw UsageError("embed.learning_rate must be > 0");
}

SgnsTerm sgns_term(std::span<const double> center, std::span<const double> context,
                   const std::vector<std::span<const double>>& negatives) {
  const std::size_t d = center.size();
  SgnsTerm t;
  t.d_center.assign(d, 0.0);
  // log s(x) = -log1p(exp(-x)), computed stably.
  auto log_sigmoid = [](double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); };

  const double pos = dot(context, center);
  t.loss -= log_sigmoid(pos);
  const double gp = sigmoid(pos) - 1.0;  // d(-log s(pos))/d pos
  axpy(gp, context, t.d_center);
  t.d_context.assign(center.begin(), center.end());
  for (double& v : t.d_context) v *= gp;

  for (const auto& neg : negatives) {
    const double s = dot(neg, center);
    t.loss -= log_sigmoid(-s);
    const double gn = sigmoid(s);  // d(-log s(-s))/d s
    axpy(gn, neg, t.d_center);
    Vec dn(center.begin(), center.end());
    for (double& v : dn) v *= gn;
    t.d_negatives.push_back(std::move(dn));
  }
  return t;
}

EmbeddingTable sgns_init(const corpus::Vocab& vocab, const EmbedConfig& cfg) {
  cfg.validate();
  EmbeddingTable t;
  t.input_vectors = Tensor::matrix(vocab.size(), cfg.dim);
  t.output_vectors = Tensor::matrix(vocab.size(), cfg.dim);
  t.vocab_hash = vocab.hash();
  Rng rng(cfg.seed);
  const double r = 0.5 / cfg.dim;
  kernels::init_uniform(t.input_vectors, r, rng);
  kernels::init_uniform(t.output_vectors, r, rng);
  return t;
}

namespace {

class NegativeSampler {
 public:
  NegativeSampler(const std::vector<corpus::Ids>& corpus, int vocab_size) {
    std::vector<double> counts(vocab_size, 0.0);
    for (const auto& line : corpus)
      for (int id : line) counts[id] += 1.0;
    cumulative_.resize(vocab_size);
    double total = 0.0;
    for (int i = 0; i < vocab_size; ++i) {
      total += std::pow(counts[i], 0.75);
      cumulative_[i] = total;
    }
  }

  int draw(Rng& rng) const {
    const double u = rng.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return static_cast<int>(std::min<std::ptrdiff_t>(it - cumulative_.begin(),
                                                      static_cast<std::ptrdiff_t>(cumulative_.size()) - 1));
  }

 private:
  std::vector<double> cumulative_;
};

void apply(EmbeddingTable& t, const SgnsExample& ex, const SgnsTerm& term, double lr) {
  axpy(-lr, term.d_center, t.input_vectors.row(ex.center));
  axpy(-lr, term.d_context, t.output_vectors.row(ex.context));
  for (std::size_t n = 0; n < ex.negatives.size(); ++n)
    axpy(-lr, term.d_negatives[n], t.output_vectors.row(ex.negatives[n]));
}

SgnsTerm term_for(const EmbeddingTable& t, const SgnsExample& ex) {
  std::vector<std::span<const double>> negs;
  for (int n : ex.negatives) negs.push_back(t.output_vectors.row(n));
  return sgns_term(t.input_vectors.row(ex.center), t.output_vectors.row(ex.context), negs);
}

}  // namespace

EmbeddingTable sgns_train(const std::vector<corpus::Ids>& corpus, const corpus::Vocab& vocab,
                          const EmbedConfig& cfg) {
  cfg.validate();
  std::size_t tokens = 0;
  for (const auto& line : corpus) {
    tokens += line.size();
    for (int id : line)
      if (id < 0 || id >= vocab.size()) throw DataError("embed: token id out of vocabulary range");
  }
  if (tokens < static_cast<std::size_t>(cfg.window) + 1)
    throw DataError("embed: corpus has " + std::to_string(tokens) +
                    " tokens, fewer than window+1 = " + std::to_string(cfg.window + 1));
  EmbeddingTable table = sgns_init(vocab, cfg);
  const NegativeSampler sampler(corpus, vocab.size());
  Rng rng(derive_seed(cfg.seed, "negatives"));
  SgnsExample ex;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (const auto& line : corpus) {
      const auto n = static_cast<long>(line.size());
      for (long c = 0; c < n; ++c) {
        for (long o = std::max(0L, c - cfg.window); o <= std::min(n - 1, c + cfg.window); ++o) {
          if (o == c) continue;
          ex.center = line[c];
          ex.context = line[o];
          ex.negatives.clear();
          for (int k = 0; k < cfg.negatives; ++k) {
            const int neg = sampler.draw(rng);
            if (neg != ex.context) ex.negatives.push_back(neg);
          }
          apply(table, ex, term_for(table, ex), cfg.learning_rate);
        }
      }
    }
  }
  return table;
}

double sgns_objective(std::span<const SgnsExample> examples, const EmbeddingTable& table) {
  double loss = 0.0;
  for (const auto& ex : examples) loss += term_for(table, ex).loss;
  return loss;
}

void sgns_full_batch_step(std::span<const SgnsExample> examples, EmbeddingTable& table, double lr) {
  EmbeddingTable grad{Tensor(table.input_vectors.shape), Tensor(table.output_vectors.shape), table.vocab_hash};
  for (const auto& ex : examples) {
    const SgnsTerm term = term_for(table, ex);
    apply(grad, ex, term, -1.0);
  }
  axpy(-lr, grad.input_vectors.data, table.input_vectors.data);
  axpy(-lr, grad.output_vectors.data, table.output_vectors.data);
}

void EmbeddingTable::save(const std::filesystem::path& path) const {
  nlohmann::ordered_json j;
  j["dim"] = dim();
  j["vocab_size"] = vocab_size();
  j["vocab_hash"] = vocab_hash;
  j["input_vectors"] = tensor_to_json(input_vectors);
  j["output_vectors"] = tensor_to_json(output_vectors);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump() << '\n';
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  EmbeddingTable t;
  try {
    const auto j = nlohmann::json::parse(ss.str());
    t.vocab_hash = j.at("vocab_hash").get<std::uint64_t>();
    t.input_vectors = tensor_from_json(j.at("input_vectors"), "input_vectors");
    t.output_vectors = tensor_from_json(j.at("output_vectors"), "output_vectors");
    if (t.input_vectors.shape.size() != 2 || t.output_vectors.shape != t.input_vectors.shape)
      throw DataError("input/output vector shapes differ");
    if (j.at("dim").get<int>() != t.dim() || j.at("vocab_size").get<int>() != t.vocab_size())
      throw DataError("dim/vocab_size disagree with vector shapes");
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return t;
}

model::ModelParams load_pretrained(const EmbeddingTable& table, const corpus::Vocab& vocab,
                                   model::ModelParams params) {
  if (table.dim() != params.cfg.embed_dim)
    throw DataError("pretrained embedding dim " + std::to_string(table.dim()) +
                    " does not match model embed_dim " + std::to_string(params.cfg.embed_dim));
  if (table.vocab_size() != params.cfg.vocab_size || table.vocab_hash != vocab.hash())
    throw DataError("pretrained embeddings were built for a different vocabulary");
  params.embedding.data = table.input_vectors.data;
  return params;
}

}  // namespace lyricgen::embed
