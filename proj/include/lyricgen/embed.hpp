// Copyright 2026 The lyricgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lyricgen/corpus.hpp"
#include "lyricgen/model.hpp"
#include "lyricgen/tensor.hpp"

namespace lyricgen::embed {

struct EmbedConfig {
  int dim = 32;
  int window = 2;
  int negatives = 5;
  int epochs = 5;
  double learning_rate = 0.025;
  std::uint64_t seed = 1;

  void validate() const;
};

struct EmbeddingTable {
  Tensor input_vectors;   // V x dim, the vectors exported to the model
  Tensor output_vectors;  // V x dim, context vectors
  std::uint64_t vocab_hash = 0;

  int dim() const { return static_cast<int>(input_vectors.cols()); }
  int vocab_size() const { return static_cast<int>(input_vectors.rows()); }

  void save(const std::filesystem::path& path) const;
  static EmbeddingTable load(const std::filesystem::path& path);
};

/// Negative log-likelihood of one skip-gram example,
///   -log s(u_ctx . v) - sum_n log s(-u_n . v),
/// with its gradients.
struct SgnsTerm {
  double loss = 0.0;
  Vec d_center;
  Vec d_context;
  std::vector<Vec> d_negatives;
};

SgnsTerm sgns_term(std::span<const double> center, std::span<const double> context,
                   const std::vector<std::span<const double>>& negatives);

/// Random table: entries uniform on [-0.5/dim, 0.5/dim].
EmbeddingTable sgns_init(const corpus::Vocab& vocab, const EmbedConfig& cfg);

/// Sequential SGD over every (center, context) pair within the window of
/// each line, negatives drawn from the unigram^0.75 distribution.
EmbeddingTable sgns_train(const std::vector<corpus::Ids>& corpus, const corpus::Vocab& vocab,
                          const EmbedConfig& cfg);

struct SgnsExample {
  int center = 0;
  int context = 0;
  std::vector<int> negatives;
};

/// Summed loss of a fixed example set.
double sgns_objective(std::span<const SgnsExample> examples, const EmbeddingTable& table);

/// One full-batch gradient step on a fixed example set.
void sgns_full_batch_step(std::span<const SgnsExample> examples, EmbeddingTable& table, double lr);

/// Copies the input vectors into the model embedding; nothing else changes.
model::ModelParams load_pretrained(const EmbeddingTable& table, const corpus::Vocab& vocab,
                                   model::ModelParams params);

}  // namespace lyricgen::embed
