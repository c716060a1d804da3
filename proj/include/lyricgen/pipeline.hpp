// Copyright 2026 The lyricgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lyricgen/bench.hpp"
#include "lyricgen/corpus.hpp"
#include "lyricgen/embed.hpp"
#include "lyricgen/gradcheck.hpp"
#include "lyricgen/lda.hpp"
#include "lyricgen/model.hpp"

namespace lyricgen::pipeline {

struct Paths {
  std::string raw;          // song file or directory
  std::string stopwords;    // optional
  std::string pairs = "pairs.jsonl";
  std::string vocab = "vocab.json";
  std::string lda = "lda.json";
  std::string embeddings;   // optional; empty disables pretraining
  std::string checkpoint = "checkpoint.json";
  std::string trace;        // optional generation trace sidecar
};

struct PrepareOptions {
  std::optional<int> theme;  // fixed theme for every song instead of LDA inference
  bool reverse_target = true;
  bool reverse_src = false;  // experimental
  int min_count = 5;
  int infer_sweeps = 50;
};

struct GenerateOptions {
  int theme_id = 0;
  std::string seed_line;
  int n_lines = 4;
  int beam_width = 1;
  int max_len = 18;
  // Unset: follow the checkpoint's training data.
  std::optional<bool> undo_reversal;
  // Two characters overriding the theme keyword lookup.
  std::string keywords;
  // Mirrors prepare.reverse_src so sources are fed the way they were trained.
  bool reverse_src = false;
};

/// Every module config plus file paths. Module seeds not given explicitly
/// are derived from the global seed.
struct RunConfig {
  std::uint64_t seed = 42;
  Paths paths;
  corpus::CleanConfig clean;
  lda::LdaConfig lda;
  int lda_keywords = 1;
  embed::EmbedConfig embed;
  model::ModelConfig model;
  model::TrainConfig train;
  // Per-theme keyword strings used when no LDA model is available.
  std::vector<std::string> theme_keywords;
  bool no_pretrain = false;
  PrepareOptions prepare;
  GenerateOptions generate;
  gradcheck::Options gradcheck;
  bench::BenchConfig bench;
};

/// Reads a RunConfig from JSON, starting from defaults. Unknown keys are
/// rejected. The stopword file, when named, is loaded into clean.stopwords.
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& cfg);

struct PrepareReport {
  std::size_t songs_in = 0;
  corpus::CleanReport clean;
  std::size_t pairs_out = 0;
  int vocab_size = 0;
  std::vector<std::size_t> pairs_per_theme;
  std::size_t uniform_theme_fallbacks = 0;
};

/// tokenize -> clean -> theme assignment -> pairs -> vocab. Writes the pairs
/// and vocab files. Throws DataError (with the drop report) when no pair
/// survives.
PrepareReport cmd_prepare(const RunConfig& cfg);

struct LdaTrainReport {
  std::size_t documents = 0;
  std::size_t skipped_documents = 0;
  long tokens = 0;
  int phrases = 0;
  lda::ThemeKeywords keywords;
};

LdaTrainReport cmd_lda_train(const RunConfig& cfg);

struct EmbedReport {
  std::size_t lines = 0;
  std::size_t tokens = 0;
  int dim = 0;
};

EmbedReport cmd_embed_train(const RunConfig& cfg);

struct TrainReport {
  std::size_t pairs = 0;
  std::size_t parameters = 0;
  bool pretrained = false;
  std::vector<std::string> theme_keywords;
  std::vector<double> loss_history;
};

TrainReport cmd_train(const RunConfig& cfg);

struct TraceStep {
  int line = 0;
  int step = 0;
  corpus::Tokens src;
  std::string token;
  Vec alpha;
};

struct GenerateResult {
  std::string keyword;
  std::vector<std::string> lines;
  std::vector<TraceStep> trace;
};

/// Line-by-line generation: each emitted line becomes the next source line
/// while the theme keywords stay fixed.
GenerateResult generate(const model::Checkpoint& ckpt, const lda::LdaModel* lda,
                        const GenerateOptions& opts);

/// Loads the checkpoint (and the LDA model when the config names an existing
/// file), generates, and writes the trace sidecar when requested.
GenerateResult cmd_generate(const RunConfig& cfg);

std::string trace_to_jsonl(const std::vector<TraceStep>& trace);

/// Resolves theme keywords: LDA rank-1 phrases when a model is given,
/// otherwise the configured list.
std::vector<std::string> resolve_theme_keywords(const lda::LdaModel* lda,
                                                const std::vector<std::string>& fallback);

/// Tokenizes a keyword string that must hold exactly two characters.
std::array<int, 2> keyword_ids(const std::string& keyword, const corpus::Vocab& vocab);

nlohmann::json report_to_json(const PrepareReport& r);
nlohmann::json report_to_json(const LdaTrainReport& r);
nlohmann::json report_to_json(const EmbedReport& r);
nlohmann::json report_to_json(const TrainReport& r);
nlohmann::json report_to_json(const gradcheck::Report& r);
nlohmann::json report_to_json(const std::vector<bench::BenchRow>& rows);

}  // namespace lyricgen::pipeline
