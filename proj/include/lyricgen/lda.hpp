// Copyright 2026 The lyricgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lyricgen/corpus.hpp"
#include "lyricgen/rng.hpp"

namespace lyricgen::lda {

using Document = std::vector<std::string>;

struct LdaConfig {
  int k = 6;
  double alpha = 50.0 / 6.0;
  double beta = 0.01;
  int iterations = 1000;
  int burn_in = 100;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Collapsed-Gibbs state: count matrices plus the per-token topic labels
/// they summarize.
class LdaModel {
 public:
  /// Random initial assignment. Throws DataError on an empty corpus or an
  /// empty document.
  LdaModel(const std::vector<Document>& docs, const LdaConfig& cfg, Rng& rng);

  /// Resamples every token once, in document order.
  void sweep(Rng& rng);

  const LdaConfig& config() const { return cfg_; }
  int num_topics() const { return cfg_.k; }
  int vocab_size() const { return static_cast<int>(phrases_.size()); }
  int num_docs() const { return static_cast<int>(docs_.size()); }
  const std::vector<std::string>& phrases() const { return phrases_; }
  // -1 when absent.
  int phrase_id(const std::string& phrase) const;

  long topic_word(int t, int w) const { return topic_word_[static_cast<std::size_t>(t) * vocab_size() + w]; }
  long doc_topic(int d, int t) const { return doc_topic_[static_cast<std::size_t>(d) * cfg_.k + t]; }
  long topic_total(int t) const { return topic_totals_[t]; }
  const std::vector<std::vector<int>>& documents() const { return docs_; }
  const std::vector<std::vector<int>>& assignments() const { return assignments_; }
  long total_tokens() const;

  /// (count + beta) / (total + V beta)
  double phrase_probability(int t, int w) const;

  /// Throws DataError if any count invariant is broken.
  void check_invariants() const;

  void save(const std::filesystem::path& path) const;
  static LdaModel load(const std::filesystem::path& path);

 private:
  LdaModel() = default;
  void rebuild_counts();

  LdaConfig cfg_;
  std::vector<std::string> phrases_;
  std::unordered_map<std::string, int> index_;
  std::vector<std::vector<int>> docs_;
  std::vector<std::vector<int>> assignments_;
  std::vector<long> topic_word_;
  std::vector<long> doc_topic_;
  std::vector<long> topic_totals_;
};

/// Called after every sweep past burn-in with the 0-based sweep index.
using SweepObserver = std::function<void(const LdaModel&, int)>;

LdaModel lda_fit(const std::vector<Document>& docs, const LdaConfig& cfg,
                 const SweepObserver& observer = {});

struct InferResult {
  std::vector<double> probabilities;
  // True when the document had no known phrase and the prior was returned.
  bool uniform_fallback = false;
};

/// Samples topic labels for an unseen document against the fixed topic-word
/// counts and returns smoothed doc-topic proportions averaged over the second
/// half of the sweeps.
InferResult lda_infer(const Document& doc, const LdaModel& model, int sweeps,
                      std::uint64_t seed);

using ThemeKeywords = std::vector<std::vector<std::pair<std::string, double>>>;

/// Top-n two-character phrases per topic by smoothed probability; ties go to
/// the lexicographically smaller phrase.
ThemeKeywords top_keywords(const LdaModel& model, int n);

/// Overlapping adjacent-character bigrams of every line, skipping any bigram
/// that touches a stopword.
Document phrase_document(const corpus::Song& song, const std::set<std::string>& stopwords);

}  // namespace lyricgen::lda
