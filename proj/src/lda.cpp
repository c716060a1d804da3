// Copyright 2026 The lyricgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "lyricgen/lda.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lyricgen/error.hpp"

namespace lyricgen::lda {

void LdaConfig::validate() const {
  if (k < 1) throw UsageError("lda.k must be >= 1");
  if (!(alpha > 0)) throw UsageError("lda.alpha must be > 0");
  if (!(beta > 0)) throw UsageError("lda.beta must be > 0");
  if (iterations < 1) throw UsageError("lda.iterations must be >= 1");
  if (burn_in < 0 || burn_in >= iterations)
    throw UsageError("lda.burn_in must lie in [0, iterations)");
}

LdaModel::LdaModel(const std::vector<Document>& docs, const LdaConfig& cfg, Rng& rng)
    : cfg_(cfg) {
  cfg_.validate();
  if (docs.empty()) throw DataError("lda: empty corpus");
  std::set<std::string> vocab;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    if (docs[d].empty())
      throw DataError("lda: document " + std::to_string(d) + " is empty after stopword removal");
    vocab.insert(docs[d].begin(), docs[d].end());
  }
  phrases_.assign(vocab.begin(), vocab.end());
  for (int i = 0; i < vocab_size(); ++i) index_.emplace(phrases_[i], i);
  docs_.reserve(docs.size());
  assignments_.reserve(docs.size());
  for (const auto& doc : docs) {
    std::vector<int> ids, labels;
    for (const auto& p : doc) {
      ids.push_back(index_.at(p));
      labels.push_back(static_cast<int>(rng.below(cfg_.k)));
    }
    docs_.push_back(std::move(ids));
    assignments_.push_back(std::move(labels));
  }
  rebuild_counts();
}

void LdaModel::rebuild_counts() {
  const auto k = static_cast<std::size_t>(cfg_.k);
  topic_word_.assign(k * phrases_.size(), 0);
  doc_topic_.assign(k * docs_.size(), 0);
  topic_totals_.assign(k, 0);
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    for (std::size_t i = 0; i < docs_[d].size(); ++i) {
      const int w = docs_[d][i], t = assignments_[d][i];
      ++topic_word_[t * phrases_.size() + w];
      ++doc_topic_[d * k + t];
      ++topic_totals_[t];
    }
  }
}

void LdaModel::sweep(Rng& rng) {
  const int k = cfg_.k;
  const std::size_t V = phrases_.size();
  const double vbeta = static_cast<double>(V) * cfg_.beta;
  std::vector<double> cumulative(k);
  for (std::size_t d = 0; d < docs_.size(); ++d) {
    long* nd = &doc_topic_[d * k];
    for (std::size_t i = 0; i < docs_[d].size(); ++i) {
      const int w = docs_[d][i];
      int t = assignments_[d][i];
      --nd[t];
      --topic_word_[t * V + w];
      --topic_totals_[t];
      double total = 0.0;
      for (int j = 0; j < k; ++j) {
        total += (static_cast<double>(nd[j]) + cfg_.alpha) *
                 (static_cast<double>(topic_word_[j * V + w]) + cfg_.beta) /
                 (static_cast<double>(topic_totals_[j]) + vbeta);
        cumulative[j] = total;
      }
      const double u = rng.uniform() * total;
      t = 0;
      while (t < k - 1 && u >= cumulative[t]) ++t;
      assignments_[d][i] = t;
      ++nd[t];
      ++topic_word_[t * V + w];
      ++topic_totals_[t];
    }
  }
}

int LdaModel::phrase_id(const std::string& phrase) const {
  auto it = index_.find(phrase);
  return it == index_.end() ? -1 : it->second;
}

long LdaModel::total_tokens() const {
  long n = 0;
  for (const auto& d : docs_) n += static_cast<long>(d.size());
  return n;
}

double LdaModel::phrase_probability(int t, int w) const {
  return (static_cast<double>(topic_word(t, w)) + cfg_.beta) /
         (static_cast<double>(topic_total(t)) + vocab_size() * cfg_.beta);
}

void LdaModel::check_invariants() const {
  long grand = 0;
  for (int t = 0; t < cfg_.k; ++t) {
    long row = 0;
    for (int w = 0; w < vocab_size(); ++w) {
      if (topic_word(t, w) < 0) throw DataError("lda: negative topic_word count");
      row += topic_word(t, w);
    }
    if (row != topic_total(t)) throw DataError("lda: topic_word row sum != topic_totals");
    grand += row;
  }
  if (grand != total_tokens()) throw DataError("lda: topic_word total != corpus token count");
  for (int d = 0; d < num_docs(); ++d) {
    long row = 0;
    for (int t = 0; t < cfg_.k; ++t) {
      if (doc_topic(d, t) < 0) throw DataError("lda: negative doc_topic count");
      row += doc_topic(d, t);
    }
    if (row != static_cast<long>(docs_[d].size())) throw DataError("lda: doc_topic row sum mismatch");
    for (int z : assignments_[d])
      if (z < 0 || z >= cfg_.k) throw DataError("lda: assignment out of range");
  }
}

void LdaModel::save(const std::filesystem::path& path) const {
  nlohmann::ordered_json j;
  j["cfg"] = {{"k", cfg_.k},           {"alpha", cfg_.alpha},     {"beta", cfg_.beta},
              {"iterations", cfg_.iterations}, {"burn_in", cfg_.burn_in}, {"seed", cfg_.seed}};
  j["phrases"] = phrases_;
  std::vector<std::vector<long>> tw(cfg_.k), dt(docs_.size());
  for (int t = 0; t < cfg_.k; ++t)
    tw[t].assign(topic_word_.begin() + t * vocab_size(), topic_word_.begin() + (t + 1) * vocab_size());
  for (std::size_t d = 0; d < docs_.size(); ++d)
    dt[d].assign(doc_topic_.begin() + d * cfg_.k, doc_topic_.begin() + (d + 1) * cfg_.k);
  j["topic_word"] = tw;
  j["doc_topic"] = dt;
  j["topic_totals"] = topic_totals_;
  j["documents"] = docs_;
  j["assignments"] = assignments_;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump() << '\n';
}

LdaModel LdaModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  LdaModel m;
  try {
    const auto j = nlohmann::json::parse(ss.str());
    const auto& c = j.at("cfg");
    m.cfg_.k = c.at("k").get<int>();
    m.cfg_.alpha = c.at("alpha").get<double>();
    m.cfg_.beta = c.at("beta").get<double>();
    m.cfg_.iterations = c.at("iterations").get<int>();
    m.cfg_.burn_in = c.at("burn_in").get<int>();
    m.cfg_.seed = c.at("seed").get<std::uint64_t>();
    m.cfg_.validate();
    m.phrases_ = j.at("phrases").get<std::vector<std::string>>();
    for (int i = 0; i < m.vocab_size(); ++i)
      if (!m.index_.emplace(m.phrases_[i], i).second) throw DataError("duplicate phrase");
    m.docs_ = j.at("documents").get<std::vector<std::vector<int>>>();
    m.assignments_ = j.at("assignments").get<std::vector<std::vector<int>>>();
    if (m.docs_.size() != m.assignments_.size()) throw DataError("documents/assignments length mismatch");
    for (std::size_t d = 0; d < m.docs_.size(); ++d) {
      if (m.docs_[d].size() != m.assignments_[d].size())
        throw DataError("document " + std::to_string(d) + ": assignment length mismatch");
      for (int w : m.docs_[d])
        if (w < 0 || w >= m.vocab_size()) throw DataError("phrase id out of range");
      for (int z : m.assignments_[d])
        if (z < 0 || z >= m.cfg_.k) throw DataError("assignment out of range");
    }
    m.rebuild_counts();
    // Stored matrices must agree with the assignments they summarize.
    const auto tw = j.at("topic_word").get<std::vector<std::vector<long>>>();
    const auto totals = j.at("topic_totals").get<std::vector<long>>();
    if (tw.size() != static_cast<std::size_t>(m.cfg_.k) || totals != m.topic_totals_)
      throw DataError("topic_word/topic_totals inconsistent with assignments");
    for (int t = 0; t < m.cfg_.k; ++t)
      for (int w = 0; w < m.vocab_size(); ++w)
        if (tw[t].size() != m.phrases_.size() || tw[t][w] != m.topic_word(t, w))
          throw DataError("topic_word inconsistent with assignments");
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  } catch (const UsageError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return m;
}

LdaModel lda_fit(const std::vector<Document>& docs, const LdaConfig& cfg,
                 const SweepObserver& observer) {
  Rng rng(cfg.seed);
  LdaModel model(docs, cfg, rng);
  for (int s = 0; s < cfg.iterations; ++s) {
    model.sweep(rng);
    if (observer && s >= cfg.burn_in) observer(model, s);
  }
  return model;
}

InferResult lda_infer(const Document& doc, const LdaModel& model, int sweeps,
                      std::uint64_t seed) {
  if (sweeps < 1) throw UsageError("lda_infer: sweeps must be >= 1");
  const int k = model.num_topics();
  const double alpha = model.config().alpha;
  InferResult result;
  std::vector<int> words;
  for (const auto& p : doc) {
    const int w = model.phrase_id(p);
    if (w >= 0) words.push_back(w);
  }
  if (words.empty()) {
    result.probabilities.assign(k, 1.0 / k);
    result.uniform_fallback = true;
    return result;
  }
  Rng rng(seed);
  std::vector<long> nd(k, 0);
  std::vector<int> z(words.size());
  for (auto& t : z) {
    t = static_cast<int>(rng.below(k));
    ++nd[t];
  }
  // phi is fixed during inference.
  std::vector<double> phi(static_cast<std::size_t>(k) * words.size());
  for (std::size_t i = 0; i < words.size(); ++i)
    for (int t = 0; t < k; ++t) phi[i * k + t] = model.phrase_probability(t, words[i]);

  std::vector<double> acc(k, 0.0), cumulative(k);
  const int keep_from = sweeps / 2;
  int kept = 0;
  const double denom = static_cast<double>(words.size()) + k * alpha;
  for (int s = 0; s < sweeps; ++s) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      --nd[z[i]];
      double total = 0.0;
      for (int t = 0; t < k; ++t) {
        total += (static_cast<double>(nd[t]) + alpha) * phi[i * k + t];
        cumulative[t] = total;
      }
      const double u = rng.uniform() * total;
      int t = 0;
      while (t < k - 1 && u >= cumulative[t]) ++t;
      z[i] = t;
      ++nd[t];
    }
    if (s >= keep_from) {
      for (int t = 0; t < k; ++t) acc[t] += (static_cast<double>(nd[t]) + alpha) / denom;
      ++kept;
    }
  }
  double sum = 0.0;
  for (double& a : acc) sum += (a /= kept);
  for (double& a : acc) a /= sum;
  result.probabilities = std::move(acc);
  return result;
}

namespace {

std::size_t scalar_count(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++n;
  return n;
}

}  // namespace

ThemeKeywords top_keywords(const LdaModel& model, int n) {
  if (n < 1) throw UsageError("top_keywords: n must be >= 1");
  std::vector<int> candidates;
  for (int w = 0; w < model.vocab_size(); ++w)
    if (scalar_count(model.phrases()[w]) == 2) candidates.push_back(w);
  ThemeKeywords out(model.num_topics());
  for (int t = 0; t < model.num_topics(); ++t) {
    std::vector<int> order = candidates;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const long ca = model.topic_word(t, a), cb = model.topic_word(t, b);
      if (ca != cb) return ca > cb;
      return model.phrases()[a] < model.phrases()[b];
    });
    const auto take = std::min<std::size_t>(order.size(), static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < take; ++i)
      out[t].emplace_back(model.phrases()[order[i]], model.phrase_probability(t, order[i]));
  }
  return out;
}

Document phrase_document(const corpus::Song& song, const std::set<std::string>& stopwords) {
  Document doc;
  for (const auto& line : song) {
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
      if (stopwords.count(line[i]) || stopwords.count(line[i + 1])) continue;
      doc.push_back(line[i] + line[i + 1]);
    }
  }
  return doc;
}

}  // namespace lyricgen::lda
