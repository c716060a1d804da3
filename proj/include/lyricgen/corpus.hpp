// Copyright 2026 The lyricgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace lyricgen::corpus {

using Tokens = std::vector<std::string>;
using Ids = std::vector<int>;
using Song = std::vector<Tokens>;

inline constexpr int kPad = 0;
inline constexpr int kSos = 1;
inline constexpr int kEos = 2;
inline constexpr int kUnk = 3;
inline constexpr int kNumSpecials = 4;
inline constexpr std::array<std::string_view, kNumSpecials> kSpecialTokens = {
    "<pad>", "<s>", "</s>", "<unk>"};

/// Splits a UTF-8 line into one token per non-whitespace Unicode scalar.
/// Throws DataError on malformed UTF-8.
Tokens tokenize(std::string_view line);

/// Bidirectional token/id map. Ids 0-3 are PAD, SOS, EOS, UNK; the remaining
/// ids are assigned by descending corpus frequency, ties by token bytes.
class Vocab {
 public:
  Vocab();

  static Vocab build(const std::vector<Tokens>& lines, int min_count);
  // Rebuilds from an id-ordered token list (the vocab.json layout).
  static Vocab from_tokens(std::vector<std::string> tokens, int min_count = 1);

  int size() const { return static_cast<int>(tokens_.size()); }
  int min_count() const { return min_count_; }
  const std::vector<std::string>& tokens() const { return tokens_; }

  bool contains(std::string_view token) const;
  // UNK for absent tokens.
  int id(std::string_view token) const;
  // Throws DataError for ids outside [0, size).
  const std::string& token(int id) const;

  Ids encode(const Tokens& line) const;
  Tokens decode(const Ids& ids) const;

  // Order-sensitive content hash, used to tie embeddings and checkpoints to
  // the vocabulary they were built with.
  std::uint64_t hash() const;

  bool operator==(const Vocab& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
  int min_count_ = 1;
};

struct CleanConfig {
  int min_len = 3;
  int max_len = 18;
  std::set<std::string> stopwords;
  bool drop_stopword_only = true;
  bool dedupe = true;

  void validate() const;
};

struct CleanReport {
  std::size_t lines_in = 0;
  std::size_t dropped_stopword_only = 0;
  std::size_t dropped_length = 0;
  std::size_t dropped_duplicate = 0;
  std::size_t lines_out = 0;

  CleanReport& operator+=(const CleanReport& o);
};

/// Applies the cleaning rules in order (stopword-only, length, duplicate).
/// Survivors keep their relative order. Duplicate detection spans the whole
/// list.
std::vector<Tokens> clean_lines(const std::vector<Tokens>& lines, const CleanConfig& cfg,
                                CleanReport* report = nullptr);

/// Same rules as clean_lines, applied across song boundaries: a line repeated
/// in a later song is dropped there too. Songs left empty are kept (as empty)
/// so indices line up with the input.
std::vector<Song> clean_songs(const std::vector<Song>& songs, const CleanConfig& cfg,
                              CleanReport* report = nullptr);

/// Adjacent-line pair before vocabulary encoding.
struct TextPair {
  Tokens src;
  Tokens trg;
  int theme = 0;
  bool trg_reversed = false;

  bool operator==(const TextPair&) const = default;
};

/// Encoded training unit: previous line, next line, theme.
struct SentencePair {
  Ids src;
  Ids trg;
  int theme = 0;
  bool trg_reversed = false;

  bool operator==(const SentencePair&) const = default;
};

/// One pair per adjacent line couple; pairs never cross songs.
std::vector<TextPair> build_pairs(const Song& song, int theme, bool reverse_target);

SentencePair encode_pair(const TextPair& pair, const Vocab& vocab);
TextPair decode_pair(const SentencePair& pair, const Vocab& vocab);

// ---- files --------------------------------------------------------------

/// Reads songs from a file or from every regular file of a directory (sorted
/// by name). Blank lines separate songs; each remaining text line is one
/// lyric line.
std::vector<Song> read_songs(const std::filesystem::path& path);

std::set<std::string> read_stopwords(const std::filesystem::path& path);

void write_pairs_jsonl(const std::filesystem::path& path, const std::vector<TextPair>& pairs);
std::vector<TextPair> read_pairs_jsonl(const std::filesystem::path& path);

void write_vocab_json(const std::filesystem::path& path, const Vocab& vocab);
Vocab read_vocab_json(const std::filesystem::path& path);

std::string join(const Tokens& tokens, std::string_view sep = "");

}  // namespace lyricgen::corpus
