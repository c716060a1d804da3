// Copyright 2026 The lyricgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "lyricgen/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lyricgen/error.hpp"
#include "lyricgen/rng.hpp"

namespace lyricgen::corpus {

namespace {

bool is_space(char32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000: case 0xFEFF:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

std::string line_key(const Tokens& line) {
  std::string key;
  for (const auto& t : line) {
    key += t;
    key.push_back('\0');
  }
  return key;
}

enum class Verdict { kKeep, kStopwordOnly, kLength, kDuplicate };

class LineFilter {
 public:
  explicit LineFilter(const CleanConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

  Verdict judge(const Tokens& line) {
    if (cfg_.drop_stopword_only && !line.empty() &&
        std::all_of(line.begin(), line.end(),
                    [&](const std::string& t) { return cfg_.stopwords.count(t) > 0; }))
      return Verdict::kStopwordOnly;
    const auto n = static_cast<int>(line.size());
    if (n < cfg_.min_len || n > cfg_.max_len) return Verdict::kLength;
    if (cfg_.dedupe && !seen_.insert(line_key(line)).second) return Verdict::kDuplicate;
    return Verdict::kKeep;
  }

  bool keep(const Tokens& line, CleanReport& r) {
    ++r.lines_in;
    switch (judge(line)) {
      case Verdict::kStopwordOnly: ++r.dropped_stopword_only; return false;
      case Verdict::kLength: ++r.dropped_length; return false;
      case Verdict::kDuplicate: ++r.dropped_duplicate; return false;
      case Verdict::kKeep: break;
    }
    ++r.lines_out;
    return true;
  }

 private:
  const CleanConfig& cfg_;
  std::unordered_set<std::string> seen_;
};

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

std::string strip_line(std::string line) {
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
  return line;
}

}  // namespace

Tokens tokenize(std::string_view line) {
  Tokens out;
  std::size_t i = 0;
  while (i < line.size()) {
    const auto b0 = static_cast<unsigned char>(line[i]);
    std::size_t len;
    char32_t cp;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      throw DataError("invalid UTF-8 lead byte at offset " + std::to_string(i));
    }
    if (i + len > line.size()) throw DataError("truncated UTF-8 sequence at offset " + std::to_string(i));
    for (std::size_t k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(line[i + k]);
      if ((b & 0xC0) != 0x80)
        throw DataError("invalid UTF-8 continuation byte at offset " + std::to_string(i + k));
      cp = (cp << 6) | (b & 0x3F);
    }
    const bool overlong = (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
                          (len == 4 && cp < 0x10000);
    if (overlong || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
      throw DataError("invalid Unicode scalar at offset " + std::to_string(i));
    if (!is_space(cp)) out.emplace_back(line.substr(i, len));
    i += len;
  }
  return out;
}

// ---- Vocab ----------------------------------------------------------------

Vocab::Vocab() {
  for (auto s : kSpecialTokens) {
    index_.emplace(std::string(s), static_cast<int>(tokens_.size()));
    tokens_.emplace_back(s);
  }
}

Vocab Vocab::build(const std::vector<Tokens>& lines, int min_count) {
  if (min_count < 1) throw UsageError("min_count must be >= 1");
  std::map<std::string, long> counts;
  for (const auto& line : lines)
    for (const auto& t : line) ++counts[t];
  std::vector<std::pair<std::string, long>> kept;
  for (auto& [tok, n] : counts) {
    const bool special = std::find(kSpecialTokens.begin(), kSpecialTokens.end(), tok) !=
                         kSpecialTokens.end();
    if (n >= min_count && !special) kept.emplace_back(tok, n);
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocab v;
  v.min_count_ = min_count;
  for (auto& [tok, n] : kept) {
    v.index_.emplace(tok, v.size());
    v.tokens_.push_back(tok);
  }
  return v;
}

Vocab Vocab::from_tokens(std::vector<std::string> tokens, int min_count) {
  if (tokens.size() < kNumSpecials) throw DataError("vocab: fewer than 4 entries");
  for (int i = 0; i < kNumSpecials; ++i)
    if (tokens[i] != kSpecialTokens[i])
      throw DataError("vocab: id " + std::to_string(i) + " must be " +
                      std::string(kSpecialTokens[i]));
  Vocab v;
  v.min_count_ = min_count;
  v.tokens_ = std::move(tokens);
  v.index_.clear();
  for (int i = 0; i < v.size(); ++i)
    if (!v.index_.emplace(v.tokens_[i], i).second)
      throw DataError("vocab: duplicate token '" + v.tokens_[i] + "'");
  return v;
}

bool Vocab::contains(std::string_view token) const {
  return index_.count(std::string(token)) > 0;
}

int Vocab::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

const std::string& Vocab::token(int id) const {
  if (id < 0 || id >= size())
    throw DataError("token id " + std::to_string(id) + " out of range for vocab of size " +
                    std::to_string(size()));
  return tokens_[id];
}

Ids Vocab::encode(const Tokens& line) const {
  Ids ids;
  ids.reserve(line.size());
  for (const auto& t : line) ids.push_back(id(t));
  return ids;
}

Tokens Vocab::decode(const Ids& ids) const {
  Tokens out;
  out.reserve(ids.size());
  for (int i : ids) out.push_back(token(i));
  return out;
}

std::uint64_t Vocab::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& t : tokens_) {
    h = fnv1a64(t, h);
    h = fnv1a64(std::string_view("\0", 1), h);
  }
  return h;
}

// ---- cleaning -------------------------------------------------------------

void CleanConfig::validate() const {
  if (min_len < 1) throw UsageError("clean.min_len must be >= 1");
  if (min_len > max_len) throw UsageError("clean.min_len must not exceed clean.max_len");
}

CleanReport& CleanReport::operator+=(const CleanReport& o) {
  lines_in += o.lines_in;
  dropped_stopword_only += o.dropped_stopword_only;
  dropped_length += o.dropped_length;
  dropped_duplicate += o.dropped_duplicate;
  lines_out += o.lines_out;
  return *this;
}

std::vector<Tokens> clean_lines(const std::vector<Tokens>& lines, const CleanConfig& cfg,
                                CleanReport* report) {
  LineFilter filter(cfg);
  CleanReport r;
  std::vector<Tokens> out;
  for (const auto& line : lines)
    if (filter.keep(line, r)) out.push_back(line);
  if (report) *report += r;
  return out;
}

std::vector<Song> clean_songs(const std::vector<Song>& songs, const CleanConfig& cfg,
                              CleanReport* report) {
  LineFilter filter(cfg);
  CleanReport r;
  std::vector<Song> out;
  out.reserve(songs.size());
  for (const auto& song : songs) {
    Song kept;
    for (const auto& line : song)
      if (filter.keep(line, r)) kept.push_back(line);
    out.push_back(std::move(kept));
  }
  if (report) *report += r;
  return out;
}

// ---- pairs ----------------------------------------------------------------

std::vector<TextPair> build_pairs(const Song& song, int theme, bool reverse_target) {
  std::vector<TextPair> pairs;
  for (std::size_t i = 0; i + 1 < song.size(); ++i) {
    TextPair p{song[i], song[i + 1], theme, reverse_target};
    if (reverse_target) std::reverse(p.trg.begin(), p.trg.end());
    pairs.push_back(std::move(p));
  }
  return pairs;
}

SentencePair encode_pair(const TextPair& pair, const Vocab& vocab) {
  return {vocab.encode(pair.src), vocab.encode(pair.trg), pair.theme, pair.trg_reversed};
}

TextPair decode_pair(const SentencePair& pair, const Vocab& vocab) {
  return {vocab.decode(pair.src), vocab.decode(pair.trg), pair.theme, pair.trg_reversed};
}

// ---- files ----------------------------------------------------------------

std::vector<Song> read_songs(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path))
      if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
  } else if (fs::is_regular_file(path)) {
    files.push_back(path);
  } else {
    throw DataError("no such file or directory: " + path.string());
  }
  std::vector<Song> songs;
  for (const auto& file : files) {
    auto in = open_in(file);
    Song current;
    std::string raw;
    while (std::getline(in, raw)) {
      Tokens line = tokenize(strip_line(raw));
      if (line.empty()) {
        if (!current.empty()) songs.push_back(std::move(current));
        current.clear();
      } else {
        current.push_back(std::move(line));
      }
    }
    if (!current.empty()) songs.push_back(std::move(current));
  }
  return songs;
}

std::set<std::string> read_stopwords(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::set<std::string> words;
  std::string raw;
  while (std::getline(in, raw)) {
    for (auto& t : tokenize(strip_line(raw))) words.insert(std::move(t));
  }
  return words;
}

void write_pairs_jsonl(const std::filesystem::path& path, const std::vector<TextPair>& pairs) {
  auto out = open_out(path);
  for (const auto& p : pairs) {
    nlohmann::ordered_json j;
    j["src"] = p.src;
    j["trg"] = p.trg;
    j["theme"] = p.theme;
    j["trg_reversed"] = p.trg_reversed;
    out << j.dump() << '\n';
  }
  if (!out) throw DataError("write failed: " + path.string());
}

std::vector<TextPair> read_pairs_jsonl(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<TextPair> pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (strip_line(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      TextPair p;
      p.src = j.at("src").get<Tokens>();
      p.trg = j.at("trg").get<Tokens>();
      p.theme = j.at("theme").get<int>();
      p.trg_reversed = j.at("trg_reversed").get<bool>();
      if (p.theme < 0) throw DataError("negative theme");
      pairs.push_back(std::move(p));
    } catch (const std::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return pairs;
}

void write_vocab_json(const std::filesystem::path& path, const Vocab& vocab) {
  auto out = open_out(path);
  out << nlohmann::json(vocab.tokens()).dump() << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

Vocab read_vocab_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Vocab::from_tokens(nlohmann::json::parse(ss.str()).get<std::vector<std::string>>());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string join(const Tokens& tokens, std::string_view sep) {
  std::string s;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) s += sep;
    s += tokens[i];
  }
  return s;
}

}  // namespace lyricgen::corpus
