// Copyright 2026 The lyricgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "lyricgen/corpus.hpp"
#include "lyricgen/error.hpp"
#include "lyricgen/rng.hpp"

using namespace lyricgen;
using namespace lyricgen::corpus;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "lyricgen_corpus_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  out << body;
}

}  // namespace

TEST_SUITE("corpus") {

TEST_CASE("tokenize splits characters and drops whitespace") {
  CHECK(tokenize("我 爱\t你") == Tokens{"我", "爱", "你"});
  CHECK(tokenize("a\xE3\x80\x80" "b") == Tokens{"a", "b"});  // ideographic space
  CHECK(tokenize("").empty());
  CHECK(tokenize("\xF0\x9F\x8E\xB5x") == Tokens{"\xF0\x9F\x8E\xB5", "x"});
}

TEST_CASE("tokenize examples") {
  CHECK(tokenize("想回到过去") == Tokens{"想", "回", "到", "过", "去"});
  CHECK(tokenize("a b") == Tokens{"a", "b"});
}

TEST_CASE("tokenize rejects malformed UTF-8") {
  CHECK_THROWS_AS(tokenize("\xFF"), DataError);
  CHECK_THROWS_AS(tokenize("\xE6\x88"), DataError);
  CHECK_THROWS_AS(tokenize("\xC0\xAF"), DataError);       // overlong
  CHECK_THROWS_AS(tokenize("\xED\xA0\x80"), DataError);   // surrogate
}

TEST_CASE("vocab puts specials first and orders by frequency then bytes") {
  const std::vector<Tokens> lines{{"b", "a", "c"}, {"a", "c"}, {"d"}};
  const auto v = Vocab::build(lines, 1);
  CHECK(v.tokens() == std::vector<std::string>{"<pad>", "<s>", "</s>", "<unk>", "a", "c", "b", "d"});
  CHECK(v.id("<pad>") == kPad);
  CHECK(v.id("</s>") == kEos);
  CHECK(v.id("zz") == kUnk);
  CHECK(v.encode({"a", "q"}) == Ids{4, kUnk});
  CHECK(v.decode({5, 6}) == Tokens{"c", "b"});
  CHECK_THROWS_AS(v.token(99), DataError);
}

TEST_CASE("min_count removes rare tokens") {
  const std::vector<Tokens> lines{{"x", "x", "y"}, {"x", "y", "z"}};
  const auto v = Vocab::build(lines, 2);
  CHECK(v.size() == 6);
  CHECK(v.contains("x"));
  CHECK(v.contains("y"));
  CHECK(v.id("z") == kUnk);
  CHECK_THROWS_AS(Vocab::build(lines, 0), UsageError);
}

TEST_CASE("min_count boundary is inclusive") {
  std::vector<Tokens> lines;
  for (int i = 0; i < 5; ++i) lines.push_back({"五"});
  for (int i = 0; i < 4; ++i) lines.push_back({"四"});
  const auto v = Vocab::build(lines, 5);
  CHECK(v.id("五") == 4);
  CHECK(v.id("四") == kUnk);
  CHECK(Vocab::build({}, 5).size() == 4);
  CHECK(v.decode(v.encode({"五", "四"})) == Tokens{"五", "<unk>"});
  CHECK_THROWS_AS(v.token(v.size()), DataError);
}

TEST_CASE("vocab ids are independent of line order") {
  std::vector<Tokens> lines{{"春", "风"}, {"风", "雨"}, {"月", "春", "风"}, {"雨"}};
  const auto ref = Vocab::build(lines, 1);
  Rng rng(5);
  for (int i = 0; i < 10; ++i) {
    rng.shuffle(std::span<Tokens>(lines));
    CHECK(Vocab::build(lines, 1) == ref);
  }
}

TEST_CASE("from_tokens validates the special prefix and duplicates") {
  CHECK_THROWS_AS(Vocab::from_tokens({"<s>", "<pad>", "</s>", "<unk>"}), DataError);
  CHECK_THROWS_AS(Vocab::from_tokens({"<pad>", "<s>", "</s>", "<unk>", "a", "a"}), DataError);
  CHECK(Vocab::from_tokens({"<pad>", "<s>", "</s>", "<unk>", "a"}).id("a") == 4);
}

TEST_CASE("cleaning applies each rule and counts it") {
  CleanConfig cfg;
  cfg.stopwords = {"啦", "的"};
  const std::vector<Tokens> lines{tokenize("啦啦啦啦"),  tokenize("的的"),         tokenize("你好"),
                                  tokenize("今天天气很好"), tokenize("今天天气很好"),
                                  tokenize("一二三四五六七八九十一二三四五六七八九"),
                                  tokenize("一二三")};
  CleanReport rep;
  const auto out = clean_lines(lines, cfg, &rep);
  CHECK(out == std::vector<Tokens>{tokenize("今天天气很好"), tokenize("一二三")});
  CHECK(rep.lines_in == 7);
  // The stopword rule runs first, so the short stopword line counts there.
  CHECK(rep.dropped_stopword_only == 2);
  CHECK(rep.dropped_length == 2);
  CHECK(rep.dropped_duplicate == 1);
  CHECK(rep.lines_out == 2);
}

TEST_CASE("length bounds are inclusive") {
  CleanConfig cfg;
  const auto three = tokenize("一二三");
  const auto eighteen = tokenize("一二三四五六七八九十一二三四五六七八");
  CHECK(clean_lines({three, eighteen}, cfg).size() == 2);
  cfg.min_len = 5;
  cfg.max_len = 4;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
}

TEST_CASE("duplicates are detected across songs") {
  CleanConfig cfg;
  const std::vector<Song> songs{{tokenize("春风又绿江南"), tokenize("明月照我还")},
                                {tokenize("明月照我还"), tokenize("夜深人静时")}};
  CleanReport rep;
  const auto out = clean_songs(songs, cfg, &rep);
  REQUIRE(out.size() == 2);
  CHECK(out[1] == Song{tokenize("夜深人静时")});
  CHECK(rep.dropped_duplicate == 1);
}

TEST_CASE("cleaning is idempotent") {
  CleanConfig cfg;
  cfg.stopwords = {"啦"};
  Rng rng(8);
  const Tokens pool{"啦", "风", "雨", "花"};
  std::vector<Tokens> lines;
  for (int i = 0; i < 200; ++i) {
    Tokens t(1 + rng.below(22));
    for (auto& x : t) x = pool[rng.below(pool.size())];
    lines.push_back(t);
  }
  const auto once = clean_lines(lines, cfg);
  CHECK(clean_lines(once, cfg) == once);
  for (const auto& l : once) {
    CHECK(l.size() >= 3);
    CHECK(l.size() <= 18);
  }
}

TEST_CASE("pairs chain adjacent lines and reverse targets on request") {
  const Song song{tokenize("山那边有一条河"), tokenize("河水流向远方的海"), tokenize("海上有风吹过来")};
  const auto plain = build_pairs(song, 2, false);
  REQUIRE(plain.size() == 2);
  CHECK(plain[0].src == song[0]);
  CHECK(plain[0].trg == song[1]);
  CHECK(plain[1].src == song[1]);
  CHECK(plain[1].trg == song[2]);
  CHECK(plain[1].theme == 2);
  CHECK_FALSE(plain[0].trg_reversed);

  const auto rev = build_pairs(song, 2, true);
  for (std::size_t i = 0; i < rev.size(); ++i) {
    CHECK(rev[i].trg_reversed);
    CHECK(rev[i].src == plain[i].src);
    auto back = rev[i].trg;
    std::reverse(back.begin(), back.end());
    CHECK(back == plain[i].trg);
    CHECK(rev[i].trg.front() == plain[i].trg.back());
  }
  CHECK(build_pairs({song[0]}, 0, true).empty());
  CHECK(build_pairs({}, 0, true).empty());
}

TEST_CASE("lyric song examples") {
  const Song song{tokenize("哪里有彩虹告诉我"), tokenize("能不能把我的愿望还给我"), tokenize("为什么天这么安静")};
  const auto pairs = build_pairs(song, 0, false);
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].src == tokenize("哪里有彩虹告诉我"));
  CHECK(pairs[0].trg == tokenize("能不能把我的愿望还给我"));
  CHECK(pairs[1].src == tokenize("能不能把我的愿望还给我"));
  CHECK(pairs[1].trg == tokenize("为什么天这么安静"));

  const auto rev = build_pairs({tokenize("想回到过去"), tokenize("让爱情继续")}, 2, true);
  REQUIRE(rev.size() == 1);
  CHECK(rev[0].trg == Tokens{"续", "继", "情", "爱", "让"});

  CleanConfig cfg;
  cfg.stopwords = {"啦"};
  CHECK(clean_lines({tokenize("啦啦啦啦")}, cfg).empty());
  CHECK(clean_lines({tokenize("一二")}, cfg).empty());
  CHECK(clean_lines({tokenize("一二三四五")}, cfg) == std::vector<Tokens>{tokenize("一二三四五")});
}

TEST_CASE("encode and decode pairs round-trip") {
  const Song song{tokenize("一二三四"), tokenize("五六七八"), tokenize("九十一二")};
  const auto vocab = Vocab::build(song, 1);
  for (const auto& p : build_pairs(song, 1, true)) CHECK(decode_pair(encode_pair(p, vocab), vocab) == p);
}

TEST_CASE("songs are split on blank lines across sorted files") {
  const auto dir = scratch("songs");
  write(dir / "b.txt", "第三首歌\n");
  write(dir / "a.txt", "\xEF\xBB\xBF第一首歌\r\n第一首歌的第二行\r\n\r\n\r\n第二首歌\n");
  const auto songs = read_songs(dir);
  REQUIRE(songs.size() == 3);
  CHECK(songs[0] == Song{tokenize("第一首歌"), tokenize("第一首歌的第二行")});
  CHECK(songs[1] == Song{tokenize("第二首歌")});
  CHECK(songs[2] == Song{tokenize("第三首歌")});
  CHECK_THROWS_AS(read_songs(dir / "missing"), DataError);
}

TEST_CASE("pairs and vocab files round-trip") {
  const auto dir = scratch("files");
  const Song song{tokenize("一二三四"), tokenize("五六七八"), tokenize("九十一二")};
  const auto pairs = build_pairs(song, 3, true);
  write_pairs_jsonl(dir / "pairs.jsonl", pairs);
  CHECK(read_pairs_jsonl(dir / "pairs.jsonl") == pairs);
  const auto vocab = Vocab::build(song, 1);
  write_vocab_json(dir / "vocab.json", vocab);
  CHECK(read_vocab_json(dir / "vocab.json") == vocab);

  write(dir / "bad.jsonl", "{\"src\":[\"a\"],\"trg\":[\"b\"],\"theme\":0,\"trg_reversed\":false}\n{oops\n");
  CHECK_THROWS_AS(read_pairs_jsonl(dir / "bad.jsonl"), DataError);
}

TEST_CASE("stopword file ignores blank lines") {
  const auto dir = scratch("stop");
  write(dir / "stop.txt", "啦\n\n的\r\n");
  CHECK(read_stopwords(dir / "stop.txt") == std::set<std::string>{"啦", "的"});
}

}  // TEST_SUITE
