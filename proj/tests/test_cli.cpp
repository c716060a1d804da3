// Copyright 2026 The lyricgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs the CLI with the given arguments; stderr goes to err_file when set.
Run cli(const std::string& args, const fs::path& err_file = "/dev/null") {
  const std::string cmd = std::string("\"") + LYRICGEN_CLI + "\" " + args + " 2>\"" + err_file.string() + "\"";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

fs::path scratch() {
  auto dir = fs::temp_directory_path() / "lyricgen_cli_tests";
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("bad usage exits with 1") {
  CHECK(cli("").code == 1);
  CHECK(cli("frobnicate").code == 1);
  CHECK(cli("prepare --no-such-flag").code == 1);
  CHECK(cli("generate --lines notanumber").code == 1);
  CHECK(cli("--version").code == 0);
}

TEST_CASE("data problems exit with 2 and explain themselves") {
  const auto dir = scratch();
  const auto err = dir / "err.txt";
  CHECK(cli("prepare --theme 0 --raw \"" + (dir / "missing").string() + "\"", err).code == 2);
  CHECK(slurp(err).rfind("error: ", 0) == 0);

  std::ofstream(dir / "la.txt") << "啦啦啦啦\n啦啦啦\n";
  std::ofstream(dir / "stop.txt") << "啦\n";
  const auto r = cli("prepare --theme 0 --raw \"" + (dir / "la.txt").string() + "\" --stopwords \"" +
                         (dir / "stop.txt").string() + "\" --pairs \"" + (dir / "p.jsonl").string() +
                         "\" --vocab \"" + (dir / "v.json").string() + "\"",
                     err);
  CHECK(r.code == 2);
  CHECK(slurp(err).find("dropped_stopword_only=2") != std::string::npos);
}

TEST_CASE("a failing gradient check exits with 3") {
  const auto r = cli("gradcheck --inject-fault model.additive.attn.v");
  CHECK(cli("gradcheck --inject-fault attn.v").code == 1);
  CHECK(r.code == 3);
  CHECK_FALSE(json::parse(r.out)["passed"].get<bool>());
}

TEST_CASE("prepare, train and generate run end to end") {
  const auto dir = scratch();
  std::ofstream(dir / "songs.txt") << "春天的花开满山坡\n花开的时候你在哪里\n山坡上的风吹过来\n\n"
                                      "冬天的雪落在窗前\n窗前的灯照着我们\n雪落下来没有声音\n";
  const json cfg = {{"paths",
                     {{"raw", (dir / "songs.txt").string()},
                      {"pairs", (dir / "pairs.jsonl").string()},
                      {"vocab", (dir / "vocab.json").string()},
                      {"checkpoint", (dir / "ckpt.json").string()}}},
                    {"prepare", {{"min_count", 1}}},
                    {"model", {{"embed_dim", 6}, {"hidden_dim", 6}, {"attention_dim", 6}}}};
  std::ofstream(dir / "cfg.json") << cfg.dump();
  const std::string conf = "--config \"" + (dir / "cfg.json").string() + "\"";

  auto r = cli("prepare " + conf + " --theme 0");
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["pairs_out"] == 4);

  r = cli("train " + conf + " --epochs 2 --theme-keywords 春天,冬天");
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["loss_history"].size() == 2);

  const auto trace = dir / "trace.jsonl";
  r = cli("generate " + conf + " --seed-line 春天的花开 --lines 3 --trace \"" + trace.string() + "\"");
  REQUIRE(r.code == 0);
  const auto lines = lines_of(r.out);
  CHECK(lines.size() == 3);
  for (const auto& l : lines) CHECK_FALSE(l.empty());
  CHECK(cli("generate " + conf + " --seed-line 春天的花开 --lines 3").out == r.out);
  CHECK_FALSE(lines_of(slurp(trace)).empty());

  CHECK(cli("generate " + conf + " --seed-line 春天 --lines 1").code == 1);
  CHECK(cli("generate " + conf + " --seed-line 春天的花开 --keep-reversal").code == 1);
  CHECK(cli("generate " + conf + " --seed-line 春天的花开 --theme 5").code == 1);
}

}  // TEST_SUITE
