// Copyright 2026 The lyricgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdint>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lyricgen.h"

using nlohmann::json;

namespace {

struct Owned {
  char* s = nullptr;
  ~Owned() { lg_free_string(s); }
  std::string str() const { return s ? s : ""; }
};

int fail(lg_status st) {
  std::cerr << "error: " << lg_last_error() << "\n";
  return static_cast<int>(st);
}

int usage(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return LG_ERR_USAGE;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Config file values first, then any flag the user actually passed.
struct Overrides {
  std::string config_file;
  std::optional<std::uint64_t> seed;
  json patch = json::object();

  template <class T>
  void set(const std::string& section, const std::string& key, const std::optional<T>& v) {
    if (v) patch[section][key] = *v;
  }
};

json build_config(const Overrides& o) {
  json cfg = json::object();
  if (!o.config_file.empty()) {
    cfg = json::parse(read_file(o.config_file));
    if (!cfg.is_object()) throw std::runtime_error("config file must hold a JSON object");
  }
  cfg.merge_patch(o.patch);
  if (o.seed) cfg["seed"] = *o.seed;
  return cfg;
}

void print_report(const Owned& report) { std::cout << json::parse(report.str()).dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Theme-aware lyrics generation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lg_version()));

  Overrides ov;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", ov.config_file, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", ov.seed, "Global seed");
  };

  std::optional<std::string> raw, stopwords, pairs, vocab, lda_path, embeddings, checkpoint;
  auto path_opt = [](CLI::App* sub, const char* name, std::optional<std::string>& dst, const char* help) {
    sub->add_option(name, dst, help);
  };

  // prepare
  auto* prepare = app.add_subcommand("prepare", "Clean songs, assign themes, write pairs and vocab");
  common(prepare);
  std::optional<int> theme, min_count;
  bool no_reverse_target = false, reverse_src = false;
  path_opt(prepare, "--raw", raw, "Song file or directory");
  path_opt(prepare, "--stopwords", stopwords, "Stopword file");
  path_opt(prepare, "--pairs", pairs, "Output pairs JSONL");
  path_opt(prepare, "--vocab", vocab, "Output vocab JSON");
  path_opt(prepare, "--lda", lda_path, "LDA model for theme inference");
  prepare->add_option("--theme", theme, "Assign this theme to every song instead of inferring it");
  prepare->add_option("--min-count", min_count, "Vocabulary frequency threshold");
  prepare->add_flag("--no-reverse-target", no_reverse_target, "Keep targets in reading order");
  prepare->add_flag("--reverse-src", reverse_src, "Reverse source lines (experimental)");

  // lda-train
  auto* lda_train = app.add_subcommand("lda-train", "Fit the LDA theme model");
  common(lda_train);
  std::optional<int> k, iterations, burn_in;
  path_opt(lda_train, "--raw", raw, "Song file or directory");
  path_opt(lda_train, "--stopwords", stopwords, "Stopword file");
  path_opt(lda_train, "--lda", lda_path, "Output model");
  lda_train->add_option("--topics", k, "Number of topics");
  lda_train->add_option("--iterations", iterations, "Gibbs sweeps");
  lda_train->add_option("--burn-in", burn_in, "Burn-in sweeps");

  // lda-keywords
  auto* lda_keywords = app.add_subcommand("lda-keywords", "Print the top phrases of every topic");
  common(lda_keywords);
  int n_keywords = 1;
  path_opt(lda_keywords, "--lda", lda_path, "LDA model");
  lda_keywords->add_option("-n,--top", n_keywords, "Phrases per topic");

  // lda-infer
  auto* lda_infer = app.add_subcommand("lda-infer", "Infer the theme distribution of one song");
  common(lda_infer);
  std::string song_file;
  int sweeps = 50;
  path_opt(lda_infer, "--lda", lda_path, "LDA model");
  lda_infer->add_option("song", song_file, "Song text file, one line per lyric line ('-' for stdin)")->required();
  lda_infer->add_option("--sweeps", sweeps, "Gibbs sweeps");

  // embed-train
  auto* embed_train = app.add_subcommand("embed-train", "Pretrain character embeddings");
  common(embed_train);
  std::optional<int> dim, embed_epochs;
  path_opt(embed_train, "--pairs", pairs, "Pairs JSONL");
  path_opt(embed_train, "--vocab", vocab, "Vocab JSON");
  path_opt(embed_train, "--embeddings", embeddings, "Output embeddings");
  embed_train->add_option("--dim", dim, "Embedding width");
  embed_train->add_option("--epochs", embed_epochs, "Passes over the corpus");

  // train
  auto* train = app.add_subcommand("train", "Train the generator");
  common(train);
  std::optional<int> epochs, batch_size;
  std::optional<std::vector<std::string>> theme_keywords;
  bool no_pretrain = false;
  path_opt(train, "--pairs", pairs, "Pairs JSONL");
  path_opt(train, "--vocab", vocab, "Vocab JSON");
  path_opt(train, "--lda", lda_path, "LDA model supplying theme keywords");
  path_opt(train, "--embeddings", embeddings, "Pretrained embeddings");
  path_opt(train, "--checkpoint", checkpoint, "Output checkpoint");
  train->add_option("--epochs", epochs, "Training epochs");
  train->add_option("--batch-size", batch_size, "Mini-batch size");
  train->add_option("--theme-keywords", theme_keywords, "Per-theme keywords when no LDA model is used")
      ->delimiter(',');
  train->add_flag("--no-pretrain", no_pretrain, "Start from random embeddings");

  // generate
  auto* gen = app.add_subcommand("generate", "Generate themed lyrics line by line");
  common(gen);
  std::optional<int> gen_theme, n_lines, beam, max_len;
  std::optional<std::string> seed_line, keywords, trace;
  std::optional<bool> undo_reversal;
  path_opt(gen, "--checkpoint", checkpoint, "Model checkpoint");
  path_opt(gen, "--lda", lda_path, "LDA model for theme keywords");
  gen->add_option("--theme", gen_theme, "Theme id");
  gen->add_option("--seed-line", seed_line, "First source line");
  gen->add_option("--lines", n_lines, "Number of lines to generate");
  gen->add_option("--beam", beam, "Beam width (1 is greedy)");
  gen->add_option("--max-len", max_len, "Maximum characters per line");
  gen->add_option("--keywords", keywords, "Two theme characters overriding the LDA lookup");
  gen->add_option("--trace", trace, "Write per-step attention weights as JSON Lines");
  gen->add_flag("--undo-reversal,!--keep-reversal", undo_reversal,
                "Un-reverse emitted lines (default follows training)");

  // gradcheck
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient verification");
  common(gradcheck);
  std::optional<std::string> inject_fault;
  gradcheck->add_option("--inject-fault", inject_fault, "Corrupt the analytic gradient of this group");

  // bench
  auto* bench = app.add_subcommand("bench", "Time additive against dot-product attention");
  common(bench);
  std::optional<int> reps;
  bench->add_option("--reps", reps, "Repetitions per grid point");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : LG_ERR_USAGE;
  }

  ov.set("paths", "raw", raw);
  ov.set("paths", "stopwords", stopwords);
  ov.set("paths", "pairs", pairs);
  ov.set("paths", "vocab", vocab);
  ov.set("paths", "lda", lda_path);
  ov.set("paths", "embeddings", embeddings);
  ov.set("paths", "checkpoint", checkpoint);
  ov.set("paths", "trace", trace);
  ov.set("prepare", "theme", theme);
  ov.set("prepare", "min_count", min_count);
  if (no_reverse_target) ov.patch["prepare"]["reverse_target"] = false;
  if (reverse_src) ov.patch["prepare"]["reverse_src"] = true;
  ov.set("lda", "k", k);
  ov.set("lda", "iterations", iterations);
  ov.set("lda", "burn_in", burn_in);
  ov.set("embed", "dim", dim);
  ov.set("embed", "epochs", embed_epochs);
  ov.set("train", "epochs", epochs);
  ov.set("train", "batch_size", batch_size);
  if (theme_keywords) ov.patch["theme_keywords"] = *theme_keywords;
  if (no_pretrain) ov.patch["no_pretrain"] = true;
  ov.set("generate", "theme_id", gen_theme);
  ov.set("generate", "seed_line", seed_line);
  ov.set("generate", "n_lines", n_lines);
  ov.set("generate", "beam_width", beam);
  ov.set("generate", "max_len", max_len);
  ov.set("generate", "keywords", keywords);
  ov.set("generate", "undo_reversal", undo_reversal);
  ov.set("gradcheck", "inject_fault", inject_fault);
  ov.set("bench", "repetitions", reps);

  std::string cfg_text;
  try {
    cfg_text = build_config(ov).dump();
  } catch (const std::exception& e) {
    return usage(e.what());
  }

  Owned out;
  lg_status st = LG_OK;
  if (*prepare) {
    st = lg_prepare(cfg_text.c_str(), &out.s);
  } else if (*lda_train) {
    st = lg_lda_train(cfg_text.c_str(), &out.s);
  } else if (*embed_train) {
    st = lg_embed_train(cfg_text.c_str(), &out.s);
  } else if (*train) {
    st = lg_train(cfg_text.c_str(), &out.s);
  } else if (*gradcheck) {
    st = lg_gradcheck(cfg_text.c_str(), &out.s);
    if (out.s) print_report(out);
    return st == LG_OK ? 0 : fail(st);
  } else if (*bench) {
    st = lg_bench(cfg_text.c_str(), &out.s);
  } else if (*lda_keywords || *lda_infer) {
    Owned resolved;
    if ((st = lg_resolve_config(cfg_text.c_str(), &resolved.s)) != LG_OK) return fail(st);
    const auto path = json::parse(resolved.str())["paths"]["lda"].get<std::string>();
    lg_lda* model = nullptr;
    if ((st = lg_lda_load(path.c_str(), &model)) != LG_OK) return fail(st);
    if (*lda_keywords) {
      st = lg_lda_keywords(model, n_keywords, &out.s);
    } else {
      std::string text;
      try {
        if (song_file == "-") {
          std::ostringstream buf;
          buf << std::cin.rdbuf();
          text = buf.str();
        } else {
          text = read_file(song_file);
        }
      } catch (const std::exception& e) {
        lg_lda_free(model);
        std::cerr << "error: " << e.what() << "\n";
        return LG_ERR_DATA;
      }
      const auto seed = json::parse(resolved.str())["seed"].get<std::uint64_t>();
      st = lg_lda_infer(model, text.c_str(), sweeps, seed, &out.s);
    }
    lg_lda_free(model);
  } else if (*gen) {
    st = lg_generate(cfg_text.c_str(), &out.s);
    if (st != LG_OK) return fail(st);
    const json result = json::parse(out.str());
    for (const auto& line : result.at("lines")) std::cout << line.get<std::string>() << "\n";
    return 0;
  }
  if (st != LG_OK) return fail(st);
  print_report(out);
  return 0;
}
