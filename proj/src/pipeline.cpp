// Copyright 2026 The lyricgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "lyricgen/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <unordered_set>

#include "lyricgen/error.hpp"
#include "lyricgen/rng.hpp"

namespace lyricgen::pipeline {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw UsageError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      throw UsageError((where.empty() ? "" : where + ": ") + "unknown key '" + it.key() + "'");
}

template <class T>
bool read_if(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return false;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw UsageError(where + "." + key + ": " + e.what());
  }
  return true;
}

corpus::CleanConfig effective_clean(const RunConfig& cfg) {
  corpus::CleanConfig c = cfg.clean;
  if (!cfg.paths.stopwords.empty()) {
    auto words = corpus::read_stopwords(cfg.paths.stopwords);
    c.stopwords.insert(words.begin(), words.end());
  }
  c.validate();
  return c;
}

std::vector<corpus::Song> read_cleaned(const RunConfig& cfg, const corpus::CleanConfig& clean,
                                       std::size_t* songs_in, corpus::CleanReport* report) {
  if (cfg.paths.raw.empty()) throw UsageError("paths.raw is required");
  auto songs = corpus::read_songs(cfg.paths.raw);
  if (songs.empty()) throw DataError("no songs found in " + cfg.paths.raw);
  if (songs_in) *songs_in = songs.size();
  return corpus::clean_songs(songs, clean, report);
}

std::string drop_summary(const corpus::CleanReport& r) {
  return "lines_in=" + std::to_string(r.lines_in) +
         " dropped_stopword_only=" + std::to_string(r.dropped_stopword_only) +
         " dropped_length=" + std::to_string(r.dropped_length) +
         " dropped_duplicate=" + std::to_string(r.dropped_duplicate) +
         " lines_out=" + std::to_string(r.lines_out);
}

}  // namespace

// ---- configuration --------------------------------------------------------

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  if (j.is_null()) return run_config_from_json(json::object());
  reject_unknown(j, {"seed", "paths", "clean", "lda", "embed", "model", "train", "theme_keywords",
                     "no_pretrain", "prepare", "generate", "gradcheck", "bench"},
                 "");
  read_if(j, "seed", c.seed, "config");
  read_if(j, "theme_keywords", c.theme_keywords, "config");
  read_if(j, "no_pretrain", c.no_pretrain, "config");

  if (j.contains("paths")) {
    const auto& p = j.at("paths");
    reject_unknown(p, {"raw", "stopwords", "pairs", "vocab", "lda", "embeddings", "checkpoint", "trace"}, "paths");
    read_if(p, "raw", c.paths.raw, "paths");
    read_if(p, "stopwords", c.paths.stopwords, "paths");
    read_if(p, "pairs", c.paths.pairs, "paths");
    read_if(p, "vocab", c.paths.vocab, "paths");
    read_if(p, "lda", c.paths.lda, "paths");
    read_if(p, "embeddings", c.paths.embeddings, "paths");
    read_if(p, "checkpoint", c.paths.checkpoint, "paths");
    read_if(p, "trace", c.paths.trace, "paths");
  }
  if (j.contains("clean")) {
    const auto& p = j.at("clean");
    reject_unknown(p, {"min_len", "max_len", "drop_stopword_only", "dedupe", "stopwords"}, "clean");
    read_if(p, "min_len", c.clean.min_len, "clean");
    read_if(p, "max_len", c.clean.max_len, "clean");
    read_if(p, "drop_stopword_only", c.clean.drop_stopword_only, "clean");
    read_if(p, "dedupe", c.clean.dedupe, "clean");
    read_if(p, "stopwords", c.clean.stopwords, "clean");
  }
  c.clean.validate();

  bool lda_seed = false, alpha_given = false;
  if (j.contains("lda")) {
    const auto& p = j.at("lda");
    reject_unknown(p, {"k", "alpha", "beta", "iterations", "burn_in", "seed", "keywords"}, "lda");
    read_if(p, "k", c.lda.k, "lda");
    alpha_given = read_if(p, "alpha", c.lda.alpha, "lda");
    read_if(p, "beta", c.lda.beta, "lda");
    read_if(p, "iterations", c.lda.iterations, "lda");
    read_if(p, "burn_in", c.lda.burn_in, "lda");
    lda_seed = read_if(p, "seed", c.lda.seed, "lda");
    read_if(p, "keywords", c.lda_keywords, "lda");
  }
  if (c.lda.k < 1) throw UsageError("lda.k must be >= 1");
  if (!alpha_given) c.lda.alpha = 50.0 / c.lda.k;
  if (!lda_seed) c.lda.seed = derive_seed(c.seed, "lda");
  c.lda.validate();

  bool embed_seed = false;
  if (j.contains("embed")) {
    const auto& p = j.at("embed");
    reject_unknown(p, {"dim", "window", "negatives", "epochs", "learning_rate", "seed"}, "embed");
    read_if(p, "dim", c.embed.dim, "embed");
    read_if(p, "window", c.embed.window, "embed");
    read_if(p, "negatives", c.embed.negatives, "embed");
    read_if(p, "epochs", c.embed.epochs, "embed");
    read_if(p, "learning_rate", c.embed.learning_rate, "embed");
    embed_seed = read_if(p, "seed", c.embed.seed, "embed");
  }
  if (!embed_seed) c.embed.seed = derive_seed(c.seed, "embed");
  c.embed.validate();

  if (j.contains("model")) c.model = model::model_config_from_json(j.at("model"), c.model);
  if (j.contains("train")) c.train = model::train_config_from_json(j.at("train"), c.train);
  if (!(j.contains("train") && j.at("train").contains("seed"))) c.train.seed = derive_seed(c.seed, "train");
  c.train.validate();

  if (j.contains("prepare")) {
    const auto& p = j.at("prepare");
    reject_unknown(p, {"theme", "reverse_target", "reverse_src", "min_count", "infer_sweeps"}, "prepare");
    int theme = 0;
    if (read_if(p, "theme", theme, "prepare")) c.prepare.theme = theme;
    read_if(p, "reverse_target", c.prepare.reverse_target, "prepare");
    read_if(p, "reverse_src", c.prepare.reverse_src, "prepare");
    read_if(p, "min_count", c.prepare.min_count, "prepare");
    read_if(p, "infer_sweeps", c.prepare.infer_sweeps, "prepare");
  }
  if (c.prepare.min_count < 1) throw UsageError("prepare.min_count must be >= 1");
  if (c.prepare.infer_sweeps < 1) throw UsageError("prepare.infer_sweeps must be >= 1");
  if (c.prepare.theme && (*c.prepare.theme < 0 || *c.prepare.theme >= c.lda.k))
    throw UsageError("prepare.theme must lie in [0, lda.k)");

  if (j.contains("generate")) {
    const auto& p = j.at("generate");
    reject_unknown(p, {"theme_id", "seed_line", "n_lines", "beam_width", "max_len", "undo_reversal", "keywords"},
                   "generate");
    read_if(p, "theme_id", c.generate.theme_id, "generate");
    read_if(p, "seed_line", c.generate.seed_line, "generate");
    read_if(p, "n_lines", c.generate.n_lines, "generate");
    read_if(p, "beam_width", c.generate.beam_width, "generate");
    read_if(p, "max_len", c.generate.max_len, "generate");
    bool undo = false;
    if (read_if(p, "undo_reversal", undo, "generate")) c.generate.undo_reversal = undo;
    read_if(p, "keywords", c.generate.keywords, "generate");
  }
  c.generate.reverse_src = c.prepare.reverse_src;

  bool gc_seed = false;
  if (j.contains("gradcheck")) {
    const auto& p = j.at("gradcheck");
    reject_unknown(p, {"seed", "step", "tolerance", "inject_fault"}, "gradcheck");
    gc_seed = read_if(p, "seed", c.gradcheck.seed, "gradcheck");
    read_if(p, "step", c.gradcheck.step, "gradcheck");
    read_if(p, "tolerance", c.gradcheck.tolerance, "gradcheck");
    read_if(p, "inject_fault", c.gradcheck.inject_fault, "gradcheck");
  }
  if (!gc_seed) c.gradcheck.seed = derive_seed(c.seed, "gradcheck");
  if (!(c.gradcheck.step > 0)) throw UsageError("gradcheck.step must be > 0");

  bool bench_seed = false;
  if (j.contains("bench")) {
    const auto& p = j.at("bench");
    reject_unknown(p, {"src_lens", "hidden_dims", "repetitions", "seed"}, "bench");
    read_if(p, "src_lens", c.bench.src_lens, "bench");
    read_if(p, "hidden_dims", c.bench.hidden_dims, "bench");
    read_if(p, "repetitions", c.bench.repetitions, "bench");
    bench_seed = read_if(p, "seed", c.bench.seed, "bench");
  }
  if (!bench_seed) c.bench.seed = derive_seed(c.seed, "bench");
  return c;
}

json to_json(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["paths"] = {{"raw", c.paths.raw},         {"stopwords", c.paths.stopwords},
                {"pairs", c.paths.pairs},     {"vocab", c.paths.vocab},
                {"lda", c.paths.lda},         {"embeddings", c.paths.embeddings},
                {"checkpoint", c.paths.checkpoint}, {"trace", c.paths.trace}};
  j["clean"] = {{"min_len", c.clean.min_len},
                {"max_len", c.clean.max_len},
                {"drop_stopword_only", c.clean.drop_stopword_only},
                {"dedupe", c.clean.dedupe},
                {"stopwords", c.clean.stopwords}};
  j["lda"] = {{"k", c.lda.k},           {"alpha", c.lda.alpha},         {"beta", c.lda.beta},
              {"iterations", c.lda.iterations}, {"burn_in", c.lda.burn_in}, {"seed", c.lda.seed},
              {"keywords", c.lda_keywords}};
  j["embed"] = {{"dim", c.embed.dim},       {"window", c.embed.window},
                {"negatives", c.embed.negatives}, {"epochs", c.embed.epochs},
                {"learning_rate", c.embed.learning_rate}, {"seed", c.embed.seed}};
  j["model"] = model::to_json(c.model);
  j["train"] = model::to_json(c.train);
  j["theme_keywords"] = c.theme_keywords;
  j["no_pretrain"] = c.no_pretrain;
  j["prepare"] = {{"theme", c.prepare.theme ? json(*c.prepare.theme) : json(nullptr)},
                  {"reverse_target", c.prepare.reverse_target},
                  {"reverse_src", c.prepare.reverse_src},
                  {"min_count", c.prepare.min_count},
                  {"infer_sweeps", c.prepare.infer_sweeps}};
  j["generate"] = {{"theme_id", c.generate.theme_id},
                   {"seed_line", c.generate.seed_line},
                   {"n_lines", c.generate.n_lines},
                   {"beam_width", c.generate.beam_width},
                   {"max_len", c.generate.max_len},
                   {"undo_reversal", c.generate.undo_reversal ? json(*c.generate.undo_reversal) : json(nullptr)},
                   {"keywords", c.generate.keywords}};
  j["gradcheck"] = {{"seed", c.gradcheck.seed}, {"step", c.gradcheck.step},
                    {"tolerance", c.gradcheck.tolerance}, {"inject_fault", c.gradcheck.inject_fault}};
  j["bench"] = {{"src_lens", c.bench.src_lens}, {"hidden_dims", c.bench.hidden_dims},
                {"repetitions", c.bench.repetitions}, {"seed", c.bench.seed}};
  return j;
}

// ---- prepare --------------------------------------------------------------

PrepareReport cmd_prepare(const RunConfig& cfg) {
  PrepareReport rep;
  const auto clean = effective_clean(cfg);
  const auto songs = read_cleaned(cfg, clean, &rep.songs_in, &rep.clean);

  std::optional<lda::LdaModel> lda_model;
  int k = cfg.lda.k;
  if (!cfg.prepare.theme) {
    if (!fs::exists(cfg.paths.lda))
      throw UsageError("prepare needs an LDA model (paths.lda) or a fixed theme (--theme)");
    lda_model = lda::LdaModel::load(cfg.paths.lda);
    k = lda_model->num_topics();
  }
  rep.pairs_per_theme.assign(k, 0);

  std::vector<corpus::TextPair> pairs;
  std::vector<corpus::Tokens> lines;
  for (std::size_t s = 0; s < songs.size(); ++s) {
    const auto& song = songs[s];
    lines.insert(lines.end(), song.begin(), song.end());
    if (song.size() < 2) continue;
    int theme = 0;
    if (cfg.prepare.theme) {
      theme = *cfg.prepare.theme;
    } else {
      const auto doc = lda::phrase_document(song, clean.stopwords);
      const auto inf = lda::lda_infer(doc, *lda_model, cfg.prepare.infer_sweeps,
                                      derive_seed(lda_model->config().seed, "song" + std::to_string(s)));
      if (inf.uniform_fallback) ++rep.uniform_theme_fallbacks;
      theme = static_cast<int>(std::max_element(inf.probabilities.begin(), inf.probabilities.end()) -
                               inf.probabilities.begin());
    }
    for (auto& p : corpus::build_pairs(song, theme, cfg.prepare.reverse_target)) {
      if (cfg.prepare.reverse_src) std::reverse(p.src.begin(), p.src.end());
      ++rep.pairs_per_theme[theme];
      pairs.push_back(std::move(p));
    }
  }
  rep.pairs_out = pairs.size();
  if (pairs.empty())
    throw DataError("no sentence pairs survived cleaning (songs_in=" + std::to_string(rep.songs_in) + " " +
                    drop_summary(rep.clean) + ")");
  const auto vocab = corpus::Vocab::build(lines, cfg.prepare.min_count);
  rep.vocab_size = vocab.size();
  corpus::write_pairs_jsonl(cfg.paths.pairs, pairs);
  corpus::write_vocab_json(cfg.paths.vocab, vocab);
  return rep;
}

// ---- LDA ------------------------------------------------------------------

LdaTrainReport cmd_lda_train(const RunConfig& cfg) {
  LdaTrainReport rep;
  const auto clean = effective_clean(cfg);
  const auto songs = read_cleaned(cfg, clean, nullptr, nullptr);
  std::vector<lda::Document> docs;
  for (const auto& song : songs) {
    auto doc = lda::phrase_document(song, clean.stopwords);
    if (doc.empty()) {
      ++rep.skipped_documents;
      continue;
    }
    docs.push_back(std::move(doc));
  }
  if (docs.empty()) throw DataError("lda-train: no song has any phrase left after cleaning");
  const auto model = lda::lda_fit(docs, cfg.lda);
  model.save(cfg.paths.lda);
  rep.documents = docs.size();
  rep.tokens = model.total_tokens();
  rep.phrases = model.vocab_size();
  rep.keywords = lda::top_keywords(model, std::max(1, cfg.lda_keywords));
  return rep;
}

// ---- embeddings -----------------------------------------------------------

EmbedReport cmd_embed_train(const RunConfig& cfg) {
  const auto pairs = corpus::read_pairs_jsonl(cfg.paths.pairs);
  const auto vocab = corpus::read_vocab_json(cfg.paths.vocab);
  if (cfg.paths.embeddings.empty()) throw UsageError("paths.embeddings is required for embed-train");
  std::vector<corpus::Ids> lines;
  std::unordered_set<std::string> seen;
  auto add = [&](corpus::Tokens t) {
    if (seen.insert(corpus::join(t, "\x1f")).second) lines.push_back(vocab.encode(t));
  };
  for (const auto& p : pairs) {
    add(p.src);
    auto trg = p.trg;
    if (p.trg_reversed) std::reverse(trg.begin(), trg.end());
    add(trg);
  }
  EmbedReport rep;
  rep.lines = lines.size();
  for (const auto& l : lines) rep.tokens += l.size();
  rep.dim = cfg.embed.dim;
  embed::sgns_train(lines, vocab, cfg.embed).save(cfg.paths.embeddings);
  return rep;
}

// ---- training -------------------------------------------------------------

std::vector<std::string> resolve_theme_keywords(const lda::LdaModel* lda,
                                                const std::vector<std::string>& fallback) {
  if (!lda) return fallback;
  std::vector<std::string> out;
  for (const auto& topic : lda::top_keywords(*lda, 1)) {
    if (topic.empty()) throw DataError("LDA topic without any two-character phrase");
    out.push_back(topic.front().first);
  }
  return out;
}

std::array<int, 2> keyword_ids(const std::string& keyword, const corpus::Vocab& vocab) {
  const auto toks = corpus::tokenize(keyword);
  if (toks.size() != 2)
    throw UsageError("theme keyword '" + keyword + "' must be exactly two characters");
  return {vocab.id(toks[0]), vocab.id(toks[1])};
}

TrainReport cmd_train(const RunConfig& cfg) {
  const auto pairs = corpus::read_pairs_jsonl(cfg.paths.pairs);
  if (pairs.empty()) throw DataError("train: " + cfg.paths.pairs + " holds no pairs");
  const auto vocab = corpus::read_vocab_json(cfg.paths.vocab);

  std::optional<lda::LdaModel> lda_model;
  if (cfg.theme_keywords.empty()) {
    if (!fs::exists(cfg.paths.lda))
      throw UsageError("train needs theme keywords: an LDA model (paths.lda) or theme_keywords");
    lda_model = lda::LdaModel::load(cfg.paths.lda);
  }
  TrainReport rep;
  rep.theme_keywords = resolve_theme_keywords(lda_model ? &*lda_model : nullptr, cfg.theme_keywords);
  model::ThemeTable themes;
  for (const auto& kw : rep.theme_keywords) themes.push_back(keyword_ids(kw, vocab));

  std::vector<corpus::SentencePair> dataset;
  for (const auto& p : pairs) {
    if (p.trg_reversed != pairs.front().trg_reversed)
      throw DataError("train: pairs mix reversed and unreversed targets");
    if (p.theme >= static_cast<int>(themes.size()))
      throw DataError("train: pair theme " + std::to_string(p.theme) + " exceeds the " +
                      std::to_string(themes.size()) + " theme keywords");
    dataset.push_back(corpus::encode_pair(p, vocab));
  }

  model::ModelConfig mcfg = cfg.model;
  mcfg.vocab_size = vocab.size();
  auto params = model::init_params(mcfg, derive_seed(cfg.seed, "init"));
  if (!cfg.no_pretrain && !cfg.paths.embeddings.empty()) {
    params = embed::load_pretrained(embed::EmbeddingTable::load(cfg.paths.embeddings), vocab, params);
    rep.pretrained = true;
  }

  model::Checkpoint ck;
  ck.model_config = mcfg;
  ck.train_config = cfg.train;
  ck.vocab = vocab;
  ck.theme_keywords = rep.theme_keywords;
  ck.trg_reversed = pairs.front().trg_reversed;
  ck.params = params;
  auto save = [&](int epoch, const model::ModelParams& p, const model::AdaDeltaState& opt,
                  const std::vector<double>& history) {
    ck.epoch = epoch + 1;
    ck.params = p;
    ck.optimizer = opt;
    ck.loss_history = history;
    model::save_checkpoint(ck, cfg.paths.checkpoint);
  };
  auto result = model::train(dataset, themes, params, cfg.train, save);
  if (result.loss_history.empty()) save(-1, result.params, result.optimizer, {});
  rep.pairs = dataset.size();
  rep.parameters = result.params.parameter_count();
  rep.loss_history = std::move(result.loss_history);
  return rep;
}

// ---- generation -----------------------------------------------------------

GenerateResult generate(const model::Checkpoint& ckpt, const lda::LdaModel* lda,
                        const GenerateOptions& opts) {
  if (opts.n_lines < 1) throw UsageError("n_lines must be >= 1");
  if (opts.beam_width < 1) throw UsageError("beam width must be >= 1");
  if (opts.max_len < 1 || opts.max_len > 18) throw UsageError("max_len must lie in [1, 18]");
  if (opts.undo_reversal && *opts.undo_reversal != ckpt.trg_reversed)
    throw UsageError(std::string("undo_reversal must match training (targets were ") +
                     (ckpt.trg_reversed ? "reversed" : "not reversed") + ")");
  const bool undo = opts.undo_reversal.value_or(ckpt.trg_reversed);

  GenerateResult res;
  if (!opts.keywords.empty()) {
    res.keyword = opts.keywords;
  } else {
    const auto table = resolve_theme_keywords(lda, ckpt.theme_keywords);
    if (opts.theme_id < 0 || opts.theme_id >= static_cast<int>(table.size()))
      throw UsageError("theme_id " + std::to_string(opts.theme_id) + " outside [0, " +
                       std::to_string(table.size()) + ")");
    res.keyword = table[opts.theme_id];
  }
  const auto kw = keyword_ids(res.keyword, ckpt.vocab);

  auto src = corpus::tokenize(opts.seed_line);
  if (src.size() < 3 || src.size() > 18)
    throw UsageError("seed line has " + std::to_string(src.size()) +
                     " characters; it must have between 3 and 18");

  model::DecodeOptions dopts;
  dopts.beam_width = opts.beam_width;
  dopts.max_len = opts.max_len;
  auto run = [&](const corpus::Ids& ids) {
    return opts.beam_width == 1 ? model::greedy_decode(ckpt.params, ids, kw, dopts)
                                : model::beam_decode(ckpt.params, ids, kw, dopts);
  };
  for (int line = 0; line < opts.n_lines; ++line) {
    auto fed = src;
    if (opts.reverse_src) std::reverse(fed.begin(), fed.end());
    const auto ids = ckpt.vocab.encode(fed);
    dopts.suppress_eos_first = false;
    auto d = run(ids);
    if (d.ids.empty()) {
      dopts.suppress_eos_first = true;
      d = run(ids);
      if (d.ids.empty()) throw DataError("decoder produced an empty line");
    }
    const auto emitted = ckpt.vocab.decode(d.ids);
    for (std::size_t t = 0; t < emitted.size(); ++t)
      res.trace.push_back({line, static_cast<int>(t), src, emitted[t], d.alphas[t]});
    auto out = emitted;
    if (undo) std::reverse(out.begin(), out.end());
    res.lines.push_back(corpus::join(out));
    src = std::move(out);
  }
  return res;
}

GenerateResult cmd_generate(const RunConfig& cfg) {
  const auto ckpt = model::load_checkpoint(cfg.paths.checkpoint);
  std::optional<lda::LdaModel> lda_model;
  if (cfg.generate.keywords.empty() && !cfg.paths.lda.empty() && fs::exists(cfg.paths.lda))
    lda_model = lda::LdaModel::load(cfg.paths.lda);
  auto res = generate(ckpt, lda_model ? &*lda_model : nullptr, cfg.generate);
  if (!cfg.paths.trace.empty()) {
    std::ofstream out(cfg.paths.trace, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + cfg.paths.trace);
    out << trace_to_jsonl(res.trace);
  }
  return res;
}

std::string trace_to_jsonl(const std::vector<TraceStep>& trace) {
  std::string s;
  for (const auto& t : trace) {
    nlohmann::ordered_json j;
    j["line"] = t.line;
    j["step"] = t.step;
    j["src"] = t.src;
    j["token"] = t.token;
    j["alpha"] = t.alpha;
    s += j.dump();
    s += '\n';
  }
  return s;
}

// ---- reports --------------------------------------------------------------

json report_to_json(const PrepareReport& r) {
  return {{"songs_in", r.songs_in},
          {"lines_in", r.clean.lines_in},
          {"dropped_stopword_only", r.clean.dropped_stopword_only},
          {"dropped_length", r.clean.dropped_length},
          {"dropped_duplicate", r.clean.dropped_duplicate},
          {"lines_out", r.clean.lines_out},
          {"pairs_out", r.pairs_out},
          {"vocab_size", r.vocab_size},
          {"pairs_per_theme", r.pairs_per_theme},
          {"uniform_theme_fallbacks", r.uniform_theme_fallbacks}};
}

json report_to_json(const LdaTrainReport& r) {
  json kw = json::array();
  for (const auto& topic : r.keywords) {
    json t = json::array();
    for (const auto& [phrase, score] : topic) t.push_back({{"phrase", phrase}, {"score", score}});
    kw.push_back(std::move(t));
  }
  return {{"documents", r.documents},
          {"skipped_documents", r.skipped_documents},
          {"tokens", r.tokens},
          {"phrases", r.phrases},
          {"keywords", std::move(kw)}};
}

json report_to_json(const EmbedReport& r) {
  return {{"lines", r.lines}, {"tokens", r.tokens}, {"dim", r.dim}};
}

json report_to_json(const TrainReport& r) {
  return {{"pairs", r.pairs},
          {"parameters", r.parameters},
          {"pretrained", r.pretrained},
          {"theme_keywords", r.theme_keywords},
          {"loss_history", r.loss_history}};
}

json report_to_json(const gradcheck::Report& r) {
  json groups = json::array();
  for (const auto& g : r.groups)
    groups.push_back({{"group", g.group},
                      {"checked", g.checked},
                      {"max_rel_error", g.max_rel_error},
                      {"passed", g.passed}});
  return {{"passed", r.passed}, {"groups", std::move(groups)}};
}

json report_to_json(const std::vector<bench::BenchRow>& rows) {
  json out = json::array();
  for (const auto& r : rows)
    out.push_back({{"src_len", r.src_len},
                   {"hidden_dim", r.hidden_dim},
                   {"additive_flops", r.additive_flops},
                   {"dot_flops", r.dot_flops},
                   {"additive_median_us", r.additive_median_us},
                   {"dot_median_us", r.dot_median_us}});
  return out;
}

}  // namespace lyricgen::pipeline
