// Copyright 2026 The lyricgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "lyricgen.h"

#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

#include "lyricgen/error.hpp"
#include "lyricgen/pipeline.hpp"

struct lg_lda {
  lyricgen::lda::LdaModel model;
};

struct lg_model {
  lyricgen::model::Checkpoint ckpt;
};

namespace {

using nlohmann::json;
namespace pl = lyricgen::pipeline;

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void set_out(char** out, const std::string& s) {
  if (out) *out = dup_string(s);
}

json parse_json(const char* text, const char* what) {
  if (!text || !*text) return json::object();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw lyricgen::UsageError(std::string(what) + " is not valid JSON: " + e.what());
  }
}

template <class F>
lg_status guarded(F&& f) {
  g_last_error.clear();
  try {
    return f();
  } catch (const lyricgen::UsageError& e) {
    g_last_error = e.what();
    return LG_ERR_USAGE;
  } catch (const lyricgen::DataError& e) {
    g_last_error = e.what();
    return LG_ERR_DATA;
  } catch (const lyricgen::VerificationError& e) {
    g_last_error = e.what();
    return LG_ERR_VERIFICATION;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LG_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return LG_ERR_INTERNAL;
  }
}

pl::RunConfig config(const char* text) { return pl::run_config_from_json(parse_json(text, "config")); }

json keywords_to_json(const lyricgen::lda::ThemeKeywords& kw) {
  json out = json::array();
  for (const auto& topic : kw) {
    json t = json::array();
    for (const auto& [phrase, score] : topic) t.push_back({{"phrase", phrase}, {"score", score}});
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

extern "C" {

const char* lg_last_error(void) { return g_last_error.c_str(); }

void lg_free_string(char* s) { std::free(s); }

const char* lg_version(void) { return "0.1.0"; }

lg_status lg_prepare(const char* config_json, char** report_json) {
  return guarded([&] {
    set_out(report_json, pl::report_to_json(pl::cmd_prepare(config(config_json))).dump());
    return LG_OK;
  });
}

lg_status lg_lda_train(const char* config_json, char** report_json) {
  return guarded([&] {
    set_out(report_json, pl::report_to_json(pl::cmd_lda_train(config(config_json))).dump());
    return LG_OK;
  });
}

lg_status lg_embed_train(const char* config_json, char** report_json) {
  return guarded([&] {
    set_out(report_json, pl::report_to_json(pl::cmd_embed_train(config(config_json))).dump());
    return LG_OK;
  });
}

lg_status lg_train(const char* config_json, char** report_json) {
  return guarded([&] {
    set_out(report_json, pl::report_to_json(pl::cmd_train(config(config_json))).dump());
    return LG_OK;
  });
}

lg_status lg_gradcheck(const char* config_json, char** report_json) {
  return guarded([&] {
    const auto rep = lyricgen::gradcheck::run_gradcheck(config(config_json).gradcheck);
    set_out(report_json, pl::report_to_json(rep).dump());
    if (!rep.passed) {
      g_last_error = "gradient check failed";
      return LG_ERR_VERIFICATION;
    }
    return LG_OK;
  });
}

lg_status lg_bench(const char* config_json, char** report_json) {
  return guarded([&] {
    set_out(report_json, pl::report_to_json(lyricgen::bench::run_bench(config(config_json).bench)).dump());
    return LG_OK;
  });
}

lg_status lg_generate(const char* config_json, char** result_json) {
  return guarded([&] {
    const auto res = pl::cmd_generate(config(config_json));
    set_out(result_json, json{{"keyword", res.keyword}, {"lines", res.lines}}.dump());
    return LG_OK;
  });
}

lg_status lg_resolve_config(const char* config_json, char** resolved_json) {
  return guarded([&] {
    set_out(resolved_json, pl::to_json(config(config_json)).dump(2));
    return LG_OK;
  });
}

lg_status lg_lda_load(const char* path, lg_lda** out) {
  return guarded([&] {
    if (!path || !out) throw lyricgen::UsageError("lg_lda_load: null argument");
    *out = new lg_lda{lyricgen::lda::LdaModel::load(path)};
    return LG_OK;
  });
}

void lg_lda_free(lg_lda* lda) { delete lda; }

int lg_lda_num_topics(const lg_lda* lda) { return lda ? lda->model.num_topics() : 0; }

lg_status lg_lda_keywords(const lg_lda* lda, int n, char** keywords_json) {
  return guarded([&] {
    if (!lda) throw lyricgen::UsageError("lg_lda_keywords: null model");
    if (n < 1) throw lyricgen::UsageError("keyword count must be >= 1");
    set_out(keywords_json, keywords_to_json(lyricgen::lda::top_keywords(lda->model, n)).dump());
    return LG_OK;
  });
}

lg_status lg_lda_infer(const lg_lda* lda, const char* song_text, int sweeps, uint64_t seed,
                       char** result_json) {
  return guarded([&] {
    if (!lda || !song_text) throw lyricgen::UsageError("lg_lda_infer: null argument");
    if (sweeps < 1) throw lyricgen::UsageError("sweeps must be >= 1");
    lyricgen::corpus::Song song;
    std::istringstream in(song_text);
    for (std::string line; std::getline(in, line);) {
      auto toks = lyricgen::corpus::tokenize(line);
      if (!toks.empty()) song.push_back(std::move(toks));
    }
    const auto doc = lyricgen::lda::phrase_document(song, {});
    const auto res = lyricgen::lda::lda_infer(doc, lda->model, sweeps, seed);
    set_out(result_json,
            json{{"probabilities", res.probabilities}, {"uniform_fallback", res.uniform_fallback}}.dump());
    return LG_OK;
  });
}

lg_status lg_model_load(const char* checkpoint_path, lg_model** out) {
  return guarded([&] {
    if (!checkpoint_path || !out) throw lyricgen::UsageError("lg_model_load: null argument");
    *out = new lg_model{lyricgen::model::load_checkpoint(checkpoint_path)};
    return LG_OK;
  });
}

void lg_model_free(lg_model* model) { delete model; }

int lg_model_vocab_size(const lg_model* model) { return model ? model->ckpt.vocab.size() : 0; }

lg_status lg_model_generate(const lg_model* model, const lg_lda* lda, const char* options_json,
                            char** lines_json, char** trace_jsonl) {
  return guarded([&] {
    if (!model) throw lyricgen::UsageError("lg_model_generate: null model");
    const json opts = parse_json(options_json, "options");
    const auto cfg = pl::run_config_from_json(json{{"generate", opts}});
    const auto res = pl::generate(model->ckpt, lda ? &lda->model : nullptr, cfg.generate);
    set_out(lines_json, json{{"keyword", res.keyword}, {"lines", res.lines}}.dump());
    set_out(trace_jsonl, pl::trace_to_jsonl(res.trace));
    return LG_OK;
  });
}

}  // extern "C"
