// Copyright 2026 The lyricgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lyricgen/error.hpp"
#include "lyricgen/model.hpp"

namespace lyricgen::model {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw UsageError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw UsageError(where + ": unknown key '" + it.key() + "'");
}

template <class T>
void read_if(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw UsageError(where + "." + key + ": " + e.what());
  }
}

ojson params_to_json(const ModelParams& p) {
  ojson j = ojson::object();
  p.for_each([&](const std::string& name, const Tensor& t) {
    j[name] = {{"shape", t.shape}, {"data", t.data}};
  });
  return j;
}

ModelParams params_from_json(const json& j, const ModelConfig& cfg, const std::string& where) {
  if (!j.is_object()) throw DataError(where + ": expected an object");
  ModelParams p = ModelParams::zeros(cfg);
  std::set<std::string> seen;
  p.for_each([&](const std::string& name, Tensor& t) {
    const std::string field = where + "." + name;
    if (!j.contains(name)) throw DataError(field + " missing");
    Tensor loaded = tensor_from_json(j.at(name), field);
    if (loaded.shape != t.shape)
      throw DataError(field + ": shape " + loaded.shape_string() +
                      " does not match model_config (expected " + t.shape_string() + ")");
    t = std::move(loaded);
    seen.insert(name);
  });
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!seen.count(it.key())) throw DataError(where + "." + it.key() + ": unexpected tensor");
  return p;
}

}  // namespace

json to_json(const ModelConfig& c) {
  return {{"embed_dim", c.embed_dim},
          {"hidden_dim", c.hidden_dim},
          {"attention_dim", c.attention_dim},
          {"attention_variant", kernels::to_string(c.attention_variant)},
          {"vocab_size", c.vocab_size},
          {"init_range", c.init_range},
          {"tie_theme_sentence_encoders", c.tie_theme_sentence_encoders},
          {"theme_channel", to_string(c.theme_channel)}};
}

json to_json(const TrainConfig& c) {
  return {{"batch_size", c.batch_size},
          {"epochs", c.epochs},
          {"seed", c.seed},
          {"clip_norm", c.clip_norm},
          {"shuffle", c.shuffle},
          {"stop_below", c.stop_below},
          {"optimizer", {{"rho", c.optimizer.rho}, {"epsilon", c.optimizer.epsilon}, {"lr", c.optimizer.lr}}}};
}

ModelConfig model_config_from_json(const json& j, ModelConfig c) {
  const std::string w = "model";
  reject_unknown(j, {"embed_dim", "hidden_dim", "attention_dim", "attention_variant", "vocab_size",
                     "init_range", "tie_theme_sentence_encoders", "theme_channel"}, w);
  read_if(j, "embed_dim", c.embed_dim, w);
  read_if(j, "hidden_dim", c.hidden_dim, w);
  read_if(j, "attention_dim", c.attention_dim, w);
  read_if(j, "vocab_size", c.vocab_size, w);
  read_if(j, "init_range", c.init_range, w);
  read_if(j, "tie_theme_sentence_encoders", c.tie_theme_sentence_encoders, w);
  std::string s;
  if (j.contains("attention_variant")) {
    read_if(j, "attention_variant", s, w);
    c.attention_variant = kernels::attention_variant_from_string(s);
  }
  if (j.contains("theme_channel")) {
    read_if(j, "theme_channel", s, w);
    c.theme_channel = theme_channel_from_string(s);
  }
  return c;
}

TrainConfig train_config_from_json(const json& j, TrainConfig c) {
  const std::string w = "train";
  reject_unknown(j, {"batch_size", "epochs", "seed", "clip_norm", "shuffle", "stop_below", "optimizer"}, w);
  read_if(j, "batch_size", c.batch_size, w);
  read_if(j, "epochs", c.epochs, w);
  read_if(j, "seed", c.seed, w);
  read_if(j, "clip_norm", c.clip_norm, w);
  read_if(j, "shuffle", c.shuffle, w);
  read_if(j, "stop_below", c.stop_below, w);
  if (j.contains("optimizer")) {
    const auto& o = j.at("optimizer");
    reject_unknown(o, {"rho", "epsilon", "lr"}, "train.optimizer");
    read_if(o, "rho", c.optimizer.rho, "train.optimizer");
    read_if(o, "epsilon", c.optimizer.epsilon, "train.optimizer");
    read_if(o, "lr", c.optimizer.lr, "train.optimizer");
  }
  return c;
}

std::string checkpoint_to_string(const Checkpoint& ck) {
  if (!(ck.params.cfg == ck.model_config))
    throw UsageError("checkpoint: params were built for a different model_config");
  ojson j;
  j["model_config"] = to_json(ck.model_config);
  j["train_config"] = to_json(ck.train_config);
  j["epoch"] = ck.epoch;
  j["loss_history"] = ck.loss_history;
  j["params"] = params_to_json(ck.params);
  if (ck.optimizer) {
    ojson o;
    o["rho"] = ck.optimizer->cfg.rho;
    o["epsilon"] = ck.optimizer->cfg.epsilon;
    o["lr"] = ck.optimizer->cfg.lr;
    o["steps"] = ck.optimizer->steps;
    o["eg2"] = params_to_json(ck.optimizer->eg2);
    o["edx2"] = params_to_json(ck.optimizer->edx2);
    j["optimizer_state"] = std::move(o);
  } else {
    j["optimizer_state"] = nullptr;
  }
  j["vocab"] = ck.vocab.tokens();
  j["theme_keywords"] = ck.theme_keywords;
  j["trg_reversed"] = ck.trg_reversed;
  return j.dump() + "\n";
}

Checkpoint checkpoint_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("checkpoint: expected a JSON object");
  Checkpoint ck;
  try {
    for (const char* key : {"model_config", "train_config", "epoch", "loss_history", "params", "vocab"})
      if (!j.contains(key)) throw DataError(std::string("checkpoint: missing field ") + key);
    try {
      ck.model_config = model_config_from_json(j.at("model_config"));
      ck.model_config.validate();
      ck.train_config = train_config_from_json(j.at("train_config"));
    } catch (const UsageError& e) {
      throw DataError(std::string("checkpoint: ") + e.what());
    }
    ck.epoch = j.at("epoch").get<int>();
    ck.loss_history = j.at("loss_history").get<std::vector<double>>();
    ck.vocab = corpus::Vocab::from_tokens(j.at("vocab").get<std::vector<std::string>>());
    if (ck.vocab.size() != ck.model_config.vocab_size)
      throw DataError("checkpoint: model_config.vocab_size (" +
                      std::to_string(ck.model_config.vocab_size) + ") does not match vocab length (" +
                      std::to_string(ck.vocab.size()) + ")");
    ck.params = params_from_json(j.at("params"), ck.model_config, "params");
    if (j.contains("theme_keywords"))
      ck.theme_keywords = j.at("theme_keywords").get<std::vector<std::string>>();
    if (j.contains("trg_reversed")) ck.trg_reversed = j.at("trg_reversed").get<bool>();
    if (j.contains("optimizer_state") && !j.at("optimizer_state").is_null()) {
      const auto& o = j.at("optimizer_state");
      AdaDeltaState st;
      st.cfg.rho = o.at("rho").get<double>();
      st.cfg.epsilon = o.at("epsilon").get<double>();
      st.cfg.lr = o.at("lr").get<double>();
      st.steps = o.at("steps").get<long>();
      st.eg2 = params_from_json(o.at("eg2"), ck.model_config, "optimizer_state.eg2");
      st.edx2 = params_from_json(o.at("edx2"), ck.model_config, "optimizer_state.edx2");
      ck.optimizer = std::move(st);
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  }
  return ck;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const std::string text = checkpoint_to_string(ckpt);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  // Write to a sibling file, then rename over the target.
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << text;
    if (!out) throw DataError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_string(ss.str());
}

}  // namespace lyricgen::model
