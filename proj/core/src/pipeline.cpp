// Copyright 2026 The SCL Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "scl/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "scl/analysis.hpp"
#include "scl/cache.hpp"
#include "scl/errors.hpp"
#include "scl/metrics.hpp"
#include "scl/text.hpp"

extern char** environ;

namespace scl {
namespace fs = std::filesystem;
using json = nlohmann::json;

std::string_view tool_version() { return SCL_VERSION; }

// ---------------------------------------------------------------------------
// Config

namespace {

const std::set<std::string> kTopLevelKeys = {
    "seed",   "output_dir", "cache_dir", "datasets",    "split", "translations",
    "methods", "wordvec",   "encoders",  "pooling",     "embed", "contrastive",
    "head",   "fusion",     "eval",
};

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError("unknown key '" + (where.empty() ? "" : where + ".") + it.key() + "'");
    }
  }
}

const json* field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return nullptr;
  return &*it;
}

std::string where_of(const std::string& where, const char* key) {
  return where.empty() ? std::string(key) : where + "." + key;
}

double get_double(const json& j, const char* key, double def, const std::string& where) {
  const json* v = field(j, key);
  if (!v) return def;
  if (!v->is_number()) throw ConfigError(where_of(where, key) + " must be a number");
  return v->get<double>();
}

std::uint64_t get_u64(const json& j, const char* key, std::uint64_t def,
                      const std::string& where) {
  const json* v = field(j, key);
  if (!v) return def;
  if (v->is_number_unsigned()) return v->get<std::uint64_t>();
  if (v->is_number_integer() && v->get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(v->get<std::int64_t>());
  }
  throw ConfigError(where_of(where, key) + " must be a non-negative integer");
}

std::size_t get_size(const json& j, const char* key, std::size_t def, const std::string& where) {
  return static_cast<std::size_t>(get_u64(j, key, def, where));
}

std::size_t get_positive(const json& j, const char* key, std::size_t def,
                         const std::string& where) {
  const std::size_t v = get_size(j, key, def, where);
  if (v == 0) throw ConfigError(where_of(where, key) + " must be positive");
  return v;
}

bool get_bool(const json& j, const char* key, bool def, const std::string& where) {
  const json* v = field(j, key);
  if (!v) return def;
  if (!v->is_boolean()) throw ConfigError(where_of(where, key) + " must be a boolean");
  return v->get<bool>();
}

std::optional<std::string> get_string(const json& j, const char* key, const std::string& where) {
  const json* v = field(j, key);
  if (!v) return std::nullopt;
  if (!v->is_string()) throw ConfigError(where_of(where, key) + " must be a string");
  return v->get<std::string>();
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  if (path.is_relative()) path = base / path;
  return path.lexically_normal();
}

template <typename Fn>
auto as_config_error(const std::string& where, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

void apply_environment(json& root, const Environment& env) {
  for (const auto& [name, raw] : env) {
    if (name.rfind("SCL_", 0) != 0 || name.size() == 4) continue;
    const std::string rest = lower(name.substr(4));
    std::vector<std::string> path;
    std::size_t start = 0;
    while (true) {
      const std::size_t pos = rest.find("__", start);
      path.push_back(rest.substr(start, pos - start));
      if (pos == std::string::npos) break;
      start = pos + 2;
    }
    if (!kTopLevelKeys.count(path.front())) continue;
    json* node = &root;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      node = &(*node)[path[i]];
      if (node->is_null()) *node = json::object();
      if (!node->is_object()) {
        throw ConfigError("environment override " + name + " targets a non-object");
      }
    }
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    (*node)[path.back()] = std::move(value);
  }
}

EncoderSettings parse_encoder(const json& j, const std::string& where, const fs::path& base,
                              const std::string& default_id) {
  EncoderSettings out;
  out.spec.model_id = default_id;
  if (j.is_null()) {
    out.spec.max_tokens = default_max_tokens(out.spec.model_id);
    return out;
  }
  check_keys(j, {"model_id", "hidden_dim", "max_tokens", "vocab_buckets", "init_seed", "weights"},
             where);
  if (auto id = get_string(j, "model_id", where)) out.spec.model_id = *id;
  out.spec.hidden_dim = get_positive(j, "hidden_dim", out.spec.hidden_dim, where);
  out.spec.max_tokens = get_size(j, "max_tokens", 0, where);
  if (out.spec.max_tokens == 0) out.spec.max_tokens = default_max_tokens(out.spec.model_id);
  if (out.spec.max_tokens < 3) throw ConfigError(where + ".max_tokens must be at least 3");
  out.spec.vocab_buckets = get_size(j, "vocab_buckets", out.spec.vocab_buckets, where);
  if (out.spec.vocab_buckets < 3) throw ConfigError(where + ".vocab_buckets must be at least 3");
  out.spec.init_seed = get_u64(j, "init_seed", out.spec.init_seed, where);
  if (auto w = get_string(j, "weights", where)) out.weights = resolve(base, *w);
  return out;
}

json encoder_json(const EncoderSettings& e) {
  return {{"model_id", e.spec.model_id},
          {"hidden_dim", e.spec.hidden_dim},
          {"max_tokens", e.spec.max_tokens},
          {"vocab_buckets", e.spec.vocab_buckets},
          {"init_seed", e.spec.init_seed},
          {"weights", e.weights ? json(e.weights->string()) : json()}};
}

std::vector<MethodTag> canonical(std::vector<MethodTag> methods) {
  std::sort(methods.begin(), methods.end());
  methods.erase(std::unique(methods.begin(), methods.end()), methods.end());
  return methods;
}

}  // namespace

Environment process_environment() {
  Environment env;
  for (char** e = environ; e && *e; ++e) {
    std::string_view entry(*e);
    if (entry.rfind("SCL_", 0) != 0) continue;
    const std::size_t eq = entry.find('=');
    if (eq == std::string_view::npos) continue;
    env.emplace(std::string(entry.substr(0, eq)), std::string(entry.substr(eq + 1)));
  }
  return env;
}

ExperimentConfig parse_config(std::string_view json_text, const fs::path& base_dir,
                              const Environment& env) {
  json root = json::parse(json_text, nullptr, false);
  if (root.is_discarded()) throw ConfigError("config is not valid JSON");
  if (!root.is_object()) throw ConfigError("config must be a JSON object");
  apply_environment(root, env);
  check_keys(root, kTopLevelKeys, "");

  ExperimentConfig cfg;
  cfg.seed = get_u64(root, "seed", 0, "");
  cfg.output_dir = resolve(base_dir, get_string(root, "output_dir", "").value_or("out"));
  if (auto c = get_string(root, "cache_dir", "")) cfg.cache_dir = resolve(base_dir, *c);

  const json* datasets = field(root, "datasets");
  if (!datasets || !datasets->is_array() || datasets->empty()) {
    throw ConfigError("datasets must be a non-empty array");
  }
  std::set<std::string> names;
  for (std::size_t i = 0; i < datasets->size(); ++i) {
    const json& d = (*datasets)[i];
    const std::string where = "datasets[" + std::to_string(i) + "]";
    check_keys(d, {"name", "path", "format", "split_manifest"}, where);
    DatasetConfig ds;
    auto path = get_string(d, "path", where);
    if (!path) throw ConfigError(where + ".path is required");
    ds.path = resolve(base_dir, *path);
    ds.name = get_string(d, "name", where).value_or(ds.path.stem().string());
    if (ds.name.empty() || ds.name.find_first_of("/\\") != std::string::npos) {
      throw ConfigError(where + ".name must be a non-empty name without path separators");
    }
    if (!names.insert(ds.name).second) throw ConfigError("duplicate dataset name '" + ds.name + "'");
    std::string format = get_string(d, "format", where).value_or("");
    if (format.empty()) {
      format = ds.path.extension().string();
      if (!format.empty()) format.erase(0, 1);
    }
    ds.format = as_config_error(where + ".format", [&] { return parse_text_format(format); });
    if (auto m = get_string(d, "split_manifest", where)) ds.split_manifest = resolve(base_dir, *m);
    cfg.datasets.push_back(std::move(ds));
  }

  if (const json* s = field(root, "split")) {
    check_keys(*s, {"train", "validation", "test"}, "split");
    cfg.ratios.train = get_double(*s, "train", cfg.ratios.train, "split");
    cfg.ratios.validation = get_double(*s, "validation", cfg.ratios.validation, "split");
    cfg.ratios.test = get_double(*s, "test", cfg.ratios.test, "split");
  }
  if (auto t = get_string(root, "translations", "")) cfg.translations = resolve(base_dir, *t);

  if (const json* m = field(root, "methods")) {
    if (!m->is_array() || m->empty()) throw ConfigError("methods must be a non-empty array");
    for (const json& tag : *m) {
      if (!tag.is_string()) throw ConfigError("methods entries must be strings");
      cfg.methods.push_back(parse_method_or_throw(tag.get<std::string>()));
    }
    cfg.methods = canonical(cfg.methods);
  } else {
    cfg.methods.assign(kCanonicalMethodOrder.begin(), kCanonicalMethodOrder.end());
  }

  if (const json* w = field(root, "wordvec")) {
    const std::string where = "wordvec";
    check_keys(*w, {"source", "path", "dim", "mode", "max_words", "window", "negative",
                    "epochs", "min_count", "learning_rate", "min_learning_rate"},
               where);
    const std::string source = lower(get_string(*w, "source", where).value_or("train"));
    if (source == "train") {
      cfg.wordvec.source = WordVecSettings::Source::kTrain;
    } else if (source == "file") {
      cfg.wordvec.source = WordVecSettings::Source::kFile;
    } else {
      throw ConfigError("wordvec.source must be 'train' or 'file'");
    }
    if (auto p = get_string(*w, "path", where)) cfg.wordvec.path = resolve(base_dir, *p);
    if (cfg.wordvec.source == WordVecSettings::Source::kFile && !cfg.wordvec.path) {
      throw ConfigError("wordvec.path is required when wordvec.source is 'file'");
    }
    cfg.wordvec.dim = get_positive(*w, "dim", cfg.wordvec.dim, where);
    const std::string mode = lower(get_string(*w, "mode", where).value_or("concat_pad"));
    if (mode == "sum") {
      cfg.wordvec.features.mode = WordFeatureMode::kSum;
    } else if (mode == "concat_pad" || mode == "concat") {
      cfg.wordvec.features.mode = WordFeatureMode::kConcatPad;
    } else {
      throw ConfigError("wordvec.mode must be 'SUM' or 'CONCAT_PAD'");
    }
    cfg.wordvec.features.max_words =
        get_positive(*w, "max_words", cfg.wordvec.features.max_words, where);
    SkipGramOptions& sg = cfg.wordvec.skipgram;
    sg.window = get_positive(*w, "window", sg.window, where);
    sg.negative = get_size(*w, "negative", sg.negative, where);
    sg.epochs = get_size(*w, "epochs", sg.epochs, where);
    sg.min_count = get_size(*w, "min_count", sg.min_count, where);
    sg.learning_rate = get_double(*w, "learning_rate", sg.learning_rate, where);
    sg.min_learning_rate = get_double(*w, "min_learning_rate", sg.min_learning_rate, where);
  }

  json encoders = root.value("encoders", json::object());
  if (encoders.is_null()) encoders = json::object();
  check_keys(encoders, {"generic", "tweet"}, "encoders");
  cfg.generic_encoder = parse_encoder(encoders.value("generic", json()), "encoders.generic",
                                      base_dir, "roberta-base");
  cfg.tweet_encoder = parse_encoder(encoders.value("tweet", json()), "encoders.tweet", base_dir,
                                    "vinai/bertweet-base");

  if (const json* p = field(root, "pooling")) {
    check_keys(*p, {"exclude_special_tokens"}, "pooling");
    cfg.pooling.exclude_special_tokens = get_bool(*p, "exclude_special_tokens", false, "pooling");
  }
  if (const json* e = field(root, "embed")) {
    check_keys(*e, {"batch_size"}, "embed");
    cfg.embed_batch_size = get_positive(*e, "batch_size", cfg.embed_batch_size, "embed");
  }

  if (const json* c = field(root, "contrastive")) {
    const std::string where = "contrastive";
    check_keys(*c, {"target", "temperature", "epochs", "batch_size", "learning_rate",
                    "weight_decay", "projection_hidden", "projection_dim", "holdout_fraction"},
               where);
    const std::string target = lower(get_string(*c, "target", where).value_or("tweet"));
    if (target == "tweet") {
      cfg.finetune_target = FinetuneTarget::kTweet;
    } else if (target == "generic") {
      cfg.finetune_target = FinetuneTarget::kGeneric;
    } else {
      throw ConfigError("contrastive.target must be 'tweet' or 'generic'");
    }
    ContrastiveConfig& cc = cfg.contrastive;
    cc.temperature = get_double(*c, "temperature", cc.temperature, where);
    if (!(cc.temperature > 0)) throw ConfigError("contrastive.temperature must be positive");
    cc.epochs = get_size(*c, "epochs", cc.epochs, where);
    cc.batch_size = get_positive(*c, "batch_size", cc.batch_size, where);
    cc.learning_rate = get_double(*c, "learning_rate", cc.learning_rate, where);
    cc.weight_decay = get_double(*c, "weight_decay", cc.weight_decay, where);
    cfg.projection_hidden = get_positive(*c, "projection_hidden", cfg.projection_hidden, where);
    cfg.projection_dim = get_positive(*c, "projection_dim", cfg.projection_dim, where);
    cfg.contrastive_holdout = get_double(*c, "holdout_fraction", 0.0, where);
    if (cfg.contrastive_holdout < 0 || cfg.contrastive_holdout >= 1) {
      throw ConfigError("contrastive.holdout_fraction must lie in [0, 1)");
    }
  }
  cfg.contrastive.pooling = cfg.pooling;

  if (const json* h = field(root, "head")) {
    const std::string where = "head";
    check_keys(*h, {"hidden_dim", "epochs", "batch_size", "learning_rate", "weight_decay",
                    "loss", "beta"},
               where);
    HeadConfig& hc = cfg.head;
    hc.hidden_dim = get_positive(*h, "hidden_dim", hc.hidden_dim, where);
    hc.epochs = get_size(*h, "epochs", hc.epochs, where);
    hc.batch_size = get_positive(*h, "batch_size", hc.batch_size, where);
    hc.learning_rate = get_double(*h, "learning_rate", hc.learning_rate, where);
    hc.weight_decay = get_double(*h, "weight_decay", hc.weight_decay, where);
    if (auto l = get_string(*h, "loss", where)) {
      hc.loss = as_config_error("head.loss", [&] { return parse_loss(*l); });
    }
    hc.beta = get_double(*h, "beta", hc.beta, where);
  }

  cfg.fusion.streams = {{MethodTag::kA1, 0}, {MethodTag::kA2Generic, 0}, {MethodTag::kA3, 0}};
  if (const json* f = field(root, "fusion")) {
    const std::string where = "fusion";
    check_keys(*f, {"streams", "reduced_dim", "hidden_dim", "topology", "epochs", "batch_size",
                    "learning_rate", "weight_decay", "loss", "beta"},
               where);
    FusionConfig& fc = cfg.fusion;
    if (const json* s = field(*f, "streams")) {
      if (!s->is_array() || s->empty()) throw ConfigError("fusion.streams must be a non-empty array");
      fc.streams.clear();
      for (const json& tag : *s) {
        if (!tag.is_string()) throw ConfigError("fusion.streams entries must be strings");
        const MethodTag t = parse_method_or_throw(tag.get<std::string>());
        if (t == MethodTag::kA4 || t == MethodTag::kA2Tweet) {
          throw ConfigError("fusion.streams may contain A1, A2_GENERIC and A3 only");
        }
        fc.streams.push_back({t, 0});
      }
    }
    fc.reduced_dim = get_positive(*f, "reduced_dim", fc.reduced_dim, where);
    fc.hidden_dim = get_positive(*f, "hidden_dim", fc.hidden_dim, where);
    if (auto t = get_string(*f, "topology", where)) {
      fc.topology = as_config_error("fusion.topology", [&] { return parse_topology(*t); });
    }
    fc.epochs = get_size(*f, "epochs", fc.epochs, where);
    fc.batch_size = get_positive(*f, "batch_size", fc.batch_size, where);
    fc.learning_rate = get_double(*f, "learning_rate", fc.learning_rate, where);
    fc.weight_decay = get_double(*f, "weight_decay", fc.weight_decay, where);
    if (auto l = get_string(*f, "loss", where)) {
      fc.loss = as_config_error("fusion.loss", [&] { return parse_loss(*l); });
    }
    fc.beta = get_double(*f, "beta", fc.beta, where);
  }
  // Stream widths follow from the producing components.
  for (StreamSpec& s : cfg.fusion.streams) {
    switch (s.tag) {
      case MethodTag::kA1:
        s.dim = cfg.wordvec.features.output_dim(cfg.wordvec.dim);
        break;
      case MethodTag::kA2Generic:
        s.dim = cfg.generic_encoder.spec.hidden_dim;
        break;
      default:
        s.dim = (cfg.finetune_target == FinetuneTarget::kTweet ? cfg.tweet_encoder
                                                                 : cfg.generic_encoder)
                    .spec.hidden_dim;
        break;
    }
  }
  cfg.fusion.tweet_dim = cfg.tweet_encoder.spec.hidden_dim;

  if (const json* e = field(root, "eval")) {
    check_keys(*e, {"split"}, "eval");
    cfg.eval_split = lower(get_string(*e, "split", "eval").value_or("test"));
    if (cfg.eval_split != "test" && cfg.eval_split != "validation") {
      throw ConfigError("eval.split must be 'test' or 'validation'");
    }
  }

  set_seed(cfg, cfg.seed);
  return cfg;
}

ExperimentConfig load_config(const fs::path& path, const Environment& env) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  return parse_config(buf.str(), fs::absolute(base), env);
}

void validate(const ExperimentConfig& cfg) {
  auto require = [](const fs::path& p, const std::string& what) {
    if (!fs::exists(p)) throw ConfigError(what + " not found: " + p.string());
  };
  for (const DatasetConfig& d : cfg.datasets) {
    require(d.path, "dataset '" + d.name + "'");
    if (d.split_manifest) require(*d.split_manifest, "split manifest for '" + d.name + "'");
  }
  if (cfg.translations) require(*cfg.translations, "translations file");
  if (cfg.wordvec.source == WordVecSettings::Source::kFile) {
    require(*cfg.wordvec.path, "word vector file");
  }
  if (cfg.generic_encoder.weights) require(*cfg.generic_encoder.weights, "generic encoder weights");
  if (cfg.tweet_encoder.weights) require(*cfg.tweet_encoder.weights, "tweet encoder weights");
  const double sum = cfg.ratios.train + cfg.ratios.validation + cfg.ratios.test;
  if (cfg.ratios.train < 0 || cfg.ratios.validation < 0 || cfg.ratios.test < 0 ||
      std::abs(sum - 1.0) > 1e-6) {
    throw ConfigError("split ratios must be non-negative and sum to 1");
  }
}

void set_seed(ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.seed = seed;
  cfg.contrastive.seed = seed;
  cfg.head.seed = seed;
  cfg.fusion.seed = seed;
}

void set_output_dir(ExperimentConfig& cfg, const fs::path& out) {
  cfg.output_dir = fs::absolute(out).lexically_normal();
}

namespace {

json snapshot_json(const ExperimentConfig& cfg) {
  json datasets = json::array();
  for (const DatasetConfig& d : cfg.datasets) {
    datasets.push_back({{"name", d.name},
                        {"path", d.path.string()},
                        {"format", std::string(text_format_name(d.format))},
                        {"split_manifest", d.split_manifest ? json(d.split_manifest->string())
                                                            : json()}});
  }
  json methods = json::array();
  for (MethodTag m : cfg.methods) methods.push_back(std::string(method_name(m)));
  json streams = json::array();
  for (const StreamSpec& s : cfg.fusion.streams) {
    streams.push_back({{"tag", std::string(method_name(s.tag))}, {"dim", s.dim}});
  }
  const SkipGramOptions& sg = cfg.wordvec.skipgram;
  return {
      {"seed", cfg.seed},
      {"datasets", datasets},
      {"split", {{"train", cfg.ratios.train},
                 {"validation", cfg.ratios.validation},
                 {"test", cfg.ratios.test}}},
      {"translations", cfg.translations ? json(cfg.translations->string()) : json()},
      {"methods", methods},
      {"wordvec",
       {{"source", cfg.wordvec.source == WordVecSettings::Source::kTrain ? "train" : "file"},
        {"path", cfg.wordvec.path ? json(cfg.wordvec.path->string()) : json()},
        {"dim", cfg.wordvec.dim},
        {"mode", cfg.wordvec.features.mode == WordFeatureMode::kSum ? "SUM" : "CONCAT_PAD"},
        {"max_words", cfg.wordvec.features.max_words},
        {"window", sg.window},
        {"negative", sg.negative},
        {"epochs", sg.epochs},
        {"min_count", sg.min_count},
        {"learning_rate", sg.learning_rate},
        {"min_learning_rate", sg.min_learning_rate}}},
      {"encoders",
       {{"generic", encoder_json(cfg.generic_encoder)}, {"tweet", encoder_json(cfg.tweet_encoder)}}},
      {"pooling", {{"exclude_special_tokens", cfg.pooling.exclude_special_tokens}}},
      {"embed", {{"batch_size", cfg.embed_batch_size}}},
      {"contrastive",
       {{"target", cfg.finetune_target == FinetuneTarget::kTweet ? "tweet" : "generic"},
        {"temperature", cfg.contrastive.temperature},
        {"epochs", cfg.contrastive.epochs},
        {"batch_size", cfg.contrastive.batch_size},
        {"learning_rate", cfg.contrastive.learning_rate},
        {"weight_decay", cfg.contrastive.weight_decay},
        {"projection_hidden", cfg.projection_hidden},
        {"projection_dim", cfg.projection_dim},
        {"holdout_fraction", cfg.contrastive_holdout}}},
      {"head",
       {{"hidden_dim", cfg.head.hidden_dim},
        {"epochs", cfg.head.epochs},
        {"batch_size", cfg.head.batch_size},
        {"learning_rate", cfg.head.learning_rate},
        {"weight_decay", cfg.head.weight_decay},
        {"loss", std::string(loss_name(cfg.head.loss))},
        {"beta", cfg.head.beta}}},
      {"fusion",
       {{"streams", streams},
        {"reduced_dim", cfg.fusion.reduced_dim},
        {"tweet_dim", cfg.fusion.tweet_dim},
        {"hidden_dim", cfg.fusion.hidden_dim},
        {"topology", std::string(topology_name(cfg.fusion.topology))},
        {"epochs", cfg.fusion.epochs},
        {"batch_size", cfg.fusion.batch_size},
        {"learning_rate", cfg.fusion.learning_rate},
        {"weight_decay", cfg.fusion.weight_decay},
        {"loss", std::string(loss_name(cfg.fusion.loss))},
        {"beta", cfg.fusion.beta}}},
      {"eval", {{"split", cfg.eval_split}}},
  };
}

}  // namespace

std::string config_snapshot(const ExperimentConfig& cfg) { return snapshot_json(cfg).dump(); }

std::string config_hash(const ExperimentConfig& cfg) {
  return hex64(fnv1a64(config_snapshot(cfg)));
}

std::vector<MethodTag> embedding_inputs(MethodTag method, const FusionConfig& fusion) {
  if (method != MethodTag::kA4) return {method};
  std::vector<MethodTag> out;
  for (const StreamSpec& s : fusion.streams) out.push_back(s.tag);
  out.push_back(MethodTag::kA2Tweet);
  return canonical(out);
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Writes through a temporary file so readers never observe partial output.
void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_json(const fs::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
  json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw ParseError("invalid JSON in " + path.string());
  return j;
}

std::string file_hash(const fs::path& path) { return hex64(fnv1a64(read_file(path))); }

bool stamp_matches(const fs::path& stamp, const std::string& input_hash) {
  if (!fs::exists(stamp)) return false;
  json j = json::parse(read_file(stamp), nullptr, false);
  return !j.is_discarded() && j.is_object() && j.value("input_hash", "") == input_hash;
}

void write_stamp(const fs::path& stamp, const std::string& input_hash) {
  write_json(stamp, {{"input_hash", input_hash}});
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string method_str(MethodTag m) { return std::string(method_name(m)); }

const std::vector<LabeledText>& split_part(const CorpusSplit& s, const std::string& which) {
  if (which == "train") return s.train;
  if (which == "validation") return s.validation;
  return s.test;
}

// A text embedder for one method, keyed for the cache.
struct Source {
  MethodTag method = MethodTag::kA1;
  std::string model_id;
  std::string fingerprint;
  std::size_t dim = 0;
  std::function<std::vector<float>(const std::string&, EncodeCounters&)> embed;

  RecordKey key(const std::string& text) const {
    return {method, model_id, fingerprint, text_hash(text)};
  }
};

struct Dataset {
  const DatasetConfig* config = nullptr;
  std::vector<LabeledText> corpus;
  CorpusSplit split;
  std::string split_hash;
};

}  // namespace

struct detail::PipelineState {
  std::optional<WordVectorTable> table;
  std::unique_ptr<HashedContextEncoder> generic;
  std::unique_ptr<HashedContextEncoder> tweet;
  std::unique_ptr<HashedContextEncoder> tuned;
  std::map<MethodTag, Source> sources;
  std::vector<Dataset> datasets;
  bool datasets_loaded = false;

  // Per-run bookkeeping, reset by begin().
  std::string command;
  fs::path run_dir;
  std::chrono::steady_clock::time_point started;
  json inputs = json::array();
  json outputs = json::array();
  json fingerprints = json::object();
};

Pipeline::Pipeline(ExperimentConfig cfg) : cfg_(std::move(cfg)), state_(std::make_unique<detail::PipelineState>()) {
  validate(cfg_);
}

Pipeline::~Pipeline() = default;

namespace {

fs::path cache_file(const ExperimentConfig& cfg) {
  const fs::path dir = cfg.cache_dir.empty() ? cfg.output_dir / "cache" : cfg.cache_dir;
  return dir / "embeddings.bin";
}

fs::path split_path(const ExperimentConfig& cfg, const std::string& dataset) {
  return cfg.output_dir / "ingest" / dataset / "split.json";
}

fs::path model_dir(const ExperimentConfig& cfg, const std::string& dataset, MethodTag m) {
  return cfg.output_dir / "models" / dataset / method_str(m);
}

fs::path predictions_path(const ExperimentConfig& cfg, const std::string& dataset, MethodTag m) {
  return cfg.output_dir / "eval" / dataset / (method_str(m) + ".predictions.jsonl");
}

fs::path begin_run_dir(const fs::path& out, const std::string& verb) {
  const fs::path runs = out / "runs";
  fs::create_directories(runs);
  int next = 1;
  for (const auto& entry : fs::directory_iterator(runs)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > 4 && std::all_of(name.begin(), name.begin() + 4, ::isdigit)) {
      next = std::max(next, std::stoi(name.substr(0, 4)) + 1);
    }
  }
  while (true) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d", next);
    fs::path dir = runs / (std::string(buf) + "-" + verb);
    std::error_code ec;
    if (fs::create_directory(dir, ec)) return dir;
    if (ec) throw IoError("cannot create run directory " + dir.string() + ": " + ec.message());
    ++next;
  }
}

}  // namespace


namespace {

using detail::PipelineState;

std::string relative_to(const fs::path& path, const fs::path& root) {
  const fs::path rel = fs::absolute(path).lexically_normal().lexically_relative(
      fs::absolute(root).lexically_normal());
  if (rel.empty() || *rel.begin() == "..") return path.string();
  return rel.generic_string();
}

void begin(PipelineState& st, const ExperimentConfig& cfg, const std::string& verb) {
  st.command = verb;
  st.run_dir = begin_run_dir(cfg.output_dir, verb);
  st.started = std::chrono::steady_clock::now();
  st.inputs = json::array();
  st.outputs = json::array();
  st.fingerprints = json::object();
}

void record(json& list, const ExperimentConfig& cfg, const fs::path& path) {
  list.push_back({{"path", relative_to(path, cfg.output_dir)}, {"hash", file_hash(path)}});
}

StageResult finish(PipelineState& st, const ExperimentConfig& cfg, json summary, bool reused,
                   const EncodeCounters& counters = {}) {
  json dataset_hashes = json::object();
  for (const DatasetConfig& d : cfg.datasets) dataset_hashes[d.name] = file_hash(d.path);
  json manifest = {
      {"tool_version", std::string(tool_version())},
      {"command", st.command},
      {"config_hash", config_hash(cfg)},
      {"seed", cfg.seed},
      {"dataset_hashes", dataset_hashes},
      {"fingerprints", st.fingerprints},
      {"inputs", st.inputs},
      {"outputs", st.outputs},
      {"reused", reused},
      {"wall_seconds", {{st.command, seconds_since(st.started)}}},
      {"summary", summary},
  };
  write_json(st.run_dir / "manifest.json", manifest);
  write_file(cfg.output_dir / "latest", relative_to(st.run_dir, cfg.output_dir) + "\n");

  StageResult result;
  result.command = st.command;
  result.run_dir = st.run_dir;
  result.reused = reused;
  result.counters = counters;
  result.summary = summary.dump();
  return result;
}

void load_datasets(PipelineState& st, const ExperimentConfig& cfg) {
  if (st.datasets_loaded) return;
  std::vector<Dataset> out;
  for (const DatasetConfig& d : cfg.datasets) {
    const fs::path sp = split_path(cfg, d.name);
    if (!fs::exists(sp)) {
      throw PrerequisiteError("split manifest for dataset '" + d.name +
                                  "' is missing; run `scl ingest` first",
                              "ingest");
    }
    Dataset ds;
    ds.config = &d;
    ds.corpus = load_labeled(d.path, d.format, d.name);
    ds.split = apply_manifest(ds.corpus, read_split_manifest(sp));
    ds.split_hash = file_hash(sp);
    out.push_back(std::move(ds));
  }
  st.datasets = std::move(out);
  st.datasets_loaded = true;
}

json corpus_stats(const std::vector<LabeledText>& corpus, const CorpusSplit& s,
                  const std::string& content_hash) {
  std::size_t positives = 0;
  for (const LabeledText& r : corpus) positives += r.label == Label::kSarcastic ? 1 : 0;
  return {{"samples", corpus.size()},
          {"sarcastic", positives},
          {"non_sarcastic", corpus.size() - positives},
          {"positive_base_rate",
           corpus.empty() ? 0.0 : static_cast<double>(positives) / corpus.size()},
          {"train", s.train.size()},
          {"validation", s.validation.size()},
          {"test", s.test.size()},
          {"content_hash", content_hash}};
}

fs::path word_vector_path(const ExperimentConfig& cfg) {
  if (cfg.wordvec.source == WordVecSettings::Source::kFile) return *cfg.wordvec.path;
  return cfg.output_dir / "wordvec" / "vectors.txt";
}

fs::path tuned_encoder_path(const ExperimentConfig& cfg) {
  return cfg.output_dir / "finetune" / "encoder.bin";
}

const EncoderSettings& finetune_base(const ExperimentConfig& cfg) {
  return cfg.finetune_target == FinetuneTarget::kTweet ? cfg.tweet_encoder : cfg.generic_encoder;
}

Source encoder_source(MethodTag m, const HashedContextEncoder& enc, const PoolingOptions& pooling) {
  Source s;
  s.method = m;
  s.model_id = enc.model_id();
  s.fingerprint = enc.weights_fingerprint();
  s.dim = enc.hidden_dim();
  s.embed = [&enc, pooling](const std::string& text, EncodeCounters& counters) {
    return encode_sentence(enc, text, pooling, &counters);
  };
  return s;
}

const Source& source(PipelineState& st, const ExperimentConfig& cfg, MethodTag m) {
  auto it = st.sources.find(m);
  if (it != st.sources.end()) return it->second;
  Source s;
  switch (m) {
    case MethodTag::kA1: {
      const fs::path path = word_vector_path(cfg);
      if (!fs::exists(path)) {
        throw PrerequisiteError("word vectors missing; run `scl embed --method A1` first", "embed");
      }
      st.table = load_word_vectors(path);
      if (st.table->dim() != cfg.wordvec.dim) {
        throw DimensionError("word vectors in " + path.string() + " have dimension " +
                             std::to_string(st.table->dim()) + ", config expects " +
                             std::to_string(cfg.wordvec.dim));
      }
      s.method = m;
      s.model_id = cfg.wordvec.source == WordVecSettings::Source::kFile
                       ? "wordvec:" + path.filename().string()
                       : "wordvec:sgns";
      s.fingerprint = st.table->fingerprint();
      s.dim = cfg.wordvec.features.output_dim(cfg.wordvec.dim);
      const WordVectorTable* table = &*st.table;
      const WordFeatureConfig features = cfg.wordvec.features;
      s.embed = [table, features](const std::string& text, EncodeCounters& counters) {
        ++counters.texts;
        ++counters.encoder_invocations;
        return embed_words(text, *table, features);
      };
      break;
    }
    case MethodTag::kA2Generic:
      st.generic = make_encoder(cfg.generic_encoder.spec, cfg.generic_encoder.weights);
      s = encoder_source(m, *st.generic, cfg.pooling);
      break;
    case MethodTag::kA2Tweet:
      st.tweet = make_encoder(cfg.tweet_encoder.spec, cfg.tweet_encoder.weights);
      s = encoder_source(m, *st.tweet, cfg.pooling);
      break;
    case MethodTag::kA3: {
      const fs::path path = tuned_encoder_path(cfg);
      if (!fs::exists(path)) {
        throw PrerequisiteError("fine-tuned encoder missing; run `scl finetune` first",
                                "finetune");
      }
      st.tuned = HashedContextEncoder::load(path);
      s = encoder_source(m, *st.tuned, cfg.pooling);
      break;
    }
    case MethodTag::kA4:
      throw InvalidArgument("A4 has no embedding stream of its own");
  }
  return st.sources.emplace(m, std::move(s)).first->second;
}

void note_fingerprint(PipelineState& st, const Source& s) {
  st.fingerprints[method_str(s.method)] = {{"model_id", s.model_id},
                                           {"fingerprint", s.fingerprint}};
}

void ensure_word_vectors(PipelineState& st, const ExperimentConfig& cfg, json& summary) {
  if (cfg.wordvec.source == WordVecSettings::Source::kFile) return;
  std::vector<std::string> texts;
  std::string joined;
  for (const Dataset& d : st.datasets) {
    for (const LabeledText& r : d.split.train) {
      texts.push_back(r.text);
      joined += r.text;
      joined += '\n';
    }
  }
  const SkipGramOptions& sg = cfg.wordvec.skipgram;
  const json input = {{"texts", hex64(fnv1a64(joined))},
                      {"dim", cfg.wordvec.dim},
                      {"seed", cfg.seed},
                      {"window", sg.window},
                      {"negative", sg.negative},
                      {"epochs", sg.epochs},
                      {"min_count", sg.min_count},
                      {"learning_rate", sg.learning_rate},
                      {"min_learning_rate", sg.min_learning_rate}};
  const std::string input_hash = hex64(fnv1a64(input.dump()));
  const fs::path path = word_vector_path(cfg);
  const fs::path stamp = path.parent_path() / "stamp.json";
  const bool reuse = fs::exists(path) && stamp_matches(stamp, input_hash);
  if (!reuse) {
    WordVectorTable table = train_word_vectors(texts, cfg.wordvec.dim, cfg.seed, sg);
    save_word_vectors(path, table);
    write_stamp(stamp, input_hash);
    st.sources.erase(MethodTag::kA1);
    st.table.reset();
  }
  summary["word_vectors"] = {{"trained", !reuse}, {"training_texts", texts.size()}};
}

std::vector<float> cached_vector(EmbeddingCache& cache, const Source& src, const LabeledText& r,
                                 const std::string& dataset) {
  auto v = cache.find(src.key(r.text));
  if (!v) {
    throw PrerequisiteError("no cached " + method_str(src.method) + " embedding for sample '" +
                                r.id + "' of dataset '" + dataset + "'; run `scl embed --method " +
                                method_str(src.method) + "` first",
                            "embed");
  }
  if (v->size() != src.dim) {
    throw DimensionError("cached " + method_str(src.method) + " vector for '" + r.id + "' has " +
                         std::to_string(v->size()) + " values, expected " +
                         std::to_string(src.dim));
  }
  return std::move(*v);
}

FeatureSet gather(EmbeddingCache& cache, const Source& src, const std::vector<LabeledText>& rows,
                  const std::string& dataset) {
  FeatureSet out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(src.dim));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::vector<float> v = cached_vector(cache, src, rows[i], dataset);
    for (std::size_t k = 0; k < v.size(); ++k) {
      out.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v[k];
    }
    out.ids.push_back(rows[i].id);
    out.labels.push_back(rows[i].label);
  }
  return out;
}

FusionFeatureSet gather_fusion(EmbeddingCache& cache, const std::vector<const Source*>& streams,
                               const Source& tweet, const FusionConfig& fc,
                               const std::vector<LabeledText>& rows, const std::string& dataset) {
  FusionFeatureSet out;
  const auto n = static_cast<Eigen::Index>(rows.size());
  out.fused.resize(n, static_cast<Eigen::Index>(fc.fused_dim()));
  out.tweet.resize(n, static_cast<Eigen::Index>(fc.tweet_dim));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<std::vector<float>> parts;
    for (const Source* s : streams) parts.push_back(cached_vector(cache, *s, rows[i], dataset));
    std::vector<std::span<const float>> spans(parts.begin(), parts.end());
    out.fused.row(static_cast<Eigen::Index>(i)) = fuse_vectors(spans, fc).transpose();
    const std::vector<float> t = cached_vector(cache, tweet, rows[i], dataset);
    for (std::size_t k = 0; k < t.size(); ++k) {
      out.tweet(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = t[k];
    }
    out.ids.push_back(rows[i].id);
    out.labels.push_back(rows[i].label);
  }
  return out;
}

EmbeddingCache open_cache_read(const ExperimentConfig& cfg, MethodTag m) {
  const fs::path path = cache_file(cfg);
  if (!fs::exists(path)) {
    throw PrerequisiteError("embedding cache " + path.string() + " missing; run `scl embed --method " +
                                method_str(m) + "` first",
                            "embed");
  }
  return EmbeddingCache::open(path, EmbeddingCache::Mode::kReadOnly);
}

json head_json(const HeadConfig& h) {
  return {{"input_dim", h.input_dim},       {"hidden_dim", h.hidden_dim},
          {"epochs", h.epochs},             {"batch_size", h.batch_size},
          {"learning_rate", h.learning_rate}, {"weight_decay", h.weight_decay},
          {"loss", std::string(loss_name(h.loss))}, {"beta", h.beta},
          {"seed", h.seed}};
}

json fusion_json(const FusionConfig& f) {
  json streams = json::array();
  for (const StreamSpec& s : f.streams) {
    streams.push_back({{"tag", method_str(s.tag)}, {"dim", s.dim}});
  }
  return {{"streams", streams},
          {"reduced_dim", f.reduced_dim},
          {"tweet_dim", f.tweet_dim},
          {"topology", std::string(topology_name(f.topology))},
          {"fused_dim", f.fused_dim()},
          {"pre_reduction_dim", f.pre_reduction_dim()},
          {"head_input_dim", f.head_input_dim()},
          {"hidden_dim", f.hidden_dim},
          {"epochs", f.epochs},
          {"batch_size", f.batch_size},
          {"learning_rate", f.learning_rate},
          {"weight_decay", f.weight_decay},
          {"loss", std::string(loss_name(f.loss))},
          {"beta", f.beta},
          {"seed", f.seed}};
}

json log_summary(const TrainLog& log) {
  json out = {{"steps", log.steps}, {"epochs", log.epochs.size()}};
  if (!log.epochs.empty()) {
    out["final_train_loss"] = log.epochs.back().train_loss;
    if (log.epochs.back().validation_accuracy) {
      out["validation_accuracy"] = *log.epochs.back().validation_accuracy;
    }
  }
  return out;
}

void save_log(const fs::path& path, const TrainLog& log) {
  std::ostringstream out;
  write_train_log(out, log);
  write_file(path, out.str());
}

std::vector<PredictionRecord> read_prediction_file(const fs::path& path) {
  std::istringstream in(read_file(path));
  return read_predictions(in);
}

}  // namespace

StageResult Pipeline::ingest() {
  PipelineState& st = *state_;
  begin(st, cfg_, "ingest");
  const fs::path dir = cfg_.output_dir / "ingest";

  json input = {{"seed", cfg_.seed},
                {"split", {cfg_.ratios.train, cfg_.ratios.validation, cfg_.ratios.test}},
                {"holdout", cfg_.contrastive_holdout}};
  for (const DatasetConfig& d : cfg_.datasets) {
    input["datasets"].push_back({{"name", d.name},
                                 {"format", std::string(text_format_name(d.format))},
                                 {"hash", file_hash(d.path)},
                                 {"split_manifest",
                                  d.split_manifest ? json(file_hash(*d.split_manifest)) : json()}});
    record(st.inputs, cfg_, d.path);
    if (d.split_manifest) record(st.inputs, cfg_, *d.split_manifest);
  }
  if (cfg_.translations) {
    input["translations"] = file_hash(*cfg_.translations);
    record(st.inputs, cfg_, *cfg_.translations);
  }
  const std::string input_hash = hex64(fnv1a64(input.dump()));
  const fs::path stamp = dir / "stamp.json";
  bool reused = stamp_matches(stamp, input_hash);
  for (const DatasetConfig& d : cfg_.datasets) {
    reused = reused && fs::exists(split_path(cfg_, d.name));
  }

  if (!reused) {
    for (const DatasetConfig& d : cfg_.datasets) {
      const std::vector<LabeledText> corpus = load_labeled(d.path, d.format, d.name);
      const CorpusSplit s = d.split_manifest
                                ? apply_manifest(corpus, read_split_manifest(*d.split_manifest))
                                : split(corpus, cfg_.ratios, cfg_.seed);
      write_split_manifest(split_path(cfg_, d.name), manifest_of(s));
      write_json(dir / d.name / "stats.json", corpus_stats(corpus, s, file_hash(d.path)));
    }
    if (cfg_.translations) {
      const std::vector<TranslationPair> raw = load_translations(*cfg_.translations);
      std::size_t raw_translations = 0;
      for (const TranslationPair& p : raw) raw_translations += p.non_sarcastic.size();
      std::vector<TranslationPair> pairs = dedup_translations(raw);
      std::size_t kept_translations = 0;
      for (const TranslationPair& p : pairs) kept_translations += p.non_sarcastic.size();

      std::vector<std::size_t> order(pairs.size());
      std::iota(order.begin(), order.end(), 0);
      nn::Rng rng(cfg_.seed);
      std::shuffle(order.begin(), order.end(), rng);
      std::size_t held = static_cast<std::size_t>(
          std::floor(static_cast<double>(pairs.size()) * cfg_.contrastive_holdout + 1e-9));
      if (held == 1) held = 2;
      if (held > 0 && pairs.size() < held + 2) {
        throw ConfigError("too few translation pairs (" + std::to_string(pairs.size()) +
                          ") for contrastive.holdout_fraction");
      }
      std::vector<bool> is_held(pairs.size(), false);
      for (std::size_t i = 0; i < held; ++i) is_held[order[i]] = true;
      std::vector<TranslationPair> train_pairs;
      std::vector<TranslationPair> held_pairs;
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        (is_held[i] ? held_pairs : train_pairs).push_back(pairs[i]);
      }
      const std::vector<TripletExample> triplets = build_triplets(train_pairs, cfg_.seed);
      const std::vector<TripletExample> held_triplets =
          held_pairs.empty() ? std::vector<TripletExample>{}
                             : build_triplets(held_pairs, cfg_.seed ^ 0x9e3779b97f4a7c15ULL);
      std::ostringstream t1;
      write_triplets(t1, triplets);
      write_file(dir / "triplets.jsonl", t1.str());
      std::ostringstream t2;
      write_triplets(t2, held_triplets);
      write_file(dir / "triplets.heldout.jsonl", t2.str());
      write_json(dir / "translations.json",
                 {{"pairs_raw", raw.size()},
                  {"pairs_kept", pairs.size()},
                  {"translations_raw", raw_translations},
                  {"translations_kept", kept_translations},
                  {"pairs_train", train_pairs.size()},
                  {"pairs_heldout", held_pairs.size()},
                  {"triplets", triplets.size()},
                  {"triplets_heldout", held_triplets.size()}});
    }
    write_stamp(stamp, input_hash);
    st.datasets_loaded = false;
  }

  json summary = {{"datasets", json::object()}};
  for (const DatasetConfig& d : cfg_.datasets) {
    summary["datasets"][d.name] = read_json(dir / d.name / "stats.json");
    record(st.outputs, cfg_, split_path(cfg_, d.name));
  }
  if (cfg_.translations) {
    summary["translations"] = read_json(dir / "translations.json");
    record(st.outputs, cfg_, dir / "triplets.jsonl");
    record(st.outputs, cfg_, dir / "triplets.heldout.jsonl");
  }
  return finish(st, cfg_, summary, reused);
}

StageResult Pipeline::embed(MethodTag method) {
  PipelineState& st = *state_;
  begin(st, cfg_, "embed");
  load_datasets(st, cfg_);
  const fs::path cache_path = cache_file(cfg_);
  EmbeddingCache cache = EmbeddingCache::open(cache_path, EmbeddingCache::Mode::kReadWrite);

  EncodeCounters total;
  json summary = {{"method", method_str(method)}, {"streams", json::object()}};
  for (MethodTag m : embedding_inputs(method, cfg_.fusion)) {
    if (m == MethodTag::kA1) ensure_word_vectors(st, cfg_, summary);
    const Source& src = source(st, cfg_, m);
    note_fingerprint(st, src);
    EncodeCounters counters;
    std::size_t hits = 0;
    std::unordered_set<std::string> seen;
    for (const Dataset& d : st.datasets) {
      for (const LabeledText& r : d.corpus) {
        const RecordKey key = src.key(r.text);
        if (!seen.insert(key.text_hash).second) continue;
        if (cache.find(key)) {
          ++hits;
          continue;
        }
        try {
          const std::vector<float> v = src.embed(r.text, counters);
          if (v.size() != src.dim) {
            throw DimensionError(method_str(m) + " produced " + std::to_string(v.size()) +
                                 " values, expected " + std::to_string(src.dim));
          }
          cache.put(key, v);
        } catch (const Error& e) {
          throw InvalidArgument("sample '" + r.id + "' of dataset '" + d.config->name +
                                "': " + e.what());
        }
      }
    }
    summary["streams"][method_str(m)] = {{"texts", seen.size()},
                                         {"cache_hits", hits},
                                         {"encoder_invocations", counters.encoder_invocations},
                                         {"truncated", counters.truncated},
                                         {"dim", src.dim}};
    total.texts += seen.size();
    total.truncated += counters.truncated;
    total.encoder_invocations += counters.encoder_invocations;
  }
  summary["encoder_invocations"] = total.encoder_invocations;
  summary["corrupt_entries"] = cache.stats().corrupt;
  write_json(st.run_dir / "counters.json", summary);
  return finish(st, cfg_, summary, total.encoder_invocations == 0, total);
}

StageResult Pipeline::finetune() {
  PipelineState& st = *state_;
  begin(st, cfg_, "finetune");
  if (!cfg_.translations) {
    throw ConfigError("finetune needs a translations file (config key 'translations')");
  }
  const fs::path ingest_dir = cfg_.output_dir / "ingest";
  const fs::path triplet_path = ingest_dir / "triplets.jsonl";
  const fs::path held_path = ingest_dir / "triplets.heldout.jsonl";
  if (!fs::exists(triplet_path) || !fs::exists(held_path)) {
    throw PrerequisiteError("contrastive triplets missing; run `scl ingest` first", "ingest");
  }
  record(st.inputs, cfg_, triplet_path);
  record(st.inputs, cfg_, held_path);

  const EncoderSettings& base_cfg = finetune_base(cfg_);
  std::unique_ptr<HashedContextEncoder> encoder = make_encoder(base_cfg.spec, base_cfg.weights);
  const ContrastiveConfig& cc = cfg_.contrastive;
  const json input = {{"triplets", file_hash(triplet_path)},
                      {"heldout", file_hash(held_path)},
                      {"model_id", encoder->model_id()},
                      {"fingerprint", encoder->weights_fingerprint()},
                      {"temperature", cc.temperature},
                      {"epochs", cc.epochs},
                      {"batch_size", cc.batch_size},
                      {"learning_rate", cc.learning_rate},
                      {"weight_decay", cc.weight_decay},
                      {"seed", cc.seed},
                      {"pooling", cc.pooling.exclude_special_tokens},
                      {"projection", {cfg_.projection_hidden, cfg_.projection_dim}}};
  const std::string input_hash = hex64(fnv1a64(input.dump()));
  const fs::path dir = cfg_.output_dir / "finetune";
  const fs::path weights = tuned_encoder_path(cfg_);
  const bool reused = fs::exists(weights) && fs::exists(dir / "result.json") &&
                      stamp_matches(dir / "stamp.json", input_hash);

  if (!reused) {
    std::istringstream tin(read_file(triplet_path));
    const std::vector<TripletExample> triplets = parse_triplets(tin);
    std::istringstream hin(read_file(held_path));
    const std::vector<TripletExample> held = parse_triplets(hin);

    ProjectionHead head(encoder->hidden_dim(), cfg_.projection_hidden, cfg_.projection_dim);
    nn::Rng rng(cc.seed);
    head.init(rng);
    json result = {{"model_id", encoder->model_id()},
                   {"triplets", triplets.size()},
                   {"heldout_triplets", held.size()}};
    if (!held.empty()) result["heldout_loss_before"] = mean_triplet_loss(*encoder, head, held, cc);
    const FinetuneResult fr = scl::finetune(*encoder, head, triplets, cc);
    if (!held.empty()) result["heldout_loss_after"] = mean_triplet_loss(*encoder, head, held, cc);
    result["fingerprint_before"] = fr.fingerprint_before;
    result["fingerprint_after"] = fr.fingerprint_after;
    result["steps"] = fr.steps;
    json epochs = json::array();
    for (const ContrastiveEpoch& e : fr.log) {
      epochs.push_back({{"epoch", e.epoch}, {"mean_loss", e.mean_loss}});
    }
    result["epochs"] = epochs;

    encoder->save(weights);
    std::ostringstream log;
    write_training_log(log, fr.log);
    write_file(dir / "log.jsonl", log.str());
    write_json(dir / "result.json", result);
    write_stamp(dir / "stamp.json", input_hash);
    st.sources.erase(MethodTag::kA3);
    st.tuned.reset();
  }
  const json result = read_json(dir / "result.json");
  st.fingerprints["A3"] = {{"model_id", result.value("model_id", "")},
                           {"fingerprint_before", result.value("fingerprint_before", "")},
                           {"fingerprint", result.value("fingerprint_after", "")}};
  record(st.outputs, cfg_, weights);
  record(st.outputs, cfg_, dir / "log.jsonl");
  return finish(st, cfg_, result, reused);
}

StageResult Pipeline::train(MethodTag method) {
  PipelineState& st = *state_;
  begin(st, cfg_, "train");
  load_datasets(st, cfg_);
  EmbeddingCache cache = open_cache_read(cfg_, method);

  json summary = {{"method", method_str(method)}, {"datasets", json::object()}};
  bool all_reused = true;
  for (const Dataset& d : st.datasets) {
    const std::string& name = d.config->name;
    const fs::path dir = model_dir(cfg_, name, method);
    json input = {{"method", method_str(method)}, {"split", d.split_hash}};
    json meta;
    bool reused = false;
    if (method == MethodTag::kA4) {
      FusionConfig fc = cfg_.fusion;
      std::vector<const Source*> streams;
      for (StreamSpec& s : fc.streams) {
        const Source& src = source(st, cfg_, s.tag);
        if (src.dim != s.dim) {
          throw DimensionError("fusion stream " + method_str(s.tag) + " has width " +
                               std::to_string(src.dim) + ", config expects " +
                               std::to_string(s.dim));
        }
        streams.push_back(&src);
        note_fingerprint(st, src);
        input["sources"][method_str(s.tag)] = src.fingerprint;
      }
      const Source& tweet = source(st, cfg_, MethodTag::kA2Tweet);
      note_fingerprint(st, tweet);
      if (tweet.dim != fc.tweet_dim) throw DimensionError("tweet stream width mismatch");
      input["sources"]["A2_TWEET"] = tweet.fingerprint;
      input["fusion"] = fusion_json(fc);
      const std::string input_hash = hex64(fnv1a64(input.dump()));
      reused = fs::exists(dir / "model.bin") && stamp_matches(dir / "stamp.json", input_hash);
      if (!reused) {
        const FusionFeatureSet tr =
            gather_fusion(cache, streams, tweet, fc, d.split.train, name);
        const FusionFeatureSet va =
            gather_fusion(cache, streams, tweet, fc, d.split.validation, name);
        TrainedFusion trained = train_fusion(tr, va.size() ? &va : nullptr, fc);
        save_fusion(dir / "model.bin", trained.model);
        save_log(dir / "log.jsonl", trained.log);
        meta = {{"method", "A4"},
                {"dataset", name},
                {"config", fusion_json(fc)},
                {"sources", input["sources"]},
                {"train_samples", tr.size()},
                {"validation_samples", va.size()},
                {"log", log_summary(trained.log)}};
        write_json(dir / "meta.json", meta);
        write_stamp(dir / "stamp.json", input_hash);
      }
    } else {
      const Source& src = source(st, cfg_, method);
      note_fingerprint(st, src);
      HeadConfig hc = cfg_.head;
      hc.input_dim = src.dim;
      input["source"] = {{"model_id", src.model_id}, {"fingerprint", src.fingerprint}};
      input["head"] = head_json(hc);
      const std::string input_hash = hex64(fnv1a64(input.dump()));
      reused = fs::exists(dir / "model.bin") && stamp_matches(dir / "stamp.json", input_hash);
      if (!reused) {
        const FeatureSet tr = gather(cache, src, d.split.train, name);
        const FeatureSet va = gather(cache, src, d.split.validation, name);
        TrainedHead trained = train_head(tr, va.size() ? &va : nullptr, hc);
        save_head(dir / "model.bin", trained.head);
        save_log(dir / "log.jsonl", trained.log);
        meta = {{"method", method_str(method)},
                {"dataset", name},
                {"config", head_json(hc)},
                {"source", input["source"]},
                {"train_samples", tr.size()},
                {"validation_samples", va.size()},
                {"log", log_summary(trained.log)}};
        write_json(dir / "meta.json", meta);
        write_stamp(dir / "stamp.json", input_hash);
      }
    }
    all_reused = all_reused && reused;
    json entry = read_json(dir / "meta.json");
    entry["reused"] = reused;
    summary["datasets"][name] = entry;
    record(st.outputs, cfg_, dir / "model.bin");
  }
  return finish(st, cfg_, summary, all_reused);
}

StageResult Pipeline::eval(const std::vector<MethodTag>& requested) {
  PipelineState& st = *state_;
  begin(st, cfg_, "eval");
  const std::vector<MethodTag> methods = canonical(requested.empty() ? cfg_.methods : requested);
  load_datasets(st, cfg_);
  for (const Dataset& d : st.datasets) {
    for (MethodTag m : methods) {
      if (!fs::exists(model_dir(cfg_, d.config->name, m) / "model.bin")) {
        throw PrerequisiteError("no trained " + method_str(m) + " model for dataset '" +
                                    d.config->name + "'; run `scl train --method " +
                                    method_str(m) + "` first",
                                "train");
      }
    }
  }
  EmbeddingCache cache = open_cache_read(cfg_, methods.front());
  record(st.inputs, cfg_, cache_file(cfg_));

  std::vector<MetricRow> rows;
  std::vector<std::string> names;
  for (const Dataset& d : st.datasets) {
    const std::string& name = d.config->name;
    names.push_back(name);
    record(st.inputs, cfg_, d.config->path);
    record(st.inputs, cfg_, split_path(cfg_, name));
    const std::vector<LabeledText>& samples = split_part(d.split, cfg_.eval_split);
    if (samples.empty()) {
      throw InvalidArgument("dataset '" + name + "' has an empty " + cfg_.eval_split + " split");
    }
    for (MethodTag m : methods) {
      const fs::path model_path = model_dir(cfg_, name, m) / "model.bin";
      record(st.inputs, cfg_, model_path);
      std::vector<PredictionRecord> preds;
      if (m == MethodTag::kA4) {
        FusionModel model = load_fusion(model_path);
        const FusionConfig& fc = model.config();
        std::vector<const Source*> streams;
        for (const StreamSpec& s : fc.streams) {
          const Source& src = source(st, cfg_, s.tag);
          if (src.dim != s.dim) {
            throw DimensionError("model expects " + method_str(s.tag) + " width " +
                                 std::to_string(s.dim) + ", stream provides " +
                                 std::to_string(src.dim));
          }
          streams.push_back(&src);
          note_fingerprint(st, src);
        }
        const Source& tweet = source(st, cfg_, MethodTag::kA2Tweet);
        note_fingerprint(st, tweet);
        preds = predict(model, gather_fusion(cache, streams, tweet, fc, samples, name));
      } else {
        const Source& src = source(st, cfg_, m);
        note_fingerprint(st, src);
        MlpHead head = load_head(model_path);
        preds = predict(head, gather(cache, src, samples, name), m);
      }
      std::ostringstream out;
      write_predictions(out, preds);
      const fs::path pp = predictions_path(cfg_, name, m);
      write_file(pp, out.str());
      record(st.outputs, cfg_, pp);
      rows.push_back(score(confusion(preds), method_str(m), name));
    }
  }
  const fs::path eval_dir = cfg_.output_dir / "eval";
  const std::string metrics_json = render_json(rows);
  write_file(eval_dir / "metrics.json", metrics_json);
  write_file(eval_dir / "metrics.csv", render_csv(rows, names));
  write_file(eval_dir / "metrics.txt", render_text(rows, names));
  write_file(st.run_dir / "metrics.json", metrics_json);
  write_file(st.run_dir / "metrics.csv", render_csv(rows, names));
  write_file(st.run_dir / "metrics.txt", render_text(rows, names));
  record(st.outputs, cfg_, eval_dir / "metrics.json");
  json summary = {{"split", cfg_.eval_split}, {"metrics", json::parse(metrics_json)}};
  return finish(st, cfg_, summary, false);
}

StageResult Pipeline::analyze(std::optional<MethodTag> from, std::optional<MethodTag> to) {
  PipelineState& st = *state_;
  begin(st, cfg_, "analyze");
  load_datasets(st, cfg_);
  std::vector<MethodTag> candidates = cfg_.methods;
  if (from) candidates.push_back(*from);
  if (to) candidates.push_back(*to);
  candidates = canonical(candidates);

  json summary = {{"split", cfg_.eval_split}, {"datasets", json::object()}};
  for (const Dataset& d : st.datasets) {
    const std::string& name = d.config->name;
    std::vector<MethodTag> available;
    for (MethodTag m : candidates) {
      if (fs::exists(predictions_path(cfg_, name, m))) available.push_back(m);
    }
    auto require = [&](MethodTag m) {
      if (std::find(available.begin(), available.end(), m) == available.end()) {
        throw PrerequisiteError("no " + method_str(m) + " predictions for dataset '" + name +
                                    "'; run `scl eval` first",
                                "eval");
      }
    };
    std::vector<std::pair<MethodTag, MethodTag>> pairs;
    if (from && to) {
      require(*from);
      require(*to);
      pairs.emplace_back(*from, *to);
    } else if (from || to) {
      const MethodTag anchor = from ? *from : *to;
      require(anchor);
      const auto it = std::find(available.begin(), available.end(), anchor);
      if (from) {
        if (it + 1 == available.end()) {
          throw PrerequisiteError("no predictions for a method after " + method_str(anchor) +
                                      "; run `scl eval` first",
                                  "eval");
        }
        pairs.emplace_back(anchor, *(it + 1));
      } else {
        if (it == available.begin()) {
          throw PrerequisiteError("no predictions for a method before " + method_str(anchor) +
                                      "; run `scl eval` first",
                                  "eval");
        }
        pairs.emplace_back(*(it - 1), anchor);
      }
    } else {
      if (available.size() < 2) {
        throw PrerequisiteError("analysis needs predictions for at least two methods on '" +
                                    name + "'; run `scl eval` first",
                                "eval");
      }
      for (std::size_t i = 0; i + 1 < available.size(); ++i) {
        pairs.emplace_back(available[i], available[i + 1]);
      }
    }

    std::vector<PredictionRecord> records;
    for (MethodTag m : available) {
      const fs::path pp = predictions_path(cfg_, name, m);
      record(st.inputs, cfg_, pp);
      std::vector<PredictionRecord> r = read_prediction_file(pp);
      records.insert(records.end(), r.begin(), r.end());
    }
    const PredictionMatrix matrix = build_matrix(records);
    const double n = static_cast<double>(matrix.sample_ids().size());
    const fs::path dir = cfg_.output_dir / "analysis" / name;
    json reports = json::array();
    for (const auto& [a, b] : pairs) {
      const FlipReport report = flips(matrix, a, b);
      const ReviewBundle bundle = export_review_bundle(matrix, report, d.corpus);
      const std::string stem = method_str(a) + "__" + method_str(b);
      std::ostringstream jl;
      write_review_jsonl(jl, bundle);
      write_file(dir / (stem + ".review.jsonl"), jl.str());
      std::ostringstream md;
      write_review_markdown(md, bundle);
      write_file(dir / (stem + ".review.md"), md.str());
      record(st.outputs, cfg_, dir / (stem + ".review.jsonl"));

      const auto correct_a = static_cast<long long>(matrix.correct_count(a));
      const auto correct_b = static_cast<long long>(matrix.correct_count(b));
      const auto fixed = static_cast<long long>(report.fixed.size());
      const auto broken = static_cast<long long>(report.broken.size());
      reports.push_back({{"from", method_str(a)},
                         {"to", method_str(b)},
                         {"fixed", fixed},
                         {"broken", broken},
                         {"still_wrong", report.still_wrong.size()},
                         {"correct_from", correct_a},
                         {"correct_to", correct_b},
                         {"accuracy_from", 100.0 * correct_a / n},
                         {"accuracy_to", 100.0 * correct_b / n},
                         {"identity_holds", fixed - broken == correct_b - correct_a}});
    }
    write_json(dir / "flips.json", reports);
    summary["datasets"][name] = reports;
  }
  return finish(st, cfg_, summary, false);
}

std::vector<StageResult> Pipeline::run_all() {
  std::vector<StageResult> results;
  results.push_back(ingest());
  std::vector<MethodTag> needed;
  for (MethodTag m : cfg_.methods) {
    for (MethodTag in : embedding_inputs(m, cfg_.fusion)) needed.push_back(in);
  }
  needed = canonical(needed);
  if (std::find(needed.begin(), needed.end(), MethodTag::kA3) != needed.end()) {
    results.push_back(finetune());
  }
  for (MethodTag m : needed) results.push_back(embed(m));
  for (MethodTag m : cfg_.methods) results.push_back(train(m));
  results.push_back(eval(cfg_.methods));
  if (cfg_.methods.size() >= 2) results.push_back(analyze(std::nullopt, std::nullopt));
  return results;
}

}  // namespace scl
