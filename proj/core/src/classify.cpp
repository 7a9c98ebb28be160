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

#include "scl/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "json.hpp"
#include "scl/errors.hpp"

namespace scl {

using nlohmann::json;

namespace {

constexpr char kHeadMagic[8] = {'S', 'C', 'L', 'H', 'E', 'A', 'D', '1'};
constexpr char kFusionMagic[8] = {'S', 'C', 'L', 'F', 'U', 'S', 'E', '1'};

void check_dim(const nn::Vector& x, std::size_t expected, const char* what) {
  if (static_cast<std::size_t>(x.size()) != expected) {
    throw DimensionError(std::string(what) + " expects length " + std::to_string(expected) +
                         ", got " + std::to_string(x.size()));
  }
}

struct Schedule {
  std::size_t epochs;
  std::size_t batch_size;
  double learning_rate;
  double weight_decay;
  LossKind loss;
  double beta;
};

// Shared mini-batch loop. `forward(i, tape)` returns logits for sample i,
// `backward(tape, grad)` accumulates gradients, `validate()` returns the
// validation accuracy if any.
template <typename Tape, typename Forward, typename Backward, typename Validate>
TrainLog run_training(const std::vector<Label>& labels, const Schedule& s,
                      std::vector<nn::Parameter> params, nn::Rng& rng, Forward&& forward,
                      Backward&& backward, Validate&& validate) {
  if (labels.empty()) throw InvalidArgument("training needs at least one sample");
  if (s.batch_size == 0) throw InvalidArgument("batch_size must be at least 1");
  TrainLog log;
  if (s.epochs == 0) return log;
  nn::AdamW optimizer(std::move(params),
                      {.learning_rate = s.learning_rate, .weight_decay = s.weight_decay});
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<Tape> tapes;
  std::vector<nn::Vector> logits;
  std::vector<double> probs;
  std::vector<Label> golds;
  for (std::size_t epoch = 1; epoch <= s.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double weighted_loss = 0;
    for (std::size_t start = 0; start < order.size(); start += s.batch_size) {
      const std::size_t end = std::min(order.size(), start + s.batch_size);
      const std::size_t b = end - start;
      tapes.assign(b, Tape{});
      logits.resize(b);
      golds.resize(b);
      probs.resize(b);
      for (std::size_t k = 0; k < b; ++k) {
        const std::size_t i = order[start + k];
        logits[k] = forward(i, tapes[k]);
        golds[k] = labels[i];
        probs[k] = prob_sarcastic(logits[k]);
      }
      double batch_loss = 0;
      std::vector<nn::Vector> grads(b);
      if (s.loss == LossKind::kCrossEntropy) {
        for (std::size_t k = 0; k < b; ++k) {
          batch_loss += cross_entropy_loss(logits[k], golds[k]);
          grads[k] = cross_entropy_grad(logits[k], golds[k]) / static_cast<double>(b);
        }
        batch_loss /= static_cast<double>(b);
      } else {
        batch_loss = soft_fbeta_loss(probs, golds, s.beta);
        const std::vector<double> d_prob = soft_fbeta_grad(probs, golds, s.beta);
        for (std::size_t k = 0; k < b; ++k) {
          // p = sigmoid(l1 - l0)
          const double d = d_prob[k] * probs[k] * (1.0 - probs[k]);
          grads[k] = nn::Vector::Zero(logits[k].size());
          grads[k](0) = -d;
          grads[k](1) = d;
        }
      }
      if (!std::isfinite(batch_loss)) {
        throw NumericalError("non-finite training loss at step " + std::to_string(log.steps),
                             log.steps);
      }
      optimizer.zero_grad();
      for (std::size_t k = 0; k < b; ++k) backward(tapes[k], grads[k]);
      optimizer.step();
      ++log.steps;
      weighted_loss += batch_loss * static_cast<double>(b);
    }
    log.epochs.push_back(
        {epoch, weighted_loss / static_cast<double>(labels.size()), validate()});
  }
  return log;
}

template <typename T>
T read_pod(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  return value;
}

void write_artifact(const std::filesystem::path& path, const char (&magic)[8],
                    const json& header, std::span<const nn::Parameter> params) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  const std::string h = header.dump();
  const auto len = static_cast<std::uint32_t>(h.size());
  out.write(magic, 8);
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(h.data(), len);
  nn::write_parameters(out, params);
  if (!out) throw IoError("failed writing " + path.string());
}

json read_artifact_header(std::ifstream& in, const std::filesystem::path& path,
                          const char (&magic)[8]) {
  if (!in) throw IoError("cannot read " + path.string());
  char got[8];
  in.read(got, 8);
  if (!in || std::memcmp(got, magic, 8) != 0) {
    throw ParseError(path.string() + ": unexpected model artifact type");
  }
  const auto len = read_pod<std::uint32_t>(in);
  std::string h(len, '\0');
  in.read(h.data(), len);
  if (!in) throw ParseError(path.string() + ": truncated artifact header");
  try {
    return json::parse(h);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": bad artifact header: " + e.what());
  }
}

json fusion_config_json(const FusionConfig& cfg) {
  json streams = json::array();
  for (const StreamSpec& s : cfg.streams) {
    streams.push_back({{"tag", method_name(s.tag)}, {"dim", s.dim}});
  }
  return {{"streams", streams},
          {"reduced_dim", cfg.reduced_dim},
          {"tweet_dim", cfg.tweet_dim},
          {"topology", topology_name(cfg.topology)},
          {"hidden_dim", cfg.hidden_dim}};
}

}  // namespace

std::string_view loss_name(LossKind kind) {
  return kind == LossKind::kCrossEntropy ? "CROSS_ENTROPY" : "SOFT_FBETA";
}

LossKind parse_loss(std::string_view name) {
  if (name == "CROSS_ENTROPY") return LossKind::kCrossEntropy;
  if (name == "SOFT_FBETA") return LossKind::kSoftFBeta;
  throw ConfigError("unknown loss '" + std::string(name) + "'");
}

MlpHead::MlpHead(std::size_t input_dim, std::size_t hidden_dim, std::size_t output_dim)
    : hidden_(input_dim, hidden_dim), output_(hidden_dim, output_dim) {}

void MlpHead::init(nn::Rng& rng) {
  hidden_.init_uniform(rng);
  output_.init_uniform(rng);
}

nn::Vector MlpHead::forward(const nn::Vector& x) const {
  return output_.forward(nn::relu(hidden_.forward(x)));
}

nn::Vector MlpHead::forward(const nn::Vector& x, Tape& tape) const {
  tape.input = x;
  tape.hidden_pre = hidden_.forward(x);
  tape.hidden = nn::relu(tape.hidden_pre);
  return output_.forward(tape.hidden);
}

nn::Vector MlpHead::backward(const Tape& tape, const nn::Vector& grad_logits) {
  nn::Vector grad_hidden = output_.backward(tape.hidden, grad_logits);
  grad_hidden = (tape.hidden_pre.array() > 0.0).select(grad_hidden, 0.0);
  return hidden_.backward(tape.input, grad_hidden);
}

void MlpHead::zero_grad() {
  hidden_.zero_grad();
  output_.zero_grad();
}

std::vector<nn::Parameter> MlpHead::parameters() {
  std::vector<nn::Parameter> out;
  hidden_.append_parameters(out, "head.hidden");
  output_.append_parameters(out, "head.output");
  return out;
}

nn::Vector head_forward(const MlpHead& head, const nn::Vector& x) {
  check_dim(x, head.input_dim(), "head_forward");
  return head.forward(x);
}

std::string_view topology_name(FusionTopology topology) {
  return topology == FusionTopology::kTweetAfterReduction ? "TWEET_AFTER_REDUCTION"
                                                          : "ALL_PRE_REDUCTION";
}

FusionTopology parse_topology(std::string_view name) {
  if (name == "TWEET_AFTER_REDUCTION") return FusionTopology::kTweetAfterReduction;
  if (name == "ALL_PRE_REDUCTION") return FusionTopology::kAllPreReduction;
  throw ConfigError("unknown fusion topology '" + std::string(name) + "'");
}

std::size_t FusionConfig::fused_dim() const {
  std::size_t total = 0;
  for (const StreamSpec& s : streams) total += s.dim;
  return total;
}

std::size_t FusionConfig::pre_reduction_dim() const {
  return fused_dim() + (topology == FusionTopology::kAllPreReduction ? tweet_dim : 0);
}

std::size_t FusionConfig::head_input_dim() const {
  return reduced_dim + (topology == FusionTopology::kTweetAfterReduction ? tweet_dim : 0);
}

FusionConfig full_scale_fusion_config(std::size_t word_dim, std::size_t max_words,
                                 std::size_t sentence_dim) {
  FusionConfig cfg;
  cfg.streams = {{MethodTag::kA1, word_dim * max_words},
                 {MethodTag::kA2Generic, sentence_dim},
                 {MethodTag::kA3, sentence_dim}};
  cfg.reduced_dim = 768;
  cfg.tweet_dim = sentence_dim;
  return cfg;
}

nn::Vector fuse_vectors(std::span<const std::span<const float>> streams,
                        const FusionConfig& cfg) {
  if (streams.size() != cfg.streams.size()) {
    throw DimensionError("expected " + std::to_string(cfg.streams.size()) +
                         " streams, got " + std::to_string(streams.size()));
  }
  nn::Vector out(static_cast<Eigen::Index>(cfg.fused_dim()));
  Eigen::Index offset = 0;
  for (std::size_t s = 0; s < streams.size(); ++s) {
    if (streams[s].size() != cfg.streams[s].dim) {
      throw DimensionError("stream " + std::string(method_name(cfg.streams[s].tag)) +
                           " has length " + std::to_string(streams[s].size()) +
                           ", expected " + std::to_string(cfg.streams[s].dim));
    }
    for (float v : streams[s]) out(offset++) = v;
  }
  return out;
}

nn::Vector fuse_vectors(std::span<const float> a1, std::span<const float> a2_generic,
                        std::span<const float> a3, const FusionConfig& cfg) {
  const std::span<const float> parts[] = {a1, a2_generic, a3};
  return fuse_vectors(parts, cfg);
}

FusionModel::FusionModel(const FusionConfig& cfg)
    : cfg_(cfg),
      reducer_(cfg.pre_reduction_dim(), cfg.reduced_dim),
      head_(cfg.head_input_dim(), cfg.hidden_dim, 2) {}

void FusionModel::init(nn::Rng& rng) {
  reducer_.init_uniform(rng);
  head_.init(rng);
}

nn::Vector FusionModel::reducer_input(const nn::Vector& fused,
                                      const nn::Vector& tweet) const {
  check_dim(fused, cfg_.fused_dim(), "fusion_forward fused input");
  check_dim(tweet, cfg_.tweet_dim, "fusion_forward tweet input");
  if (cfg_.topology == FusionTopology::kTweetAfterReduction) return fused;
  nn::Vector x(fused.size() + tweet.size());
  x << fused, tweet;
  return x;
}

nn::Vector FusionModel::forward(const nn::Vector& fused, const nn::Vector& tweet) const {
  Tape tape;
  return forward(fused, tweet, tape);
}

nn::Vector FusionModel::forward(const nn::Vector& fused, const nn::Vector& tweet,
                                Tape& tape) const {
  tape.reducer_input = reducer_input(fused, tweet);
  const nn::Vector reduced = reducer_.forward(tape.reducer_input);
  if (cfg_.topology == FusionTopology::kAllPreReduction) {
    return head_.forward(reduced, tape.head);
  }
  nn::Vector head_in(reduced.size() + tweet.size());
  head_in << reduced, tweet;
  return head_.forward(head_in, tape.head);
}

void FusionModel::backward(const Tape& tape, const nn::Vector& grad_logits) {
  const nn::Vector grad_in = head_.backward(tape.head, grad_logits);
  const auto reduced = static_cast<Eigen::Index>(cfg_.reduced_dim);
  reducer_.backward(tape.reducer_input, grad_in.head(reduced));
}

void FusionModel::zero_grad() {
  reducer_.zero_grad();
  head_.zero_grad();
}

std::vector<nn::Parameter> FusionModel::parameters() {
  std::vector<nn::Parameter> out;
  reducer_.append_parameters(out, "reducer");
  for (nn::Parameter& p : head_.parameters()) out.push_back(p);
  return out;
}

nn::Vector fusion_forward(const FusionModel& model, const nn::Vector& fused,
                          const nn::Vector& tweet) {
  return model.forward(fused, tweet);
}

double cross_entropy_loss(const nn::Vector& logits, Label gold) {
  const double peak = logits.maxCoeff();
  const double lse = peak + std::log((logits.array() - peak).exp().sum());
  return std::max(0.0, lse - logits(label_value(gold)));
}

nn::Vector cross_entropy_grad(const nn::Vector& logits, Label gold) {
  nn::Vector g = nn::softmax(logits);
  g(label_value(gold)) -= 1.0;
  return g;
}

namespace {

struct SoftCounts {
  double tp = 0, fp = 0, fn = 0;
};

SoftCounts soft_counts(std::span<const double> probs, std::span<const Label> golds) {
  if (probs.empty()) throw InvalidArgument("soft F-beta loss needs a non-empty batch");
  if (probs.size() != golds.size()) {
    throw InvalidArgument("soft F-beta loss: probs and golds differ in length");
  }
  SoftCounts c;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = probs[i];
    const double y = label_value(golds[i]);
    c.tp += p * y;
    c.fp += p * (1.0 - y);
    c.fn += (1.0 - p) * y;
  }
  return c;
}

}  // namespace

double soft_fbeta_loss(std::span<const double> probs, std::span<const Label> golds,
                       double beta) {
  if (!(beta > 0)) throw InvalidArgument("beta must be positive");
  const SoftCounts c = soft_counts(probs, golds);
  const double b2 = beta * beta;
  const double num = (1.0 + b2) * c.tp;
  return 1.0 - num / (num + b2 * c.fn + c.fp + kSoftFBetaEpsilon);
}

std::vector<double> soft_fbeta_grad(std::span<const double> probs,
                                    std::span<const Label> golds, double beta) {
  if (!(beta > 0)) throw InvalidArgument("beta must be positive");
  const SoftCounts c = soft_counts(probs, golds);
  const double b2 = beta * beta;
  const double num = (1.0 + b2) * c.tp;
  const double den = num + b2 * c.fn + c.fp + kSoftFBetaEpsilon;
  // d num/dp_i = (1+b^2) y_i and d den/dp_i = 1 for every i.
  std::vector<double> g(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double y = label_value(golds[i]);
    g[i] = -((1.0 + b2) * y * den - num) / (den * den);
  }
  return g;
}

double prob_sarcastic(const nn::Vector& logits) {
  if (logits.size() != 2) throw DimensionError("expected two logits");
  return nn::sigmoid(logits(1) - logits(0));
}

Label decide(double prob) { return prob >= 0.5 ? Label::kSarcastic : Label::kNonSarcastic; }

TrainedHead train_head(const FeatureSet& train, const FeatureSet* validation,
                       const HeadConfig& cfg) {
  if (cfg.output_dim != 2) throw InvalidArgument("recognition heads have two outputs");
  if (train.size() == 0) throw InvalidArgument("train_head needs at least one sample");
  if (static_cast<std::size_t>(train.features.cols()) != cfg.input_dim ||
      static_cast<std::size_t>(train.features.rows()) != train.size()) {
    throw DimensionError("training features are " + std::to_string(train.features.rows()) +
                         "x" + std::to_string(train.features.cols()) + ", expected " +
                         std::to_string(train.size()) + "x" + std::to_string(cfg.input_dim));
  }
  nn::Rng rng(cfg.seed);
  TrainedHead out{MlpHead(cfg.input_dim, cfg.hidden_dim, cfg.output_dim), {}};
  out.head.init(rng);
  MlpHead& head = out.head;
  const Schedule schedule{cfg.epochs, cfg.batch_size, cfg.learning_rate,
                          cfg.weight_decay, cfg.loss, cfg.beta};
  out.log = run_training<MlpHead::Tape>(
      train.labels, schedule, head.parameters(), rng,
      [&](std::size_t i, MlpHead::Tape& tape) {
        return head.forward(train.features.row(static_cast<Eigen::Index>(i)).transpose(),
                            tape);
      },
      [&](const MlpHead::Tape& tape, const nn::Vector& g) { head.backward(tape, g); },
      [&]() -> std::optional<double> {
        if (validation == nullptr || validation->size() == 0) return std::nullopt;
        return accuracy(predict(head, *validation, MethodTag::kA1));
      });
  return out;
}

TrainedFusion train_fusion(const FusionFeatureSet& train,
                           const FusionFeatureSet* validation, const FusionConfig& cfg) {
  if (train.size() == 0) throw InvalidArgument("train_fusion needs at least one sample");
  if (static_cast<std::size_t>(train.fused.cols()) != cfg.fused_dim() ||
      static_cast<std::size_t>(train.tweet.cols()) != cfg.tweet_dim ||
      static_cast<std::size_t>(train.fused.rows()) != train.size() ||
      static_cast<std::size_t>(train.tweet.rows()) != train.size()) {
    throw DimensionError("fusion training features do not match the fusion config");
  }
  nn::Rng rng(cfg.seed);
  TrainedFusion out{FusionModel(cfg), {}};
  out.model.init(rng);
  FusionModel& model = out.model;
  const Schedule schedule{cfg.epochs, cfg.batch_size, cfg.learning_rate,
                          cfg.weight_decay, cfg.loss, cfg.beta};
  out.log = run_training<FusionModel::Tape>(
      train.labels, schedule, model.parameters(), rng,
      [&](std::size_t i, FusionModel::Tape& tape) {
        const auto r = static_cast<Eigen::Index>(i);
        return model.forward(train.fused.row(r).transpose(), train.tweet.row(r).transpose(),
                             tape);
      },
      [&](const FusionModel::Tape& tape, const nn::Vector& g) { model.backward(tape, g); },
      [&]() -> std::optional<double> {
        if (validation == nullptr || validation->size() == 0) return std::nullopt;
        return accuracy(predict(model, *validation));
      });
  return out;
}

PredictionRecord make_prediction(std::string sample_id, MethodTag method,
                                 const nn::Vector& logits, Label gold) {
  const double p = prob_sarcastic(logits);
  return {std::move(sample_id), method, p, decide(p), gold};
}

std::vector<PredictionRecord> predict(const MlpHead& head, const FeatureSet& data,
                                      MethodTag method) {
  if (static_cast<std::size_t>(data.features.cols()) != head.input_dim() &&
      data.size() > 0) {
    throw DimensionError("features have " + std::to_string(data.features.cols()) +
                         " columns, head expects " + std::to_string(head.input_dim()));
  }
  std::vector<PredictionRecord> out;
  out.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const nn::Vector logits =
        head.forward(data.features.row(static_cast<Eigen::Index>(i)).transpose());
    out.push_back(make_prediction(data.ids.empty() ? std::to_string(i) : data.ids[i], method,
                                  logits, data.labels[i]));
  }
  return out;
}

std::vector<PredictionRecord> predict(const FusionModel& model,
                                      const FusionFeatureSet& data) {
  std::vector<PredictionRecord> out;
  out.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const nn::Vector logits =
        model.forward(data.fused.row(r).transpose(), data.tweet.row(r).transpose());
    out.push_back(make_prediction(data.ids.empty() ? std::to_string(i) : data.ids[i],
                                  MethodTag::kA4, logits, data.labels[i]));
  }
  return out;
}

double accuracy(const std::vector<PredictionRecord>& records) {
  if (records.empty()) return 0.0;
  const auto correct = std::count_if(records.begin(), records.end(),
                                     [](const PredictionRecord& r) { return r.correct(); });
  return static_cast<double>(correct) / static_cast<double>(records.size());
}

void write_predictions(std::ostream& out, const std::vector<PredictionRecord>& records) {
  for (const PredictionRecord& r : records) {
    json obj = {{"sample_id", r.sample_id},
                {"method_tag", method_name(r.method)},
                {"prob_sarcastic", r.prob_sarcastic},
                {"predicted", label_name(r.predicted)},
                {"gold", label_name(r.gold)}};
    out << obj.dump() << '\n';
  }
}

std::vector<PredictionRecord> read_predictions(std::istream& in) {
  std::vector<PredictionRecord> out;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row;
    try {
      const json obj = json::parse(line);
      PredictionRecord r;
      r.sample_id = obj.at("sample_id").get<std::string>();
      r.method = parse_method_or_throw(obj.at("method_tag").get<std::string>());
      r.prob_sarcastic = obj.at("prob_sarcastic").get<double>();
      const auto predicted = parse_label(obj.at("predicted").get<std::string>());
      const auto gold = parse_label(obj.at("gold").get<std::string>());
      if (!predicted || !gold) throw ParseError("bad label", row);
      r.predicted = *predicted;
      r.gold = *gold;
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw ParseError("row " + std::to_string(row) + ": invalid prediction: " + e.what(), row);
    }
  }
  return out;
}

void write_train_log(std::ostream& out, const TrainLog& log) {
  for (const EpochRecord& e : log.epochs) {
    json obj = {{"epoch", e.epoch}, {"train_loss", e.train_loss}};
    obj["validation_accuracy"] =
        e.validation_accuracy ? json(*e.validation_accuracy) : json(nullptr);
    out << obj.dump() << '\n';
  }
}

void save_head(const std::filesystem::path& path, MlpHead& head) {
  write_artifact(path, kHeadMagic,
                 {{"input_dim", head.input_dim()},
                  {"hidden_dim", head.hidden_dim()},
                  {"output_dim", head.output_dim()}},
                 head.parameters());
}

MlpHead load_head(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  const json h = read_artifact_header(in, path, kHeadMagic);
  MlpHead head(h.at("input_dim").get<std::size_t>(), h.at("hidden_dim").get<std::size_t>(),
               h.at("output_dim").get<std::size_t>());
  nn::read_parameters(in, head.parameters());
  return head;
}

void save_fusion(const std::filesystem::path& path, FusionModel& model) {
  write_artifact(path, kFusionMagic, fusion_config_json(model.config()), model.parameters());
}

FusionModel load_fusion(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  const json h = read_artifact_header(in, path, kFusionMagic);
  FusionConfig cfg;
  try {
    for (const json& s : h.at("streams")) {
      cfg.streams.push_back({parse_method_or_throw(s.at("tag").get<std::string>()),
                             s.at("dim").get<std::size_t>()});
    }
    cfg.reduced_dim = h.at("reduced_dim").get<std::size_t>();
    cfg.tweet_dim = h.at("tweet_dim").get<std::size_t>();
    cfg.topology = parse_topology(h.at("topology").get<std::string>());
    cfg.hidden_dim = h.at("hidden_dim").get<std::size_t>();
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": bad fusion header: " + e.what());
  }
  FusionModel model(cfg);
  nn::read_parameters(in, model.parameters());
  return model;
}

}  // namespace scl
