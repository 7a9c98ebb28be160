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

#include "scl/contrastive.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>

#include "json.hpp"
#include "scl/errors.hpp"

namespace scl {
namespace {

void require_nonzero(double norm, const char* which) {
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw InvalidArgument(std::string("cosine similarity undefined: ") + which +
                          " has zero or non-finite norm");
  }
}

}  // namespace

double cosine_sim(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("cosine similarity of unequal lengths");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  na = std::sqrt(na);
  nb = std::sqrt(nb);
  require_nonzero(na, "first vector");
  require_nonzero(nb, "second vector");
  return std::clamp(dot / (na * nb), -1.0, 1.0);
}

double cosine_sim(const nn::Vector& a, const nn::Vector& b) {
  return cosine_sim(std::span<const double>(a.data(), static_cast<std::size_t>(a.size())),
                    std::span<const double>(b.data(), static_cast<std::size_t>(b.size())));
}

CosineGrad cosine_sim_grad(const nn::Vector& a, const nn::Vector& b) {
  if (a.size() != b.size()) throw InvalidArgument("cosine similarity of unequal lengths");
  const double na = a.norm();
  const double nb = b.norm();
  require_nonzero(na, "first vector");
  require_nonzero(nb, "second vector");
  const double raw = a.dot(b) / (na * nb);
  CosineGrad g;
  g.value = std::clamp(raw, -1.0, 1.0);
  g.d_a = b / (na * nb) - raw * a / (na * na);
  g.d_b = a / (na * nb) - raw * b / (nb * nb);
  return g;
}

double triplet_loss(const TripletEmbeddings& z, double temperature) {
  if (!(temperature > 0)) throw InvalidArgument("temperature must be positive");
  const double s_pos = cosine_sim(z.anchor, z.positive);
  const double s_neg = cosine_sim(z.anchor, z.negative);
  return nn::softplus((s_neg - s_pos) / temperature);
}

double triplet_loss_naive(const TripletEmbeddings& z, double temperature) {
  if (!(temperature > 0)) throw InvalidArgument("temperature must be positive");
  const double e_pos = std::exp(cosine_sim(z.anchor, z.positive) / temperature);
  const double e_neg = std::exp(cosine_sim(z.anchor, z.negative) / temperature);
  return -std::log(e_pos / (e_pos + e_neg));
}

TripletLossGrad triplet_loss_grad(const TripletEmbeddings& z, double temperature) {
  if (!(temperature > 0)) throw InvalidArgument("temperature must be positive");
  const CosineGrad pos = cosine_sim_grad(z.anchor, z.positive);
  const CosineGrad neg = cosine_sim_grad(z.anchor, z.negative);
  const double margin = (neg.value - pos.value) / temperature;
  // dL/ds_neg = sigmoid(margin)/t, dL/ds_pos = -sigmoid(margin)/t.
  const double w = nn::sigmoid(margin) / temperature;
  TripletLossGrad g;
  g.loss = nn::softplus(margin);
  g.d_anchor = w * (neg.d_a - pos.d_a);
  g.d_positive = -w * pos.d_b;
  g.d_negative = w * neg.d_b;
  return g;
}

ProjectionHead::ProjectionHead(std::size_t in_dim, std::size_t hidden_dim,
                               std::size_t out_dim)
    : first_(in_dim, hidden_dim), second_(hidden_dim, out_dim) {}

void ProjectionHead::init(nn::Rng& rng) {
  first_.init_uniform(rng);
  second_.init_uniform(rng);
}

nn::Vector ProjectionHead::forward(const nn::Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != in_dim()) {
    throw DimensionError("projection head expects " + std::to_string(in_dim()) +
                         " inputs, got " + std::to_string(x.size()));
  }
  return second_.forward(nn::relu(first_.forward(x)));
}

nn::Vector ProjectionHead::forward(const nn::Vector& x, Tape& tape) const {
  if (static_cast<std::size_t>(x.size()) != in_dim()) {
    throw DimensionError("projection head expects " + std::to_string(in_dim()) +
                         " inputs, got " + std::to_string(x.size()));
  }
  tape.input = x;
  tape.hidden_pre = first_.forward(x);
  tape.hidden = nn::relu(tape.hidden_pre);
  return second_.forward(tape.hidden);
}

nn::Vector ProjectionHead::backward(const Tape& tape, const nn::Vector& grad_out) {
  nn::Vector grad_hidden = second_.backward(tape.hidden, grad_out);
  grad_hidden = (tape.hidden_pre.array() > 0.0).select(grad_hidden, 0.0);
  return first_.backward(tape.input, grad_hidden);
}

void ProjectionHead::zero_grad() {
  first_.zero_grad();
  second_.zero_grad();
}

std::vector<nn::Parameter> ProjectionHead::parameters() {
  std::vector<nn::Parameter> out;
  first_.append_parameters(out, "projection.0");
  second_.append_parameters(out, "projection.1");
  return out;
}

FinetuneResult finetune(TrainableEncoder& encoder, ProjectionHead& head,
                        const std::vector<TripletExample>& triplets,
                        const ContrastiveConfig& cfg) {
  if (triplets.empty()) throw InvalidArgument("finetune needs at least one triplet");
  if (!(cfg.temperature > 0)) throw InvalidArgument("temperature must be positive");
  if (cfg.batch_size == 0) throw InvalidArgument("batch_size must be at least 1");
  if (head.in_dim() != encoder.hidden_dim()) {
    throw DimensionError("projection head input " + std::to_string(head.in_dim()) +
                         " does not match encoder width " +
                         std::to_string(encoder.hidden_dim()));
  }
  FinetuneResult result;
  result.fingerprint_before = encoder.weights_fingerprint();
  if (cfg.epochs == 0) {
    result.fingerprint_after = result.fingerprint_before;
    return result;
  }

  std::vector<nn::Parameter> params = encoder.parameters();
  for (nn::Parameter& p : head.parameters()) params.push_back(p);
  nn::AdamW optimizer(params, {.learning_rate = cfg.learning_rate,
                               .weight_decay = cfg.weight_decay});

  std::vector<std::size_t> order(triplets.size());
  std::iota(order.begin(), order.end(), 0);
  nn::Rng rng(cfg.seed);

  std::size_t step = 0;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const double scale = 1.0 / static_cast<double>(end - start);
      optimizer.zero_grad();
      for (std::size_t k = start; k < end; ++k) {
        const TripletExample& t = triplets[order[k]];
        std::unique_ptr<ForwardTape> enc_tape[3];
        ProjectionHead::Tape head_tape[3];
        const std::string* texts[3] = {&t.anchor, &t.positive, &t.negative};
        TripletEmbeddings z;
        nn::Vector* slots[3] = {&z.anchor, &z.positive, &z.negative};
        for (int i = 0; i < 3; ++i) {
          const nn::Vector pooled =
              encoder.forward_pooled(encoder.tokenize(*texts[i]), cfg.pooling, &enc_tape[i]);
          *slots[i] = head.forward(pooled, head_tape[i]);
        }
        const TripletLossGrad g = triplet_loss_grad(z, cfg.temperature);
        if (!std::isfinite(g.loss)) {
          throw NumericalError("non-finite contrastive loss at step " + std::to_string(step),
                               step);
        }
        loss_sum += g.loss;
        const nn::Vector* grads[3] = {&g.d_anchor, &g.d_positive, &g.d_negative};
        for (int i = 0; i < 3; ++i) {
          const nn::Vector grad_pooled = head.backward(head_tape[i], *grads[i] * scale);
          encoder.backward_pooled(*enc_tape[i], grad_pooled);
        }
      }
      optimizer.step();
      ++step;
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
    result.log.push_back(
        {epoch, loss_sum / static_cast<double>(triplets.size()), elapsed.count()});
  }
  result.steps = step;
  // Parameters were written through raw views; refresh the fingerprint.
  encoder.parameters();
  result.fingerprint_after = encoder.weights_fingerprint();
  return result;
}

double mean_triplet_loss(const TrainableEncoder& encoder, const ProjectionHead& head,
                         const std::vector<TripletExample>& triplets,
                         const ContrastiveConfig& cfg) {
  if (triplets.empty()) throw InvalidArgument("no triplets to evaluate");
  double sum = 0;
  for (const TripletExample& t : triplets) {
    auto project = [&](const std::string& text) {
      return head.forward(encoder.forward_pooled(encoder.tokenize(text), cfg.pooling, nullptr));
    };
    sum += triplet_loss({project(t.anchor), project(t.positive), project(t.negative)},
                        cfg.temperature);
  }
  return sum / static_cast<double>(triplets.size());
}

void write_training_log(std::ostream& out, const std::vector<ContrastiveEpoch>& log) {
  for (const ContrastiveEpoch& e : log) {
    nlohmann::json obj = {
        {"epoch", e.epoch}, {"mean_loss", e.mean_loss}, {"wall_seconds", e.wall_seconds}};
    out << obj.dump() << '\n';
  }
}

}  // namespace scl
