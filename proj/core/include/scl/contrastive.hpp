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

// Triplet contrastive fine-tuning of a sentence encoder.
//
// For anchor z_a, positive z_p and negative z_n with s_p = cos(z_a, z_p) and
// s_n = cos(z_a, z_n):
//
//   L = -log( e^{s_p/t} / (e^{s_p/t} + e^{s_n/t}) ) = softplus((s_n - s_p)/t)
//
// The positive is an unrelated non-sarcastic text and the negative is the
// anchor's own sarcastic counterpart.

#ifndef SCL_CONTRASTIVE_HPP_
#define SCL_CONTRASTIVE_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "scl/corpus.hpp"
#include "scl/encoder.hpp"
#include "scl/nn.hpp"

namespace scl {

// Throws InvalidArgument on a zero-norm input or a length mismatch.
double cosine_sim(std::span<const double> a, std::span<const double> b);
double cosine_sim(const nn::Vector& a, const nn::Vector& b);

struct CosineGrad {
  double value = 0;
  nn::Vector d_a;
  nn::Vector d_b;
};
CosineGrad cosine_sim_grad(const nn::Vector& a, const nn::Vector& b);

struct TripletEmbeddings {
  nn::Vector anchor;
  nn::Vector positive;
  nn::Vector negative;
};

double triplet_loss(const TripletEmbeddings& z, double temperature);
// Direct evaluation of the -log(ratio of exponentials) form; reference only.
double triplet_loss_naive(const TripletEmbeddings& z, double temperature);

struct TripletLossGrad {
  double loss = 0;
  nn::Vector d_anchor;
  nn::Vector d_positive;
  nn::Vector d_negative;
};
TripletLossGrad triplet_loss_grad(const TripletEmbeddings& z, double temperature);

// Two affine layers with a ReLU between them: in -> hidden -> out.
class ProjectionHead {
 public:
  ProjectionHead(std::size_t in_dim = 768, std::size_t hidden_dim = 768,
                 std::size_t out_dim = 256);

  void init(nn::Rng& rng);
  std::size_t in_dim() const { return first_.in_dim(); }
  std::size_t out_dim() const { return second_.out_dim(); }

  nn::Vector forward(const nn::Vector& x) const;

  struct Tape {
    nn::Vector input;
    nn::Vector hidden_pre;
    nn::Vector hidden;
  };
  nn::Vector forward(const nn::Vector& x, Tape& tape) const;
  // Accumulates parameter gradients, returns dL/dx.
  nn::Vector backward(const Tape& tape, const nn::Vector& grad_out);

  void zero_grad();
  std::vector<nn::Parameter> parameters();

 private:
  nn::Linear first_;
  nn::Linear second_;
};

struct ContrastiveConfig {
  double temperature = 0.7;
  std::size_t epochs = 10;
  std::size_t batch_size = 50;
  double learning_rate = 1e-5;
  double weight_decay = 1e-3;
  std::uint64_t seed = 0;
  PoolingOptions pooling;
};

struct ContrastiveEpoch {
  std::size_t epoch = 0;
  double mean_loss = 0;
  double wall_seconds = 0;
};

struct FinetuneResult {
  std::vector<ContrastiveEpoch> log;
  std::string fingerprint_before;
  std::string fingerprint_after;
  std::size_t steps = 0;
};

// Jointly updates encoder and head with AdamW over seeded-shuffled batches;
// the final short batch is kept. Throws NumericalError naming the step when
// a loss is not finite.
FinetuneResult finetune(TrainableEncoder& encoder, ProjectionHead& head,
                        const std::vector<TripletExample>& triplets,
                        const ContrastiveConfig& cfg);

// Mean triplet loss through encoder + head without updating anything.
double mean_triplet_loss(const TrainableEncoder& encoder, const ProjectionHead& head,
                         const std::vector<TripletExample>& triplets,
                         const ContrastiveConfig& cfg);

// One JSON object per epoch: {"epoch", "mean_loss", "wall_seconds"}.
void write_training_log(std::ostream& out, const std::vector<ContrastiveEpoch>& log);

}  // namespace scl

#endif  // SCL_CONTRASTIVE_HPP_
