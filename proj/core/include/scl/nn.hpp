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

// Minimal dense building blocks shared by the encoder, the projection head
// and the recognition heads: affine layers with explicit backward passes and
// an AdamW optimizer over flat parameter views.

#ifndef SCL_NN_HPP_
#define SCL_NN_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace scl::nn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

// Non-owning view of one trainable tensor and its gradient buffer.
struct Parameter {
  std::string name;
  double* value = nullptr;
  double* grad = nullptr;
  std::size_t size = 0;
};

// y = W x + b, W is out x in.
class Linear {
 public:
  Linear() = default;
  Linear(std::size_t in_dim, std::size_t out_dim);

  // U(-1/sqrt(in), 1/sqrt(in)) for both weight and bias.
  void init_uniform(Rng& rng);

  std::size_t in_dim() const { return static_cast<std::size_t>(weight.cols()); }
  std::size_t out_dim() const { return static_cast<std::size_t>(weight.rows()); }

  Vector forward(const Eigen::Ref<const Vector>& x) const {
    return weight * x + bias;
  }

  // Accumulates dL/dW, dL/db and returns dL/dx.
  Vector backward(const Eigen::Ref<const Vector>& x,
                  const Eigen::Ref<const Vector>& grad_out);

  void zero_grad();
  void append_parameters(std::vector<Parameter>& out, const std::string& prefix);

  Matrix weight;
  Vector bias;
  Matrix grad_weight;
  Vector grad_bias;
};

struct AdamWConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 1e-2;
};

// Decoupled weight decay Adam, applied in the same order as torch.optim.AdamW.
class AdamW {
 public:
  AdamW(std::vector<Parameter> params, AdamWConfig config);

  void step();
  void zero_grad();
  std::size_t steps() const { return steps_; }

 private:
  std::vector<Parameter> params_;
  AdamWConfig config_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  std::size_t steps_ = 0;
};

double sigmoid(double x);
// log(1 + e^x) without overflow.
double softplus(double x);
Vector softmax(const Eigen::Ref<const Vector>& logits);
Vector relu(const Eigen::Ref<const Vector>& x);

// FNV-1a over parameter shapes and raw values.
std::uint64_t fingerprint(std::span<const Parameter> params);

bool all_finite(std::span<const Parameter> params);

// Little-endian float64 dump of parameter values, preceded by sizes.
void write_parameters(std::ostream& out, std::span<const Parameter> params);
// Throws ParseError when sizes disagree with `params`.
void read_parameters(std::istream& in, std::span<const Parameter> params);

}  // namespace scl::nn

#endif  // SCL_NN_HPP_
