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

#include "scl/nn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>

#include "scl/errors.hpp"
#include "scl/text.hpp"

static_assert(std::endian::native == std::endian::little,
              "binary artifacts assume a little-endian host");

namespace scl::nn {

Linear::Linear(std::size_t in_dim, std::size_t out_dim)
    : weight(Matrix::Zero(out_dim, in_dim)),
      bias(Vector::Zero(out_dim)),
      grad_weight(Matrix::Zero(out_dim, in_dim)),
      grad_bias(Vector::Zero(out_dim)) {}

void Linear::init_uniform(Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<Eigen::Index>(1, weight.cols())));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index c = 0; c < weight.cols(); ++c)
    for (Eigen::Index r = 0; r < weight.rows(); ++r) weight(r, c) = dist(rng);
  for (Eigen::Index r = 0; r < bias.size(); ++r) bias(r) = dist(rng);
}

Vector Linear::backward(const Eigen::Ref<const Vector>& x,
                        const Eigen::Ref<const Vector>& grad_out) {
  grad_weight.noalias() += grad_out * x.transpose();
  grad_bias += grad_out;
  return weight.transpose() * grad_out;
}

void Linear::zero_grad() {
  grad_weight.setZero();
  grad_bias.setZero();
}

void Linear::append_parameters(std::vector<Parameter>& out,
                               const std::string& prefix) {
  out.push_back({prefix + ".weight", weight.data(), grad_weight.data(),
                 static_cast<std::size_t>(weight.size())});
  out.push_back({prefix + ".bias", bias.data(), grad_bias.data(),
                 static_cast<std::size_t>(bias.size())});
}

AdamW::AdamW(std::vector<Parameter> params, AdamWConfig config)
    : params_(std::move(params)), config_(config) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const Parameter& p : params_) {
    m_.emplace_back(p.size, 0.0);
    v_.emplace_back(p.size, 0.0);
  }
}

void AdamW::step() {
  ++steps_;
  const double t = static_cast<double>(steps_);
  const double bias1 = 1.0 - std::pow(config_.beta1, t);
  const double bias2 = 1.0 - std::pow(config_.beta2, t);
  const double lr = config_.learning_rate;
  const double decay = 1.0 - lr * config_.weight_decay;
  for (std::size_t k = 0; k < params_.size(); ++k) {
    const Parameter& p = params_[k];
    double* m = m_[k].data();
    double* v = v_[k].data();
    for (std::size_t i = 0; i < p.size; ++i) {
      const double g = p.grad[i];
      p.value[i] *= decay;
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g;
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g * g;
      const double m_hat = m[i] / bias1;
      const double v_hat = v[i] / bias2;
      p.value[i] -= lr * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }
}

void AdamW::zero_grad() {
  for (const Parameter& p : params_) std::fill(p.grad, p.grad + p.size, 0.0);
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) {
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

Vector softmax(const Eigen::Ref<const Vector>& logits) {
  const double peak = logits.maxCoeff();
  Vector e = (logits.array() - peak).exp().matrix();
  return e / e.sum();
}

Vector relu(const Eigen::Ref<const Vector>& x) { return x.cwiseMax(0.0); }

std::uint64_t fingerprint(std::span<const Parameter> params) {
  std::uint64_t h = fnv1a64(std::string_view("scl-params"));
  for (const Parameter& p : params) {
    const std::uint64_t size = p.size;
    h = fnv1a64(std::as_bytes(std::span(&size, 1)), h);
    h = fnv1a64(std::as_bytes(std::span(p.value, p.size)), h);
  }
  return h;
}

bool all_finite(std::span<const Parameter> params) {
  for (const Parameter& p : params)
    for (std::size_t i = 0; i < p.size; ++i)
      if (!std::isfinite(p.value[i])) return false;
  return true;
}

void write_parameters(std::ostream& out, std::span<const Parameter> params) {
  const std::uint64_t count = params.size();
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));
  for (const Parameter& p : params) {
    const std::uint64_t size = p.size;
    out.write(reinterpret_cast<const char*>(&size), sizeof(size));
    out.write(reinterpret_cast<const char*>(p.value),
              static_cast<std::streamsize>(p.size * sizeof(double)));
  }
  if (!out) throw IoError("failed writing parameters");
}

void read_parameters(std::istream& in, std::span<const Parameter> params) {
  std::uint64_t count = 0;
  in.read(reinterpret_cast<char*>(&count), sizeof(count));
  if (!in || count != params.size()) {
    throw ParseError("parameter block count mismatch");
  }
  for (const Parameter& p : params) {
    std::uint64_t size = 0;
    in.read(reinterpret_cast<char*>(&size), sizeof(size));
    if (!in || size != p.size) {
      throw ParseError("parameter '" + p.name + "' has size " +
                       std::to_string(size) + ", expected " +
                       std::to_string(p.size));
    }
    in.read(reinterpret_cast<char*>(p.value),
            static_cast<std::streamsize>(p.size * sizeof(double)));
    if (!in) throw ParseError("truncated parameter block '" + p.name + "'");
  }
}

}  // namespace scl::nn
