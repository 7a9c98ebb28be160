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

// Microbenchmarks for the hot paths: word-vector featurization, the triplet
// loss, head forward passes and embedding-cache lookups.

#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "scl/cache.hpp"
#include "scl/classify.hpp"
#include "scl/contrastive.hpp"
#include "scl/text.hpp"
#include "scl/wordvec.hpp"

namespace {

scl::nn::Vector random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> d(0, 1);
  scl::nn::Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = d(rng);
  return v;
}

void BM_EmbedConcat(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  scl::WordVectorTable table(dim);
  std::mt19937_64 rng(1);
  std::normal_distribution<float> d(0, 1);
  std::vector<float> v(dim);
  for (int w = 0; w < 5000; ++w) {
    for (float& x : v) x = d(rng);
    table.insert("w" + std::to_string(w), v);
  }
  std::string text;
  for (int k = 0; k < 60; ++k) text += "w" + std::to_string(rng() % 6000) + " ";
  const scl::WordFeatureConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(scl::embed_concat(text, table, cfg));
}
BENCHMARK(BM_EmbedConcat)->Arg(16)->Arg(768);

void BM_TripletLossGrad(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const scl::TripletEmbeddings z{random_vector(rng, n), random_vector(rng, n),
                                 random_vector(rng, n)};
  for (auto _ : state) benchmark::DoNotOptimize(scl::triplet_loss_grad(z, 0.7));
}
BENCHMARK(BM_TripletLossGrad)->Arg(32)->Arg(256);

void BM_HeadForward(benchmark::State& state) {
  const auto in = static_cast<std::size_t>(state.range(0));
  scl::MlpHead head(in, 128, 2);
  scl::nn::Rng rng(3);
  head.init(rng);
  std::mt19937_64 vrng(4);
  const scl::nn::Vector x = random_vector(vrng, static_cast<Eigen::Index>(in));
  for (auto _ : state) benchmark::DoNotOptimize(scl::head_forward(head, x));
}
BENCHMARK(BM_HeadForward)->Arg(768)->Arg(1536);

void BM_FusionForward(benchmark::State& state) {
  scl::FusionModel model(scl::full_scale_fusion_config());
  scl::nn::Rng rng(5);
  model.init(rng);
  std::mt19937_64 vrng(6);
  const scl::nn::Vector fused = random_vector(vrng, 39936);
  const scl::nn::Vector tweet = random_vector(vrng, 768);
  for (auto _ : state) benchmark::DoNotOptimize(scl::fusion_forward(model, fused, tweet));
}
BENCHMARK(BM_FusionForward);

void BM_CacheFind(benchmark::State& state) {
  const auto path = std::filesystem::temp_directory_path() /
                    ("scl-bench-cache-" + std::to_string(std::random_device{}()) + ".bin");
  {
    auto cache = scl::EmbeddingCache::open(path, scl::EmbeddingCache::Mode::kReadWrite);
    const std::vector<float> v(768, 0.5f);
    for (int i = 0; i < 1000; ++i) {
      cache.put({scl::MethodTag::kA2Generic, "roberta-base", "fp",
                 scl::text_hash("text " + std::to_string(i))},
                v);
    }
  }
  auto cache = scl::EmbeddingCache::open(path, scl::EmbeddingCache::Mode::kReadOnly);
  int i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cache.find({scl::MethodTag::kA2Generic, "roberta-base", "fp",
                                         scl::text_hash("text " + std::to_string(i++ % 1000))}));
  }
  std::filesystem::remove(path);
}
BENCHMARK(BM_CacheFind);

}  // namespace

BENCHMARK_MAIN();
