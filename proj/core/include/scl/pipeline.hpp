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

// Experiment orchestration: declarative config, stage commands, run
// manifests and the on-disk artifact layout under the output directory.
//
//   <out>/ingest/<dataset>/split.json       split manifest
//   <out>/ingest/<dataset>/stats.json       corpus statistics
//   <out>/ingest/triplets*.jsonl            contrastive triplets
//   <out>/wordvec/vectors.txt               A1 word vectors
//   <out>/finetune/encoder.bin              A3 encoder weights
//   <out>/models/<dataset>/<METHOD>/        trained heads and logs
//   <out>/eval/metrics.{json,csv,txt}       metric tables
//   <out>/eval/<dataset>/<METHOD>.predictions.jsonl
//   <out>/analysis/<dataset>/               flip reports, review bundles
//   <out>/runs/NNNN-<verb>/manifest.json    one directory per invocation
//   <out>/latest                            relative path of the newest run

#ifndef SCL_PIPELINE_HPP_
#define SCL_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scl/classify.hpp"
#include "scl/contrastive.hpp"
#include "scl/corpus.hpp"
#include "scl/encoder.hpp"
#include "scl/sentenc.hpp"
#include "scl/types.hpp"
#include "scl/wordvec.hpp"

namespace scl {

std::string_view tool_version();

struct DatasetConfig {
  std::string name;
  std::filesystem::path path;
  TextFormat format = TextFormat::kCsv;
  // Fixed split; when absent the split is drawn from the seed.
  std::optional<std::filesystem::path> split_manifest;
};

struct WordVecSettings {
  enum class Source { kTrain, kFile };
  Source source = Source::kTrain;
  std::optional<std::filesystem::path> path;
  std::size_t dim = 768;
  WordFeatureConfig features;
  SkipGramOptions skipgram;
};

struct EncoderSettings {
  EncoderSpec spec;
  std::optional<std::filesystem::path> weights;
};

enum class FinetuneTarget { kTweet, kGeneric };

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;
  std::filesystem::path cache_dir;
  std::vector<DatasetConfig> datasets;
  SplitRatios ratios;
  std::optional<std::filesystem::path> translations;
  std::vector<MethodTag> methods;
  WordVecSettings wordvec;
  EncoderSettings generic_encoder;
  EncoderSettings tweet_encoder;
  PoolingOptions pooling;
  std::size_t embed_batch_size = 32;
  FinetuneTarget finetune_target = FinetuneTarget::kTweet;
  ContrastiveConfig contrastive;
  std::size_t projection_hidden = 768;
  std::size_t projection_dim = 256;
  // Fraction of deduplicated pairs held out to score fine-tuning.
  double contrastive_holdout = 0.0;
  HeadConfig head;
  FusionConfig fusion;
  // Split evaluated by `eval` and compared by `analyze`: "test" or "validation".
  std::string eval_split = "test";
};

// Environment entries consulted for overrides. Only keys starting with
// "SCL_" matter: SCL_SEED sets "seed", SCL_HEAD__EPOCHS sets head.epochs.
// Values are parsed as JSON when possible, otherwise taken as strings.
using Environment = std::map<std::string, std::string>;
Environment process_environment();

// Relative paths in the file resolve against the file's directory.
ExperimentConfig load_config(const std::filesystem::path& path,
                             const Environment& env = process_environment());
ExperimentConfig parse_config(std::string_view json_text,
                              const std::filesystem::path& base_dir,
                              const Environment& env = {});

// Throws ConfigError when a referenced input path does not exist.
void validate(const ExperimentConfig& cfg);

// Applies a new seed to every seeded component.
void set_seed(ExperimentConfig& cfg, std::uint64_t seed);
void set_output_dir(ExperimentConfig& cfg, const std::filesystem::path& out);

// Canonical JSON of the effective config, output and cache dirs excluded.
std::string config_snapshot(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

struct StageResult {
  std::string command;
  std::filesystem::path run_dir;
  bool reused = false;
  EncodeCounters counters;
  // JSON object with command-specific results.
  std::string summary;
};

namespace detail {
struct PipelineState;
}  // namespace detail

class Pipeline {
 public:
  explicit Pipeline(ExperimentConfig cfg);
  ~Pipeline();
  Pipeline(const Pipeline&) = delete;
  Pipeline& operator=(const Pipeline&) = delete;

  const ExperimentConfig& config() const { return cfg_; }

  StageResult ingest();
  StageResult embed(MethodTag method);
  StageResult finetune();
  StageResult train(MethodTag method);
  StageResult eval(const std::vector<MethodTag>& methods);
  // With both tags absent, compares each consecutive pair of the methods
  // with predictions, in canonical order.
  StageResult analyze(std::optional<MethodTag> from, std::optional<MethodTag> to);

  // ingest, embed (every method plus fusion inputs), finetune when needed,
  // train, eval and analyze.
  std::vector<StageResult> run_all();

 private:
  ExperimentConfig cfg_;
  std::unique_ptr<detail::PipelineState> state_;
};

// Methods whose embeddings `method` consumes, in canonical order.
std::vector<MethodTag> embedding_inputs(MethodTag method, const FusionConfig& fusion);

}  // namespace scl

#endif  // SCL_PIPELINE_HPP_
