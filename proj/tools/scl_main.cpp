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

// scl: command-line driver for the context-injection experiments.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "scl/errors.hpp"
#include "scl/pipeline.hpp"
#include "scl/synthetic.hpp"

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config, "Experiment config (JSON)")->required();
  cmd->add_option("--seed", opts.seed, "Override the config seed");
  cmd->add_option("--out", opts.out, "Override the output directory");
}

scl::ExperimentConfig load(const CommonOptions& opts) {
  scl::ExperimentConfig cfg = scl::load_config(opts.config);
  if (opts.seed) scl::set_seed(cfg, *opts.seed);
  if (!opts.out.empty()) scl::set_output_dir(cfg, opts.out);
  return cfg;
}

void print(const scl::StageResult& r) {
  json j = json::parse(r.summary);
  std::cout << json{{"command", r.command},
                    {"run_dir", r.run_dir.string()},
                    {"reused", r.reused},
                    {"summary", j}}
                   .dump(2)
            << "\n";
}

int report_error(const std::string& code, const std::string& message,
                 const std::string& producer = "") {
  json err = {{"error", code}, {"message", message}};
  if (!producer.empty()) err["producer"] = producer;
  std::cerr << err.dump() << "\n";
  return 1;
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw scl::IoError("cannot write " + path.string());
  out << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Context injection for sarcasm recognition"};
  app.set_version_flag("--version", std::string(scl::tool_version()));
  app.require_subcommand(1);

  CommonOptions opts;
  std::string method;
  std::vector<std::string> methods;
  std::string from;
  std::string to;

  CLI::App* ingest = app.add_subcommand("ingest", "Load corpora, write splits and triplets");
  add_common(ingest, opts);

  CLI::App* embed = app.add_subcommand("embed", "Populate the embedding cache for a method");
  add_common(embed, opts);
  embed->add_option("--method", method, "A1, A2_GENERIC, A2_TWEET, A3 or A4")->required();

  CLI::App* finetune = app.add_subcommand("finetune", "Contrastive fine-tuning of the A3 encoder");
  add_common(finetune, opts);

  CLI::App* train = app.add_subcommand("train", "Train the classifier for a method");
  add_common(train, opts);
  train->add_option("--method", method, "A1, A2_GENERIC, A2_TWEET, A3 or A4")->required();

  CLI::App* eval = app.add_subcommand("eval", "Score trained methods and write metric tables");
  add_common(eval, opts);
  eval->add_option("--method", methods, "Methods to score (default: config methods)");

  CLI::App* analyze = app.add_subcommand("analyze", "Per-sample flip analysis between methods");
  add_common(analyze, opts);
  analyze->add_option("--from", from, "Preceding method");
  analyze->add_option("--to", to, "Method compared against --from");

  CLI::App* run = app.add_subcommand("run", "Run every stage in order");
  add_common(run, opts);

  std::string synth_out;
  scl::SyntheticCorpusOptions corpus_opts;
  scl::SyntheticPairOptions pair_opts;
  std::uint64_t synth_seed = 0;
  CLI::App* synth = app.add_subcommand("synth", "Write a synthetic sentiment-contrast corpus");
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--seed", synth_seed, "Generator seed");
  synth->add_option("--samples", corpus_opts.samples, "Labeled samples")->capture_default_str();
  synth->add_option("--pairs", pair_opts.pairs, "Translation pairs")->capture_default_str();
  synth->add_option("--label-noise", corpus_opts.label_noise, "Label flip probability");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    report_error("usage_error", e.what());
    return 2;
  }

  try {
    if (synth->parsed()) {
      corpus_opts.seed = synth_seed;
      pair_opts.seed = synth_seed + 1;
      fs::create_directories(synth_out);
      scl::save_labeled(fs::path(synth_out) / "synthetic.tsv", scl::synthetic_corpus(corpus_opts),
                        scl::TextFormat::kTsv);
      std::ostringstream pairs;
      scl::write_translations(pairs, scl::synthetic_translation_pairs(pair_opts));
      write_text(fs::path(synth_out) / "pairs.jsonl", pairs.str());
      std::cout << json{{"command", "synth"},
                        {"corpus", (fs::path(synth_out) / "synthetic.tsv").string()},
                        {"pairs", (fs::path(synth_out) / "pairs.jsonl").string()},
                        {"samples", corpus_opts.samples},
                        {"translation_pairs", pair_opts.pairs}}
                       .dump(2)
                << "\n";
      return 0;
    }

    scl::Pipeline pipeline(load(opts));
    if (ingest->parsed()) {
      print(pipeline.ingest());
    } else if (embed->parsed()) {
      print(pipeline.embed(scl::parse_method_or_throw(method)));
    } else if (finetune->parsed()) {
      print(pipeline.finetune());
    } else if (train->parsed()) {
      print(pipeline.train(scl::parse_method_or_throw(method)));
    } else if (eval->parsed()) {
      std::vector<scl::MethodTag> tags;
      for (const std::string& m : methods) tags.push_back(scl::parse_method_or_throw(m));
      const scl::StageResult r = pipeline.eval(tags);
      std::ifstream table(r.run_dir / "metrics.txt");
      std::cerr << table.rdbuf();
      print(r);
    } else if (analyze->parsed()) {
      std::optional<scl::MethodTag> f;
      std::optional<scl::MethodTag> t;
      if (!from.empty()) f = scl::parse_method_or_throw(from);
      if (!to.empty()) t = scl::parse_method_or_throw(to);
      print(pipeline.analyze(f, t));
    } else if (run->parsed()) {
      for (const scl::StageResult& r : pipeline.run_all()) print(r);
    }
  } catch (const scl::PrerequisiteError& e) {
    return report_error(e.code(), e.what(), e.producer());
  } catch (const scl::Error& e) {
    return report_error(e.code(), e.what());
  } catch (const std::exception& e) {
    return report_error("internal_error", e.what());
  }
  return 0;
}
