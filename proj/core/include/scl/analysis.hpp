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

// Per-sample comparison of methods: which samples a method fixes, breaks or
// leaves wrong relative to the method preceding it.

#ifndef SCL_ANALYSIS_HPP_
#define SCL_ANALYSIS_HPP_

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "scl/classify.hpp"
#include "scl/corpus.hpp"

namespace scl {

struct PredictionCell {
  Label predicted = Label::kNonSarcastic;
  Label gold = Label::kNonSarcastic;
  double prob_sarcastic = 0;

  bool correct() const { return predicted == gold; }
};

// Dense methods x samples matrix. Samples are sorted by id and methods by
// canonical order.
class PredictionMatrix {
 public:
  const std::vector<std::string>& sample_ids() const { return sample_ids_; }
  const std::vector<MethodTag>& methods() const { return methods_; }

  bool has_method(MethodTag method) const;
  const PredictionCell& cell(MethodTag method, std::size_t sample) const;
  const PredictionCell& cell(MethodTag method, const std::string& sample_id) const;
  std::size_t correct_count(MethodTag method) const;

 private:
  friend PredictionMatrix build_matrix(const std::vector<PredictionRecord>& records);

  std::size_t method_index(MethodTag method) const;

  std::vector<std::string> sample_ids_;
  std::vector<MethodTag> methods_;
  std::unordered_map<std::string, std::size_t> sample_index_;
  std::vector<std::vector<PredictionCell>> cells_;  // [method][sample]
};

// Throws InvalidArgument listing missing (method, sample) pairs, or naming
// a sample whose gold label differs between methods.
PredictionMatrix build_matrix(const std::vector<PredictionRecord>& records);

struct FlipReport {
  MethodTag from_method = MethodTag::kA1;
  MethodTag to_method = MethodTag::kA1;
  std::vector<std::string> fixed;        // wrong under `from`, right under `to`
  std::vector<std::string> broken;       // right under `from`, wrong under `to`
  std::vector<std::string> still_wrong;  // wrong under both
};

FlipReport flips(const PredictionMatrix& matrix, MethodTag from_method, MethodTag to_method);

// Reports for each consecutive pair of methods present in the matrix.
std::vector<FlipReport> chain_flips(const PredictionMatrix& matrix);

struct ReviewMethodEntry {
  MethodTag method;
  Label predicted;
  double prob_sarcastic;
};

struct ReviewRecord {
  std::string sample_id;
  std::string category;  // fixed, broken or still_wrong
  std::string text;
  Label gold = Label::kNonSarcastic;
  std::vector<ReviewMethodEntry> predictions;  // every method in the matrix
};

struct ReviewBundle {
  MethodTag from_method = MethodTag::kA1;
  MethodTag to_method = MethodTag::kA1;
  std::vector<ReviewRecord> records;
};

// Records ordered fixed, broken, still_wrong; by sample id within each.
// Throws InvalidArgument for ids missing from the corpus.
ReviewBundle export_review_bundle(const PredictionMatrix& matrix, const FlipReport& report,
                                  const std::vector<LabeledText>& corpus);

// First line is a header object with the method pair and category counts.
void write_review_jsonl(std::ostream& out, const ReviewBundle& bundle);
// One section per flip category.
void write_review_markdown(std::ostream& out, const ReviewBundle& bundle);

}  // namespace scl

#endif  // SCL_ANALYSIS_HPP_
