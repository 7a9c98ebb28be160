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

// Accuracy, F1, precision and recall with SARCASTIC as the positive class,
// plus the methods x datasets comparison table.

#ifndef SCL_METRICS_HPP_
#define SCL_METRICS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "scl/classify.hpp"

namespace scl {

struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

// Throws InvalidArgument on an empty list.
ConfusionMatrix confusion(const std::vector<PredictionRecord>& preds);

// All values on the 0-100 scale, unrounded. A zero denominator yields 0.0
// and sets the matching `*_undefined` flag.
struct MetricRow {
  std::string dataset;
  std::string method;
  double accuracy = 0;
  double f1 = 0;
  double precision = 0;
  double recall = 0;
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;
  ConfusionMatrix counts;
};

MetricRow score(const ConfusionMatrix& cm, std::string method = "",
                std::string dataset = "");

// Harmonic mean; 0 when both inputs are 0.
double f1_from(double precision, double recall);

// Half-up rounding on the decimal value (66.45 -> 66.5, 66.49 -> 66.5).
double round_half_up(double value, int decimals = 1);
// Fixed one-decimal rendering of round_half_up(value).
std::string format_metric(double value);

// Methods are listed in canonical A1..A4 order, then any others by name.
// Missing (method, dataset) cells render as "-".
std::string render_csv(const std::vector<MetricRow>& rows,
                       const std::vector<std::string>& datasets);
std::string render_text(const std::vector<MetricRow>& rows,
                        const std::vector<std::string>& datasets);
// Full-precision values alongside the rounded display values.
std::string render_json(const std::vector<MetricRow>& rows);

}  // namespace scl

#endif  // SCL_METRICS_HPP_
