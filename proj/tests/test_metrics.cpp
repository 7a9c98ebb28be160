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

#include "scl/metrics.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "json.hpp"
#include "scl/errors.hpp"

namespace scl {
namespace {

constexpr Label S = Label::kSarcastic;
constexpr Label N = Label::kNonSarcastic;

PredictionRecord rec(Label predicted, Label gold) {
  return {"id", MethodTag::kA1, predicted == S ? 0.9 : 0.1, predicted, gold};
}

std::vector<PredictionRecord> random_predictions(std::mt19937_64& rng, std::size_t n) {
  std::vector<PredictionRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(rec(label_from_int(static_cast<int>(rng() % 2)),
                      label_from_int(static_cast<int>(rng() % 2))));
  }
  return out;
}

TEST(Confusion, Examples) {
  EXPECT_EQ(confusion({rec(S, S), rec(S, S), rec(N, N), rec(N, N)}),
            (ConfusionMatrix{2, 0, 0, 2}));
  EXPECT_EQ(confusion({rec(S, S), rec(S, S), rec(S, S), rec(S, N), rec(S, N), rec(S, N)}),
            (ConfusionMatrix{3, 3, 0, 0}));
  EXPECT_EQ(confusion({rec(N, S)}), (ConfusionMatrix{0, 0, 1, 0}));
  EXPECT_THROW(confusion({}), InvalidArgument);
}

TEST(Confusion, MatchesBruteForce) {
  std::mt19937_64 rng(1);
  const auto preds = random_predictions(rng, 50);
  std::uint64_t cells[2][2] = {};
  for (const auto& p : preds) ++cells[label_value(p.predicted)][label_value(p.gold)];
  const ConfusionMatrix cm = confusion(preds);
  EXPECT_EQ(cm.tp, cells[1][1]);
  EXPECT_EQ(cm.fp, cells[1][0]);
  EXPECT_EQ(cm.fn, cells[0][1]);
  EXPECT_EQ(cm.tn, cells[0][0]);
  EXPECT_EQ(cm.total(), 50u);
}

TEST(Score, ReferenceRowsAreInternallyConsistent) {
  EXPECT_NEAR(f1_from(49.8, 100.0), 66.5, 0.05);
  EXPECT_NEAR(f1_from(85.8, 80.8), 83.2, 0.05);
  EXPECT_EQ(format_metric(f1_from(49.8, 100.0)), "66.5");
  EXPECT_EQ(format_metric(f1_from(85.8, 80.8)), "83.2");
}

TEST(Score, SymmetricMatrix) {
  const MetricRow row = score({1, 1, 1, 1}, "A1", "ds");
  EXPECT_DOUBLE_EQ(row.accuracy, 50.0);
  EXPECT_DOUBLE_EQ(row.precision, 50.0);
  EXPECT_DOUBLE_EQ(row.recall, 50.0);
  EXPECT_DOUBLE_EQ(row.f1, 50.0);
  EXPECT_FALSE(row.precision_undefined || row.recall_undefined || row.f1_undefined);
  EXPECT_EQ(row.method, "A1");
  EXPECT_EQ(row.dataset, "ds");
}

TEST(Score, UndefinedRatiosAreZeroAndFlagged) {
  const MetricRow never_positive = score({0, 0, 3, 2});
  EXPECT_TRUE(never_positive.precision_undefined);
  EXPECT_EQ(never_positive.precision, 0.0);
  EXPECT_FALSE(never_positive.recall_undefined);
  EXPECT_EQ(never_positive.recall, 0.0);
  EXPECT_TRUE(never_positive.f1_undefined);
  EXPECT_EQ(never_positive.f1, 0.0);
  EXPECT_DOUBLE_EQ(never_positive.accuracy, 40.0);

  const MetricRow no_gold_positive = score({0, 2, 0, 2});
  EXPECT_TRUE(no_gold_positive.recall_undefined);
  EXPECT_FALSE(no_gold_positive.precision_undefined);

  EXPECT_THROW(score({0, 0, 0, 0}), InvalidArgument);
}

TEST(Score, AllSarcasticPredictorIsBaseRate) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 100;
    std::vector<PredictionRecord> preds;
    std::size_t positives = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Label gold = label_from_int(static_cast<int>(rng() % 2));
      positives += gold == S;
      preds.push_back(rec(S, gold));
    }
    if (positives == 0) continue;
    const MetricRow row = score(confusion(preds));
    const double base = 100.0 * static_cast<double>(positives) / static_cast<double>(n);
    EXPECT_DOUBLE_EQ(row.recall, 100.0);
    EXPECT_NEAR(row.precision, base, 1e-9);
    EXPECT_NEAR(row.accuracy, base, 1e-9);
  }
}

TEST(Score, F1InvariantUnderSwappingFpFn) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const ConfusionMatrix cm{1 + rng() % 50, rng() % 50, rng() % 50, rng() % 50};
    const ConfusionMatrix swapped{cm.tp, cm.fn, cm.fp, cm.tn};
    const MetricRow a = score(cm), b = score(swapped);
    EXPECT_NEAR(a.f1, b.f1, 1e-9);
    EXPECT_NEAR(a.precision, b.recall, 1e-9);
    EXPECT_NEAR(a.recall, b.precision, 1e-9);
  }
}

TEST(Score, MatchesPerSampleBruteForce) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto preds = random_predictions(rng, 1 + rng() % 60);
    double correct = 0, pred_pos = 0, gold_pos = 0, both = 0;
    for (const auto& p : preds) {
      correct += p.predicted == p.gold;
      pred_pos += p.predicted == S;
      gold_pos += p.gold == S;
      both += p.predicted == S && p.gold == S;
    }
    const MetricRow row = score(confusion(preds));
    const double n = static_cast<double>(preds.size());
    EXPECT_NEAR(row.accuracy, 100 * correct / n, 1e-9);
    if (pred_pos > 0) EXPECT_NEAR(row.precision, 100 * both / pred_pos, 1e-9);
    if (gold_pos > 0) EXPECT_NEAR(row.recall, 100 * both / gold_pos, 1e-9);
    if (both > 0) {
      const double p = both / pred_pos, r = both / gold_pos;
      EXPECT_NEAR(row.f1, 100 * 2 * p * r / (p + r), 1e-9);
    }
  }
}

TEST(Rounding, HalfUp) {
  EXPECT_EQ(format_metric(66.49), "66.5");
  EXPECT_EQ(format_metric(66.45), "66.5");
  EXPECT_EQ(format_metric(66.44), "66.4");
  EXPECT_EQ(format_metric(0.05), "0.1");
  EXPECT_EQ(format_metric(100.0), "100.0");
  EXPECT_EQ(format_metric(0.0), "0.0");
  EXPECT_DOUBLE_EQ(round_half_up(2.25, 1), 2.3);
  EXPECT_DOUBLE_EQ(round_half_up(2.5, 0), 3.0);
}

TEST(Render, SingleRow) {
  const std::vector<MetricRow> rows = {score({1, 1, 1, 1}, "A4", "IAC-V2")};
  const std::string csv = render_csv(rows, {"IAC-V2"});
  EXPECT_EQ(csv,
            "method,IAC-V2 Acc,IAC-V2 F1,IAC-V2 Prec,IAC-V2 Rec\n"
            "A4,50.0,50.0,50.0,50.0\n");
  const std::string text = render_text(rows, {"IAC-V2"});
  EXPECT_NE(text.find("A4"), std::string::npos);
  EXPECT_NE(text.find("50.0"), std::string::npos);
  std::size_t lines = 0;
  for (char c : text) lines += c == '\n';
  // Two header lines, a rule and one data line.
  EXPECT_EQ(lines, 4u);
}

TEST(Render, EmptyRowsGiveHeaderOnly) {
  EXPECT_EQ(render_csv({}, {"d"}), "method,d Acc,d F1,d Prec,d Rec\n");
  const std::string text = render_text({}, {"d"});
  EXPECT_NE(text.find("Methods"), std::string::npos);
  EXPECT_EQ(nlohmann::json::parse(render_json({})), nlohmann::json::array());
}

TEST(Render, CanonicalMethodOrderAndMissingCells) {
  const std::vector<MetricRow> rows = {score({2, 0, 0, 2}, "A4", "x"),
                                       score({1, 1, 1, 1}, "A1", "x"),
                                       score({1, 1, 1, 1}, "A2_TWEET", "y")};
  const std::string csv = render_csv(rows, {"x", "y"});
  EXPECT_LT(csv.find("\nA1,"), csv.find("\nA2_TWEET,"));
  EXPECT_LT(csv.find("\nA2_TWEET,"), csv.find("\nA4,"));
  EXPECT_NE(csv.find("A2_TWEET,-,-,-,-,50.0"), std::string::npos);
}

TEST(Render, JsonKeepsFullPrecision) {
  const std::vector<MetricRow> rows = {score({1, 2, 0, 0}, "A1", "d")};
  const auto j = nlohmann::json::parse(render_json(rows));
  ASSERT_EQ(j.size(), 1u);
  EXPECT_NEAR(j[0]["precision"].get<double>(), 100.0 / 3.0, 1e-12);
  EXPECT_EQ(j[0]["display"]["precision"], "33.3");
  EXPECT_EQ(j[0]["confusion"]["fp"], 2);
}

}  // namespace
}  // namespace scl
