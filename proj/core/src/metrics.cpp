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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "json.hpp"
#include "scl/errors.hpp"

namespace scl {
namespace {

int method_rank(const std::string& method) {
  if (auto tag = parse_method(method)) return static_cast<int>(*tag);
  return 1000;
}

std::vector<std::string> ordered_methods(const std::vector<MetricRow>& rows) {
  std::vector<std::string> methods;
  for (const MetricRow& r : rows) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) {
      methods.push_back(r.method);
    }
  }
  std::stable_sort(methods.begin(), methods.end(),
                   [](const std::string& a, const std::string& b) {
                     const int ra = method_rank(a), rb = method_rank(b);
                     return ra != rb ? ra < rb : (ra == 1000 && a < b);
                   });
  return methods;
}

const MetricRow* find_row(const std::vector<MetricRow>& rows, const std::string& method,
                          const std::string& dataset) {
  for (const MetricRow& r : rows) {
    if (r.method == method && r.dataset == dataset) return &r;
  }
  return nullptr;
}

constexpr const char* kColumns[] = {"Acc", "F1", "Prec", "Rec"};

std::vector<std::string> cells(const MetricRow* r) {
  if (r == nullptr) return {"-", "-", "-", "-"};
  return {format_metric(r->accuracy), format_metric(r->f1), format_metric(r->precision),
          format_metric(r->recall)};
}

}  // namespace

ConfusionMatrix confusion(const std::vector<PredictionRecord>& preds) {
  if (preds.empty()) throw InvalidArgument("confusion matrix of an empty prediction list");
  ConfusionMatrix cm;
  for (const PredictionRecord& p : preds) {
    const bool pred_pos = p.predicted == Label::kSarcastic;
    const bool gold_pos = p.gold == Label::kSarcastic;
    if (pred_pos && gold_pos) ++cm.tp;
    else if (pred_pos) ++cm.fp;
    else if (gold_pos) ++cm.fn;
    else ++cm.tn;
  }
  return cm;
}

double f1_from(double precision, double recall) {
  if (precision + recall <= 0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

MetricRow score(const ConfusionMatrix& cm, std::string method, std::string dataset) {
  if (cm.total() == 0) throw InvalidArgument("cannot score an empty confusion matrix");
  MetricRow row;
  row.method = std::move(method);
  row.dataset = std::move(dataset);
  row.counts = cm;
  const auto tp = static_cast<double>(cm.tp);
  row.accuracy = 100.0 * static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
  if (cm.tp + cm.fp == 0) {
    row.precision_undefined = true;
  } else {
    row.precision = 100.0 * tp / static_cast<double>(cm.tp + cm.fp);
  }
  if (cm.tp + cm.fn == 0) {
    row.recall_undefined = true;
  } else {
    row.recall = 100.0 * tp / static_cast<double>(cm.tp + cm.fn);
  }
  if (row.precision_undefined || row.recall_undefined || row.precision + row.recall == 0) {
    row.f1_undefined = true;
  } else {
    row.f1 = f1_from(row.precision, row.recall);
  }
  return row;
}

double round_half_up(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  // Nudge by a relative epsilon so binary representations just below a
  // decimal half (66.45 -> 66.4499...) still round up.
  const double scaled = value * scale;
  const double nudge = 1e-9 * std::max(1.0, std::abs(scaled));
  if (scaled >= 0) return std::floor(scaled + 0.5 + nudge) / scale;
  return -std::floor(-scaled + 0.5 - nudge) / scale;
}

std::string format_metric(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", round_half_up(value, 1));
  return buf;
}

std::string render_csv(const std::vector<MetricRow>& rows,
                       const std::vector<std::string>& datasets) {
  std::ostringstream out;
  out << "method";
  for (const std::string& d : datasets)
    for (const char* c : kColumns) out << ',' << d << ' ' << c;
  out << '\n';
  for (const std::string& m : ordered_methods(rows)) {
    out << m;
    for (const std::string& d : datasets)
      for (const std::string& v : cells(find_row(rows, m, d))) out << ',' << v;
    out << '\n';
  }
  return out.str();
}

std::string render_text(const std::vector<MetricRow>& rows,
                        const std::vector<std::string>& datasets) {
  const std::vector<std::string> methods = ordered_methods(rows);
  std::size_t method_width = std::string("Methods").size();
  for (const std::string& m : methods) method_width = std::max(method_width, m.size());
  constexpr std::size_t kCell = 6;
  auto pad = [](const std::string& s, std::size_t w, bool right) {
    if (s.size() >= w) return s;
    return right ? std::string(w - s.size(), ' ') + s : s + std::string(w - s.size(), ' ');
  };

  std::ostringstream out;
  out << pad("", method_width, false);
  for (const std::string& d : datasets) {
    const std::size_t block = 4 * (kCell + 1);
    out << " |" << pad(" " + d, block, false);
  }
  out << '\n' << pad("Methods", method_width, false);
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    out << " |";
    for (const char* c : kColumns) out << ' ' << pad(c, kCell, true);
  }
  out << '\n' << std::string(method_width, '-');
  for (std::size_t i = 0; i < datasets.size(); ++i) out << "-+" << std::string(4 * (kCell + 1), '-');
  out << '\n';
  for (const std::string& m : methods) {
    out << pad(m, method_width, false);
    for (const std::string& d : datasets) {
      out << " |";
      for (const std::string& v : cells(find_row(rows, m, d))) out << ' ' << pad(v, kCell, true);
    }
    out << '\n';
  }
  return out.str();
}

std::string render_json(const std::vector<MetricRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const MetricRow& r : rows) {
    arr.push_back({
        {"dataset", r.dataset},
        {"method", r.method},
        {"accuracy", r.accuracy},
        {"f1", r.f1},
        {"precision", r.precision},
        {"recall", r.recall},
        {"display",
         {{"accuracy", format_metric(r.accuracy)},
          {"f1", format_metric(r.f1)},
          {"precision", format_metric(r.precision)},
          {"recall", format_metric(r.recall)}}},
        {"undefined",
         {{"precision", r.precision_undefined},
          {"recall", r.recall_undefined},
          {"f1", r.f1_undefined}}},
        {"confusion",
         {{"tp", r.counts.tp}, {"fp", r.counts.fp}, {"fn", r.counts.fn}, {"tn", r.counts.tn}}},
    });
  }
  return arr.dump(2) + "\n";
}

}  // namespace scl
