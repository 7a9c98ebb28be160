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

#include "scl/analysis.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>

#include "json.hpp"
#include "scl/errors.hpp"
#include <cstdio>

namespace scl {

using nlohmann::json;

namespace {

constexpr const char* kCategories[] = {"fixed", "broken", "still_wrong"};

}  // namespace

bool PredictionMatrix::has_method(MethodTag method) const {
  return std::find(methods_.begin(), methods_.end(), method) != methods_.end();
}

std::size_t PredictionMatrix::method_index(MethodTag method) const {
  auto it = std::find(methods_.begin(), methods_.end(), method);
  if (it == methods_.end()) {
    throw InvalidArgument("method " + std::string(method_name(method)) +
                          " is not in the prediction matrix");
  }
  return static_cast<std::size_t>(it - methods_.begin());
}

const PredictionCell& PredictionMatrix::cell(MethodTag method, std::size_t sample) const {
  return cells_.at(method_index(method)).at(sample);
}

const PredictionCell& PredictionMatrix::cell(MethodTag method,
                                             const std::string& sample_id) const {
  auto it = sample_index_.find(sample_id);
  if (it == sample_index_.end()) {
    throw InvalidArgument("sample '" + sample_id + "' is not in the prediction matrix");
  }
  return cell(method, it->second);
}

std::size_t PredictionMatrix::correct_count(MethodTag method) const {
  const auto& row = cells_.at(method_index(method));
  return static_cast<std::size_t>(
      std::count_if(row.begin(), row.end(), [](const PredictionCell& c) { return c.correct(); }));
}

PredictionMatrix build_matrix(const std::vector<PredictionRecord>& records) {
  std::set<MethodTag> method_set;
  std::set<std::string> sample_set;
  for (const PredictionRecord& r : records) {
    method_set.insert(r.method);
    sample_set.insert(r.sample_id);
  }
  PredictionMatrix m;
  for (MethodTag tag : kCanonicalMethodOrder) {
    if (method_set.count(tag)) m.methods_.push_back(tag);
  }
  m.sample_ids_.assign(sample_set.begin(), sample_set.end());
  for (std::size_t i = 0; i < m.sample_ids_.size(); ++i) m.sample_index_[m.sample_ids_[i]] = i;

  std::vector<std::vector<bool>> present(m.methods_.size(),
                                         std::vector<bool>(m.sample_ids_.size(), false));
  m.cells_.assign(m.methods_.size(), std::vector<PredictionCell>(m.sample_ids_.size()));
  for (const PredictionRecord& r : records) {
    const std::size_t mi = m.method_index(r.method);
    const std::size_t si = m.sample_index_.at(r.sample_id);
    if (present[mi][si]) {
      throw InvalidArgument("duplicate prediction for (" + std::string(method_name(r.method)) +
                            ", " + r.sample_id + ")");
    }
    present[mi][si] = true;
    m.cells_[mi][si] = {r.predicted, r.gold, r.prob_sarcastic};
  }

  std::string missing;
  std::size_t missing_count = 0;
  for (std::size_t mi = 0; mi < m.methods_.size(); ++mi) {
    for (std::size_t si = 0; si < m.sample_ids_.size(); ++si) {
      if (present[mi][si]) continue;
      if (++missing_count <= 20) {
        missing += (missing.empty() ? "" : ", ");
        missing += "(" + std::string(method_name(m.methods_[mi])) + ", " + m.sample_ids_[si] + ")";
      }
    }
  }
  if (missing_count > 0) {
    if (missing_count > 20) missing += ", ... " + std::to_string(missing_count - 20) + " more";
    throw InvalidArgument("prediction coverage mismatch; missing " + missing);
  }
  for (std::size_t si = 0; si < m.sample_ids_.size(); ++si) {
    for (std::size_t mi = 1; mi < m.methods_.size(); ++mi) {
      if (m.cells_[mi][si].gold != m.cells_[0][si].gold) {
        throw InvalidArgument("conflicting gold labels for sample '" + m.sample_ids_[si] + "'");
      }
    }
  }
  return m;
}

FlipReport flips(const PredictionMatrix& matrix, MethodTag from_method, MethodTag to_method) {
  if (!matrix.has_method(from_method) || !matrix.has_method(to_method)) {
    throw InvalidArgument("unknown method tag for flip analysis: " +
                          std::string(method_name(matrix.has_method(from_method) ? to_method
                                                                                 : from_method)));
  }
  FlipReport report;
  report.from_method = from_method;
  report.to_method = to_method;
  for (std::size_t s = 0; s < matrix.sample_ids().size(); ++s) {
    const bool before = matrix.cell(from_method, s).correct();
    const bool after = matrix.cell(to_method, s).correct();
    const std::string& id = matrix.sample_ids()[s];
    if (!before && after) report.fixed.push_back(id);
    else if (before && !after) report.broken.push_back(id);
    else if (!before && !after) report.still_wrong.push_back(id);
  }
  return report;
}

std::vector<FlipReport> chain_flips(const PredictionMatrix& matrix) {
  std::vector<FlipReport> out;
  const auto& methods = matrix.methods();
  for (std::size_t i = 1; i < methods.size(); ++i) {
    out.push_back(flips(matrix, methods[i - 1], methods[i]));
  }
  return out;
}

ReviewBundle export_review_bundle(const PredictionMatrix& matrix, const FlipReport& report,
                                  const std::vector<LabeledText>& corpus) {
  std::unordered_map<std::string, const LabeledText*> by_id;
  for (const LabeledText& r : corpus) by_id.emplace(r.id, &r);
  ReviewBundle bundle;
  bundle.from_method = report.from_method;
  bundle.to_method = report.to_method;
  const std::vector<std::string>* groups[] = {&report.fixed, &report.broken,
                                              &report.still_wrong};
  for (int g = 0; g < 3; ++g) {
    std::vector<std::string> ids = *groups[g];
    std::sort(ids.begin(), ids.end());
    for (const std::string& id : ids) {
      auto it = by_id.find(id);
      if (it == by_id.end()) {
        throw InvalidArgument("sample '" + id + "' not found in corpus");
      }
      ReviewRecord rec;
      rec.sample_id = id;
      rec.category = kCategories[g];
      rec.text = it->second->text;
      rec.gold = matrix.cell(matrix.methods().front(), id).gold;
      for (MethodTag m : matrix.methods()) {
        const PredictionCell& c = matrix.cell(m, id);
        rec.predictions.push_back({m, c.predicted, c.prob_sarcastic});
      }
      bundle.records.push_back(std::move(rec));
    }
  }
  return bundle;
}

void write_review_jsonl(std::ostream& out, const ReviewBundle& bundle) {
  std::map<std::string, std::size_t> counts = {{"fixed", 0}, {"broken", 0}, {"still_wrong", 0}};
  for (const ReviewRecord& r : bundle.records) ++counts[r.category];
  json header = {{"kind", "review_bundle"},
                 {"from_method", method_name(bundle.from_method)},
                 {"to_method", method_name(bundle.to_method)},
                 {"counts", counts}};
  out << header.dump() << '\n';
  for (const ReviewRecord& r : bundle.records) {
    json preds = json::array();
    for (const ReviewMethodEntry& p : r.predictions) {
      preds.push_back({{"method", method_name(p.method)},
                       {"predicted", label_name(p.predicted)},
                       {"prob_sarcastic", p.prob_sarcastic}});
    }
    json obj = {{"sample_id", r.sample_id},
                {"category", r.category},
                {"text", r.text},
                {"gold", label_name(r.gold)},
                {"predictions", preds}};
    out << obj.dump() << '\n';
  }
}

void write_review_markdown(std::ostream& out, const ReviewBundle& bundle) {
  out << "# Review: " << method_name(bundle.from_method) << " -> "
      << method_name(bundle.to_method) << "\n";
  const char* titles[] = {"Fixed", "Broken", "Still wrong"};
  for (int g = 0; g < 3; ++g) {
    std::vector<const ReviewRecord*> group;
    for (const ReviewRecord& r : bundle.records) {
      if (r.category == kCategories[g]) group.push_back(&r);
    }
    out << "\n## " << titles[g] << " (" << group.size() << ")\n";
    for (const ReviewRecord* r : group) {
      out << "\n### " << r->sample_id << "\n\n> " << r->text << "\n\n"
          << "Gold: " << label_name(r->gold) << "\n\n"
          << "| Method | Predicted | P(sarcastic) |\n|---|---|---|\n";
      for (const ReviewMethodEntry& p : r->predictions) {
        char prob[32];
        std::snprintf(prob, sizeof(prob), "%.4f", p.prob_sarcastic);
        out << "| " << method_name(p.method) << " | " << label_name(p.predicted) << " | "
            << prob << " |\n";
      }
    }
  }
}

}  // namespace scl
