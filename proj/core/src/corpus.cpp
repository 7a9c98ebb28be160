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

#include "scl/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "scl/errors.hpp"
#include "scl/text.hpp"

namespace scl {

using nlohmann::json;

namespace {

std::string lower_ascii(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string row_prefix(std::size_t row) {
  return "row " + std::to_string(row) + ": ";
}

// Reads one CSV record (RFC 4180 quoting, embedded newlines allowed).
bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;
  std::string field;
  bool in_quotes = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      break;
    } else if (c == '\r') {
      if (in.peek() == '\n') in.get(c);
      break;
    } else {
      field.push_back(c);
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted CSV field");
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

bool read_tsv_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  std::string line;
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return true;
}

bool blank_record(const std::vector<std::string>& fields) {
  return fields.size() == 1 && trim(fields[0]).empty();
}

void strip_bom(std::string& s) {
  if (s.size() >= 3 && s.compare(0, 3, "\xEF\xBB\xBF") == 0) s.erase(0, 3);
}

LabeledText make_record(std::string id, std::string text, std::string_view label,
                        std::size_t row, const std::string& source) {
  if (trim(text).empty()) throw ParseError(row_prefix(row) + "empty text", row);
  const auto parsed = parse_label(label);
  if (!parsed) {
    throw ParseError(row_prefix(row) + "unparseable label '" + std::string(label) + "'",
                     row);
  }
  if (id.empty()) id = "row-" + std::to_string(row);
  return {std::move(id), std::move(text), *parsed, source};
}

std::vector<LabeledText> parse_delimited(std::istream& in, TextFormat format,
                                         const std::string& source) {
  auto read = format == TextFormat::kCsv ? read_csv_record : read_tsv_record;
  std::vector<std::string> header;
  if (!read(in, header)) return {};
  if (!header.empty()) strip_bom(header[0]);
  int id_col = -1, text_col = -1, label_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = lower_ascii(trim(header[i]));
    if (name == "id") id_col = static_cast<int>(i);
    if (name == "text") text_col = static_cast<int>(i);
    if (name == "label") label_col = static_cast<int>(i);
  }
  if (text_col < 0 || label_col < 0) {
    throw ParseError("header must contain 'text' and 'label' columns");
  }
  std::vector<LabeledText> out;
  std::vector<std::string> fields;
  std::size_t row = 0;
  while (read(in, fields)) {
    if (blank_record(fields)) continue;
    ++row;
    if (fields.size() != header.size()) {
      throw ParseError(row_prefix(row) + "expected " + std::to_string(header.size()) +
                           " fields, found " + std::to_string(fields.size()),
                       row);
    }
    std::string id = id_col >= 0 ? trim(fields[id_col]) : std::string();
    out.push_back(make_record(std::move(id), fields[text_col], fields[label_col], row,
                              source));
  }
  return out;
}

std::vector<LabeledText> parse_jsonl(std::istream& in, const std::string& source) {
  std::vector<LabeledText> out;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(row_prefix(row) + "invalid JSON: " + e.what(), row);
    }
    if (!obj.is_object() || !obj.contains("text") || !obj["text"].is_string() ||
        !obj.contains("label")) {
      throw ParseError(row_prefix(row) + "object needs string 'text' and 'label'", row);
    }
    std::string id;
    if (obj.contains("id")) {
      id = obj["id"].is_string() ? obj["id"].get<std::string>() : obj["id"].dump();
    }
    const json& label = obj["label"];
    std::string label_text;
    if (label.is_string()) {
      label_text = label.get<std::string>();
    } else if (label.is_number_integer() || label.is_boolean()) {
      label_text = label.dump();
      if (label.is_boolean()) label_text = label.get<bool>() ? "1" : "0";
    } else {
      label_text = label.dump();
    }
    out.push_back(make_record(std::move(id), obj["text"].get<std::string>(), label_text,
                              row, source));
  }
  return out;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

json ratios_json(const SplitRatios& r) {
  return json::array({r.train, r.validation, r.test});
}

}  // namespace

TextFormat parse_text_format(std::string_view name) {
  const std::string v = lower_ascii(std::string(name));
  if (v == "csv") return TextFormat::kCsv;
  if (v == "tsv") return TextFormat::kTsv;
  if (v == "jsonl") return TextFormat::kJsonl;
  throw ConfigError("unknown corpus format '" + std::string(name) + "'");
}

std::string_view text_format_name(TextFormat format) {
  switch (format) {
    case TextFormat::kCsv: return "CSV";
    case TextFormat::kTsv: return "TSV";
    case TextFormat::kJsonl: return "JSONL";
  }
  return "?";
}

std::vector<LabeledText> parse_labeled(std::istream& in, TextFormat format,
                                       const std::string& source) {
  std::vector<LabeledText> out = format == TextFormat::kJsonl
                                     ? parse_jsonl(in, source)
                                     : parse_delimited(in, format, source);
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto [it, inserted] = seen.emplace(out[i].id, i + 1);
    if (!inserted) {
      throw ParseError(row_prefix(i + 1) + "duplicate id '" + out[i].id +
                           "' (first seen at row " + std::to_string(it->second) + ")",
                       i + 1);
    }
  }
  return out;
}

std::vector<LabeledText> load_labeled(const std::filesystem::path& path,
                                      TextFormat format, const std::string& source) {
  std::ifstream in = open_input(path);
  try {
    return parse_labeled(in, format, source);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.row());
  }
}

void write_labeled(std::ostream& out, const std::vector<LabeledText>& records,
                   TextFormat format) {
  switch (format) {
    case TextFormat::kJsonl:
      for (const LabeledText& r : records) {
        json obj = {{"id", r.id}, {"text", r.text}, {"label", label_value(r.label)}};
        out << obj.dump() << '\n';
      }
      break;
    case TextFormat::kCsv:
      out << "id,text,label\n";
      for (const LabeledText& r : records) {
        out << csv_quote(r.id) << ',' << csv_quote(r.text) << ','
            << label_value(r.label) << '\n';
      }
      break;
    case TextFormat::kTsv:
      out << "id\ttext\tlabel\n";
      for (const LabeledText& r : records) {
        if (r.text.find_first_of("\t\r\n") != std::string::npos ||
            r.id.find_first_of("\t\r\n") != std::string::npos) {
          throw InvalidArgument("record '" + r.id +
                                "' contains tab or newline; not representable as TSV");
        }
        out << r.id << '\t' << r.text << '\t' << label_value(r.label) << '\n';
      }
      break;
  }
}

void save_labeled(const std::filesystem::path& path,
                  const std::vector<LabeledText>& records, TextFormat format) {
  std::ofstream out = open_output(path);
  write_labeled(out, records, format);
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<TranslationPair> parse_translations(std::istream& in) {
  std::vector<TranslationPair> out;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(row_prefix(row) + "invalid JSON: " + e.what(), row);
    }
    if (!obj.is_object() || !obj.contains("sarcastic") || !obj["sarcastic"].is_string() ||
        !obj.contains("non_sarcastic") || !obj["non_sarcastic"].is_array()) {
      throw ParseError(
          row_prefix(row) + "object needs string 'sarcastic' and array 'non_sarcastic'",
          row);
    }
    TranslationPair pair;
    pair.pair_id = obj.contains("pair_id")
                       ? (obj["pair_id"].is_string() ? obj["pair_id"].get<std::string>()
                                                     : obj["pair_id"].dump())
                       : "pair-" + std::to_string(row);
    pair.sarcastic = obj["sarcastic"].get<std::string>();
    if (trim(pair.sarcastic).empty()) {
      throw ParseError(row_prefix(row) + "empty sarcastic text", row);
    }
    for (const json& t : obj["non_sarcastic"]) {
      if (!t.is_string()) {
        throw ParseError(row_prefix(row) + "non_sarcastic entries must be strings", row);
      }
      pair.non_sarcastic.push_back(t.get<std::string>());
    }
    if (!ids.insert(pair.pair_id).second) {
      throw ParseError(row_prefix(row) + "duplicate pair_id '" + pair.pair_id + "'", row);
    }
    out.push_back(std::move(pair));
  }
  return out;
}

std::vector<TranslationPair> load_translations(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  try {
    return parse_translations(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.row());
  }
}

void write_translations(std::ostream& out, const std::vector<TranslationPair>& pairs) {
  for (const TranslationPair& p : pairs) {
    json obj = {{"pair_id", p.pair_id},
                {"sarcastic", p.sarcastic},
                {"non_sarcastic", p.non_sarcastic}};
    out << obj.dump() << '\n';
  }
}

std::vector<TranslationPair> dedup_translations(std::vector<TranslationPair> pairs) {
  std::vector<TranslationPair> out;
  out.reserve(pairs.size());
  for (TranslationPair& pair : pairs) {
    std::unordered_set<std::string> seen;
    std::vector<std::string> kept;
    for (std::string& t : pair.non_sarcastic) {
      std::string key = normalize_text(t);
      if (key.empty()) continue;
      if (seen.insert(std::move(key)).second) kept.push_back(std::move(t));
    }
    if (kept.empty()) continue;
    pair.non_sarcastic = std::move(kept);
    out.push_back(std::move(pair));
  }
  return out;
}

std::vector<TripletExample> build_triplets(const std::vector<TranslationPair>& pairs,
                                           std::uint64_t seed) {
  if (pairs.size() < 2) {
    throw InvalidArgument("insufficient pairs for unrelated positives");
  }
  std::unordered_set<std::string> ids;
  for (const TranslationPair& p : pairs) {
    if (!ids.insert(p.pair_id).second) {
      throw InvalidArgument("duplicate pair_id '" + p.pair_id + "'");
    }
  }
  // offsets[i] = number of translations in pairs [0, i).
  std::vector<std::size_t> offsets(pairs.size() + 1, 0);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    offsets[i + 1] = offsets[i] + pairs[i].non_sarcastic.size();
  }
  const std::size_t total = offsets.back();

  std::mt19937_64 rng(seed);
  std::vector<TripletExample> out;
  out.reserve(total);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const TranslationPair& pair = pairs[i];
    const std::size_t own = pair.non_sarcastic.size();
    if (own == 0) continue;
    const std::size_t pool = total - own;
    if (pool == 0) throw InvalidArgument("insufficient pairs for unrelated positives");
    for (const std::string& anchor : pair.non_sarcastic) {
      std::uniform_int_distribution<std::size_t> pick(0, pool - 1);
      std::size_t flat = pick(rng);
      // Skip over the anchor's own pair in the flattened translation list.
      if (flat >= offsets[i]) flat += own;
      const auto owner = static_cast<std::size_t>(
          std::upper_bound(offsets.begin(), offsets.end(), flat) - offsets.begin() - 1);
      const TranslationPair& other = pairs[owner];
      out.push_back({anchor, other.non_sarcastic[flat - offsets[owner]], pair.sarcastic,
                     pair.pair_id, other.pair_id});
    }
  }
  return out;
}

void write_triplets(std::ostream& out, const std::vector<TripletExample>& triplets) {
  for (const TripletExample& t : triplets) {
    json obj = {{"anchor", t.anchor},
                {"positive", t.positive},
                {"negative", t.negative},
                {"anchor_pair_id", t.anchor_pair_id},
                {"positive_pair_id", t.positive_pair_id}};
    out << obj.dump() << '\n';
  }
}

std::vector<TripletExample> parse_triplets(std::istream& in) {
  std::vector<TripletExample> out;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    try {
      const json obj = json::parse(line);
      out.push_back({obj.at("anchor").get<std::string>(),
                     obj.at("positive").get<std::string>(),
                     obj.at("negative").get<std::string>(),
                     obj.at("anchor_pair_id").get<std::string>(),
                     obj.at("positive_pair_id").get<std::string>()});
    } catch (const json::exception& e) {
      throw ParseError(row_prefix(row) + "invalid triplet: " + e.what(), row);
    }
  }
  return out;
}

CorpusSplit split(const std::vector<LabeledText>& corpus, const SplitRatios& ratios,
                  std::uint64_t seed) {
  const double sum = ratios.train + ratios.validation + ratios.test;
  if (ratios.train < 0 || ratios.validation < 0 || ratios.test < 0 ||
      std::abs(sum - 1.0) > 1e-9) {
    throw InvalidArgument("split ratios must be non-negative and sum to 1");
  }
  std::unordered_set<std::string> ids;
  for (const LabeledText& r : corpus) {
    if (!ids.insert(r.id).second) {
      throw InvalidArgument("duplicate id '" + r.id + "' in corpus");
    }
  }
  const std::size_t n = corpus.size();
  // The epsilon keeps products like 10 * 0.7 from flooring one short.
  auto floor_size = [n](double r) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * r + 1e-9));
  };
  const std::size_t n_val = std::min(n, floor_size(ratios.validation));
  const std::size_t n_test = std::min(n - n_val, floor_size(ratios.test));
  const std::size_t n_train = n - n_val - n_test;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  CorpusSplit out;
  out.seed = seed;
  out.ratios = ratios;
  for (std::size_t k = 0; k < n; ++k) {
    const LabeledText& r = corpus[order[k]];
    if (k < n_train) {
      out.train.push_back(r);
    } else if (k < n_train + n_val) {
      out.validation.push_back(r);
    } else {
      out.test.push_back(r);
    }
  }
  return out;
}

SplitManifest manifest_of(const CorpusSplit& s) {
  SplitManifest m;
  m.seed = s.seed;
  m.ratios = s.ratios;
  for (const auto& r : s.train) m.train.push_back(r.id);
  for (const auto& r : s.validation) m.validation.push_back(r.id);
  for (const auto& r : s.test) m.test.push_back(r.id);
  return m;
}

CorpusSplit apply_manifest(const std::vector<LabeledText>& corpus,
                           const SplitManifest& manifest) {
  std::unordered_map<std::string, const LabeledText*> by_id;
  for (const LabeledText& r : corpus) by_id.emplace(r.id, &r);
  std::unordered_set<std::string> used;
  CorpusSplit out;
  out.seed = manifest.seed;
  out.ratios = manifest.ratios;
  auto fill = [&](const std::vector<std::string>& ids, std::vector<LabeledText>& dst) {
    for (const std::string& id : ids) {
      auto it = by_id.find(id);
      if (it == by_id.end()) {
        throw InvalidArgument("split manifest lists unknown id '" + id + "'");
      }
      if (!used.insert(id).second) {
        throw InvalidArgument("split manifest lists id '" + id + "' twice");
      }
      dst.push_back(*it->second);
    }
  };
  fill(manifest.train, out.train);
  fill(manifest.validation, out.validation);
  fill(manifest.test, out.test);
  if (used.size() != corpus.size()) {
    for (const LabeledText& r : corpus) {
      if (!used.count(r.id)) {
        throw InvalidArgument("split manifest does not assign id '" + r.id + "'");
      }
    }
  }
  return out;
}

void write_split_manifest(const std::filesystem::path& path,
                          const SplitManifest& m) {
  json obj = {{"seed", m.seed},
              {"ratios", ratios_json(m.ratios)},
              {"train", m.train},
              {"validation", m.validation},
              {"test", m.test}};
  std::ofstream out = open_output(path);
  out << obj.dump(1) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

SplitManifest read_split_manifest(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  try {
    const json obj = json::parse(in);
    SplitManifest m;
    m.seed = obj.value("seed", std::uint64_t{0});
    if (obj.contains("ratios")) {
      const auto& r = obj["ratios"];
      m.ratios = {r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>()};
    }
    m.train = obj.at("train").get<std::vector<std::string>>();
    m.validation = obj.value("validation", std::vector<std::string>{});
    m.test = obj.at("test").get<std::vector<std::string>>();
    return m;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": invalid split manifest: " + e.what());
  }
}

}  // namespace scl
