// Copyright 2026 The Recrisk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "recrisk/data.h"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "absl/container/flat_hash_map.h"
#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"

namespace recrisk {
namespace {

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<absl::string_view> SplitLines(absl::string_view text) {
  std::vector<absl::string_view> lines = absl::StrSplit(text, '\n');
  for (auto& line : lines) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  }
  // A trailing newline yields one empty final line.
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

bool ParseNumber(absl::string_view s, double* out) {
  return absl::SimpleAtod(s, out);
}

// Levels for an ordinal column: numeric order when every value parses,
// lexical order otherwise.
std::vector<std::string> OrdinalLevels(
    const std::vector<absl::string_view>& values) {
  std::set<absl::string_view> distinct(values.begin(), values.end());
  std::vector<std::string> levels(distinct.begin(), distinct.end());
  std::vector<double> numeric(levels.size());
  bool all_numeric = true;
  for (size_t i = 0; i < levels.size(); ++i) {
    all_numeric = all_numeric && ParseNumber(levels[i], &numeric[i]);
  }
  if (all_numeric) {
    std::vector<size_t> order(levels.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return numeric[a] < numeric[b]; });
    std::vector<std::string> sorted;
    sorted.reserve(levels.size());
    for (const size_t i : order) sorted.push_back(levels[i]);
    return sorted;
  }
  return levels;
}

struct Binning {
  std::vector<double> cuts;  // bin(x) = #{cuts <= x}
  std::vector<std::string> labels;
};

// Equal-frequency bins: cut points at the i/bins quantiles of the sorted
// values, with duplicates (and cuts at the minimum) removed.
Binning EqualFrequencyBins(std::vector<double> values, int32_t bins) {
  Binning result;
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  if (n == 0) {
    result.labels.push_back("all");
    return result;
  }
  for (int32_t i = 1; i < bins; ++i) {
    const double cut = values[(static_cast<size_t>(i) * n) / bins];
    if (cut <= values.front()) continue;
    if (!result.cuts.empty() && cut <= result.cuts.back()) continue;
    result.cuts.push_back(cut);
  }
  std::vector<double> edges;
  edges.push_back(values.front());
  edges.insert(edges.end(), result.cuts.begin(), result.cuts.end());
  edges.push_back(values.back());
  for (size_t b = 0; b + 1 < edges.size(); ++b) {
    const bool last = b + 2 == edges.size();
    result.labels.push_back(absl::StrFormat("[%g;%g%s", edges[b], edges[b + 1],
                                            last ? "]" : ")"));
  }
  return result;
}

}  // namespace

absl::StatusOr<Schema> Schema::Create(std::vector<Column> columns) {
  std::unordered_set<std::string> names;
  for (const Column& c : columns) {
    if (c.name.empty()) {
      return absl::InvalidArgumentError("column names must be non-empty");
    }
    if (!names.insert(c.name).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate column name '", c.name, "'"));
    }
    if (c.cardinality < 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("column '", c.name, "' has cardinality < 1"));
    }
    if (!c.labels.empty()) {
      if (c.labels.size() != static_cast<size_t>(c.cardinality)) {
        return absl::InvalidArgumentError(absl::StrCat(
            "column '", c.name, "' has ", c.labels.size(),
            " labels for cardinality ", c.cardinality));
      }
      std::unordered_set<std::string> seen(c.labels.begin(), c.labels.end());
      if (seen.size() != c.labels.size()) {
        return absl::InvalidArgumentError(
            absl::StrCat("column '", c.name, "' has duplicate labels"));
      }
    }
  }
  return Schema(std::move(columns));
}

std::optional<size_t> Schema::IndexOf(absl::string_view name) const {
  for (size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

absl::Status CheckConforms(const Schema& schema, const Record& record) {
  if (record.values.size() != schema.size()) {
    return absl::OutOfRangeError(
        absl::StrCat("record has ", record.values.size(),
                     " values for a schema of ", schema.size(), " columns"));
  }
  for (size_t i = 0; i < schema.size(); ++i) {
    const int32_t v = record.values[i];
    if (v < 0 || v >= schema.column(i).cardinality) {
      return absl::OutOfRangeError(
          absl::StrCat("value ", v, " outside column '",
                       schema.column(i).name, "' of cardinality ",
                       schema.column(i).cardinality));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<Dataset> Dataset::Create(Schema schema,
                                        std::vector<Record> records) {
  for (size_t i = 0; i < records.size(); ++i) {
    if (absl::Status s = CheckConforms(schema, records[i]); !s.ok()) {
      return absl::OutOfRangeError(
          absl::StrCat("record ", i, ": ", s.message()));
    }
  }
  return Dataset(std::make_shared<const Schema>(std::move(schema)),
                 std::move(records));
}

Dataset Dataset::Subset(std::span<const size_t> indices) const {
  std::vector<Record> out;
  out.reserve(indices.size());
  for (const size_t i : indices) {
    assert(i < records_.size());
    out.push_back(records_[i]);
  }
  return Dataset(schema_, std::move(out));
}

Dataset Dataset::WithRecords(std::vector<Record> records) const {
#ifndef NDEBUG
  for (const Record& r : records) assert(CheckConforms(*schema_, r).ok());
#endif
  return Dataset(schema_, std::move(records));
}

absl::StatusOr<SchemaSpec> ParseSchemaSpec(absl::string_view text) {
  SchemaSpec spec;
  int line_no = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_no;
    if (const size_t hash = line.find('#'); hash != absl::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = absl::StripAsciiWhitespace(line);
    if (line.empty()) continue;
    std::vector<absl::string_view> kv = absl::StrSplit(line, '=');
    if (kv.size() != 2) {
      return absl::InvalidArgumentError(
          absl::StrCat("schema line ", line_no, ": expected name = kind"));
    }
    const std::string name(absl::StripAsciiWhitespace(kv[0]));
    std::vector<absl::string_view> kind_parts =
        absl::StrSplit(absl::StripAsciiWhitespace(kv[1]), ':');
    ColumnSpec column;
    const std::string kind = absl::AsciiStrToLower(kind_parts[0]);
    if (kind == "categorical") {
      column.kind = ColumnSpec::Kind::kCategorical;
    } else if (kind == "ordinal") {
      column.kind = ColumnSpec::Kind::kOrdinal;
    } else if (kind == "continuous") {
      column.kind = ColumnSpec::Kind::kContinuous;
    } else {
      return absl::InvalidArgumentError(absl::StrCat(
          "schema line ", line_no, ": unknown column kind '", kind, "'"));
    }
    if (kind_parts.size() > 2 ||
        (kind_parts.size() == 2 &&
         column.kind != ColumnSpec::Kind::kContinuous)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "schema line ", line_no, ": only continuous columns take :bins"));
    }
    if (kind_parts.size() == 2 &&
        (!absl::SimpleAtoi(kind_parts[1], &column.bins) || column.bins < 1)) {
      return absl::InvalidArgumentError(
          absl::StrCat("schema line ", line_no, ": bad bin count"));
    }
    if (name.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("schema line ", line_no, ": empty column name"));
    }
    spec[name] = column;
  }
  return spec;
}

absl::StatusOr<SchemaSpec> LoadSchemaSpec(const std::string& path) {
  absl::StatusOr<std::string> text = ReadFile(path);
  if (!text.ok()) return text.status();
  return ParseSchemaSpec(*text);
}

absl::StatusOr<Dataset> ParseCsv(absl::string_view text, const Schema* schema,
                                 const SchemaSpec& spec) {
  const std::vector<absl::string_view> lines = SplitLines(text);
  if (lines.empty()) return absl::InvalidArgumentError("missing header row");
  const std::vector<absl::string_view> header = absl::StrSplit(lines[0], ',');
  const size_t arity = header.size();

  std::vector<std::vector<absl::string_view>> cells;  // column-major
  cells.resize(arity);
  for (size_t l = 1; l < lines.size(); ++l) {
    std::vector<absl::string_view> fields = absl::StrSplit(lines[l], ',');
    if (fields.size() != arity) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", l + 1, ": expected ", arity, " fields, got ",
                       fields.size()));
    }
    for (size_t c = 0; c < arity; ++c) cells[c].push_back(fields[c]);
  }
  const size_t n = lines.size() - 1;
  std::vector<Record> records(n, Record{std::vector<int32_t>(arity)});

  if (schema != nullptr) {
    if (schema->size() != arity) {
      return absl::InvalidArgumentError(absl::StrCat(
          "header has ", arity, " columns, schema has ", schema->size()));
    }
    for (size_t c = 0; c < arity; ++c) {
      const Column& col = schema->column(c);
      if (header[c] != col.name) {
        return absl::InvalidArgumentError(
            absl::StrCat("header column ", c, " is '", header[c],
                         "', schema expects '", col.name, "'"));
      }
      absl::flat_hash_map<absl::string_view, int32_t> index;
      for (size_t i = 0; i < col.labels.size(); ++i) {
        index.emplace(col.labels[i], static_cast<int32_t>(i));
      }
      for (size_t r = 0; r < n; ++r) {
        int32_t v = -1;
        if (col.labels.empty()) {
          if (!absl::SimpleAtoi(cells[c][r], &v)) v = -1;
        } else if (auto it = index.find(cells[c][r]); it != index.end()) {
          v = it->second;
        }
        if (v < 0 || v >= col.cardinality) {
          return absl::OutOfRangeError(
              absl::StrCat("line ", r + 2, ": value '", cells[c][r],
                           "' outside the domain of column '", col.name, "'"));
        }
        records[r].values[c] = v;
      }
    }
    return Dataset::Create(*schema, std::move(records));
  }

  std::vector<Column> columns(arity);
  for (size_t c = 0; c < arity; ++c) {
    Column& col = columns[c];
    col.name = std::string(header[c]);
    const auto it = spec.find(col.name);
    const ColumnSpec rule = it == spec.end() ? ColumnSpec{} : it->second;
    switch (rule.kind) {
      case ColumnSpec::Kind::kCategorical: {
        col.kind = ColumnKind::kCategorical;
        absl::flat_hash_map<absl::string_view, int32_t> index;
        for (size_t r = 0; r < n; ++r) {
          auto [pos, inserted] = index.emplace(
              cells[c][r], static_cast<int32_t>(col.labels.size()));
          if (inserted) col.labels.emplace_back(cells[c][r]);
          records[r].values[c] = pos->second;
        }
        break;
      }
      case ColumnSpec::Kind::kOrdinal: {
        col.kind = ColumnKind::kOrderedDiscrete;
        col.labels = OrdinalLevels(cells[c]);
        absl::flat_hash_map<absl::string_view, int32_t> index;
        for (size_t i = 0; i < col.labels.size(); ++i) {
          index.emplace(col.labels[i], static_cast<int32_t>(i));
        }
        for (size_t r = 0; r < n; ++r) records[r].values[c] = index[cells[c][r]];
        break;
      }
      case ColumnSpec::Kind::kContinuous: {
        col.kind = ColumnKind::kOrderedDiscrete;
        std::vector<double> numeric(n);
        for (size_t r = 0; r < n; ++r) {
          if (!ParseNumber(cells[c][r], &numeric[r])) {
            return absl::InvalidArgumentError(
                absl::StrCat("line ", r + 2, ": non-numeric value '",
                             cells[c][r], "' in continuous column '",
                             col.name, "'"));
          }
        }
        Binning binning = EqualFrequencyBins(numeric, rule.bins);
        for (size_t r = 0; r < n; ++r) {
          records[r].values[c] = static_cast<int32_t>(
              std::upper_bound(binning.cuts.begin(), binning.cuts.end(),
                               numeric[r]) -
              binning.cuts.begin());
        }
        col.labels = std::move(binning.labels);
        break;
      }
    }
    col.cardinality = std::max<int32_t>(1, col.labels.size());
    if (col.labels.empty()) col.labels.push_back("");
  }
  absl::StatusOr<Schema> inferred = Schema::Create(std::move(columns));
  if (!inferred.ok()) return inferred.status();
  return Dataset::Create(*std::move(inferred), std::move(records));
}

absl::StatusOr<Dataset> LoadCsv(const std::string& path, const Schema* schema,
                                const SchemaSpec& spec) {
  absl::StatusOr<std::string> text = ReadFile(path);
  if (!text.ok()) return text.status();
  return ParseCsv(*text, schema, spec);
}

std::string ToCsv(const Dataset& dataset) {
  const Schema& schema = dataset.schema();
  std::string out;
  std::vector<absl::string_view> names;
  for (const Column& c : schema.columns()) names.push_back(c.name);
  absl::StrAppend(&out, absl::StrJoin(names, ","), "\n");
  for (const Record& r : dataset.records()) {
    for (size_t c = 0; c < schema.size(); ++c) {
      if (c > 0) out.push_back(',');
      const Column& col = schema.column(c);
      if (col.labels.empty()) {
        absl::StrAppend(&out, r.values[c]);
      } else {
        absl::StrAppend(&out, col.labels[r.values[c]]);
      }
    }
    out.push_back('\n');
  }
  return out;
}

absl::Status WriteCsv(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  out << ToCsv(dataset);
  return out ? absl::OkStatus()
             : absl::UnavailableError(absl::StrCat("write failed: ", path));
}

absl::StatusOr<std::vector<size_t>> SampleIndices(
    size_t pool_size, size_t n, Seed seed, std::span<const size_t> exclude) {
  std::vector<char> excluded(pool_size, 0);
  size_t excluded_count = 0;
  for (const size_t i : exclude) {
    if (i < pool_size && !excluded[i]) {
      excluded[i] = 1;
      ++excluded_count;
    }
  }
  const size_t available = pool_size - excluded_count;
  if (n > available) {
    return absl::FailedPreconditionError(
        absl::StrCat("cannot sample ", n, " records from a pool of ",
                     available));
  }
  std::vector<size_t> candidates;
  candidates.reserve(available);
  for (size_t i = 0; i < pool_size; ++i) {
    if (!excluded[i]) candidates.push_back(i);
  }
  // Partial Fisher-Yates: the first n slots end up a uniform n-subset in
  // uniformly random order.
  Rng rng(seed);
  for (size_t i = 0; i < n; ++i) {
    const size_t j = i + static_cast<size_t>(rng.UniformInt(available - i));
    std::swap(candidates[i], candidates[j]);
  }
  candidates.resize(n);
  return candidates;
}

absl::StatusOr<Dataset> SampleRecords(const Dataset& pool, size_t n, Seed seed,
                                      std::span<const size_t> exclude) {
  absl::StatusOr<std::vector<size_t>> indices =
      SampleIndices(pool.size(), n, seed, exclude);
  if (!indices.ok()) return indices.status();
  return pool.Subset(*indices);
}

absl::StatusOr<SplitResult> Split(const Dataset& pool, size_t aux_size,
                                  size_t eval_size, Seed seed) {
  if (aux_size + eval_size > pool.size()) {
    return absl::FailedPreconditionError(
        absl::StrCat("split sizes ", aux_size, " + ", eval_size,
                     " exceed pool of ", pool.size()));
  }
  absl::StatusOr<std::vector<size_t>> order =
      SampleIndices(pool.size(), aux_size + eval_size, seed);
  if (!order.ok()) return order.status();
  SplitResult result;
  result.aux_indices.assign(order->begin(), order->begin() + aux_size);
  result.eval_indices.assign(order->begin() + aux_size, order->end());
  result.aux = pool.Subset(result.aux_indices);
  result.eval = pool.Subset(result.eval_indices);
  return result;
}

absl::StatusOr<bool> Contains(const Dataset& dataset, const Record& x) {
  if (absl::Status s = CheckConforms(dataset.schema(), x); !s.ok()) return s;
  return std::find(dataset.records().begin(), dataset.records().end(), x) !=
         dataset.records().end();
}

std::vector<size_t> IndicesEqualTo(const Dataset& dataset, const Record& x) {
  std::vector<size_t> out;
  for (size_t i = 0; i < dataset.size(); ++i) {
    if (dataset.record(i) == x) out.push_back(i);
  }
  return out;
}

}  // namespace recrisk
