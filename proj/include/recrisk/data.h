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

// Tabular data model: schemas of categorical and ordered-discrete columns,
// immutable datasets, CSV ingestion, and seeded splitting and sampling.

#ifndef RECRISK_DATA_H_
#define RECRISK_DATA_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "recrisk/seed.h"

namespace recrisk {

enum class ColumnKind { kCategorical, kOrderedDiscrete };

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::kCategorical;
  // Number of categories (or levels for ordered columns).
  int32_t cardinality = 1;
  // Source-file value of each index. Either empty (values are written as
  // integer indices) or exactly `cardinality` distinct entries.
  std::vector<std::string> labels;

  friend bool operator==(const Column&, const Column&) = default;
};

class Schema {
 public:
  Schema() = default;

  // Validates name uniqueness, cardinalities and label counts.
  static absl::StatusOr<Schema> Create(std::vector<Column> columns);

  size_t size() const { return columns_.size(); }
  const Column& column(size_t i) const { return columns_[i]; }
  const std::vector<Column>& columns() const { return columns_; }
  std::optional<size_t> IndexOf(absl::string_view name) const;

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  explicit Schema(std::vector<Column> columns) : columns_(std::move(columns)) {}

  std::vector<Column> columns_;
};

// One row: a 0-based category index per schema column.
struct Record {
  std::vector<int32_t> values;

  friend bool operator==(const Record&, const Record&) = default;
  friend auto operator<=>(const Record&, const Record&) = default;
};

absl::Status CheckConforms(const Schema& schema, const Record& record);

// An immutable, ordered collection of schema-conforming records. Copies share
// the schema.
class Dataset {
 public:
  Dataset() : schema_(std::make_shared<const Schema>()) {}

  // Validates every record against `schema`.
  static absl::StatusOr<Dataset> Create(Schema schema,
                                        std::vector<Record> records);

  const Schema& schema() const { return *schema_; }
  const std::shared_ptr<const Schema>& shared_schema() const { return schema_; }
  const std::vector<Record>& records() const { return records_; }
  const Record& record(size_t i) const { return records_[i]; }
  size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  // Records at `indices`, in that order. Indices must be in range.
  Dataset Subset(std::span<const size_t> indices) const;

  // A dataset on the same schema. The records must conform; this is checked
  // with assert() only, so use Create() for untrusted input.
  Dataset WithRecords(std::vector<Record> records) const;

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.schema() == b.schema() && a.records_ == b.records_;
  }

 private:
  Dataset(std::shared_ptr<const Schema> schema, std::vector<Record> records)
      : schema_(std::move(schema)), records_(std::move(records)) {}

  std::shared_ptr<const Schema> schema_;
  std::vector<Record> records_;
};

// How a source column is turned into a schema column at ingestion.
struct ColumnSpec {
  enum class Kind {
    kCategorical,  // first-appearance indexing
    kOrdinal,      // levels sorted numerically (or lexically if non-numeric)
    kContinuous,   // equal-frequency binning into ordered levels
  };
  Kind kind = Kind::kCategorical;
  int32_t bins = 10;
};

// Column name -> ingestion rule. Columns absent from the map are categorical.
using SchemaSpec = std::map<std::string, ColumnSpec, std::less<>>;

// Parses a schema sidecar. One `name = kind[:bins]` entry per line, kind one
// of `categorical`, `ordinal`, `continuous`; `#` starts a comment.
absl::StatusOr<SchemaSpec> ParseSchemaSpec(absl::string_view text);
absl::StatusOr<SchemaSpec> LoadSchemaSpec(const std::string& path);

// Parses CSV text with a header row. With a `schema`, values are looked up in
// each column's labels (or parsed as indices when a column has no labels) and
// anything outside the domain is an error. Without one, columns are built
// from `spec`.
absl::StatusOr<Dataset> ParseCsv(absl::string_view text,
                                 const Schema* schema = nullptr,
                                 const SchemaSpec& spec = {});
absl::StatusOr<Dataset> LoadCsv(const std::string& path,
                                const Schema* schema = nullptr,
                                const SchemaSpec& spec = {});

// Writes labels (or indices) back out; ParseCsv(ToCsv(d), &d.schema())
// reproduces d.
std::string ToCsv(const Dataset& dataset);
absl::Status WriteCsv(const Dataset& dataset, const std::string& path);

// `n` distinct indices from [0, pool_size) minus `exclude`, without
// replacement, in sampled order.
absl::StatusOr<std::vector<size_t>> SampleIndices(
    size_t pool_size, size_t n, Seed seed,
    std::span<const size_t> exclude = {});

absl::StatusOr<Dataset> SampleRecords(const Dataset& pool, size_t n, Seed seed,
                                      std::span<const size_t> exclude = {});

struct SplitResult {
  Dataset aux;
  Dataset eval;
  std::vector<size_t> aux_indices;
  std::vector<size_t> eval_indices;
};

// Disjoint seeded partition of `pool` into an auxiliary and an evaluation set.
absl::StatusOr<SplitResult> Split(const Dataset& pool, size_t aux_size,
                                  size_t eval_size, Seed seed);

// True iff some record of `dataset` equals `x` in every column.
absl::StatusOr<bool> Contains(const Dataset& dataset, const Record& x);

// Indices of all records equal to `x`.
std::vector<size_t> IndicesEqualTo(const Dataset& dataset, const Record& x);

}  // namespace recrisk

#endif  // RECRISK_DATA_H_
