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

// Synthetic data generators behind a uniform fit/sample interface:
// independent marginals, a Bayesian network with greedy mutual-information
// structure learning, a Laplace-privatized variant of it, and an analytic
// toy whose output distribution is known exactly.

#ifndef RECRISK_GENERATOR_H_
#define RECRISK_GENERATOR_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "recrisk/data.h"
#include "recrisk/seed.h"

namespace recrisk {

struct IndependentMarginals {
  friend bool operator==(const IndependentMarginals&,
                         const IndependentMarginals&) = default;
};

struct BayesNet {
  int32_t max_parents = 2;
  // Candidate parents whose information gain does not exceed this are
  // skipped.
  double mi_floor = 0.0;
  friend bool operator==(const BayesNet&, const BayesNet&) = default;
};

// BayesNet whose conditional tables are released through the Laplace
// mechanism. The structure itself is learned without noise.
struct PrivateBayesNet {
  int32_t max_parents = 2;
  double epsilon = 1.0;
  double mi_floor = 0.0;
  friend bool operator==(const PrivateBayesNet&,
                         const PrivateBayesNet&) = default;
};

// Releases a single bit: 1 with probability p_in when the target record is in
// the training data, p_out otherwise.
struct AnalyticToy {
  double p_in = 0.5;
  double p_out = 0.5;
  friend bool operator==(const AnalyticToy&, const AnalyticToy&) = default;
};

using GeneratorKind =
    std::variant<IndependentMarginals, BayesNet, PrivateBayesNet, AnalyticToy>;

struct GeneratorSpec {
  GeneratorKind kind = BayesNet{};
  // Add-alpha count smoothing for the conditional tables.
  double smoothing = 1.0;

  friend bool operator==(const GeneratorSpec&, const GeneratorSpec&) = default;
};

absl::Status ValidateGeneratorSpec(const GeneratorSpec& spec);
bool IsToy(const GeneratorSpec& spec);
// "marginals", "bayesnet", "private_bayesnet" or "toy".
absl::string_view KindName(const GeneratorSpec& spec);

// Parent sets plus a topological column order.
struct Structure {
  std::vector<size_t> order;
  std::vector<std::vector<size_t>> parents;  // indexed by column

  friend bool operator==(const Structure&, const Structure&) = default;
};

// True iff every column's parents precede it in `order` and `order` is a
// permutation of the columns.
bool IsTopologicallyValid(const Structure& structure);

// P(column | parents). Rows are indexed by the mixed-radix encoding of the
// parent values (first parent most significant).
struct ConditionalTable {
  size_t column = 0;
  std::vector<size_t> parents;
  std::vector<int32_t> parent_cardinalities;
  int32_t arity = 1;
  double smoothing = 0.0;
  std::vector<double> counts;  // rows x arity
  std::vector<double> probs;   // rows x arity

  size_t rows() const { return arity == 0 ? 0 : counts.size() / arity; }
  size_t RowIndex(const Record& record) const;
  std::span<const double> Row(size_t row) const {
    return std::span<const double>(probs).subspan(row * arity, arity);
  }

  friend bool operator==(const ConditionalTable&,
                         const ConditionalTable&) = default;
};

using Tables = std::vector<ConditionalTable>;  // indexed by column

struct ToyState {
  bool member = false;
  double p_in = 0.5;
  double p_out = 0.5;
  friend bool operator==(const ToyState&, const ToyState&) = default;
};

struct FittedGenerator {
  GeneratorSpec spec;
  std::shared_ptr<const Schema> schema;
  Structure structure;
  Tables tables;
  std::optional<ToyState> toy;
  Seed fit_seed;
};

// Empirical mutual information (nats) between column `column` and the joint
// configuration of `others`.
double MutualInformation(const Dataset& data, size_t column,
                         std::span<const size_t> others);

// Visits columns in a seeded random order; each column greedily takes parents
// from the columns visited before it, each step adding the candidate that
// maximizes I(column; parents), until `max_parents` is reached or the best
// gain is <= `mi_floor`.
absl::StatusOr<Structure> LearnStructure(const Dataset& training,
                                         int32_t max_parents, Seed seed,
                                         double mi_floor = 0.0);

// Row-normalized (count + smoothing) / (total + smoothing * arity). A row
// with zero total and zero smoothing is uniform.
Tables EstimateTables(const Dataset& training, const Structure& structure,
                      double smoothing);

// Laplace mechanism on the table counts. The budget is split equally over the
// columns. Adding or removing one record moves one count by 1 in each table,
// and replacing one record moves two counts, so the per-table L1 sensitivity
// is taken as 2 and each count gets Laplace(2 * columns / epsilon) noise.
// Noisy counts are clamped at zero and renormalized with the table's
// smoothing; rows that end up all-zero become uniform.
Tables PrivatizeTables(const Tables& tables, const Structure& structure,
                       double epsilon, Seed seed);

// Trains a generator. For AnalyticToy, `target_hint` is required and only its
// membership in `training` is recorded.
absl::StatusOr<FittedGenerator> Fit(const GeneratorSpec& spec,
                                    const Dataset& training,
                                    const std::optional<Record>& target_hint,
                                    Seed seed);

// n i.i.d. ancestral samples. Toy generators only support n == 0.
absl::StatusOr<Dataset> Sample(const FittedGenerator& generator, size_t n,
                               Seed seed);

// The toy generator's released bit.
absl::StatusOr<bool> ReleaseBit(const FittedGenerator& generator, Seed seed);

// Versioned text form of a fitted generator (spec, structure, tables, seed).
// Doubles are written with round-trip precision.
std::string SerializeGenerator(const FittedGenerator& generator);
absl::StatusOr<FittedGenerator> ParseGenerator(absl::string_view text,
                                               const Schema& schema);

}  // namespace recrisk

#endif  // RECRISK_GENERATOR_H_
