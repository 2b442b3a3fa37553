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

// Record-specific membership inference against synthetic data generators.
//
// The attacker counts how many synthetic records match the target record on
// random subsets of columns (and, for ordered columns, how many lie at or
// below it), trains a logistic meta-classifier on those counts from shadow
// models fit on auxiliary data, and scores released generators with it.

#ifndef RECRISK_ATTACK_H_
#define RECRISK_ATTACK_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "recrisk/data.h"
#include "recrisk/generator.h"
#include "recrisk/seed.h"

namespace recrisk {

enum class QueryKind { kExactMatch, kAtMostMatch };

struct Query {
  std::vector<size_t> columns;
  QueryKind kind = QueryKind::kExactMatch;

  friend bool operator==(const Query&, const Query&) = default;
};

struct QueryBank {
  std::vector<Query> queries;
  std::vector<int32_t> k_values;
  Seed bank_seed;

  friend bool operator==(const QueryBank&, const QueryBank&) = default;
};

// For each k, `queries_per_k` distinct column subsets drawn uniformly (all
// subsets when there are no more than that). Every subset yields an exact
// match query; subsets containing ordered columns also yield one at-most
// query over those columns (deduplicated across the bank).
absl::StatusOr<QueryBank> MakeQueryBank(const Schema& schema,
                                        std::span<const int32_t> k_values,
                                        int32_t queries_per_k, Seed seed);

// Fraction of `d_syn` answering each query for `x`.
absl::StatusOr<std::vector<double>> ExtractFeatures(const Dataset& d_syn,
                                                    const Record& x,
                                                    const QueryBank& bank);

struct ShadowSet {
  Dataset data;
  bool member = false;
};

// n_shadow/2 datasets of x plus n-1 auxiliary records, then n_shadow/2 of n
// auxiliary records. Auxiliary records equal to x are never drawn.
absl::StatusOr<std::vector<ShadowSet>> BuildShadowSets(const Dataset& d_aux,
                                                       const Record& x,
                                                       size_t n,
                                                       size_t n_shadow,
                                                       Seed seed);

struct TrainingOptions {
  int32_t epochs = 1000;
  // Multiplier on 1/L, where L bounds the curvature of the logistic loss.
  double learning_rate = 1.0;
  double l2 = 0.01;
  // Zero initialization unless set, in which case the seed draws it.
  bool random_init = false;
};

// Logistic regression on raw features; `weights` holds one entry per feature
// followed by the bias.
struct MetaClassifier {
  std::vector<double> weights;
  size_t shadow_count = 0;
  int32_t epochs_run = 0;
  TrainingOptions options;
  Seed seed;

  size_t feature_count() const {
    return weights.empty() ? 0 : weights.size() - 1;
  }
};

// Full-batch gradient descent on the L2-regularized mean logistic loss.
// Features are standardized internally and the scaling folded back into the
// returned weights; the bias is not regularized.
absl::StatusOr<MetaClassifier> TrainMetaClassifier(
    std::span<const std::vector<double>> features, std::span<const int> labels,
    const TrainingOptions& options, Seed seed);

double Logistic(double z);

absl::StatusOr<double> Predict(const MetaClassifier& meta,
                               std::span<const double> features);

// logistic(w . features(d_syn, x) + b).
absl::StatusOr<double> AttackScore(const MetaClassifier& meta,
                                   const Dataset& d_syn, const Record& x,
                                   const QueryBank& bank);

struct AttackConfig {
  size_t n_shadow = 1000;
  std::vector<int32_t> k_values = {1, 2, 3};
  int32_t queries_per_k = 100;
  TrainingOptions training;
  int threads = 1;
};

struct TrainedAttack {
  QueryBank bank;
  MetaClassifier meta;
};

// The shadow-model pipeline for one target record: build shadow sets of size
// n from `d_aux`, fit `spec` on each, sample n synthetic records, extract
// features and train the meta-classifier.
absl::StatusOr<TrainedAttack> TrainAttack(const Dataset& d_aux, const Record& x,
                                          const GeneratorSpec& spec, size_t n,
                                          const AttackConfig& config,
                                          Seed seed);

// What the games need from an attacker: a membership score in [0, 1] for a
// released model. Implementations must be pure in (model, x, seed).
class Adversary {
 public:
  virtual ~Adversary() = default;
  virtual absl::StatusOr<double> Score(const FittedGenerator& model,
                                       const Record& x, Seed seed) const = 0;
};

// Samples a synthetic dataset from the model and scores it with a trained
// attack.
class ShadowModelAdversary : public Adversary {
 public:
  ShadowModelAdversary(TrainedAttack attack, size_t synthetic_size)
      : attack_(std::move(attack)), synthetic_size_(synthetic_size) {}

  absl::StatusOr<double> Score(const FittedGenerator& model, const Record& x,
                               Seed seed) const override;

  const TrainedAttack& attack() const { return attack_; }

 private:
  TrainedAttack attack_;
  size_t synthetic_size_;
};

// Uses a toy generator's released bit directly as the score.
class ToyBitAdversary : public Adversary {
 public:
  absl::StatusOr<double> Score(const FittedGenerator& model, const Record& x,
                               Seed seed) const override;
};

class ConstantAdversary : public Adversary {
 public:
  explicit ConstantAdversary(double score) : score_(score) {}
  absl::StatusOr<double> Score(const FittedGenerator&, const Record&,
                               Seed) const override {
    return score_;
  }

 private:
  double score_;
};

}  // namespace recrisk

#endif  // RECRISK_ATTACK_H_
