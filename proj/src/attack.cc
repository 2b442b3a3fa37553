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

#include "recrisk/attack.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "absl/strings/str_cat.h"
#include "recrisk/parallel.h"

namespace recrisk {
namespace {

// Binomial coefficient, saturating at `cap`.
uint64_t ChooseCapped(uint64_t n, uint64_t k, uint64_t cap) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  long double result = 1;
  for (uint64_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > cap) return cap + 1;
  }
  return static_cast<uint64_t>(std::llround(result));
}

// All k-subsets of [0, n) in lexicographic order.
std::vector<std::vector<size_t>> AllSubsets(size_t n, size_t k) {
  std::vector<std::vector<size_t>> out;
  std::vector<size_t> current(k);
  std::iota(current.begin(), current.end(), size_t{0});
  while (true) {
    out.push_back(current);
    size_t i = k;
    while (i > 0 && current[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++current[i - 1];
    for (size_t j = i; j < k; ++j) current[j] = current[j - 1] + 1;
  }
  return out;
}

// Largest eigenvalue of the PSD matrix Z^T Z / N by power iteration.
double TopEigenvalue(const std::vector<std::vector<double>>& z) {
  const size_t n = z.size();
  const size_t d = z.front().size();
  std::vector<double> v(d, 1.0 / std::sqrt(static_cast<double>(d)));
  std::vector<double> next(d);
  double lambda = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (size_t i = 0; i < n; ++i) {
      const double dot = std::inner_product(z[i].begin(), z[i].end(), v.begin(), 0.0);
      for (size_t j = 0; j < d; ++j) next[j] += dot * z[i][j];
    }
    double norm = 0.0;
    for (double& x : next) {
      x /= n;
      norm += x * x;
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) return 0.0;
    for (size_t j = 0; j < d; ++j) v[j] = next[j] / norm;
    if (std::fabs(norm - lambda) <= 1e-9 * norm) return norm;
    lambda = norm;
  }
  return lambda;
}

}  // namespace

absl::StatusOr<QueryBank> MakeQueryBank(const Schema& schema,
                                        std::span<const int32_t> k_values,
                                        int32_t queries_per_k, Seed seed) {
  if (queries_per_k < 1) {
    return absl::InvalidArgumentError("queries_per_k must be >= 1");
  }
  const size_t d = schema.size();
  std::set<int32_t> ks(k_values.begin(), k_values.end());
  for (const int32_t k : ks) {
    if (k < 1 || static_cast<size_t>(k) > d) {
      return absl::OutOfRangeError(absl::StrCat(
          "subset size ", k, " outside [1, ", d, "] for this schema"));
    }
  }
  QueryBank bank;
  bank.k_values.assign(ks.begin(), ks.end());
  bank.bank_seed = seed;
  std::set<std::vector<size_t>> at_most_seen;
  for (const int32_t k : ks) {
    std::vector<std::vector<size_t>> subsets;
    const uint64_t available =
        ChooseCapped(d, k, static_cast<uint64_t>(queries_per_k));
    if (available <= static_cast<uint64_t>(queries_per_k)) {
      subsets = AllSubsets(d, k);
    } else {
      Rng rng(DeriveSeed(seed, "subsets", k));
      std::set<std::vector<size_t>> seen;
      std::vector<size_t> columns(d);
      while (subsets.size() < static_cast<size_t>(queries_per_k)) {
        std::iota(columns.begin(), columns.end(), size_t{0});
        for (int32_t i = 0; i < k; ++i) {
          const size_t j = i + static_cast<size_t>(rng.UniformInt(d - i));
          std::swap(columns[i], columns[j]);
        }
        std::vector<size_t> subset(columns.begin(), columns.begin() + k);
        std::sort(subset.begin(), subset.end());
        if (seen.insert(subset).second) subsets.push_back(std::move(subset));
      }
    }
    for (const auto& subset : subsets) {
      bank.queries.push_back(Query{subset, QueryKind::kExactMatch});
      std::vector<size_t> ordered;
      for (const size_t c : subset) {
        if (schema.column(c).kind == ColumnKind::kOrderedDiscrete) {
          ordered.push_back(c);
        }
      }
      if (!ordered.empty() && at_most_seen.insert(ordered).second) {
        bank.queries.push_back(Query{std::move(ordered), QueryKind::kAtMostMatch});
      }
    }
  }
  return bank;
}

absl::StatusOr<std::vector<double>> ExtractFeatures(const Dataset& d_syn,
                                                    const Record& x,
                                                    const QueryBank& bank) {
  if (d_syn.empty()) {
    return absl::OutOfRangeError("cannot extract features from an empty dataset");
  }
  if (absl::Status s = CheckConforms(d_syn.schema(), x); !s.ok()) return s;
  std::vector<double> features;
  features.reserve(bank.queries.size());
  for (const Query& q : bank.queries) {
    size_t hits = 0;
    for (const Record& r : d_syn.records()) {
      bool match = true;
      for (const size_t c : q.columns) {
        const bool ok = q.kind == QueryKind::kExactMatch
                            ? r.values[c] == x.values[c]
                            : r.values[c] <= x.values[c];
        if (!ok) {
          match = false;
          break;
        }
      }
      hits += match ? 1 : 0;
    }
    features.push_back(static_cast<double>(hits) / d_syn.size());
  }
  return features;
}

absl::StatusOr<std::vector<ShadowSet>> BuildShadowSets(const Dataset& d_aux,
                                                       const Record& x,
                                                       size_t n,
                                                       size_t n_shadow,
                                                       Seed seed) {
  if (n_shadow % 2 != 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("n_shadow must be even, got ", n_shadow));
  }
  if (n == 0) return absl::InvalidArgumentError("shadow dataset size must be >= 1");
  if (absl::Status s = CheckConforms(d_aux.schema(), x); !s.ok()) return s;
  const std::vector<size_t> copies = IndicesEqualTo(d_aux, x);
  if (n > d_aux.size() - copies.size()) {
    return absl::FailedPreconditionError(
        absl::StrCat("shadow datasets of size ", n, " need more than ",
                     d_aux.size() - copies.size(), " auxiliary records"));
  }
  std::vector<ShadowSet> sets;
  sets.reserve(n_shadow);
  for (size_t i = 0; i < n_shadow; ++i) {
    const bool member = i < n_shadow / 2;
    absl::StatusOr<std::vector<size_t>> picked =
        SampleIndices(d_aux.size(), member ? n - 1 : n,
                      DeriveSeed(seed, "shadow", i), copies);
    if (!picked.ok()) return picked.status();
    std::vector<Record> records;
    records.reserve(n);
    if (member) records.push_back(x);
    for (const size_t j : *picked) records.push_back(d_aux.record(j));
    sets.push_back(ShadowSet{d_aux.WithRecords(std::move(records)), member});
  }
  return sets;
}

double Logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

absl::StatusOr<MetaClassifier> TrainMetaClassifier(
    std::span<const std::vector<double>> features, std::span<const int> labels,
    const TrainingOptions& options, Seed seed) {
  const size_t n = features.size();
  if (n != labels.size()) {
    return absl::InvalidArgumentError("features and labels differ in length");
  }
  if (n < 2) return absl::InvalidArgumentError("need at least two examples");
  const size_t d = features.front().size();
  size_t positives = 0;
  for (size_t i = 0; i < n; ++i) {
    if (features[i].size() != d) {
      return absl::InvalidArgumentError("ragged feature matrix");
    }
    if (labels[i] != 0 && labels[i] != 1) {
      return absl::InvalidArgumentError("labels must be 0 or 1");
    }
    positives += labels[i];
  }
  if (positives == 0 || positives == n) {
    return absl::FailedPreconditionError(
        "training labels contain a single class");
  }
  if (options.epochs < 0 || !(options.learning_rate > 0) || !(options.l2 >= 0)) {
    return absl::InvalidArgumentError("invalid training options");
  }

  // Standardize; constant columns are dropped (their weight stays 0).
  std::vector<double> mean(d, 0.0), scale(d, 0.0);
  for (const auto& row : features) {
    for (size_t j = 0; j < d; ++j) mean[j] += row[j];
  }
  for (double& m : mean) m /= n;
  for (const auto& row : features) {
    for (size_t j = 0; j < d; ++j) scale[j] += (row[j] - mean[j]) * (row[j] - mean[j]);
  }
  for (double& s : scale) s = std::sqrt(s / n);
  std::vector<std::vector<double>> z(n, std::vector<double>(d + 1, 1.0));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < d; ++j) {
      z[i][j] = scale[j] > 1e-12 ? (features[i][j] - mean[j]) / scale[j] : 0.0;
    }
  }

  // The logistic loss has curvature at most lambda_max(Z^T Z / N) / 4.
  const double curvature = std::max(0.25 * TopEigenvalue(z), 1e-12);
  const double step = options.learning_rate / curvature;

  std::vector<double> w(d + 1, 0.0);
  if (options.random_init) {
    Rng rng(seed);
    for (size_t j = 0; j < d; ++j) {
      if (scale[j] > 1e-12) w[j] = 0.01 * (rng.UniformDouble() - 0.5);
    }
  }
  std::vector<double> grad(d + 1);
  int32_t epoch = 0;
  for (; epoch < options.epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (size_t i = 0; i < n; ++i) {
      const double p =
          Logistic(std::inner_product(z[i].begin(), z[i].end(), w.begin(), 0.0));
      const double r = p - labels[i];
      for (size_t j = 0; j <= d; ++j) grad[j] += r * z[i][j];
    }
    double change = 0.0;
    for (size_t j = 0; j <= d; ++j) {
      double updated = w[j] - step * grad[j] / n;
      // Implicit step on the penalty keeps any l2 stable.
      if (j < d) updated /= 1.0 + step * options.l2;
      change = std::max(change, std::fabs(updated - w[j]));
      w[j] = updated;
    }
    if (change < 1e-12) {
      ++epoch;
      break;
    }
  }

  MetaClassifier meta;
  meta.weights.assign(d + 1, 0.0);
  double bias = w[d];
  for (size_t j = 0; j < d; ++j) {
    if (scale[j] <= 1e-12) continue;
    meta.weights[j] = w[j] / scale[j];
    bias -= w[j] * mean[j] / scale[j];
  }
  meta.weights[d] = bias;
  meta.shadow_count = n;
  meta.epochs_run = epoch;
  meta.options = options;
  meta.seed = seed;
  return meta;
}

absl::StatusOr<double> Predict(const MetaClassifier& meta,
                               std::span<const double> features) {
  if (features.size() != meta.feature_count()) {
    return absl::OutOfRangeError(
        absl::StrCat("classifier expects ", meta.feature_count(),
                     " features, got ", features.size()));
  }
  double z = meta.weights.back();
  for (size_t j = 0; j < features.size(); ++j) z += meta.weights[j] * features[j];
  return Logistic(z);
}

absl::StatusOr<double> AttackScore(const MetaClassifier& meta,
                                   const Dataset& d_syn, const Record& x,
                                   const QueryBank& bank) {
  absl::StatusOr<std::vector<double>> f = ExtractFeatures(d_syn, x, bank);
  if (!f.ok()) return f.status();
  return Predict(meta, *f);
}

absl::StatusOr<TrainedAttack> TrainAttack(const Dataset& d_aux, const Record& x,
                                          const GeneratorSpec& spec, size_t n,
                                          const AttackConfig& config,
                                          Seed seed) {
  if (IsToy(spec)) {
    return absl::InvalidArgumentError(
        "toy generators are attacked through their released bit");
  }
  absl::StatusOr<QueryBank> bank =
      MakeQueryBank(d_aux.schema(), config.k_values, config.queries_per_k,
                    DeriveSeed(seed, "bank"));
  if (!bank.ok()) return bank.status();
  absl::StatusOr<std::vector<ShadowSet>> shadows = BuildShadowSets(
      d_aux, x, n, config.n_shadow, DeriveSeed(seed, "shadow-sets"));
  if (!shadows.ok()) return shadows.status();

  std::vector<std::vector<double>> features(shadows->size());
  std::vector<int> labels(shadows->size());
  absl::Status status = ParallelFor(
      shadows->size(), config.threads, [&](size_t i) -> absl::Status {
        const ShadowSet& shadow = (*shadows)[i];
        absl::StatusOr<FittedGenerator> model = Fit(
            spec, shadow.data, x, DeriveSeed(seed, "shadow-fit", i));
        if (!model.ok()) return model.status();
        absl::StatusOr<Dataset> synthetic =
            Sample(*model, n, DeriveSeed(seed, "shadow-sample", i));
        if (!synthetic.ok()) return synthetic.status();
        absl::StatusOr<std::vector<double>> f =
            ExtractFeatures(*synthetic, x, *bank);
        if (!f.ok()) return f.status();
        features[i] = *std::move(f);
        labels[i] = shadow.member ? 1 : 0;
        return absl::OkStatus();
      });
  if (!status.ok()) return status;

  absl::StatusOr<MetaClassifier> meta = TrainMetaClassifier(
      features, labels, config.training, DeriveSeed(seed, "meta"));
  if (!meta.ok()) return meta.status();
  return TrainedAttack{*std::move(bank), *std::move(meta)};
}

absl::StatusOr<double> ShadowModelAdversary::Score(const FittedGenerator& model,
                                                   const Record& x,
                                                   Seed seed) const {
  absl::StatusOr<Dataset> synthetic = Sample(model, synthetic_size_, seed);
  if (!synthetic.ok()) return synthetic.status();
  return AttackScore(attack_.meta, *synthetic, x, attack_.bank);
}

absl::StatusOr<double> ToyBitAdversary::Score(const FittedGenerator& model,
                                              const Record&, Seed seed) const {
  absl::StatusOr<bool> bit = ReleaseBit(model, seed);
  if (!bit.ok()) return bit.status();
  return *bit ? 1.0 : 0.0;
}

}  // namespace recrisk
