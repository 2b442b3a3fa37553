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

// Exact ground truth for enumerable model spaces: error rates of the toy
// generator, optimal (likelihood-ratio) trade-off curves between two finite
// distributions, and mixture averages of per-dataset rates.

#ifndef RECRISK_ORACLE_H_
#define RECRISK_ORACLE_H_

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "recrisk/risk.h"

namespace recrisk {

class DiscreteDistribution {
 public:
  // Probabilities must be non-negative and sum to 1 within 1e-12; labels
  // must be distinct.
  static absl::StatusOr<DiscreteDistribution> Create(
      std::vector<std::string> support, std::vector<double> probs);

  const std::vector<std::string>& support() const { return support_; }
  const std::vector<double>& probs() const { return probs_; }
  size_t size() const { return probs_.size(); }

 private:
  DiscreteDistribution(std::vector<std::string> support,
                       std::vector<double> probs)
      : support_(std::move(support)), probs_(std::move(probs)) {}

  std::vector<std::string> support_;
  std::vector<double> probs_;
};

struct ErrorRates {
  double alpha = 0.0;
  double beta = 0.0;
};

// Rates of the test "guess member iff the released bit is 1".
ErrorRates ToyExactRates(double p_in, double p_out);

// The toy's released-bit distributions {"0", "1"} for an out- and in-model.
std::pair<DiscreteDistribution, DiscreteDistribution> ToyBitDistributions(
    double p_in, double p_out);

// Vertices of the optimal trade-off curve for H0: p0 against H1: p1. Outcomes
// are added to the rejection region in decreasing likelihood ratio p1/p0
// (p0 = 0 first), starting from (0, 1); randomized tests interpolate
// linearly between consecutive vertices.
absl::StatusOr<TradeoffCurve> NeymanPearsonCurve(const DiscreteDistribution& p0,
                                                 const DiscreteDistribution& p1);

// Weighted means of per-component rates.
absl::StatusOr<ErrorRates> MixtureAverageRates(
    std::span<const ErrorRates> components, std::span<const double> weights);

// The exact trade-off curve of a generator whose model space is enumerable,
// given the distribution over models fit with and without the target.
absl::StatusOr<TradeoffCurve> DpdExactForEnumerableGenerator(
    const DiscreteDistribution& fit_distribution_in,
    const DiscreteDistribution& fit_distribution_out);

}  // namespace recrisk

#endif  // RECRISK_ORACLE_H_
