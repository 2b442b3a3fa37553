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

// Risk estimates from game transcripts, and metrics for comparing two sets of
// per-record estimates.

#ifndef RECRISK_RISK_H_
#define RECRISK_RISK_H_

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "recrisk/game.h"

namespace recrisk {

// Empirical false positive / false negative rates at one threshold.
struct RatePair {
  double alpha = 0.0;
  double beta = 0.0;
  size_t n0 = 0;
  size_t n1 = 0;
};

// Guess b = 1 iff score >= gamma.
absl::StatusOr<RatePair> EmpiricalRates(const GameTranscript& transcript,
                                        double gamma);

struct RiskEstimate {
  double auc = 0.5;
  GameKind kind = GameKind::kModelSeeded;
  size_t n_eval = 0;
  std::string record_id;

  // Confidence radius of each class's error rate at level rho.
  absl::StatusOr<double> Radius(double rho) const;
};

// P(score_in > score_out) + P(tie) / 2 over all in/out pairs, by sorting.
absl::StatusOr<RiskEstimate> RocAuc(const GameTranscript& transcript);

// Same statistic from raw scores.
absl::StatusOr<double> AucFromScores(std::span<const double> in_scores,
                                     std::span<const double> out_scores);

// sqrt(log(2 / rho) / (2 n)): with probability 1 - rho an n-sample Bernoulli
// mean is within this distance of its expectation.
absl::StatusOr<double> HoeffdingRadius(size_t n_per_class, double rho);

struct RiskPair {
  double traditional = 0.0;
  double model_seeded = 0.0;
};

// |{T <= t and MS > t}| / |{MS > t}|. Fails with kFailedPrecondition when no
// record has MS > t; see IsUndefinedMissRate().
absl::StatusOr<double> MissRate(std::span<const RiskPair> estimates, double t);
bool IsUndefinedMissRate(const absl::Status& status);

// Root mean squared difference between the two estimates.
absl::StatusOr<double> Rmsd(std::span<const RiskPair> estimates);

// Lower bound on the false negative rate at false positive rate alpha of any
// test against an (epsilon, delta)-DP mechanism:
//   max{0, 1 - e^eps alpha - delta, e^-eps (1 - alpha - delta)}.
double DpTradeoffLowerBound(double epsilon, double delta, double alpha);

enum class CurveSource { kEmpirical, kExact, kDpBound };

// (alpha, beta) points sorted by alpha, then by decreasing beta.
struct TradeoffCurve {
  std::vector<std::pair<double, double>> points;
  CurveSource source = CurveSource::kEmpirical;
};

// Lowest beta on the piecewise-linear curve at `alpha`.
double CurveBetaAt(const TradeoffCurve& curve, double alpha);

// Rates at every distinct score used as threshold, plus a threshold above all
// scores; deduplicated.
absl::StatusOr<TradeoffCurve> EmpiricalTradeoff(const GameTranscript& transcript);

struct DistributionSummary {
  // (value, fraction of values <= value) at each distinct value.
  std::vector<std::pair<double, double>> cdf;
  double histogram_min = 0.0;
  double bin_width = 0.02;
  std::vector<size_t> histogram;
  double p10 = 0.0;
  double p50 = 0.0;
  double p90 = 0.0;
};

// Linear interpolation between order statistics at position (n - 1) q.
double Percentile(std::vector<double> values, double q);

absl::StatusOr<DistributionSummary> SummarizeDistribution(
    std::span<const double> values, double bin_width = 0.02);

}  // namespace recrisk

#endif  // RECRISK_RISK_H_
