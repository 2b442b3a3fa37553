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

#include "recrisk/oracle.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "absl/strings/str_cat.h"

namespace recrisk {

absl::StatusOr<DiscreteDistribution> DiscreteDistribution::Create(
    std::vector<std::string> support, std::vector<double> probs) {
  if (support.size() != probs.size() || probs.empty()) {
    return absl::InvalidArgumentError(
        "support and probabilities must be non-empty and of equal length");
  }
  if (std::set<std::string>(support.begin(), support.end()).size() !=
      support.size()) {
    return absl::InvalidArgumentError("support labels must be distinct");
  }
  double total = 0.0;
  for (const double p : probs) {
    if (!(p >= 0.0)) {
      return absl::InvalidArgumentError("probabilities must be non-negative");
    }
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-12) {
    return absl::InvalidArgumentError(
        absl::StrCat("probabilities sum to ", total, ", not 1"));
  }
  return DiscreteDistribution(std::move(support), std::move(probs));
}

ErrorRates ToyExactRates(double p_in, double p_out) {
  return ErrorRates{p_out, 1.0 - p_in};
}

std::pair<DiscreteDistribution, DiscreteDistribution> ToyBitDistributions(
    double p_in, double p_out) {
  return {DiscreteDistribution::Create({"0", "1"}, {1.0 - p_out, p_out}).value(),
          DiscreteDistribution::Create({"0", "1"}, {1.0 - p_in, p_in}).value()};
}

absl::StatusOr<TradeoffCurve> NeymanPearsonCurve(const DiscreteDistribution& p0,
                                                 const DiscreteDistribution& p1) {
  if (p0.support() != p1.support()) {
    return absl::InvalidArgumentError(
        "distributions must share the same support");
  }
  std::vector<size_t> order(p0.size());
  std::iota(order.begin(), order.end(), size_t{0});
  // Decreasing p1/p0, compared by cross-multiplication so p0 = 0 sorts as an
  // infinite ratio. Outcomes with p0 = p1 = 0 go last.
  auto null_outcome = [&](size_t i) {
    return p0.probs()[i] == 0.0 && p1.probs()[i] == 0.0;
  };
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (null_outcome(a) != null_outcome(b)) return null_outcome(b);
    return p1.probs()[a] * p0.probs()[b] > p1.probs()[b] * p0.probs()[a];
  });
  TradeoffCurve curve;
  curve.source = CurveSource::kExact;
  double alpha = 0.0, beta = 1.0;
  curve.points.emplace_back(alpha, beta);
  // Outcomes of equal ratio form one vertex; splitting them would only add
  // collinear points.
  for (size_t k = 0; k < order.size(); ++k) {
    const size_t i = order[k];
    if (null_outcome(i)) continue;
    alpha += p0.probs()[i];
    beta -= p1.probs()[i];
    const bool tied_with_next =
        k + 1 < order.size() && !null_outcome(order[k + 1]) &&
        p1.probs()[i] * p0.probs()[order[k + 1]] ==
            p1.probs()[order[k + 1]] * p0.probs()[i];
    if (!tied_with_next) {
      curve.points.emplace_back(std::min(1.0, alpha), std::max(0.0, beta));
    }
  }
  // Sums of probabilities that add to 1 can land a rounding error away.
  curve.points.back() = {1.0, 0.0};
  return curve;
}

absl::StatusOr<ErrorRates> MixtureAverageRates(
    std::span<const ErrorRates> components, std::span<const double> weights) {
  if (components.empty() || components.size() != weights.size()) {
    return absl::InvalidArgumentError(
        "need one weight per component and at least one component");
  }
  double total = 0.0;
  for (const double w : weights) {
    if (!(w >= 0.0)) return absl::InvalidArgumentError("negative weight");
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-9) {
    return absl::InvalidArgumentError(
        absl::StrCat("weights sum to ", total, ", not 1"));
  }
  ErrorRates avg;
  for (size_t i = 0; i < components.size(); ++i) {
    avg.alpha += weights[i] * components[i].alpha;
    avg.beta += weights[i] * components[i].beta;
  }
  return avg;
}

absl::StatusOr<TradeoffCurve> DpdExactForEnumerableGenerator(
    const DiscreteDistribution& fit_distribution_in,
    const DiscreteDistribution& fit_distribution_out) {
  absl::StatusOr<TradeoffCurve> curve =
      NeymanPearsonCurve(fit_distribution_out, fit_distribution_in);
  if (!curve.ok()) return curve.status();
  curve->source = CurveSource::kExact;
  return curve;
}

}  // namespace recrisk
