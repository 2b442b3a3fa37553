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

#include "recrisk/risk.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"

namespace recrisk {
namespace {

constexpr char kUndefinedMissRate[] = "miss rate undefined";

absl::Status CheckTwoSided(const GameTranscript& transcript) {
  size_t ones = 0;
  for (const GameRun& r : transcript.runs) ones += r.bit;
  if (ones == 0 || ones == transcript.runs.size()) {
    return absl::FailedPreconditionError(
        "rates are undefined without runs of both secret bits");
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<RatePair> EmpiricalRates(const GameTranscript& transcript,
                                        double gamma) {
  if (absl::Status s = CheckTwoSided(transcript); !s.ok()) return s;
  RatePair rates;
  size_t false_pos = 0, false_neg = 0;
  for (const GameRun& r : transcript.runs) {
    const bool guess = r.score >= gamma;
    if (r.bit == 0) {
      ++rates.n0;
      false_pos += guess ? 1 : 0;
    } else {
      ++rates.n1;
      false_neg += guess ? 0 : 1;
    }
  }
  rates.alpha = static_cast<double>(false_pos) / rates.n0;
  rates.beta = static_cast<double>(false_neg) / rates.n1;
  return rates;
}

absl::StatusOr<double> RiskEstimate::Radius(double rho) const {
  return HoeffdingRadius(n_eval / 2, rho);
}

absl::StatusOr<double> AucFromScores(std::span<const double> in_scores,
                                     std::span<const double> out_scores) {
  if (in_scores.empty() || out_scores.empty()) {
    return absl::FailedPreconditionError("AUC needs scores of both classes");
  }
  // Walk all scores in increasing order; for each block of equal scores, the
  // in-scores beat every out-score seen before the block and tie with the
  // block's out-scores. Twice the Mann-Whitney count stays an exact integer.
  std::vector<std::pair<double, int>> all;
  all.reserve(in_scores.size() + out_scores.size());
  for (const double s : in_scores) all.emplace_back(s, 1);
  for (const double s : out_scores) all.emplace_back(s, 0);
  std::sort(all.begin(), all.end());
  uint64_t twice_wins = 0;
  uint64_t outs_below = 0;
  for (size_t i = 0; i < all.size();) {
    size_t j = i;
    uint64_t ins = 0, outs = 0;
    while (j < all.size() && all[j].first == all[i].first) {
      (all[j].second ? ins : outs) += 1;
      ++j;
    }
    twice_wins += ins * (2 * outs_below + outs);
    outs_below += outs;
    i = j;
  }
  const double pairs = static_cast<double>(in_scores.size()) * out_scores.size();
  return static_cast<double>(twice_wins) / (2.0 * pairs);
}

absl::StatusOr<RiskEstimate> RocAuc(const GameTranscript& transcript) {
  std::vector<double> in, out;
  for (const GameRun& r : transcript.runs) (r.bit ? in : out).push_back(r.score);
  absl::StatusOr<double> auc = AucFromScores(in, out);
  if (!auc.ok()) return auc.status();
  return RiskEstimate{*auc, transcript.kind, transcript.runs.size(),
                      transcript.record_id};
}

absl::StatusOr<double> HoeffdingRadius(size_t n_per_class, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) {
    return absl::OutOfRangeError(absl::StrCat("rho must lie in (0, 1), got ", rho));
  }
  if (n_per_class < 1) {
    return absl::OutOfRangeError("need at least one sample per class");
  }
  return std::sqrt(std::log(2.0 / rho) / (2.0 * static_cast<double>(n_per_class)));
}

absl::StatusOr<double> MissRate(std::span<const RiskPair> estimates, double t) {
  if (estimates.empty()) return absl::OutOfRangeError("no estimates");
  size_t high = 0, missed = 0;
  for (const RiskPair& e : estimates) {
    if (e.model_seeded > t) {
      ++high;
      if (e.traditional <= t) ++missed;
    }
  }
  if (high == 0) {
    return absl::FailedPreconditionError(absl::StrCat(
        kUndefinedMissRate, ": no record has model-seeded risk above ", t));
  }
  return static_cast<double>(missed) / high;
}

bool IsUndefinedMissRate(const absl::Status& status) {
  return status.code() == absl::StatusCode::kFailedPrecondition &&
         absl::StartsWith(status.message(), kUndefinedMissRate);
}

absl::StatusOr<double> Rmsd(std::span<const RiskPair> estimates) {
  if (estimates.empty()) return absl::OutOfRangeError("no estimates");
  double sum = 0.0;
  for (const RiskPair& e : estimates) {
    const double d = e.traditional - e.model_seeded;
    sum += d * d;
  }
  return std::sqrt(sum / estimates.size());
}

double DpTradeoffLowerBound(double epsilon, double delta, double alpha) {
  if (std::isinf(epsilon)) return 0.0;
  // exp(epsilon) may overflow; 0 * inf would be NaN.
  const double a = alpha == 0.0 ? 1.0 - delta : 1.0 - std::exp(epsilon) * alpha - delta;
  const double b = std::exp(-epsilon) * (1.0 - alpha - delta);
  return std::max({0.0, a, b});
}

double CurveBetaAt(const TradeoffCurve& curve, double alpha) {
  double best = std::numeric_limits<double>::infinity();
  const auto& p = curve.points;
  for (size_t i = 0; i + 1 < p.size(); ++i) {
    const auto [a0, b0] = p[i];
    const auto [a1, b1] = p[i + 1];
    if (alpha < std::min(a0, a1) || alpha > std::max(a0, a1)) continue;
    if (a1 == a0) {
      best = std::min({best, b0, b1});
    } else {
      best = std::min(best, b0 + (b1 - b0) * (alpha - a0) / (a1 - a0));
    }
  }
  if (p.size() == 1 && p[0].first == alpha) best = p[0].second;
  return best;
}

absl::StatusOr<TradeoffCurve> EmpiricalTradeoff(const GameTranscript& transcript) {
  if (absl::Status s = CheckTwoSided(transcript); !s.ok()) return s;
  std::vector<double> thresholds;
  for (const GameRun& r : transcript.runs) thresholds.push_back(r.score);
  thresholds.push_back(std::numeric_limits<double>::infinity());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());
  TradeoffCurve curve;
  curve.source = CurveSource::kEmpirical;
  for (const double gamma : thresholds) {
    absl::StatusOr<RatePair> rates = EmpiricalRates(transcript, gamma);
    if (!rates.ok()) return rates.status();
    curve.points.emplace_back(rates->alpha, rates->beta);
  }
  std::sort(curve.points.begin(), curve.points.end(),
            [](const auto& a, const auto& b) {
              return a.first != b.first ? a.first < b.first : a.second > b.second;
            });
  curve.points.erase(std::unique(curve.points.begin(), curve.points.end()),
                     curve.points.end());
  return curve;
}

double Percentile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double pos = (values.size() - 1) * q / 100.0;
  const auto lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (values[hi] - values[lo]) * (pos - lo);
}

absl::StatusOr<DistributionSummary> SummarizeDistribution(
    std::span<const double> values, double bin_width) {
  if (values.empty()) return absl::OutOfRangeError("no values to summarize");
  if (!(bin_width > 0)) return absl::InvalidArgumentError("bin width must be > 0");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  DistributionSummary summary;
  const double n = static_cast<double>(sorted.size());
  for (size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    summary.cdf.emplace_back(sorted[i], (i + 1) / n);
  }
  summary.histogram_min = sorted.front();
  summary.bin_width = bin_width;
  const double span = sorted.back() - sorted.front();
  const auto bins =
      std::max<size_t>(1, static_cast<size_t>(std::ceil(span / bin_width - 1e-9)));
  summary.histogram.assign(bins, 0);
  for (const double v : sorted) {
    auto b = static_cast<size_t>(std::floor((v - sorted.front()) / bin_width));
    summary.histogram[std::min(b, bins - 1)] += 1;
  }
  summary.p10 = Percentile(sorted, 10);
  summary.p50 = Percentile(sorted, 50);
  summary.p90 = Percentile(sorted, 90);
  return summary;
}

}  // namespace recrisk
