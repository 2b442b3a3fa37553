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


#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "recrisk/experiment.h"
#include "recrisk/game.h"
#include "recrisk/oracle.h"
#include "recrisk/risk.h"
#include "recrisk/seed.h"

namespace py = pybind11;

namespace recrisk {
namespace {

void Check(const absl::Status& s) {
  if (s.ok()) return;
  const std::string msg(s.message());
  switch (s.code()) {
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kOutOfRange:
      throw py::value_error(msg);
    case absl::StatusCode::kNotFound:
      throw py::key_error(msg);
    default:
      throw std::runtime_error(std::string(absl::StatusCodeToString(s.code())) + ": " + msg);
  }
}

template <typename T>
T Get(absl::StatusOr<T> v) {
  Check(v.status());
  return *std::move(v);
}

GameTranscript Transcript(const std::vector<int>& bits, const std::vector<double>& scores) {
  if (bits.size() != scores.size()) throw py::value_error("bits and scores differ in length");
  GameTranscript t;
  for (size_t i = 0; i < bits.size(); ++i) {
    t.runs.push_back(GameRun{i, bits[i], scores[i], Seed{i}});
  }
  return t;
}

std::vector<RiskPair> Pairs(const std::vector<std::pair<double, double>>& pairs) {
  std::vector<RiskPair> out;
  for (const auto& [t, ms] : pairs) out.push_back(RiskPair{t, ms});
  return out;
}

DiscreteDistribution Distribution(const std::vector<double>& probs) {
  std::vector<std::string> labels;
  for (size_t i = 0; i < probs.size(); ++i) labels.push_back(std::to_string(i));
  return Get(DiscreteDistribution::Create(labels, probs));
}

py::dict RunConfig(const std::string& path, std::optional<uint64_t> seed,
                   std::optional<int> threads) {
  ExperimentConfig config = Get(LoadExperimentConfig(path));
  if (seed) config.master_seed = Seed{*seed};
  if (threads) config.threads = *threads;
  Check(ValidateExperimentConfig(config));
  RunOutput output;
  {
    py::gil_scoped_release release;
    const PreparedData data = Get(PrepareData(config));
    output = Get(RunExperiment(config, data));
  }
  py::dict results;
  for (const GameKind kind : config.games) {
    results[py::str(std::string(GameKindName(kind)))] = FormatResults(output, kind);
  }
  py::dict failures;
  for (const auto& [id, status] : output.failures) {
    failures[py::str(id)] = std::string(status.message());
  }
  py::dict out;
  out["results"] = results;
  out["failures"] = failures;
  return out;
}

}  // namespace
}  // namespace recrisk

PYBIND11_MODULE(_recrisk, m) {
  using namespace recrisk;
  m.doc() = "Per-record membership-inference risk estimation";

  m.def("hoeffding_radius",
        [](size_t n, double rho) { return Get(HoeffdingRadius(n, rho)); },
        py::arg("n_per_class"), py::arg("rho"));
  m.def("roc_auc",
        [](const std::vector<int>& bits, const std::vector<double>& scores) {
          return Get(RocAuc(Transcript(bits, scores))).auc;
        },
        py::arg("bits"), py::arg("scores"));
  m.def("empirical_rates",
        [](const std::vector<int>& bits, const std::vector<double>& scores, double gamma) {
          const RatePair r = Get(EmpiricalRates(Transcript(bits, scores), gamma));
          return std::make_pair(r.alpha, r.beta);
        },
        py::arg("bits"), py::arg("scores"), py::arg("gamma") = 0.5);
  m.def("miss_rate",
        [](const std::vector<std::pair<double, double>>& pairs,
           double t) -> std::optional<double> {
          const std::vector<RiskPair> p = Pairs(pairs);
          absl::StatusOr<double> mr = MissRate(p, t);
          if (!mr.ok() && IsUndefinedMissRate(mr.status())) return std::nullopt;
          return Get(mr);
        },
        py::arg("pairs"), py::arg("t") = 0.8,
        "None when no record has model-seeded risk above t.");
  m.def("rmsd",
        [](const std::vector<std::pair<double, double>>& pairs) {
          const std::vector<RiskPair> p = Pairs(pairs);
          return Get(Rmsd(p));
        },
        py::arg("pairs"));
  m.def("dp_tradeoff_lower_bound", &DpTradeoffLowerBound, py::arg("epsilon"),
        py::arg("delta"), py::arg("alpha"));
  m.def("toy_exact_rates",
        [](double p_in, double p_out) {
          const ErrorRates r = ToyExactRates(p_in, p_out);
          return std::make_pair(r.alpha, r.beta);
        },
        py::arg("p_in"), py::arg("p_out"));
  m.def("neyman_pearson_curve",
        [](const std::vector<double>& p0, const std::vector<double>& p1) {
          return Get(NeymanPearsonCurve(Distribution(p0), Distribution(p1))).points;
        },
        py::arg("p0"), py::arg("p1"));
  m.def("derive_seed",
        [](uint64_t parent, const std::string& tag, uint64_t index) {
          return DeriveSeed(Seed{parent}, tag, index).value;
        },
        py::arg("parent"), py::arg("tag"), py::arg("index") = 0);
  m.def("run", &RunConfig, py::arg("config"), py::arg("seed") = std::nullopt,
        py::arg("threads") = std::nullopt,
        "Runs the configured games; returns results-file text per game kind.");
  m.def("compare",
        [](const std::string& traditional, const std::string& model_seeded,
           double threshold, bool allow_mixed) {
          const Comparison c = Get(CompareResults(Get(ParseResults(traditional)),
                                                  Get(ParseResults(model_seeded)),
                                                  threshold, allow_mixed));
          return FormatComparison(c);
        },
        py::arg("traditional"), py::arg("model_seeded"), py::arg("threshold") = 0.8,
        py::arg("allow_mixed") = false);
}
