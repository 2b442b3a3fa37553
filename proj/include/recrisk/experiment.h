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

// Experiment orchestration behind the command-line tool: configuration files,
// the per-record pipeline (split, target dataset, attack, games), and the
// line-oriented result formats.
//
// Configuration is INI-style text:
//
//   [data]
//   csv = corpus.csv            ; relative to the config file
//   schema = corpus.schema      ; optional sidecar
//   aux_size = 250
//   eval_size = 250
//   target_size = 200
//
//   [generator]
//   kind = bayesnet             ; marginals | bayesnet | private_bayesnet | toy
//   max_parents = 2
//   mi_floor = 0
//   epsilon = 1                 ; private_bayesnet
//   p_in = 0.8                  ; toy
//   p_out = 0.2                 ; toy
//   smoothing = 1
//
//   [attack]
//   n_shadow = 50
//   k_values = 1,2,3
//   queries_per_k = 100
//   epochs = 1000
//   learning_rate = 1
//   l2 = 0.01
//
//   [game]
//   n_eval = 100
//   kinds = traditional,model_seeded
//   reference = per_run         ; per_run | fixed | drop
//
//   [records]
//   select = random:5           ; random:K | first:K | ids:1,4,9 | all
//
//   [experiment]
//   master_seed = 42
//   out = results
//   threshold = 0.8
//   rho = 0.2
//   threads = 1
//
//   [convergence]
//   n_eval_grid = 100,400,1600
//   repetitions = 10
//
//   [audit]
//   delta = 0
//   rho = 0.05

#ifndef RECRISK_EXPERIMENT_H_
#define RECRISK_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "recrisk/attack.h"
#include "recrisk/data.h"
#include "recrisk/game.h"
#include "recrisk/generator.h"
#include "recrisk/risk.h"

namespace recrisk {

struct RecordSelection {
  enum class Mode { kRandom, kFirst, kIds, kAll };
  Mode mode = Mode::kRandom;
  size_t count = 10;
  std::vector<size_t> ids;
};

// "random:K", "first:K", "ids:a,b,c" or "all".
absl::StatusOr<RecordSelection> ParseRecordSelection(absl::string_view text);
std::string FormatRecordSelection(const RecordSelection& selection);

struct ExperimentConfig {
  std::string csv_path;
  std::string schema_path;
  size_t aux_size = 30000;
  size_t eval_size = 15222;
  size_t target_size = 1000;
  GeneratorSpec generator;
  AttackConfig attack;
  size_t n_eval = 1000;
  std::vector<GameKind> games = {GameKind::kTraditional,
                                 GameKind::kModelSeeded};
  ReferenceMode reference = ReferenceMode::kPerRun;
  RecordSelection records;
  Seed master_seed{0};
  std::string out_dir = "results";
  double threshold = 0.8;
  double rho = 0.2;
  int threads = 1;
  std::vector<size_t> n_eval_grid = {100, 200, 400, 800, 1600};
  size_t repetitions = 10;
  double audit_delta = 0.0;
  double audit_rho = 0.05;
};

// Parses configuration text; relative paths resolve against `base_dir`.
absl::StatusOr<ExperimentConfig> ParseExperimentConfig(absl::string_view text,
                                                       absl::string_view base_dir);
absl::StatusOr<ExperimentConfig> LoadExperimentConfig(const std::string& path);

// Field-level checks; error messages name the offending key.
absl::Status ValidateExperimentConfig(const ExperimentConfig& config);

// Hash of everything that determines result values (not the output
// directory, thread count or record selection).
uint64_t ExperimentHash(const ExperimentConfig& config);

struct PreparedData {
  Dataset pool;
  Dataset aux;
  Dataset eval;
  Dataset target;
  // Indices into `target` of the records to evaluate.
  std::vector<size_t> selected;
};

// Loads the CSV, splits it, samples the target dataset from the evaluation
// pool and selects target records.
absl::StatusOr<PreparedData> PrepareData(const ExperimentConfig& config);

// Index-based selection over a target dataset of `target_size` records.
absl::StatusOr<std::vector<size_t>> SelectRecords(const RecordSelection& selection,
                                                  size_t target_size, Seed seed);

struct RecordOutcome {
  std::string record_id;
  GameKind kind = GameKind::kModelSeeded;
  RiskEstimate estimate;
  RatePair rates;  // at gamma = 0.5
  double radius = 0.0;
  GameTranscript transcript;
};

struct RunOutput {
  uint64_t config_hash = 0;
  std::vector<RecordOutcome> outcomes;
  // (record id, error) for records whose pipeline failed.
  std::vector<std::pair<std::string, absl::Status>> failures;
};

// Builds the adversary for one target record: the released bit for toy
// generators, the shadow-model attack otherwise.
absl::StatusOr<std::unique_ptr<Adversary>> BuildAdversary(
    const ExperimentConfig& config, const PreparedData& data, size_t record);

// Runs the requested games for one target record with `adversary`.
absl::StatusOr<std::vector<RecordOutcome>> RunRecord(
    const ExperimentConfig& config, const PreparedData& data, size_t record,
    const Adversary& adversary, Seed game_seed,
    const std::vector<GameKind>& games, size_t n_eval);

// The full per-record pipeline over every selected record.
absl::StatusOr<RunOutput> RunExperiment(const ExperimentConfig& config,
                                        const PreparedData& data);

// Results file for one game kind:
//   # recrisk-results v1 kind=<k> config=<hex>[ status=partial]
//   record_id,auc,alpha,beta,n_eval,radius
std::string FormatResults(const RunOutput& output, GameKind kind);

struct ResultsFile {
  GameKind kind = GameKind::kModelSeeded;
  uint64_t config_hash = 0;
  bool partial = false;
  std::map<std::string, double> auc;  // record id -> AUC
};
absl::StatusOr<ResultsFile> ParseResults(absl::string_view text);

struct Comparison {
  std::vector<std::string> record_ids;
  std::vector<RiskPair> pairs;
  std::optional<double> miss_rate;  // empty when undefined
  double rmsd = 0.0;
  double threshold = 0.8;
  uint64_t config_hash = 0;
};

// Joins the two files on record id. Refuses files with different config
// hashes unless `allow_mixed`.
absl::StatusOr<Comparison> CompareResults(const ResultsFile& traditional,
                                          const ResultsFile& model_seeded,
                                          double threshold, bool allow_mixed);

// Per-record table with a metric footer; an undefined miss rate is written as
// the token "undefined".
std::string FormatComparison(const Comparison& comparison);
// |delta| histogram (bin width 0.02) and both risks' CDFs and percentiles.
absl::StatusOr<std::string> FormatComparisonDistributions(
    const Comparison& comparison);

struct ConvergenceRow {
  std::string record_id;
  GameKind kind = GameKind::kModelSeeded;
  size_t n_eval = 0;
  double mean_auc = 0.0;
  double std_auc = 0.0;
  double radius = 0.0;
};

// For every selected record, game kind and grid value: the sample standard
// deviation of the AUC over `repetitions` reseeded games. The adversary of a
// record is built once and shared by all repetitions.
absl::StatusOr<std::vector<ConvergenceRow>> RunConvergence(
    const ExperimentConfig& config, const PreparedData& data);
std::string FormatConvergence(const ExperimentConfig& config,
                              const std::vector<ConvergenceRow>& rows);

struct AuditPoint {
  double alpha = 0.0;
  double beta = 0.0;
  double bound = 0.0;
  bool flagged = false;
};

struct AuditResult {
  std::string record_id;
  double epsilon = 0.0;
  double delta = 0.0;
  double radius = 0.0;
  std::vector<AuditPoint> points;
  size_t flagged = 0;
};

// Compares a transcript's empirical trade-off curve against the DP lower
// bound; a point is flagged when beta < bound(alpha) - 2 * radius, with the
// radius taken at n_eval / 2 samples and level `rho`.
absl::StatusOr<AuditResult> AuditTranscript(const GameTranscript& transcript,
                                            double epsilon, double delta,
                                            double rho);

// Model-seeded games of a private generator, audited per record.
absl::StatusOr<std::vector<AuditResult>> RunDpAudit(
    const ExperimentConfig& config, const PreparedData& data);
std::string FormatAudit(uint64_t config_hash,
                        const std::vector<AuditResult>& audits);

}  // namespace recrisk

#endif  // RECRISK_EXPERIMENT_H_
