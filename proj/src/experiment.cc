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

#include "recrisk/experiment.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"

namespace recrisk {
namespace {

namespace pt = boost::property_tree;

std::string FormatDouble(double v) { return absl::StrFormat("%.17g", v); }

// Typed access to one INI key, with errors naming "section.key".
class ConfigReader {
 public:
  explicit ConfigReader(const pt::ptree& tree) : tree_(tree) {}

  absl::Status status() const { return status_; }

  std::optional<std::string> Raw(const std::string& key) const {
    auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (!v) return std::nullopt;
    return std::string(absl::StripAsciiWhitespace(*v));
  }

  template <typename T>
  void Number(const std::string& key, T* out) {
    const auto raw = Raw(key);
    if (!raw || !status_.ok()) return;
    bool ok;
    if constexpr (std::is_floating_point_v<T>) {
      ok = absl::SimpleAtod(*raw, out);
    } else {
      ok = absl::SimpleAtoi(*raw, out);
    }
    if (!ok) Fail(key, absl::StrCat("'", *raw, "' is not a valid number"));
  }

  template <typename T>
  void NumberList(const std::string& key, std::vector<T>* out) {
    const auto raw = Raw(key);
    if (!raw || !status_.ok()) return;
    out->clear();
    for (absl::string_view item :
         absl::StrSplit(*raw, ',', absl::SkipWhitespace())) {
      T v;
      if (!absl::SimpleAtoi(absl::StripAsciiWhitespace(item), &v)) {
        Fail(key, absl::StrCat("'", item, "' is not a valid integer"));
        return;
      }
      out->push_back(v);
    }
  }

  void Fail(const std::string& key, absl::string_view message) {
    if (status_.ok()) {
      status_ = absl::InvalidArgumentError(absl::StrCat(key, ": ", message));
    }
  }

 private:
  const pt::ptree& tree_;
  absl::Status status_;
};

std::string ResolvePath(absl::string_view base_dir, const std::string& path) {
  if (path.empty() || base_dir.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(std::string(base_dir)) / p).lexically_normal().string();
}

absl::StatusOr<std::string> ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

double SampleStd(const std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double ss = 0.0;
  for (const double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (v.size() - 1));
}

}  // namespace

absl::StatusOr<RecordSelection> ParseRecordSelection(absl::string_view text) {
  RecordSelection s;
  text = absl::StripAsciiWhitespace(text);
  if (text == "all") {
    s.mode = RecordSelection::Mode::kAll;
    return s;
  }
  std::pair<absl::string_view, absl::string_view> parts =
      absl::StrSplit(text, absl::MaxSplits(':', 1));
  if (parts.first == "random" || parts.first == "first") {
    s.mode = parts.first == "random" ? RecordSelection::Mode::kRandom
                                     : RecordSelection::Mode::kFirst;
    if (!absl::SimpleAtoi(parts.second, &s.count) || s.count == 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("records.select: bad record count in '", text, "'"));
    }
    return s;
  }
  if (parts.first == "ids") {
    s.mode = RecordSelection::Mode::kIds;
    for (absl::string_view id : absl::StrSplit(parts.second, ',', absl::SkipWhitespace())) {
      size_t v;
      if (!absl::SimpleAtoi(absl::StripAsciiWhitespace(id), &v)) {
        return absl::InvalidArgumentError(
            absl::StrCat("records.select: bad record id '", id, "'"));
      }
      s.ids.push_back(v);
    }
    if (s.ids.empty()) {
      return absl::InvalidArgumentError("records.select: empty id list");
    }
    return s;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "records.select: expected random:K, first:K, ids:... or all, got '",
      text, "'"));
}

std::string FormatRecordSelection(const RecordSelection& s) {
  switch (s.mode) {
    case RecordSelection::Mode::kRandom:
      return absl::StrCat("random:", s.count);
    case RecordSelection::Mode::kFirst:
      return absl::StrCat("first:", s.count);
    case RecordSelection::Mode::kIds:
      return absl::StrCat("ids:", absl::StrJoin(s.ids, ","));
    case RecordSelection::Mode::kAll:
      return "all";
  }
  return "";
}

absl::StatusOr<ExperimentConfig> ParseExperimentConfig(absl::string_view text,
                                                       absl::string_view base_dir) {
  // Inline comments are not part of the INI grammar the parser accepts.
  std::string cleaned;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    const size_t cut = line.find_first_of(";#");
    if (cut != absl::string_view::npos) line = line.substr(0, cut);
    absl::StrAppend(&cleaned, absl::StripAsciiWhitespace(line), "\n");
  }
  pt::ptree tree;
  try {
    std::istringstream in(cleaned);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("config line ", e.line(), ": ", e.message()));
  }

  ExperimentConfig c;
  ConfigReader r(tree);
  if (auto v = r.Raw("data.csv")) c.csv_path = ResolvePath(base_dir, *v);
  if (auto v = r.Raw("data.schema")) c.schema_path = ResolvePath(base_dir, *v);
  r.Number("data.aux_size", &c.aux_size);
  r.Number("data.eval_size", &c.eval_size);
  r.Number("data.target_size", &c.target_size);

  r.Number("generator.smoothing", &c.generator.smoothing);
  {
    const std::string kind = r.Raw("generator.kind").value_or("bayesnet");
    int32_t max_parents = 2;
    double mi_floor = 0.0, epsilon = 1.0, p_in = 0.5, p_out = 0.5;
    r.Number("generator.max_parents", &max_parents);
    r.Number("generator.mi_floor", &mi_floor);
    r.Number("generator.epsilon", &epsilon);
    r.Number("generator.p_in", &p_in);
    r.Number("generator.p_out", &p_out);
    if (kind == "marginals") {
      c.generator.kind = IndependentMarginals{};
    } else if (kind == "bayesnet") {
      c.generator.kind = BayesNet{max_parents, mi_floor};
    } else if (kind == "private_bayesnet") {
      c.generator.kind = PrivateBayesNet{max_parents, epsilon, mi_floor};
    } else if (kind == "toy") {
      c.generator.kind = AnalyticToy{p_in, p_out};
    } else {
      r.Fail("generator.kind", absl::StrCat("unknown generator '", kind, "'"));
    }
  }

  r.Number("attack.n_shadow", &c.attack.n_shadow);
  r.NumberList("attack.k_values", &c.attack.k_values);
  r.Number("attack.queries_per_k", &c.attack.queries_per_k);
  r.Number("attack.epochs", &c.attack.training.epochs);
  r.Number("attack.learning_rate", &c.attack.training.learning_rate);
  r.Number("attack.l2", &c.attack.training.l2);

  r.Number("game.n_eval", &c.n_eval);
  if (auto v = r.Raw("game.kinds")) {
    c.games.clear();
    for (absl::string_view name : absl::StrSplit(*v, ',', absl::SkipWhitespace())) {
      absl::StatusOr<GameKind> kind = ParseGameKind(absl::StripAsciiWhitespace(name));
      if (!kind.ok() || *kind == GameKind::kMixture) {
        r.Fail("game.kinds", absl::StrCat("unsupported game '", name, "'"));
        break;
      }
      c.games.push_back(*kind);
    }
  }
  if (auto v = r.Raw("game.reference")) {
    absl::StatusOr<ReferenceMode> mode = ParseReferenceMode(*v);
    if (!mode.ok()) {
      r.Fail("game.reference", mode.status().message());
    } else {
      c.reference = *mode;
    }
  }
  if (auto v = r.Raw("records.select")) {
    absl::StatusOr<RecordSelection> s = ParseRecordSelection(*v);
    if (!s.ok()) return s.status();
    c.records = *s;
  }
  r.Number("experiment.master_seed", &c.master_seed.value);
  if (auto v = r.Raw("experiment.out")) c.out_dir = ResolvePath(base_dir, *v);
  r.Number("experiment.threshold", &c.threshold);
  r.Number("experiment.rho", &c.rho);
  r.Number("experiment.threads", &c.threads);
  r.NumberList("convergence.n_eval_grid", &c.n_eval_grid);
  r.Number("convergence.repetitions", &c.repetitions);
  r.Number("audit.delta", &c.audit_delta);
  r.Number("audit.rho", &c.audit_rho);
  if (!r.status().ok()) return r.status();
  return c;
}

absl::StatusOr<ExperimentConfig> LoadExperimentConfig(const std::string& path) {
  absl::StatusOr<std::string> text = ReadText(path);
  if (!text.ok()) return text.status();
  return ParseExperimentConfig(
      *text, std::filesystem::path(path).parent_path().string());
}

absl::Status ValidateExperimentConfig(const ExperimentConfig& c) {
  auto bad = [](absl::string_view key, absl::string_view why) {
    return absl::InvalidArgumentError(absl::StrCat(key, ": ", why));
  };
  if (c.csv_path.empty()) return bad("data.csv", "is required");
  if (!std::filesystem::exists(c.csv_path)) {
    return bad("data.csv", absl::StrCat("file not found: ", c.csv_path));
  }
  if (!c.schema_path.empty() && !std::filesystem::exists(c.schema_path)) {
    return bad("data.schema", absl::StrCat("file not found: ", c.schema_path));
  }
  if (c.aux_size == 0) return bad("data.aux_size", "must be positive");
  if (c.eval_size == 0) return bad("data.eval_size", "must be positive");
  if (c.target_size == 0) return bad("data.target_size", "must be positive");
  if (c.target_size >= c.eval_size) {
    return bad("data.target_size",
               "must be smaller than data.eval_size (reference records are "
               "drawn from the rest of the pool)");
  }
  if (absl::Status s = ValidateGeneratorSpec(c.generator); !s.ok()) {
    return bad("generator", s.message());
  }
  if (!IsToy(c.generator)) {
    if (c.attack.n_shadow == 0 || c.attack.n_shadow % 2 != 0) {
      return bad("attack.n_shadow", "must be positive and even");
    }
    if (c.attack.k_values.empty()) return bad("attack.k_values", "is empty");
    if (c.attack.queries_per_k < 1) return bad("attack.queries_per_k", "must be >= 1");
    if (c.attack.training.epochs < 1) return bad("attack.epochs", "must be >= 1");
    if (!(c.attack.training.learning_rate > 0)) {
      return bad("attack.learning_rate", "must be positive");
    }
    if (!(c.attack.training.l2 >= 0)) return bad("attack.l2", "must be >= 0");
  }
  if (c.n_eval == 0 || c.n_eval % 2 != 0) {
    return bad("game.n_eval", "must be positive and even");
  }
  if (c.games.empty()) return bad("game.kinds", "is empty");
  if (!(c.threshold > 0.0 && c.threshold < 1.0)) {
    return bad("experiment.threshold", "must lie in (0, 1)");
  }
  if (!(c.rho > 0.0 && c.rho < 1.0)) return bad("experiment.rho", "must lie in (0, 1)");
  if (c.threads < 1) return bad("experiment.threads", "must be >= 1");
  for (const size_t n : c.n_eval_grid) {
    if (n == 0 || n % 2 != 0) {
      return bad("convergence.n_eval_grid", "values must be positive and even");
    }
  }
  if (!(c.audit_delta >= 0.0 && c.audit_delta <= 1.0)) {
    return bad("audit.delta", "must lie in [0, 1]");
  }
  if (!(c.audit_rho > 0.0 && c.audit_rho < 1.0)) {
    return bad("audit.rho", "must lie in (0, 1)");
  }
  if (c.records.mode == RecordSelection::Mode::kIds) {
    for (const size_t id : c.records.ids) {
      if (id >= c.target_size) {
        return bad("records.select",
                   absl::StrCat("record id ", id, " outside the target dataset"));
      }
    }
  } else if (c.records.mode != RecordSelection::Mode::kAll &&
             c.records.count > c.target_size) {
    return bad("records.select", "asks for more records than the target dataset has");
  }
  return absl::OkStatus();
}

uint64_t ExperimentHash(const ExperimentConfig& c) {
  GameConfig game;
  game.n_eval = c.n_eval;
  game.dataset_size = c.target_size;
  game.generator = c.generator;
  game.master_seed = c.master_seed;
  game.reference = c.reference;
  std::string canonical = absl::StrCat(
      "csv=", std::filesystem::path(c.csv_path).filename().string(),
      ";schema=", std::filesystem::path(c.schema_path).filename().string(),
      ";aux=", c.aux_size, ";eval=", c.eval_size, ";game=", ConfigHash(game),
      ";n_shadow=", c.attack.n_shadow, ";k=", absl::StrJoin(c.attack.k_values, ","),
      ";q=", c.attack.queries_per_k, ";epochs=", c.attack.training.epochs,
      ";lr=", FormatDouble(c.attack.training.learning_rate),
      ";l2=", FormatDouble(c.attack.training.l2), ";rho=", FormatDouble(c.rho));
  return Mix64(HashString(canonical));
}

absl::StatusOr<std::vector<size_t>> SelectRecords(const RecordSelection& selection,
                                                  size_t target_size, Seed seed) {
  std::vector<size_t> all(target_size);
  std::iota(all.begin(), all.end(), size_t{0});
  switch (selection.mode) {
    case RecordSelection::Mode::kAll:
      return all;
    case RecordSelection::Mode::kFirst:
      if (selection.count > target_size) break;
      all.resize(selection.count);
      return all;
    case RecordSelection::Mode::kRandom: {
      if (selection.count > target_size) break;
      absl::StatusOr<std::vector<size_t>> picked =
          SampleIndices(target_size, selection.count, seed);
      if (!picked.ok()) return picked.status();
      std::sort(picked->begin(), picked->end());
      return picked;
    }
    case RecordSelection::Mode::kIds:
      for (const size_t id : selection.ids) {
        if (id >= target_size) {
          return absl::OutOfRangeError(
              absl::StrCat("record id ", id, " outside the target dataset"));
        }
      }
      return selection.ids;
  }
  return absl::OutOfRangeError("more records requested than the target has");
}

absl::StatusOr<PreparedData> PrepareData(const ExperimentConfig& config) {
  SchemaSpec spec;
  if (!config.schema_path.empty()) {
    absl::StatusOr<SchemaSpec> loaded = LoadSchemaSpec(config.schema_path);
    if (!loaded.ok()) return loaded.status();
    spec = *std::move(loaded);
  }
  absl::StatusOr<Dataset> pool = LoadCsv(config.csv_path, nullptr, spec);
  if (!pool.ok()) return pool.status();
  absl::StatusOr<SplitResult> split =
      Split(*pool, config.aux_size, config.eval_size,
            DeriveSeed(config.master_seed, "split"));
  if (!split.ok()) return split.status();
  absl::StatusOr<Dataset> target =
      SampleRecords(split->eval, config.target_size,
                    DeriveSeed(config.master_seed, "target"));
  if (!target.ok()) return target.status();
  absl::StatusOr<std::vector<size_t>> selected =
      SelectRecords(config.records, config.target_size,
                    DeriveSeed(config.master_seed, "records"));
  if (!selected.ok()) return selected.status();
  return PreparedData{*std::move(pool), std::move(split->aux),
                      std::move(split->eval), *std::move(target),
                      *std::move(selected)};
}

absl::StatusOr<std::unique_ptr<Adversary>> BuildAdversary(
    const ExperimentConfig& config, const PreparedData& data, size_t record) {
  if (IsToy(config.generator)) return std::make_unique<ToyBitAdversary>();
  AttackConfig attack = config.attack;
  attack.threads = config.threads;
  absl::StatusOr<TrainedAttack> trained = TrainAttack(
      data.aux, data.target.record(record), config.generator,
      config.target_size, attack, DeriveSeed(config.master_seed, "attack", record));
  if (!trained.ok()) return trained.status();
  return std::make_unique<ShadowModelAdversary>(*std::move(trained),
                                                config.target_size);
}

absl::StatusOr<std::vector<RecordOutcome>> RunRecord(
    const ExperimentConfig& config, const PreparedData& data, size_t record,
    const Adversary& adversary, Seed game_seed,
    const std::vector<GameKind>& games, size_t n_eval) {
  const Record& x = data.target.record(record);
  std::vector<RecordOutcome> outcomes;
  for (const GameKind kind : games) {
    GameConfig game;
    game.n_eval = n_eval;
    game.dataset_size = config.target_size;
    game.generator = config.generator;
    game.master_seed = DeriveSeed(game_seed, GameKindName(kind));
    game.kind = kind;
    game.reference = config.reference;
    game.threads = config.threads;
    game.record_id = absl::StrCat(record);
    absl::StatusOr<GameTranscript> transcript =
        kind == GameKind::kTraditional
            ? RunTraditional(x, data.eval, adversary, game)
            : RunModelSeeded(x, data.target, data.eval, adversary, game);
    if (!transcript.ok()) return transcript.status();
    absl::StatusOr<RiskEstimate> estimate = RocAuc(*transcript);
    if (!estimate.ok()) return estimate.status();
    absl::StatusOr<RatePair> rates = EmpiricalRates(*transcript, 0.5);
    if (!rates.ok()) return rates.status();
    absl::StatusOr<double> radius = estimate->Radius(config.rho);
    if (!radius.ok()) return radius.status();
    outcomes.push_back(RecordOutcome{game.record_id, kind, *estimate, *rates,
                                     *radius, *std::move(transcript)});
  }
  return outcomes;
}

absl::StatusOr<RunOutput> RunExperiment(const ExperimentConfig& config,
                                        const PreparedData& data) {
  if (absl::Status s = ValidateExperimentConfig(config); !s.ok()) return s;
  RunOutput output;
  output.config_hash = ExperimentHash(config);
  for (const size_t record : data.selected) {
    absl::StatusOr<std::unique_ptr<Adversary>> adversary =
        BuildAdversary(config, data, record);
    absl::StatusOr<std::vector<RecordOutcome>> outcomes =
        adversary.ok()
            ? RunRecord(config, data, record, **adversary,
                        DeriveSeed(config.master_seed, "game", record),
                        config.games, config.n_eval)
            : absl::StatusOr<std::vector<RecordOutcome>>(adversary.status());
    if (!outcomes.ok()) {
      output.failures.emplace_back(absl::StrCat(record), outcomes.status());
      continue;
    }
    for (auto& o : *outcomes) {
      o.transcript.config_hash = output.config_hash;
      output.outcomes.push_back(std::move(o));
    }
  }
  return output;
}

std::string FormatResults(const RunOutput& output, GameKind kind) {
  std::string out = absl::StrFormat("# recrisk-results v1 kind=%s config=%016x%s\n",
                                    GameKindName(kind), output.config_hash,
                                    output.failures.empty() ? "" : " status=partial");
  out += "record_id,auc,alpha,beta,n_eval,radius\n";
  for (const RecordOutcome& o : output.outcomes) {
    if (o.kind != kind) continue;
    absl::StrAppend(&out, o.record_id, ",", FormatDouble(o.estimate.auc), ",",
                    FormatDouble(o.rates.alpha), ",", FormatDouble(o.rates.beta),
                    ",", o.estimate.n_eval, ",", FormatDouble(o.radius), "\n");
  }
  for (const auto& [id, status] : output.failures) {
    absl::StrAppend(&out, "# failed record=", id, ": ", status.message(), "\n");
  }
  return out;
}

absl::StatusOr<ResultsFile> ParseResults(absl::string_view text) {
  std::vector<absl::string_view> lines = absl::StrSplit(text, '\n', absl::SkipEmpty());
  if (lines.size() < 2 || !absl::ConsumePrefix(&lines[0], "# recrisk-results v1 ")) {
    return absl::InvalidArgumentError("not a v1 results file");
  }
  ResultsFile file;
  for (absl::string_view field : absl::StrSplit(lines[0], ' ', absl::SkipEmpty())) {
    std::pair<absl::string_view, absl::string_view> kv = absl::StrSplit(field, '=');
    if (kv.first == "kind") {
      absl::StatusOr<GameKind> kind = ParseGameKind(kv.second);
      if (!kind.ok()) return kind.status();
      file.kind = *kind;
    } else if (kv.first == "config") {
      if (!ParseHex64(kv.second, &file.config_hash)) {
        return absl::InvalidArgumentError("bad config hash in results header");
      }
    } else if (kv.first == "status") {
      file.partial = kv.second == "partial";
    }
  }
  for (size_t l = 2; l < lines.size(); ++l) {
    if (absl::StartsWith(lines[l], "#")) continue;
    std::vector<absl::string_view> f = absl::StrSplit(lines[l], ',');
    double auc;
    if (f.size() != 6 || !absl::SimpleAtod(f[1], &auc)) {
      return absl::InvalidArgumentError(
          absl::StrCat("results line ", l + 1, " is malformed"));
    }
    if (!file.auc.emplace(std::string(f[0]), auc).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate record id ", f[0], " in results file"));
    }
  }
  return file;
}

absl::StatusOr<Comparison> CompareResults(const ResultsFile& traditional,
                                          const ResultsFile& model_seeded,
                                          double threshold, bool allow_mixed) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    return absl::InvalidArgumentError("threshold: must lie in (0, 1)");
  }
  if (!allow_mixed && traditional.config_hash != model_seeded.config_hash) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "results come from different configurations (%016x vs %016x); pass "
        "--allow-mixed to compare anyway",
        traditional.config_hash, model_seeded.config_hash));
  }
  std::vector<std::string> missing;
  for (const auto& [id, _] : traditional.auc) {
    if (!model_seeded.auc.contains(id)) missing.push_back(absl::StrCat(id, " (model-seeded)"));
  }
  for (const auto& [id, _] : model_seeded.auc) {
    if (!traditional.auc.contains(id)) missing.push_back(absl::StrCat(id, " (traditional)"));
  }
  if (!missing.empty()) {
    return absl::FailedPreconditionError(
        absl::StrCat("record ids do not match; missing: ", absl::StrJoin(missing, ", ")));
  }
  if (traditional.auc.empty()) return absl::InvalidArgumentError("no records to compare");

  Comparison c;
  c.threshold = threshold;
  c.config_hash = traditional.config_hash;
  // Numeric ids sort numerically, everything else lexically after them.
  for (const auto& [id, _] : traditional.auc) c.record_ids.push_back(id);
  std::stable_sort(c.record_ids.begin(), c.record_ids.end(),
                   [](const std::string& a, const std::string& b) {
                     size_t x, y;
                     const bool na = absl::SimpleAtoi(a, &x);
                     const bool nb = absl::SimpleAtoi(b, &y);
                     if (na && nb) return x < y;
                     if (na != nb) return na;
                     return a < b;
                   });
  for (const std::string& id : c.record_ids) {
    c.pairs.push_back(RiskPair{traditional.auc.at(id), model_seeded.auc.at(id)});
  }
  absl::StatusOr<double> mr = MissRate(c.pairs, threshold);
  if (mr.ok()) {
    c.miss_rate = *mr;
  } else if (!IsUndefinedMissRate(mr.status())) {
    return mr.status();
  }
  absl::StatusOr<double> rmsd = Rmsd(c.pairs);
  if (!rmsd.ok()) return rmsd.status();
  c.rmsd = *rmsd;
  return c;
}

std::string FormatComparison(const Comparison& c) {
  std::string out = absl::StrFormat("# recrisk-comparison v1 config=%016x t=%s\n",
                                    c.config_hash, absl::StrCat(c.threshold));
  out += "record_id,r_t,r_ms,delta,abs_delta\n";
  for (size_t i = 0; i < c.pairs.size(); ++i) {
    const double delta = c.pairs[i].model_seeded - c.pairs[i].traditional;
    absl::StrAppend(&out, c.record_ids[i], ",", FormatDouble(c.pairs[i].traditional),
                    ",", FormatDouble(c.pairs[i].model_seeded), ",",
                    FormatDouble(delta), ",", FormatDouble(std::fabs(delta)), "\n");
  }
  out += "# metrics\n";
  absl::StrAppend(&out, "# records=", c.pairs.size(), "\n");
  absl::StrAppend(&out, "# miss_rate=",
                  c.miss_rate ? FormatDouble(*c.miss_rate) : "undefined", "\n");
  absl::StrAppend(&out, "# rmsd=", FormatDouble(c.rmsd), "\n");
  return out;
}

absl::StatusOr<std::string> FormatComparisonDistributions(const Comparison& c) {
  std::vector<double> t, ms, abs_delta;
  for (const RiskPair& p : c.pairs) {
    t.push_back(p.traditional);
    ms.push_back(p.model_seeded);
    abs_delta.push_back(std::fabs(p.model_seeded - p.traditional));
  }
  absl::StatusOr<DistributionSummary> st = SummarizeDistribution(t);
  absl::StatusOr<DistributionSummary> sms = SummarizeDistribution(ms);
  absl::StatusOr<DistributionSummary> sd = SummarizeDistribution(abs_delta);
  if (!st.ok()) return st.status();
  if (!sms.ok()) return sms.status();
  if (!sd.ok()) return sd.status();
  std::string out = absl::StrFormat("# recrisk-distributions v1 config=%016x\n",
                                    c.config_hash);
  out += "section,key,value,extra\n";
  for (const auto& [name, s] : {std::pair{"traditional", &*st},
                                std::pair{"model_seeded", &*sms}}) {
    for (const auto& [v, f] : s->cdf) {
      absl::StrAppend(&out, "cdf_", name, ",", FormatDouble(v), ",",
                      FormatDouble(f), ",\n");
    }
    absl::StrAppend(&out, "percentile_", name, ",10,", FormatDouble(s->p10), ",\n");
    absl::StrAppend(&out, "percentile_", name, ",50,", FormatDouble(s->p50), ",\n");
    absl::StrAppend(&out, "percentile_", name, ",90,", FormatDouble(s->p90), ",\n");
  }
  for (size_t b = 0; b < sd->histogram.size(); ++b) {
    const double lo = sd->histogram_min + b * sd->bin_width;
    absl::StrAppend(&out, "abs_delta_histogram,", FormatDouble(lo), ",",
                    sd->histogram[b], ",", FormatDouble(lo + sd->bin_width), "\n");
  }
  return out;
}

absl::StatusOr<std::vector<ConvergenceRow>> RunConvergence(
    const ExperimentConfig& config, const PreparedData& data) {
  if (absl::Status s = ValidateExperimentConfig(config); !s.ok()) return s;
  if (config.repetitions < 2) {
    return absl::InvalidArgumentError("convergence.repetitions: must be >= 2");
  }
  if (config.n_eval_grid.empty()) {
    return absl::InvalidArgumentError("convergence.n_eval_grid: is empty");
  }
  std::vector<ConvergenceRow> rows;
  for (const size_t record : data.selected) {
    absl::StatusOr<std::unique_ptr<Adversary>> adversary =
        BuildAdversary(config, data, record);
    if (!adversary.ok()) return adversary.status();
    for (const GameKind kind : config.games) {
      for (const size_t n_eval : config.n_eval_grid) {
        std::vector<double> aucs;
        for (size_t rep = 0; rep < config.repetitions; ++rep) {
          const Seed seed = DeriveSeed(
              DeriveSeed(DeriveSeed(config.master_seed, "convergence", n_eval),
                         "repetition", rep),
              "record", record);
          absl::StatusOr<std::vector<RecordOutcome>> outcome =
              RunRecord(config, data, record, **adversary, seed, {kind}, n_eval);
          if (!outcome.ok()) return outcome.status();
          aucs.push_back(outcome->front().estimate.auc);
        }
        absl::StatusOr<double> radius = HoeffdingRadius(n_eval / 2, config.rho);
        if (!radius.ok()) return radius.status();
        rows.push_back(ConvergenceRow{
            absl::StrCat(record), kind, n_eval,
            std::accumulate(aucs.begin(), aucs.end(), 0.0) / aucs.size(),
            SampleStd(aucs), *radius});
      }
    }
  }
  return rows;
}

std::string FormatConvergence(const ExperimentConfig& config,
                              const std::vector<ConvergenceRow>& rows) {
  std::string out = absl::StrFormat(
      "# recrisk-convergence v1 config=%016x repetitions=%d rho=%s\n",
      ExperimentHash(config), config.repetitions, FormatDouble(config.rho));
  out += "record_id,game,n_eval,mean_auc,std_auc,radius\n";
  for (const ConvergenceRow& r : rows) {
    absl::StrAppend(&out, r.record_id, ",", GameKindName(r.kind), ",", r.n_eval,
                    ",", FormatDouble(r.mean_auc), ",", FormatDouble(r.std_auc),
                    ",", FormatDouble(r.radius), "\n");
  }
  return out;
}

absl::StatusOr<AuditResult> AuditTranscript(const GameTranscript& transcript,
                                            double epsilon, double delta,
                                            double rho) {
  if (!(epsilon >= 0.0)) return absl::InvalidArgumentError("epsilon must be >= 0");
  if (!(delta >= 0.0 && delta <= 1.0)) {
    return absl::InvalidArgumentError("delta must lie in [0, 1]");
  }
  absl::StatusOr<TradeoffCurve> curve = EmpiricalTradeoff(transcript);
  if (!curve.ok()) return curve.status();
  absl::StatusOr<double> radius = HoeffdingRadius(transcript.runs.size() / 2, rho);
  if (!radius.ok()) return radius.status();
  AuditResult result;
  result.record_id = transcript.record_id;
  result.epsilon = epsilon;
  result.delta = delta;
  result.radius = *radius;
  for (const auto& [alpha, beta] : curve->points) {
    AuditPoint p{alpha, beta, DpTradeoffLowerBound(epsilon, delta, alpha), false};
    p.flagged = beta < p.bound - 2.0 * *radius;
    result.flagged += p.flagged ? 1 : 0;
    result.points.push_back(p);
  }
  return result;
}

absl::StatusOr<std::vector<AuditResult>> RunDpAudit(const ExperimentConfig& config,
                                                    const PreparedData& data) {
  const auto* priv = std::get_if<PrivateBayesNet>(&config.generator.kind);
  if (priv == nullptr) {
    return absl::InvalidArgumentError(
        "generator.kind: the DP audit needs a private_bayesnet generator");
  }
  if (absl::Status s = ValidateExperimentConfig(config); !s.ok()) return s;
  std::vector<AuditResult> audits;
  for (const size_t record : data.selected) {
    absl::StatusOr<std::unique_ptr<Adversary>> adversary =
        BuildAdversary(config, data, record);
    if (!adversary.ok()) return adversary.status();
    absl::StatusOr<std::vector<RecordOutcome>> outcome =
        RunRecord(config, data, record, **adversary,
                  DeriveSeed(config.master_seed, "game", record),
                  {GameKind::kModelSeeded}, config.n_eval);
    if (!outcome.ok()) return outcome.status();
    absl::StatusOr<AuditResult> audit =
        AuditTranscript(outcome->front().transcript, priv->epsilon,
                        config.audit_delta, config.audit_rho);
    if (!audit.ok()) return audit.status();
    audits.push_back(*std::move(audit));
  }
  return audits;
}

std::string FormatAudit(uint64_t config_hash, const std::vector<AuditResult>& audits) {
  std::string out = absl::StrFormat("# recrisk-dp-audit v1 config=%016x\n", config_hash);
  out += "record_id,epsilon,delta,radius,alpha,beta,bound,flagged\n";
  size_t flagged = 0;
  for (const AuditResult& a : audits) {
    for (const AuditPoint& p : a.points) {
      absl::StrAppend(&out, a.record_id, ",", FormatDouble(a.epsilon), ",",
                      FormatDouble(a.delta), ",", FormatDouble(a.radius), ",",
                      FormatDouble(p.alpha), ",", FormatDouble(p.beta), ",",
                      FormatDouble(p.bound), ",", p.flagged ? 1 : 0, "\n");
    }
    flagged += a.flagged;
  }
  absl::StrAppend(&out, "# flagged_points=", flagged, "\n");
  return out;
}

}  // namespace recrisk
