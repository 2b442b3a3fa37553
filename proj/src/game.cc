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

#include "recrisk/game.h"

#include <algorithm>
#include <functional>
#include <set>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "recrisk/parallel.h"

namespace recrisk {
namespace {

// Builds the training dataset of one round.
using DatasetForRound =
    std::function<absl::StatusOr<Dataset>(size_t round, int bit, Seed seed)>;
using SpecForRound = std::function<const GeneratorSpec&(size_t round, Seed seed)>;

absl::StatusOr<GameTranscript> PlayRounds(const Record& x,
                                          const Adversary& adversary,
                                          const GameConfig& config,
                                          const DatasetForRound& dataset_for,
                                          const SpecForRound& spec_for) {
  GameTranscript transcript;
  transcript.record_id = config.record_id;
  transcript.kind = config.kind;
  transcript.config_hash = ConfigHash(config);
  transcript.config = config;
  transcript.runs.resize(config.n_eval);
  const std::vector<int> bits =
      BalancedBits(config.n_eval, DeriveSeed(config.master_seed, "bits"));

  absl::Status status = ParallelFor(
      config.n_eval, config.threads, [&](size_t i) -> absl::Status {
        const Seed run_seed = DeriveSeed(config.master_seed, "run", i);
        const int bit = bits[i];
        absl::StatusOr<Dataset> training =
            dataset_for(i, bit, DeriveSeed(run_seed, "data"));
        if (!training.ok()) return training.status();
        const GeneratorSpec& spec = spec_for(i, DeriveSeed(run_seed, "partial"));
        absl::StatusOr<FittedGenerator> model =
            Fit(spec, *training, x, DeriveSeed(run_seed, "fit"));
        if (!model.ok()) return model.status();
        absl::StatusOr<double> score =
            adversary.Score(*model, x, DeriveSeed(run_seed, "adversary"));
        if (!score.ok()) return score.status();
        if (!(*score >= 0.0 && *score <= 1.0)) {
          return absl::InternalError(
              absl::StrCat("adversary returned score ", *score, " outside [0, 1]"));
        }
        transcript.runs[i] = GameRun{i, bit, *score, run_seed};
        return absl::OkStatus();
      });
  if (!status.ok()) return status;
  return transcript;
}

// Index of the partial chosen in round `seed`'s stream.
size_t PickPartial(size_t count, Seed seed) {
  Rng rng(seed);
  return static_cast<size_t>(rng.UniformInt(count));
}

}  // namespace

absl::string_view GameKindName(GameKind kind) {
  switch (kind) {
    case GameKind::kTraditional:
      return "traditional";
    case GameKind::kModelSeeded:
      return "model_seeded";
    case GameKind::kMixture:
      return "mixture";
  }
  return "unknown";
}

absl::StatusOr<GameKind> ParseGameKind(absl::string_view name) {
  if (name == "traditional") return GameKind::kTraditional;
  if (name == "model_seeded") return GameKind::kModelSeeded;
  if (name == "mixture") return GameKind::kMixture;
  return absl::InvalidArgumentError(absl::StrCat("unknown game kind '", name, "'"));
}

absl::string_view ReferenceModeName(ReferenceMode mode) {
  switch (mode) {
    case ReferenceMode::kPerRun:
      return "per_run";
    case ReferenceMode::kFixed:
      return "fixed";
    case ReferenceMode::kDrop:
      return "drop";
  }
  return "unknown";
}

absl::StatusOr<ReferenceMode> ParseReferenceMode(absl::string_view name) {
  if (name == "per_run") return ReferenceMode::kPerRun;
  if (name == "fixed") return ReferenceMode::kFixed;
  if (name == "drop") return ReferenceMode::kDrop;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown reference mode '", name, "'"));
}

absl::Status ValidateGameConfig(const GameConfig& config) {
  if (config.n_eval == 0 || config.n_eval % 2 != 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("n_eval must be positive and even, got ", config.n_eval));
  }
  if (config.dataset_size < 1) {
    return absl::InvalidArgumentError("dataset size must be >= 1");
  }
  return ValidateGeneratorSpec(config.generator);
}

uint64_t ConfigHash(const GameConfig& config) {
  const GeneratorSpec& g = config.generator;
  std::string canonical = absl::StrCat(
      "kind=", GameKindName(config.kind), ";n_eval=", config.n_eval,
      ";n=", config.dataset_size, ";seed=", config.master_seed.value,
      ";reference=", ReferenceModeName(config.reference),
      ";generator=", KindName(g), ";smoothing=", absl::StrFormat("%.17g", g.smoothing));
  if (const auto* b = std::get_if<BayesNet>(&g.kind)) {
    absl::StrAppend(&canonical, ";max_parents=", b->max_parents,
                    absl::StrFormat(";mi_floor=%.17g", b->mi_floor));
  } else if (const auto* p = std::get_if<PrivateBayesNet>(&g.kind)) {
    absl::StrAppend(&canonical, ";max_parents=", p->max_parents,
                    absl::StrFormat(";epsilon=%.17g;mi_floor=%.17g", p->epsilon,
                                    p->mi_floor));
  } else if (const auto* t = std::get_if<AnalyticToy>(&g.kind)) {
    absl::StrAppend(&canonical,
                    absl::StrFormat(";p_in=%.17g;p_out=%.17g", t->p_in, t->p_out));
  }
  return Mix64(HashString(canonical));
}

std::vector<int> BalancedBits(size_t n_eval, Seed seed) {
  std::vector<int> bits(n_eval, 0);
  std::fill(bits.begin(), bits.begin() + n_eval / 2, 1);
  Rng rng(seed);
  rng.Shuffle(std::span<int>(bits));
  return bits;
}

absl::StatusOr<GameTranscript> RunTraditional(const Record& x,
                                              const Dataset& d_eval,
                                              const Adversary& adversary,
                                              const GameConfig& config) {
  if (absl::Status s = ValidateGameConfig(config); !s.ok()) return s;
  if (absl::Status s = CheckConforms(d_eval.schema(), x); !s.ok()) return s;
  // Pool records equal to x never enter a dataset as anything but x itself.
  const std::vector<size_t> copies = IndicesEqualTo(d_eval, x);
  const size_t n = config.dataset_size;
  if (n > d_eval.size() - copies.size()) {
    return absl::FailedPreconditionError(absl::StrCat(
        "the evaluation pool has ", d_eval.size() - copies.size(),
        " records other than the target; need ", n));
  }
  GameConfig cfg = config;
  cfg.kind = GameKind::kTraditional;
  return PlayRounds(
      x, adversary, cfg,
      [&](size_t, int bit, Seed seed) -> absl::StatusOr<Dataset> {
        absl::StatusOr<std::vector<size_t>> picked =
            SampleIndices(d_eval.size(), bit ? n - 1 : n, seed, copies);
        if (!picked.ok()) return picked.status();
        std::vector<Record> records;
        records.reserve(n);
        if (bit) records.push_back(x);
        for (const size_t i : *picked) records.push_back(d_eval.record(i));
        return d_eval.WithRecords(std::move(records));
      },
      [&](size_t, Seed) -> const GeneratorSpec& { return cfg.generator; });
}

absl::StatusOr<GameTranscript> RunModelSeeded(const Record& x,
                                              const Dataset& d_target,
                                              const Dataset& d_eval,
                                              const Adversary& adversary,
                                              const GameConfig& config) {
  if (absl::Status s = ValidateGameConfig(config); !s.ok()) return s;
  if (absl::Status s = CheckConforms(d_target.schema(), x); !s.ok()) return s;
  const std::vector<size_t> positions = IndicesEqualTo(d_target, x);
  if (positions.empty()) {
    return absl::FailedPreconditionError(
        "the target record is not in the target dataset");
  }
  const std::set<Record> in_target(d_target.records().begin(),
                                   d_target.records().end());
  std::vector<Record> references;
  for (const Record& r : d_eval.records()) {
    if (!in_target.contains(r)) references.push_back(r);
  }
  if (config.reference != ReferenceMode::kDrop && references.empty()) {
    return absl::FailedPreconditionError(
        "no reference records: every evaluation record is in the target "
        "dataset");
  }

  GameConfig cfg = config;
  cfg.kind = GameKind::kModelSeeded;
  cfg.dataset_size = d_target.size();
  // Every copy of x is swapped out, each for its own reference record, so the
  // out-dataset never contains x and keeps the target's size.
  auto replaced = [&](Seed seed) {
    std::vector<Record> records = d_target.records();
    for (size_t k = 0; k < positions.size(); ++k) {
      Rng rng(DeriveSeed(seed, "reference", k));
      records[positions[k]] = references[rng.UniformInt(references.size())];
    }
    return records;
  };
  std::optional<Dataset> fixed_out;
  if (cfg.reference == ReferenceMode::kFixed) {
    fixed_out = d_target.WithRecords(
        replaced(DeriveSeed(cfg.master_seed, "fixed-reference")));
  }
  return PlayRounds(
      x, adversary, cfg,
      [&](size_t, int bit, Seed seed) -> absl::StatusOr<Dataset> {
        if (bit) return d_target;
        switch (cfg.reference) {
          case ReferenceMode::kPerRun:
            return d_target.WithRecords(replaced(seed));
          case ReferenceMode::kFixed:
            return *fixed_out;
          case ReferenceMode::kDrop: {
            std::vector<Record> records;
            for (const Record& r : d_target.records()) {
              if (r != x) records.push_back(r);
            }
            return d_target.WithRecords(std::move(records));
          }
        }
        return absl::InternalError("unhandled reference mode");
      },
      [&](size_t, Seed) -> const GeneratorSpec& { return cfg.generator; });
}

absl::StatusOr<GameTranscript> RunTraditionalMixture(
    const Record& x, std::span<const MixturePartial> partials,
    const Adversary& adversary, const GameConfig& config) {
  if (absl::Status s = ValidateGameConfig(config); !s.ok()) return s;
  if (partials.size() < 2) {
    return absl::FailedPreconditionError(
        "a mixture needs at least two partial datasets");
  }
  for (size_t p = 0; p < partials.size(); ++p) {
    if (partials[p].generator.has_value()) {
      if (absl::Status s = ValidateGeneratorSpec(*partials[p].generator); !s.ok()) {
        return s;
      }
    }
    absl::StatusOr<bool> has_x = Contains(partials[p].data, x);
    if (!has_x.ok()) return has_x.status();
    if (*has_x) {
      return absl::FailedPreconditionError(
          absl::StrCat("partial dataset ", p, " already contains the target"));
    }
  }
  GameConfig cfg = config;
  cfg.kind = GameKind::kMixture;
  // The partial of a round is drawn from the round's "partial" stream, which
  // both callbacks see; it is recomputed rather than shared.
  auto partial_of = [&](size_t round) {
    const Seed run_seed = DeriveSeed(cfg.master_seed, "run", round);
    return PickPartial(partials.size(), DeriveSeed(run_seed, "partial"));
  };
  return PlayRounds(
      x, adversary, cfg,
      [&](size_t round, int bit, Seed) -> absl::StatusOr<Dataset> {
        const Dataset& base = partials[partial_of(round)].data;
        if (!bit) return base;
        std::vector<Record> records = base.records();
        records.push_back(x);
        return base.WithRecords(std::move(records));
      },
      [&](size_t round, Seed) -> const GeneratorSpec& {
        const MixturePartial& p = partials[partial_of(round)];
        return p.generator.has_value() ? *p.generator : cfg.generator;
      });
}

std::string SerializeTranscript(const GameTranscript& transcript) {
  std::string out = absl::StrFormat(
      "# recrisk-transcript v1 kind=%s record=%s config=%016x n_eval=%d\n",
      GameKindName(transcript.kind), transcript.record_id,
      transcript.config_hash, transcript.runs.size());
  out += "run_index,b,score,run_seed\n";
  for (const GameRun& r : transcript.runs) {
    absl::StrAppendFormat(&out, "%d,%d,%.17g,%d\n", r.run_index, r.bit, r.score,
                          r.run_seed.value);
  }
  return out;
}

absl::StatusOr<GameTranscript> ParseTranscript(absl::string_view text) {
  std::vector<absl::string_view> lines =
      absl::StrSplit(text, '\n', absl::SkipEmpty());
  if (lines.size() < 2 ||
      !absl::ConsumePrefix(&lines[0], "# recrisk-transcript v1 ")) {
    return absl::InvalidArgumentError("not a v1 transcript");
  }
  GameTranscript t;
  size_t n_eval = 0;
  for (absl::string_view field : absl::StrSplit(lines[0], ' ', absl::SkipEmpty())) {
    std::pair<absl::string_view, absl::string_view> kv = absl::StrSplit(field, '=');
    if (kv.first == "kind") {
      absl::StatusOr<GameKind> kind = ParseGameKind(kv.second);
      if (!kind.ok()) return kind.status();
      t.kind = *kind;
    } else if (kv.first == "record") {
      t.record_id = std::string(kv.second);
    } else if (kv.first == "config") {
      if (!ParseHex64(kv.second, &t.config_hash)) {
        return absl::InvalidArgumentError("bad config hash");
      }
    } else if (kv.first == "n_eval") {
      if (!absl::SimpleAtoi(kv.second, &n_eval)) {
        return absl::InvalidArgumentError("bad n_eval");
      }
    }
  }
  if (lines[1] != "run_index,b,score,run_seed") {
    return absl::InvalidArgumentError("missing transcript column header");
  }
  for (size_t l = 2; l < lines.size(); ++l) {
    std::vector<absl::string_view> f = absl::StrSplit(lines[l], ',');
    GameRun run;
    if (f.size() != 4 || !absl::SimpleAtoi(f[0], &run.run_index) ||
        !absl::SimpleAtoi(f[1], &run.bit) || (run.bit != 0 && run.bit != 1) ||
        !absl::SimpleAtod(f[2], &run.score) || !(run.score >= 0.0) ||
        !(run.score <= 1.0) || !absl::SimpleAtoi(f[3], &run.run_seed.value)) {
      return absl::InvalidArgumentError(
          absl::StrCat("transcript line ", l + 1, " is malformed"));
    }
    t.runs.push_back(run);
  }
  if (t.runs.size() != n_eval) {
    return absl::InvalidArgumentError(absl::StrCat(
        "transcript declares ", n_eval, " runs but has ", t.runs.size()));
  }
  t.config.n_eval = n_eval;
  t.config.kind = t.kind;
  t.config.record_id = t.record_id;
  return t;
}

}  // namespace recrisk
