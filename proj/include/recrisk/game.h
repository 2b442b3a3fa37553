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

// Record-specific privacy games.
//
// Every game plays n_eval rounds for one target record x. Round i draws a
// secret bit b, builds a training dataset that contains x iff b = 1, fits the
// generator and asks the adversary for a membership score. The games differ
// only in where the training datasets come from:
//
//   traditional:   a fresh size-n sample of the evaluation pool every round,
//                  with x included in exactly half of the rounds;
//   model-seeded:  the fixed target dataset for b = 1, and the same dataset
//                  with x swapped for a reference record for b = 0, so only
//                  the training seed varies between rounds with equal b;
//   mixture:       a traditional round whose base dataset is drawn uniformly
//                  from a finite list, for checking convergence to averages.
//
// All randomness of round i derives from (master_seed, i), so rounds can be
// run in any order or in parallel.

#ifndef RECRISK_GAME_H_
#define RECRISK_GAME_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "recrisk/attack.h"
#include "recrisk/data.h"
#include "recrisk/generator.h"
#include "recrisk/seed.h"

namespace recrisk {

enum class GameKind { kTraditional, kModelSeeded, kMixture };

absl::string_view GameKindName(GameKind kind);
absl::StatusOr<GameKind> ParseGameKind(absl::string_view name);

// How "out" datasets of the model-seeded game replace the target record.
enum class ReferenceMode {
  kPerRun,  // a fresh reference record every out-round
  kFixed,   // one reference record for the whole game
  kDrop,    // no replacement; the out-dataset is one record smaller
};

absl::string_view ReferenceModeName(ReferenceMode mode);
absl::StatusOr<ReferenceMode> ParseReferenceMode(absl::string_view name);

struct GameConfig {
  size_t n_eval = 1000;
  // Training dataset size n of the traditional game.
  size_t dataset_size = 1000;
  GeneratorSpec generator;
  Seed master_seed;
  GameKind kind = GameKind::kModelSeeded;
  ReferenceMode reference = ReferenceMode::kPerRun;
  int threads = 1;
  std::string record_id;
};

absl::Status ValidateGameConfig(const GameConfig& config);

// Hash of everything that determines a transcript (not threads or the record
// id).
uint64_t ConfigHash(const GameConfig& config);

struct GameRun {
  size_t run_index = 0;
  int bit = 0;
  double score = 0.0;
  Seed run_seed;

  friend bool operator==(const GameRun&, const GameRun&) = default;
};

struct GameTranscript {
  std::vector<GameRun> runs;  // sorted by run_index
  std::string record_id;
  GameKind kind = GameKind::kModelSeeded;
  uint64_t config_hash = 0;
  GameConfig config;
};

// Exactly n_eval/2 ones and n_eval/2 zeros in seeded random order.
std::vector<int> BalancedBits(size_t n_eval, Seed seed);

absl::StatusOr<GameTranscript> RunTraditional(const Record& x,
                                              const Dataset& d_eval,
                                              const Adversary& adversary,
                                              const GameConfig& config);

absl::StatusOr<GameTranscript> RunModelSeeded(const Record& x,
                                              const Dataset& d_target,
                                              const Dataset& d_eval,
                                              const Adversary& adversary,
                                              const GameConfig& config);

// One base dataset of the mixture game, optionally with its own generator.
struct MixturePartial {
  Dataset data;
  std::optional<GeneratorSpec> generator;
};

absl::StatusOr<GameTranscript> RunTraditionalMixture(
    const Record& x, std::span<const MixturePartial> partials,
    const Adversary& adversary, const GameConfig& config);

// Line format:
//   # recrisk-transcript v1 kind=<k> record=<id> config=<hex> n_eval=<n>
//   run_index,b,score,run_seed
//   <i>,<b>,<%.17g score>,<u64>
std::string SerializeTranscript(const GameTranscript& transcript);
absl::StatusOr<GameTranscript> ParseTranscript(absl::string_view text);

}  // namespace recrisk

#endif  // RECRISK_GAME_H_
