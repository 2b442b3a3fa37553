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
#include <cmath>
#include <map>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "recrisk/attack.h"
#include "recrisk/risk.h"
#include "test_util.h"

namespace recrisk {
namespace {

using ::recrisk::testing::MakeDataset;
using ::recrisk::testing::StatusIs;
using ::testing::HasSubstr;

// Reads the training data back out of an unsmoothed marginal model: the
// column-0 counts are the training histogram. Scores 1 if x's value occurs,
// 0 if not, and fails when the training size is not `expected_size` or x's
// value occurs more than once.
class SpyAdversary : public Adversary {
 public:
  explicit SpyAdversary(size_t expected_size) : expected_size_(expected_size) {}

  absl::StatusOr<double> Score(const FittedGenerator& model, const Record& x,
                               Seed) const override {
    const std::vector<double>& counts = model.tables[0].counts;
    double total = 0.0;
    for (const double c : counts) total += c;
    if (total != static_cast<double>(expected_size_)) {
      return absl::InternalError(absl::StrCat("training size ", total));
    }
    const double copies = counts[x.values[0]];
    if (copies > 1) return absl::InternalError("x occurs twice");
    return copies;
  }

 private:
  size_t expected_size_;
};

// 1-column pool where value 0 is the target and values 1..k fill the rest.
Dataset Pool(int size, int cardinality, bool with_x) {
  std::vector<std::vector<int32_t>> rows;
  if (with_x) rows.push_back({0});
  for (int i = 0; rows.size() < static_cast<size_t>(size); ++i) {
    rows.push_back({1 + i % (cardinality - 1)});
  }
  return MakeDataset({cardinality}, rows);
}

// Target {x} + filler over a 5-level column with value 4 held out for the
// evaluation pool.
std::pair<Dataset, Dataset> ToyData() {
  std::vector<std::vector<int32_t>> rows = {{0}};
  for (int i = 0; i < 9; ++i) rows.push_back({1 + i % 3});
  return {MakeDataset({5}, rows), MakeDataset({5}, {{4}, {1}})};
}

GameConfig SpyConfig(size_t n_eval, size_t n, uint64_t seed) {
  GameConfig c;
  c.n_eval = n_eval;
  c.dataset_size = n;
  c.generator = {IndependentMarginals{}, 0.0};
  c.master_seed = Seed{seed};
  return c;
}

void ExpectBalanced(const GameTranscript& t, size_t n_eval) {
  ASSERT_EQ(t.runs.size(), n_eval);
  size_t ones = 0;
  for (size_t i = 0; i < t.runs.size(); ++i) {
    EXPECT_EQ(t.runs[i].run_index, i);
    ones += t.runs[i].bit;
    EXPECT_GE(t.runs[i].score, 0.0);
    EXPECT_LE(t.runs[i].score, 1.0);
  }
  EXPECT_EQ(ones, n_eval / 2);
}

TEST(BalancedBitsTest, ExactHalfAndSeeded) {
  const std::vector<int> a = BalancedBits(1000, Seed{1});
  EXPECT_EQ(std::count(a.begin(), a.end(), 1), 500);
  EXPECT_EQ(a, BalancedBits(1000, Seed{1}));
  EXPECT_NE(a, BalancedBits(1000, Seed{2}));
}

TEST(ValidateGameConfigTest, OddOrZeroNEvalRejected) {
  GameConfig c;
  c.n_eval = 3;
  EXPECT_THAT(ValidateGameConfig(c), StatusIs(absl::StatusCode::kInvalidArgument));
  c.n_eval = 0;
  EXPECT_THAT(ValidateGameConfig(c), StatusIs(absl::StatusCode::kInvalidArgument));
  c.n_eval = 2;
  c.dataset_size = 0;
  EXPECT_THAT(ValidateGameConfig(c), StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(RunTraditionalTest, MembershipAndSizeDiscipline) {
  // The pool also holds copies of x; they must never enter a dataset.
  Dataset pool = Pool(60, 5, true);
  std::vector<Record> records = pool.records();
  records.push_back(Record{{0}});
  pool = pool.WithRecords(records);
  SpyAdversary spy(20);
  ASSERT_OK_AND_ASSIGN(GameTranscript t,
                       RunTraditional(Record{{0}}, pool, spy, SpyConfig(1000, 20, 3)));
  ExpectBalanced(t, 1000);
  for (const GameRun& r : t.runs) EXPECT_EQ(r.score, r.bit);
  EXPECT_EQ(t.kind, GameKind::kTraditional);
}

TEST(RunTraditionalTest, ConstantAdversaryGivesHalfAuc) {
  ConstantAdversary half(0.5);
  ASSERT_OK_AND_ASSIGN(GameTranscript t,
                       RunTraditional(Record{{0}}, Pool(30, 4, false), half,
                                      SpyConfig(100, 10, 1)));
  for (const GameRun& r : t.runs) EXPECT_EQ(r.score, 0.5);
  EXPECT_EQ(RocAuc(t).value().auc, 0.5);
}

TEST(RunTraditionalTest, DeterministicAndThreadInvariant) {
  Dataset pool = LoadCsv(std::string(RECRISK_DATA_DIR) + "/correlated.csv").value();
  const Record x = pool.record(7);
  GameConfig c;
  c.n_eval = 40;
  c.dataset_size = 100;
  c.master_seed = Seed{11};
  MetaClassifier meta;
  ToyBitAdversary unused;
  // A fixed linear attack over a small bank is enough to exercise sampling.
  const std::vector<int32_t> ks = {1, 2};
  QueryBank bank = MakeQueryBank(pool.schema(), ks, 5, Seed{1}).value();
  meta.weights.assign(bank.queries.size() + 1, 0.7);
  ShadowModelAdversary adversary(TrainedAttack{bank, meta}, 100);
  ASSERT_OK_AND_ASSIGN(GameTranscript a, RunTraditional(x, pool, adversary, c));
  ASSERT_OK_AND_ASSIGN(GameTranscript b, RunTraditional(x, pool, adversary, c));
  c.threads = 8;
  ASSERT_OK_AND_ASSIGN(GameTranscript p, RunTraditional(x, pool, adversary, c));
  EXPECT_EQ(a.runs, b.runs);
  EXPECT_EQ(a.runs, p.runs);
  EXPECT_EQ(SerializeTranscript(a), SerializeTranscript(p));
}

TEST(RunTraditionalTest, InsufficientPoolIsSizeError) {
  SpyAdversary spy(20);
  EXPECT_THAT(RunTraditional(Record{{0}}, Pool(20, 5, true), spy, SpyConfig(10, 20, 1)),
              StatusIs(absl::StatusCode::kFailedPrecondition));
}

TEST(RunModelSeededTest, MembershipAndSizeDiscipline) {
  // Value 4 occurs only in the evaluation pool; x (value 0) is there too.
  std::vector<std::vector<int32_t>> rows = {{0}};
  for (int i = 0; i < 24; ++i) rows.push_back({1 + i % 3});
  const Dataset target = MakeDataset({5}, rows);
  const Dataset eval = MakeDataset({5}, {{4}, {1}, {0}});
  SpyAdversary spy(25);
  for (const ReferenceMode mode : {ReferenceMode::kPerRun, ReferenceMode::kFixed}) {
    GameConfig c = SpyConfig(200, 999, 5);
    c.reference = mode;
    ASSERT_OK_AND_ASSIGN(GameTranscript t,
                         RunModelSeeded(Record{{0}}, target, eval, spy, c));
    ExpectBalanced(t, 200);
    for (const GameRun& r : t.runs) EXPECT_EQ(r.score, r.bit);
  }
}

TEST(RunModelSeededTest, DropModeShrinksOutDatasets) {
  Dataset target = Pool(25, 4, true);
  SpyAdversary in_size(25), out_size(24);
  GameConfig c = SpyConfig(20, 25, 5);
  c.reference = ReferenceMode::kDrop;
  // Every in-run fails the 24 check and every out-run the 25 check.
  EXPECT_THAT(RunModelSeeded(Record{{0}}, target, target, in_size, c),
              StatusIs(absl::StatusCode::kInternal, HasSubstr("training size 24")));
  EXPECT_THAT(RunModelSeeded(Record{{0}}, target, target, out_size, c),
              StatusIs(absl::StatusCode::kInternal, HasSubstr("training size 25")));
}

TEST(RunModelSeededTest, Preconditions) {
  Dataset target = Pool(10, 4, false);
  SpyAdversary spy(10);
  EXPECT_THAT(RunModelSeeded(Record{{0}}, target, target, spy, SpyConfig(10, 10, 1)),
              StatusIs(absl::StatusCode::kFailedPrecondition, HasSubstr("not in")));
  Dataset with_x = Pool(10, 4, true);
  EXPECT_THAT(RunModelSeeded(Record{{0}}, with_x, with_x, spy, SpyConfig(10, 10, 1)),
              StatusIs(absl::StatusCode::kFailedPrecondition, HasSubstr("reference")));
}

TEST(RunModelSeededTest, PerfectToyGivesAucOne) {
  const auto [target, eval] = ToyData();
  ToyBitAdversary toy;
  GameConfig c = SpyConfig(200, 10, 2);
  c.generator = {AnalyticToy{1.0, 0.0}, 1.0};
  ASSERT_OK_AND_ASSIGN(GameTranscript t, RunModelSeeded(Record{{0}}, target, eval, toy, c));
  for (const GameRun& r : t.runs) EXPECT_EQ(r.score, r.bit);
  EXPECT_EQ(RocAuc(t).value().auc, 1.0);
}

TEST(RunModelSeededTest, IndistinguishableToyAucNearHalf) {
  const auto [target, eval] = ToyData();
  ToyBitAdversary toy;
  GameConfig c = SpyConfig(2000, 10, 8);
  c.generator = {AnalyticToy{0.3, 0.3}, 1.0};
  ASSERT_OK_AND_ASSIGN(GameTranscript t, RunModelSeeded(Record{{0}}, target, eval, toy, c));
  EXPECT_LE(std::fabs(RocAuc(t).value().auc - 0.5), HoeffdingRadius(1000, 0.01).value());
}

TEST(RunModelSeededTest, ThreadInvariant) {
  const auto [target, eval] = ToyData();
  ToyBitAdversary toy;
  GameConfig c = SpyConfig(300, 10, 8);
  c.generator = {AnalyticToy{0.6, 0.4}, 1.0};
  ASSERT_OK_AND_ASSIGN(GameTranscript a, RunModelSeeded(Record{{0}}, target, eval, toy, c));
  c.threads = 8;
  ASSERT_OK_AND_ASSIGN(GameTranscript b, RunModelSeeded(Record{{0}}, target, eval, toy, c));
  EXPECT_EQ(a.runs, b.runs);
}

TEST(RunModelSeededTest, RunsDependOnlyOnTheirOwnSeed) {
  // Run i's seed is DeriveSeed(master, "run", i) regardless of n_eval, so a
  // run's score depends on n_eval only through its secret bit.
  const auto [target, eval] = ToyData();
  ToyBitAdversary toy;
  GameConfig c = SpyConfig(100, 10, 8);
  c.generator = {AnalyticToy{0.6, 0.4}, 1.0};
  ASSERT_OK_AND_ASSIGN(GameTranscript small, RunModelSeeded(Record{{0}}, target, eval, toy, c));
  c.n_eval = 400;
  ASSERT_OK_AND_ASSIGN(GameTranscript big, RunModelSeeded(Record{{0}}, target, eval, toy, c));
  for (size_t i = 0; i < small.runs.size(); ++i) {
    EXPECT_EQ(small.runs[i].run_seed, big.runs[i].run_seed);
    if (small.runs[i].bit == big.runs[i].bit) {
      EXPECT_EQ(small.runs[i].score, big.runs[i].score);
    }
  }
}

TEST(RunTraditionalMixtureTest, Preconditions) {
  ToyBitAdversary toy;
  GameConfig c = SpyConfig(10, 10, 1);
  c.generator = {AnalyticToy{0.5, 0.5}, 1.0};
  const std::vector<MixturePartial> one = {{Pool(10, 4, false), std::nullopt}};
  EXPECT_THAT(RunTraditionalMixture(Record{{0}}, one, toy, c),
              StatusIs(absl::StatusCode::kFailedPrecondition));
  const std::vector<MixturePartial> bad = {{Pool(10, 4, false), std::nullopt},
                                           {Pool(10, 4, true), std::nullopt}};
  EXPECT_THAT(RunTraditionalMixture(Record{{0}}, bad, toy, c),
              StatusIs(absl::StatusCode::kFailedPrecondition, HasSubstr("partial dataset 1")));
}

TEST(RunTraditionalMixtureTest, MembershipDiscipline) {
  SpyAdversary spy_in(11), spy_out(10);
  const std::vector<MixturePartial> partials = {{Pool(10, 4, false), std::nullopt},
                                                {Pool(10, 3, false), std::nullopt}};
  // In-rounds train on the partial plus x (11 records), out-rounds on the
  // partial alone.
  GameConfig c = SpyConfig(2, 10, 1);
  for (uint64_t s = 0; s < 20; ++s) {
    c.master_seed = Seed{s};
    absl::StatusOr<GameTranscript> a = RunTraditionalMixture(Record{{0}}, partials, spy_in, c);
    absl::StatusOr<GameTranscript> b = RunTraditionalMixture(Record{{0}}, partials, spy_out, c);
    EXPECT_FALSE(a.ok());
    EXPECT_FALSE(b.ok());
  }
  c.n_eval = 200;
  class SizeAware : public Adversary {
   public:
    absl::StatusOr<double> Score(const FittedGenerator& m, const Record& x,
                                 Seed) const override {
      double total = 0.0;
      for (const double v : m.tables[0].counts) total += v;
      const double copies = m.tables[0].counts[x.values[0]];
      if (total != 10.0 + copies) return absl::InternalError("size");
      return copies;
    }
  } sized;
  ASSERT_OK_AND_ASSIGN(GameTranscript t, RunTraditionalMixture(Record{{0}}, partials, sized, c));
  ExpectBalanced(t, 200);
  for (const GameRun& r : t.runs) EXPECT_EQ(r.score, r.bit);
}

TEST(RunTraditionalMixtureTest, DegenerateMixtureMatchesModelSeededDrop) {
  // Two copies of one partial: the same rate law as the model-seeded game on
  // partial + {x} with x dropped from out-datasets.
  Dataset partial = Pool(10, 4, false);
  std::vector<Record> with_x = partial.records();
  with_x.push_back(Record{{0}});
  ToyBitAdversary toy;
  GameConfig c = SpyConfig(4000, 10, 21);
  c.generator = {AnalyticToy{0.7, 0.3}, 1.0};
  const std::vector<MixturePartial> partials = {{partial, std::nullopt},
                                                {partial, std::nullopt}};
  ASSERT_OK_AND_ASSIGN(GameTranscript mix, RunTraditionalMixture(Record{{0}}, partials, toy, c));
  c.reference = ReferenceMode::kDrop;
  ASSERT_OK_AND_ASSIGN(GameTranscript ms,
                       RunModelSeeded(Record{{0}}, partial.WithRecords(with_x), partial, toy, c));
  const RatePair a = EmpiricalRates(mix, 0.5).value();
  const RatePair b = EmpiricalRates(ms, 0.5).value();
  const double r = HoeffdingRadius(2000, 0.01).value();
  EXPECT_LE(std::fabs(a.alpha - b.alpha), 2 * r);
  EXPECT_LE(std::fabs(a.beta - b.beta), 2 * r);
}

TEST(TranscriptTest, SerializeParseRoundTrip) {
  GameTranscript t = ::recrisk::testing::MakeTranscript({1, 0, 0, 1},
                                                        {0.1, 1.0 / 3.0, 0.0, 1.0});
  t.record_id = "42";
  t.kind = GameKind::kTraditional;
  t.config_hash = 0x00ab00cd00ef0012ULL;
  t.runs[2].run_seed = Seed{~0ULL};
  const std::string text = SerializeTranscript(t);
  EXPECT_THAT(text, HasSubstr("# recrisk-transcript v1 kind=traditional record=42 "
                              "config=00ab00cd00ef0012 n_eval=4\n"));
  ASSERT_OK_AND_ASSIGN(GameTranscript back, ParseTranscript(text));
  EXPECT_EQ(back.runs, t.runs);
  EXPECT_EQ(back.record_id, "42");
  EXPECT_EQ(back.kind, GameKind::kTraditional);
  EXPECT_EQ(back.config_hash, t.config_hash);
  EXPECT_EQ(SerializeTranscript(back), text);
}

TEST(TranscriptTest, ParseRejectsMalformedInput) {
  EXPECT_THAT(ParseTranscript("garbage"), StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(ParseTranscript("# recrisk-transcript v1 kind=traditional record=1 "
                              "config=0 n_eval=1\nrun_index,b,score,run_seed\n0,1,1.5,3\n"),
              StatusIs(absl::StatusCode::kInvalidArgument, HasSubstr("line 3")));
  EXPECT_THAT(ParseTranscript("# recrisk-transcript v1 kind=traditional record=1 "
                              "config=0 n_eval=2\nrun_index,b,score,run_seed\n0,1,0.5,3\n"),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(ConfigHashTest, SensitiveToResultDeterminingFieldsOnly) {
  GameConfig a;
  GameConfig b = a;
  b.threads = 8;
  b.record_id = "x";
  EXPECT_EQ(ConfigHash(a), ConfigHash(b));
  b.master_seed = Seed{1};
  EXPECT_NE(ConfigHash(a), ConfigHash(b));
  GameConfig c = a;
  c.generator.smoothing = 0.5;
  EXPECT_NE(ConfigHash(a), ConfigHash(c));
}

}  // namespace
}  // namespace recrisk
