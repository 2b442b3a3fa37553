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


#include "recrisk/generator.h"

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace recrisk {
namespace {

using ::recrisk::testing::MakeDataset;
using ::recrisk::testing::StatusIs;
using ::testing::ElementsAre;
using ::testing::IsEmpty;

Dataset LoadCorpus(const std::string& name) {
  return LoadCsv(std::string(RECRISK_DATA_DIR) + "/" + name).value();
}

// Plug-in mutual information from joint counts, written independently of
// the library's implementation.
double BruteForceMi(const Dataset& d, size_t a, const std::vector<size_t>& others) {
  std::map<std::pair<int, std::vector<int>>, double> joint;
  std::map<int, double> pa;
  std::map<std::vector<int>, double> pb;
  for (const Record& r : d.records()) {
    std::vector<int> key;
    for (const size_t o : others) key.push_back(r.values[o]);
    joint[{r.values[a], key}] += 1;
    pa[r.values[a]] += 1;
    pb[key] += 1;
  }
  const double n = d.size();
  double mi = 0.0;
  for (const auto& [k, c] : joint) {
    mi += c / n * std::log((c / n) / ((pa[k.first] / n) * (pb[k.second] / n)));
  }
  return mi;
}

void ExpectRowsNormalized(const Tables& tables) {
  for (const ConditionalTable& t : tables) {
    for (size_t row = 0; row < t.rows(); ++row) {
      double sum = 0.0;
      for (const double p : t.Row(row)) {
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
        sum += p;
      }
      EXPECT_NEAR(sum, 1.0, 1e-9);
    }
  }
}

Structure Independent(size_t columns) {
  Structure s;
  for (size_t i = 0; i < columns; ++i) s.order.push_back(i);
  s.parents.assign(columns, {});
  return s;
}

TEST(ValidateGeneratorSpecTest, RejectsOutOfRangeParameters) {
  EXPECT_OK(ValidateGeneratorSpec(GeneratorSpec{}));
  EXPECT_THAT(ValidateGeneratorSpec({AnalyticToy{1.2, 0.1}, 1.0}),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(ValidateGeneratorSpec({PrivateBayesNet{2, 0.0, 0.0}, 1.0}),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(ValidateGeneratorSpec({BayesNet{-1, 0.0}, 1.0}),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(ValidateGeneratorSpec({BayesNet{}, -0.5}),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(MutualInformationTest, MatchesBruteForce) {
  Dataset d = LoadCsv(std::string(RECRISK_DATA_DIR) + "/correlated.csv").value();
  for (size_t a = 0; a < d.schema().size(); ++a) {
    for (size_t b = 0; b < d.schema().size(); ++b) {
      if (a == b) continue;
      EXPECT_NEAR(MutualInformation(d, a, std::vector<size_t>{b}),
                  BruteForceMi(d, a, {b}), 1e-12);
    }
  }
  EXPECT_NEAR(MutualInformation(d, 4, std::vector<size_t>{2, 3}),
              BruteForceMi(d, 4, {2, 3}), 1e-12);
}

TEST(FitTest, IndependentMarginalsHalfHalf) {
  Dataset d = MakeDataset({2}, {{0}, {0}, {1}, {1}});
  ASSERT_OK_AND_ASSIGN(FittedGenerator g,
                       Fit({IndependentMarginals{}, 0.0}, d, std::nullopt, Seed{1}));
  EXPECT_THAT(g.tables[0].probs, ElementsAre(0.5, 0.5));
}

TEST(FitTest, ToyRecordsMembership) {
  Dataset d = MakeDataset({3}, {{0}, {2}});
  ASSERT_OK_AND_ASSIGN(FittedGenerator in,
                       Fit({AnalyticToy{0.8, 0.2}, 1.0}, d, Record{{2}}, Seed{1}));
  ASSERT_TRUE(in.toy.has_value());
  EXPECT_TRUE(in.toy->member);
  ASSERT_OK_AND_ASSIGN(FittedGenerator out,
                       Fit({AnalyticToy{0.8, 0.2}, 1.0}, d, Record{{1}}, Seed{1}));
  EXPECT_FALSE(out.toy->member);
  EXPECT_THAT(Fit({AnalyticToy{0.8, 0.2}, 1.0}, d, std::nullopt, Seed{1}),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(FitTest, EmptyTrainingIsErrorForNonToy) {
  Dataset d = MakeDataset({2}, {});
  EXPECT_THAT(Fit(GeneratorSpec{}, d, std::nullopt, Seed{1}),
              StatusIs(absl::StatusCode::kFailedPrecondition));
}

TEST(FitTest, DeterministicCopyLearnsEdgeWithPointMassRows) {
  Dataset d = LoadCorpus("copy_pair.csv");
  int a_first = 0;
  for (uint64_t s = 0; s < 20; ++s) {
    ASSERT_OK_AND_ASSIGN(FittedGenerator g,
                         Fit({BayesNet{1, 0.0}, 0.0}, d, std::nullopt, Seed{s}));
    const size_t first = g.structure.order[0], second = g.structure.order[1];
    EXPECT_THAT(g.structure.parents[second], ElementsAre(first));
    EXPECT_THAT(g.structure.parents[first], IsEmpty());
    if (first != 0) continue;
    ++a_first;
    const ConditionalTable& b = g.tables[1];
    for (size_t row = 0; row < b.rows(); ++row) {
      for (size_t v = 0; v < static_cast<size_t>(b.arity); ++v) {
        EXPECT_EQ(b.Row(row)[v], row == v ? 1.0 : 0.0);
      }
    }
  }
  EXPECT_GT(a_first, 0);
}

TEST(FitTest, DeterministicGivenSeed) {
  Dataset d = LoadCorpus("correlated.csv");
  ASSERT_OK_AND_ASSIGN(FittedGenerator a, Fit(GeneratorSpec{}, d, std::nullopt, Seed{5}));
  ASSERT_OK_AND_ASSIGN(FittedGenerator b, Fit(GeneratorSpec{}, d, std::nullopt, Seed{5}));
  EXPECT_EQ(a.structure, b.structure);
  EXPECT_EQ(a.tables, b.tables);
  ASSERT_OK_AND_ASSIGN(Dataset sa, Sample(a, 100, Seed{9}));
  ASSERT_OK_AND_ASSIGN(Dataset sb, Sample(b, 100, Seed{9}));
  EXPECT_EQ(sa, sb);
}

TEST(LearnStructureTest, ZeroMaxParentsGivesEmptyParentSets) {
  Dataset d = LoadCorpus("correlated.csv");
  ASSERT_OK_AND_ASSIGN(Structure s, LearnStructure(d, 0, Seed{1}));
  for (const auto& p : s.parents) EXPECT_THAT(p, IsEmpty());
}

TEST(LearnStructureTest, MiFloorDropsIndependentColumns) {
  Dataset d = LoadCorpus("independent.csv");
  const double mi = BruteForceMi(d, 0, {1});
  ASSERT_LT(mi, 0.01);
  for (uint64_t s = 0; s < 10; ++s) {
    ASSERT_OK_AND_ASSIGN(Structure st, LearnStructure(d, 1, Seed{s}, 0.01));
    EXPECT_THAT(st.parents[0], IsEmpty());
    EXPECT_THAT(st.parents[1], IsEmpty());
  }
}

TEST(LearnStructureTest, GreedyChoiceMatchesBruteForceMi) {
  Dataset d = LoadCorpus("correlated.csv");
  for (uint64_t s = 0; s < 10; ++s) {
    ASSERT_OK_AND_ASSIGN(Structure st, LearnStructure(d, 1, Seed{s}));
    ASSERT_TRUE(IsTopologicallyValid(st));
    for (size_t k = 1; k < st.order.size(); ++k) {
      const size_t c = st.order[k];
      ASSERT_EQ(st.parents[c].size(), 1u);
      const double chosen = BruteForceMi(d, c, st.parents[c]);
      for (size_t j = 0; j < k; ++j) {
        EXPECT_GE(chosen + 1e-12, BruteForceMi(d, c, {st.order[j]}));
      }
    }
  }
}

TEST(LearnStructureTest, AlwaysAcyclic) {
  Dataset d = LoadCorpus("correlated.csv");
  for (uint64_t s = 0; s < 30; ++s) {
    ASSERT_OK_AND_ASSIGN(Structure st, LearnStructure(d, 3, Seed{s}));
    EXPECT_TRUE(IsTopologicallyValid(st));
  }
}

TEST(IsTopologicallyValidTest, DetectsViolations) {
  EXPECT_TRUE(IsTopologicallyValid({{0, 1}, {{}, {0}}}));
  EXPECT_FALSE(IsTopologicallyValid({{1, 0}, {{}, {0}}}));
  EXPECT_FALSE(IsTopologicallyValid({{0, 0}, {{}, {}}}));
}

TEST(EstimateTablesTest, SmoothingFormula) {
  Dataset d = MakeDataset({2}, {{0}, {0}, {0}, {1}});
  EXPECT_THAT(EstimateTables(d, Independent(1), 0.0)[0].probs,
              ElementsAre(0.75, 0.25));
  const Tables t = EstimateTables(d, Independent(1), 1.0);
  EXPECT_DOUBLE_EQ(t[0].probs[0], 4.0 / 6.0);
  EXPECT_DOUBLE_EQ(t[0].probs[1], 2.0 / 6.0);
}

TEST(EstimateTablesTest, EmptyRowUniform) {
  // Parent value 1 never occurs, so its row has zero counts.
  Dataset d = MakeDataset({2, 2}, {{0, 0}, {0, 0}, {0, 1}});
  const Structure s{{0, 1}, {{}, {0}}};
  const Tables smoothed = EstimateTables(d, s, 1.0);
  EXPECT_DOUBLE_EQ(smoothed[1].probs[0], 3.0 / 5.0);
  EXPECT_DOUBLE_EQ(smoothed[1].probs[1], 2.0 / 5.0);
  EXPECT_EQ(smoothed[1].probs[2], 0.5);
  EXPECT_EQ(smoothed[1].probs[3], 0.5);
  const Tables raw = EstimateTables(d, s, 0.0);
  EXPECT_DOUBLE_EQ(raw[1].probs[0], 2.0 / 3.0);
  EXPECT_EQ(raw[1].probs[2], 0.5);
  EXPECT_EQ(raw[1].probs[3], 0.5);
}

TEST(PrivatizeTablesTest, HugeEpsilonLeavesTablesUnchanged) {
  Dataset d = LoadCorpus("correlated.csv");
  ASSERT_OK_AND_ASSIGN(Structure s, LearnStructure(d, 2, Seed{1}));
  const Tables plain = EstimateTables(d, s, 1.0);
  const Tables noisy = PrivatizeTables(plain, s, 1e9, Seed{2});
  for (size_t c = 0; c < plain.size(); ++c) {
    for (size_t i = 0; i < plain[c].probs.size(); ++i) {
      EXPECT_NEAR(noisy[c].probs[i], plain[c].probs[i], 1e-3);
    }
  }
  ExpectRowsNormalized(noisy);
}

TEST(PrivatizeTablesTest, AllZeroRowBecomesUniform) {
  Dataset d = MakeDataset({3}, {{0}});
  const Tables plain = EstimateTables(d, Independent(1), 0.0);
  bool found = false;
  for (uint64_t s = 0; s < 200 && !found; ++s) {
    const Tables noisy = PrivatizeTables(plain, Independent(1), 1.0, Seed{s});
    if (noisy[0].counts == std::vector<double>{0, 0, 0}) {
      found = true;
      for (const double p : noisy[0].probs) EXPECT_DOUBLE_EQ(p, 1.0 / 3.0);
    }
  }
  EXPECT_TRUE(found);
}

TEST(PrivatizeTablesTest, ReproducibleAndNormalized) {
  Dataset d = MakeDataset({2}, {{0}, {1}, {1}});
  const Tables plain = EstimateTables(d, Independent(1), 1.0);
  const Tables a = PrivatizeTables(plain, Independent(1), 1.0, Seed{3});
  const Tables b = PrivatizeTables(plain, Independent(1), 1.0, Seed{3});
  EXPECT_EQ(a, b);
  EXPECT_NE(a[0].counts, plain[0].counts);
  ExpectRowsNormalized(a);
}

TEST(PrivatizeTablesTest, NoiseScaleMatchesAccounting) {
  // Laplace(b) has mean absolute value b; here b = 2 * 2 columns / 0.5 = 8.
  Dataset d = MakeDataset({2, 2}, {{0, 0}});
  const Tables plain = EstimateTables(d, Independent(2), 1.0);
  double abs_sum = 0.0;
  int n = 0;
  for (uint64_t s = 0; s < 20000; ++s) {
    const Tables noisy = PrivatizeTables(plain, Independent(2), 0.5, Seed{s});
    // Count 0 clamps negative noise to 0, so take the max of noisy and 0:
    // E[max(0, L)] = b / 2.
    abs_sum += noisy[0].counts[1];
    ++n;
  }
  EXPECT_NEAR(abs_sum / n, 4.0, 0.2);
}

TEST(SampleTest, ZeroRecords) {
  Dataset d = LoadCorpus("correlated.csv");
  ASSERT_OK_AND_ASSIGN(FittedGenerator g, Fit(GeneratorSpec{}, d, std::nullopt, Seed{1}));
  ASSERT_OK_AND_ASSIGN(Dataset s, Sample(g, 0, Seed{1}));
  EXPECT_TRUE(s.empty());
}

TEST(SampleTest, PointMassMarginalsGiveIdenticalRecords) {
  Dataset d = MakeDataset({3, 2}, {{2, 1}, {2, 1}});
  ASSERT_OK_AND_ASSIGN(FittedGenerator g,
                       Fit({IndependentMarginals{}, 0.0}, d, std::nullopt, Seed{1}));
  ASSERT_OK_AND_ASSIGN(Dataset s, Sample(g, 50, Seed{2}));
  for (const Record& r : s.records()) EXPECT_EQ(r, (Record{{2, 1}}));
}

TEST(SampleTest, CopyCorpusSamplesKeepEquality) {
  Dataset d = LoadCorpus("copy_pair.csv");
  ASSERT_OK_AND_ASSIGN(FittedGenerator g,
                       Fit({BayesNet{1, 0.0}, 0.0}, d, std::nullopt, Seed{1}));
  ASSERT_OK_AND_ASSIGN(Dataset s, Sample(g, 2000, Seed{2}));
  int equal = 0;
  for (const Record& r : s.records()) equal += r.values[0] == r.values[1];
  EXPECT_GE(equal, 0.99 * 2000);
}

TEST(SampleTest, MarginalsMatchTable) {
  Dataset d = MakeDataset({3}, {{0}, {1}, {1}, {2}});
  ASSERT_OK_AND_ASSIGN(FittedGenerator g,
                       Fit({IndependentMarginals{}, 0.0}, d, std::nullopt, Seed{1}));
  ASSERT_OK_AND_ASSIGN(Dataset s, Sample(g, 40000, Seed{2}));
  std::vector<int> counts(3, 0);
  for (const Record& r : s.records()) ++counts[r.values[0]];
  EXPECT_NEAR(counts[1] / 40000.0, 0.5, 0.01);
  EXPECT_NEAR(counts[0] / 40000.0, 0.25, 0.01);
}

TEST(SampleTest, ToyOnlyReleasesBits) {
  Dataset d = MakeDataset({2}, {{0}});
  ASSERT_OK_AND_ASSIGN(FittedGenerator g,
                       Fit({AnalyticToy{0.5, 0.5}, 1.0}, d, Record{{0}}, Seed{1}));
  EXPECT_THAT(Sample(g, 1, Seed{1}), StatusIs(absl::StatusCode::kUnimplemented));
  ASSERT_OK_AND_ASSIGN(Dataset empty, Sample(g, 0, Seed{1}));
  EXPECT_TRUE(empty.empty());
  ASSERT_OK_AND_ASSIGN(FittedGenerator bn, Fit(GeneratorSpec{}, d, std::nullopt, Seed{1}));
  EXPECT_THAT(ReleaseBit(bn, Seed{1}), StatusIs(absl::StatusCode::kUnimplemented));
}

double BitMean(double p_in, double p_out, bool member, int draws) {
  Dataset d = MakeDataset({2}, {{0}});
  const Record hint{{member ? 0 : 1}};
  FittedGenerator g = Fit({AnalyticToy{p_in, p_out}, 1.0}, d, hint, Seed{1}).value();
  double ones = 0;
  for (int i = 0; i < draws; ++i) ones += ReleaseBit(g, Seed{static_cast<uint64_t>(i)}).value();
  return ones / draws;
}

TEST(ReleaseBitTest, DegenerateProbabilities) {
  EXPECT_EQ(BitMean(1.0, 0.3, true, 1000), 1.0);
  EXPECT_EQ(BitMean(0.3, 0.0, false, 1000), 0.0);
}

TEST(ReleaseBitTest, MeanMatchesPIn) {
  EXPECT_NEAR(BitMean(0.8, 0.2, true, 100000), 0.8, 0.005);
}

TEST(ReleaseBitTest, EqualProbabilitiesHideMembership) {
  const double a = BitMean(0.4, 0.4, true, 10000);
  const double b = BitMean(0.4, 0.4, false, 10000);
  const double se = std::sqrt(2 * 0.4 * 0.6 / 10000);
  EXPECT_LT(std::fabs(a - b), 3 * se);
}

TEST(FittedGeneratorTest, RowsNormalizedAfterFit) {
  Dataset d = LoadCorpus("correlated.csv");
  for (const GeneratorSpec& spec :
       {GeneratorSpec{IndependentMarginals{}, 1.0}, GeneratorSpec{BayesNet{2}, 0.0},
        GeneratorSpec{PrivateBayesNet{2, 0.5}, 1.0},
        GeneratorSpec{PrivateBayesNet{3, 0.1}, 0.0}}) {
    ASSERT_OK_AND_ASSIGN(FittedGenerator g, Fit(spec, d, std::nullopt, Seed{4}));
    EXPECT_TRUE(IsTopologicallyValid(g.structure));
    ExpectRowsNormalized(g.tables);
  }
}

TEST(SerializeGeneratorTest, RoundTrip) {
  Dataset d = LoadCorpus("correlated.csv");
  for (const GeneratorSpec& spec :
       {GeneratorSpec{BayesNet{2, 0.001}, 1.0}, GeneratorSpec{PrivateBayesNet{1, 0.7}, 0.5},
        GeneratorSpec{AnalyticToy{0.9, 0.1}, 1.0}}) {
    ASSERT_OK_AND_ASSIGN(FittedGenerator g, Fit(spec, d, d.record(3), Seed{11}));
    const std::string text = SerializeGenerator(g);
    ASSERT_OK_AND_ASSIGN(FittedGenerator back, ParseGenerator(text, d.schema()));
    EXPECT_EQ(back.spec, g.spec);
    EXPECT_EQ(back.structure, g.structure);
    EXPECT_EQ(back.tables, g.tables);
    EXPECT_EQ(back.toy, g.toy);
    EXPECT_EQ(back.fit_seed, g.fit_seed);
    EXPECT_EQ(SerializeGenerator(back), text);
  }
  EXPECT_THAT(ParseGenerator("not a generator", d.schema()),
              StatusIs(absl::StatusCode::kInvalidArgument));
}

}  // namespace
}  // namespace recrisk
