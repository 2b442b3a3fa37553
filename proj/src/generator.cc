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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "absl/strings/match.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"

namespace recrisk {
namespace {

// Gains this close to zero are rounding noise.
constexpr double kMiTolerance = 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Normalizes one row of `counts` into `probs` with add-`smoothing`.
void NormalizeRow(std::span<const double> counts, double smoothing,
                  std::span<double> probs) {
  double total = 0.0;
  for (const double c : counts) total += c;
  const double denom = total + smoothing * counts.size();
  for (size_t v = 0; v < counts.size(); ++v) {
    probs[v] = denom > 0.0 ? (counts[v] + smoothing) / denom
                           : 1.0 / counts.size();
  }
}

Structure ColumnOrderStructure(size_t columns) {
  Structure s;
  s.order.resize(columns);
  std::iota(s.order.begin(), s.order.end(), size_t{0});
  s.parents.assign(columns, {});
  return s;
}

std::string FormatDouble(double v) { return absl::StrFormat("%.17g", v); }

}  // namespace

absl::Status ValidateGeneratorSpec(const GeneratorSpec& spec) {
  if (!(spec.smoothing >= 0.0) || !std::isfinite(spec.smoothing)) {
    return absl::InvalidArgumentError("smoothing must be a finite value >= 0");
  }
  return std::visit(
      Overloaded{
          [](const IndependentMarginals&) { return absl::OkStatus(); },
          [](const BayesNet& b) {
            return b.max_parents < 0 ? absl::InvalidArgumentError(
                                           "max_parents must be >= 0")
                                     : absl::OkStatus();
          },
          [](const PrivateBayesNet& b) {
            if (b.max_parents < 0) {
              return absl::InvalidArgumentError("max_parents must be >= 0");
            }
            if (!(b.epsilon > 0.0)) {
              return absl::InvalidArgumentError("epsilon must be positive");
            }
            return absl::OkStatus();
          },
          [](const AnalyticToy& t) {
            if (!(t.p_in >= 0.0 && t.p_in <= 1.0 && t.p_out >= 0.0 &&
                  t.p_out <= 1.0)) {
              return absl::InvalidArgumentError(
                  "p_in and p_out must lie in [0, 1]");
            }
            return absl::OkStatus();
          },
      },
      spec.kind);
}

bool IsToy(const GeneratorSpec& spec) {
  return std::holds_alternative<AnalyticToy>(spec.kind);
}

absl::string_view KindName(const GeneratorSpec& spec) {
  return std::visit(
      Overloaded{
          [](const IndependentMarginals&) { return absl::string_view("marginals"); },
          [](const BayesNet&) { return absl::string_view("bayesnet"); },
          [](const PrivateBayesNet&) {
            return absl::string_view("private_bayesnet");
          },
          [](const AnalyticToy&) { return absl::string_view("toy"); },
      },
      spec.kind);
}

bool IsTopologicallyValid(const Structure& structure) {
  const size_t n = structure.parents.size();
  if (structure.order.size() != n) return false;
  std::vector<size_t> position(n, n);
  for (size_t i = 0; i < n; ++i) {
    const size_t c = structure.order[i];
    if (c >= n || position[c] != n) return false;
    position[c] = i;
  }
  for (size_t c = 0; c < n; ++c) {
    for (const size_t p : structure.parents[c]) {
      if (p >= n || position[p] >= position[c]) return false;
    }
  }
  return true;
}

size_t ConditionalTable::RowIndex(const Record& record) const {
  size_t row = 0;
  for (size_t i = 0; i < parents.size(); ++i) {
    row = row * parent_cardinalities[i] + record.values[parents[i]];
  }
  return row;
}

double MutualInformation(const Dataset& data, size_t column,
                         std::span<const size_t> others) {
  const size_t n = data.size();
  if (n == 0) return 0.0;
  const auto arity = static_cast<size_t>(data.schema().column(column).cardinality);
  std::unordered_map<uint64_t, double> joint;
  std::unordered_map<uint64_t, double> config;
  std::vector<double> marginal(arity, 0.0);
  for (const Record& r : data.records()) {
    uint64_t key = 0;
    for (const size_t o : others) {
      key = key * data.schema().column(o).cardinality + r.values[o];
    }
    const auto v = static_cast<uint64_t>(r.values[column]);
    joint[key * arity + v] += 1.0;
    config[key] += 1.0;
    marginal[v] += 1.0;
  }
  double mi = 0.0;
  for (const auto& [key, count] : joint) {
    const double p_xy = count / n;
    const double p_x = marginal[key % arity] / n;
    const double p_y = config[key / arity] / n;
    mi += p_xy * std::log(p_xy / (p_x * p_y));
  }
  return std::max(0.0, mi);
}

absl::StatusOr<Structure> LearnStructure(const Dataset& training,
                                         int32_t max_parents, Seed seed,
                                         double mi_floor) {
  if (training.empty()) {
    return absl::FailedPreconditionError(
        "cannot learn a structure from an empty dataset");
  }
  if (max_parents < 0) {
    return absl::InvalidArgumentError("max_parents must be >= 0");
  }
  const size_t columns = training.schema().size();
  Structure s = ColumnOrderStructure(columns);
  Rng rng(seed);
  rng.Shuffle(std::span<size_t>(s.order));

  for (size_t t = 0; t < columns; ++t) {
    const size_t column = s.order[t];
    std::vector<size_t> chosen;
    std::vector<char> used(t, 0);
    double current = 0.0;
    while (chosen.size() < static_cast<size_t>(max_parents)) {
      double best = -1.0;
      size_t best_slot = t;
      std::vector<size_t> trial = chosen;
      trial.push_back(0);
      for (size_t slot = 0; slot < t; ++slot) {
        if (used[slot]) continue;
        trial.back() = s.order[slot];
        const double mi = MutualInformation(training, column, trial);
        if (mi > best) {
          best = mi;
          best_slot = slot;
        }
      }
      if (best_slot == t || best - current <= mi_floor + kMiTolerance) break;
      used[best_slot] = 1;
      chosen.push_back(s.order[best_slot]);
      current = best;
    }
    s.parents[column] = std::move(chosen);
  }
  return s;
}

Tables EstimateTables(const Dataset& training, const Structure& structure,
                      double smoothing) {
  const Schema& schema = training.schema();
  Tables tables(schema.size());
  for (size_t c = 0; c < schema.size(); ++c) {
    ConditionalTable& t = tables[c];
    t.column = c;
    t.parents = structure.parents[c];
    t.arity = schema.column(c).cardinality;
    t.smoothing = smoothing;
    size_t rows = 1;
    for (const size_t p : t.parents) {
      t.parent_cardinalities.push_back(schema.column(p).cardinality);
      rows *= schema.column(p).cardinality;
    }
    t.counts.assign(rows * t.arity, 0.0);
    t.probs.assign(rows * t.arity, 0.0);
    for (const Record& r : training.records()) {
      t.counts[t.RowIndex(r) * t.arity + r.values[c]] += 1.0;
    }
    for (size_t row = 0; row < rows; ++row) {
      NormalizeRow(std::span<const double>(t.counts).subspan(row * t.arity, t.arity),
                   smoothing,
                   std::span<double>(t.probs).subspan(row * t.arity, t.arity));
    }
  }
  return tables;
}

Tables PrivatizeTables(const Tables& tables, const Structure& structure,
                       double epsilon, Seed seed) {
  const double columns = static_cast<double>(structure.parents.size());
  const double scale = 2.0 * columns / epsilon;
  Tables out = tables;
  for (ConditionalTable& t : out) {
    Rng rng(DeriveSeed(seed, "laplace", t.column));
    for (double& c : t.counts) c = std::max(0.0, c + rng.Laplace(scale));
    for (size_t row = 0; row < t.rows(); ++row) {
      NormalizeRow(std::span<const double>(t.counts).subspan(row * t.arity, t.arity),
                   t.smoothing,
                   std::span<double>(t.probs).subspan(row * t.arity, t.arity));
    }
  }
  return out;
}

absl::StatusOr<FittedGenerator> Fit(const GeneratorSpec& spec,
                                    const Dataset& training,
                                    const std::optional<Record>& target_hint,
                                    Seed seed) {
  if (absl::Status s = ValidateGeneratorSpec(spec); !s.ok()) return s;
  FittedGenerator g;
  g.spec = spec;
  g.schema = training.shared_schema();
  g.fit_seed = seed;

  if (const auto* toy = std::get_if<AnalyticToy>(&spec.kind)) {
    if (!target_hint.has_value()) {
      return absl::InvalidArgumentError("the toy generator needs a target record");
    }
    bool member = false;
    if (!training.empty()) {
      absl::StatusOr<bool> contains = Contains(training, *target_hint);
      if (!contains.ok()) return contains.status();
      member = *contains;
    }
    g.toy = ToyState{member, toy->p_in, toy->p_out};
    return g;
  }

  if (training.empty()) {
    return absl::FailedPreconditionError(
        absl::StrCat("cannot fit a ", KindName(spec),
                     " generator on an empty dataset"));
  }
  if (std::holds_alternative<IndependentMarginals>(spec.kind)) {
    g.structure = ColumnOrderStructure(training.schema().size());
  } else {
    const int32_t max_parents =
        std::holds_alternative<BayesNet>(spec.kind)
            ? std::get<BayesNet>(spec.kind).max_parents
            : std::get<PrivateBayesNet>(spec.kind).max_parents;
    const double floor = std::holds_alternative<BayesNet>(spec.kind)
                             ? std::get<BayesNet>(spec.kind).mi_floor
                             : std::get<PrivateBayesNet>(spec.kind).mi_floor;
    absl::StatusOr<Structure> structure = LearnStructure(
        training, max_parents, DeriveSeed(seed, "structure"), floor);
    if (!structure.ok()) return structure.status();
    g.structure = *std::move(structure);
  }
  g.tables = EstimateTables(training, g.structure, spec.smoothing);
  if (const auto* priv = std::get_if<PrivateBayesNet>(&spec.kind)) {
    g.tables = PrivatizeTables(g.tables, g.structure, priv->epsilon,
                               DeriveSeed(seed, "privatize"));
  }
  return g;
}

absl::StatusOr<Dataset> Sample(const FittedGenerator& generator, size_t n,
                               Seed seed) {
  const Dataset empty = generator.schema
                            ? Dataset::Create(*generator.schema, {}).value()
                            : Dataset();
  if (generator.toy.has_value()) {
    if (n > 0) {
      return absl::UnimplementedError(
          "toy generators release a bit, not records");
    }
    return empty;
  }
  std::vector<Record> records(n);
  const size_t columns = generator.structure.order.size();
  Rng rng(seed);
  for (Record& r : records) {
    r.values.assign(columns, 0);
    for (const size_t c : generator.structure.order) {
      const ConditionalTable& t = generator.tables[c];
      r.values[c] = static_cast<int32_t>(rng.Categorical(t.Row(t.RowIndex(r))));
    }
  }
  return empty.WithRecords(std::move(records));
}

absl::StatusOr<bool> ReleaseBit(const FittedGenerator& generator, Seed seed) {
  if (!generator.toy.has_value()) {
    return absl::UnimplementedError("only toy generators release a bit");
  }
  const ToyState& toy = *generator.toy;
  Rng rng(seed);
  return rng.Bernoulli(toy.member ? toy.p_in : toy.p_out);
}

// Format, one item per line:
//   recrisk-generator v1
//   kind <name> smoothing <s> fit_seed <u64>
//   params <max_parents> <epsilon> <mi_floor> <p_in> <p_out>
//   toy none | toy <member 0/1>
//   order <c...>
//   table <column> arity <a> parents <k> <p...> cards <card...>
//   counts <v...>
//   probs <v...>
//   end
std::string SerializeGenerator(const FittedGenerator& g) {
  int32_t max_parents = 0;
  double epsilon = 0.0, mi_floor = 0.0, p_in = 0.0, p_out = 0.0;
  std::visit(Overloaded{
                 [](const IndependentMarginals&) {},
                 [&](const BayesNet& b) {
                   max_parents = b.max_parents;
                   mi_floor = b.mi_floor;
                 },
                 [&](const PrivateBayesNet& b) {
                   max_parents = b.max_parents;
                   epsilon = b.epsilon;
                   mi_floor = b.mi_floor;
                 },
                 [&](const AnalyticToy& t) {
                   p_in = t.p_in;
                   p_out = t.p_out;
                 },
             },
             g.spec.kind);
  std::string out = "recrisk-generator v1\n";
  absl::StrAppend(&out, "kind ", KindName(g.spec), " smoothing ",
                  FormatDouble(g.spec.smoothing), " fit_seed ",
                  g.fit_seed.value, "\n");
  absl::StrAppend(&out, "params ", max_parents, " ", FormatDouble(epsilon),
                  " ", FormatDouble(mi_floor), " ", FormatDouble(p_in), " ",
                  FormatDouble(p_out), "\n");
  if (g.toy.has_value()) {
    absl::StrAppend(&out, "toy ", g.toy->member ? 1 : 0, "\n");
  } else {
    absl::StrAppend(&out, "toy none\n");
  }
  absl::StrAppend(&out, "order ", absl::StrJoin(g.structure.order, " "), "\n");
  auto join_doubles = [](const std::vector<double>& v) {
    return absl::StrJoin(v, " ", [](std::string* o, double d) {
      o->append(FormatDouble(d));
    });
  };
  for (const ConditionalTable& t : g.tables) {
    absl::StrAppend(&out, "table ", t.column, " arity ", t.arity, " parents ",
                    t.parents.size());
    for (const size_t p : t.parents) absl::StrAppend(&out, " ", p);
    absl::StrAppend(&out, " cards");
    for (const int32_t c : t.parent_cardinalities) absl::StrAppend(&out, " ", c);
    absl::StrAppend(&out, "\ncounts ", join_doubles(t.counts), "\n");
    absl::StrAppend(&out, "probs ", join_doubles(t.probs), "\n");
  }
  out += "end\n";
  return out;
}

absl::StatusOr<FittedGenerator> ParseGenerator(absl::string_view text,
                                               const Schema& schema) {
  std::vector<absl::string_view> lines =
      absl::StrSplit(text, '\n', absl::SkipEmpty());
  auto bad = [](absl::string_view what) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed generator file: ", what));
  };
  if (lines.size() < 5 || lines[0] != "recrisk-generator v1") {
    return bad("missing or unsupported version header");
  }
  auto tokens = [](absl::string_view line) {
    return std::vector<absl::string_view>(
        absl::StrSplit(line, ' ', absl::SkipEmpty()));
  };
  auto to_double = [](absl::string_view s, double* d) {
    return absl::SimpleAtod(s, d);
  };

  FittedGenerator g;
  g.schema = std::make_shared<const Schema>(schema);
  const auto head = tokens(lines[1]);
  if (head.size() != 6 || head[0] != "kind" || head[2] != "smoothing" ||
      head[4] != "fit_seed" || !to_double(head[3], &g.spec.smoothing) ||
      !absl::SimpleAtoi(head[5], &g.fit_seed.value)) {
    return bad("kind line");
  }
  const auto params = tokens(lines[2]);
  int32_t max_parents = 0;
  double epsilon = 0, mi_floor = 0, p_in = 0, p_out = 0;
  if (params.size() != 6 || params[0] != "params" ||
      !absl::SimpleAtoi(params[1], &max_parents) ||
      !to_double(params[2], &epsilon) || !to_double(params[3], &mi_floor) ||
      !to_double(params[4], &p_in) || !to_double(params[5], &p_out)) {
    return bad("params line");
  }
  if (head[1] == "marginals") {
    g.spec.kind = IndependentMarginals{};
  } else if (head[1] == "bayesnet") {
    g.spec.kind = BayesNet{max_parents, mi_floor};
  } else if (head[1] == "private_bayesnet") {
    g.spec.kind = PrivateBayesNet{max_parents, epsilon, mi_floor};
  } else if (head[1] == "toy") {
    g.spec.kind = AnalyticToy{p_in, p_out};
  } else {
    return bad("unknown kind");
  }
  const auto toy = tokens(lines[3]);
  if (toy.size() != 2 || toy[0] != "toy") return bad("toy line");
  if (toy[1] != "none") {
    g.toy = ToyState{toy[1] == "1", p_in, p_out};
  }
  const auto order = tokens(lines[4]);
  if (order.empty() || order[0] != "order") return bad("order line");
  for (size_t i = 1; i < order.size(); ++i) {
    size_t c;
    if (!absl::SimpleAtoi(order[i], &c)) return bad("order entry");
    g.structure.order.push_back(c);
  }
  g.structure.parents.assign(g.structure.order.size(), {});

  size_t l = 5;
  for (; l + 2 < lines.size() && absl::StartsWith(lines[l], "table "); l += 3) {
    const auto t_tokens = tokens(lines[l]);
    ConditionalTable t;
    size_t k = 0;
    if (t_tokens.size() < 6 || !absl::SimpleAtoi(t_tokens[1], &t.column) ||
        t_tokens[2] != "arity" || !absl::SimpleAtoi(t_tokens[3], &t.arity) ||
        t_tokens[4] != "parents" || !absl::SimpleAtoi(t_tokens[5], &k) ||
        t_tokens.size() != 7 + 2 * k || t_tokens[6 + k] != "cards") {
      return bad("table line");
    }
    for (size_t i = 0; i < k; ++i) {
      size_t p;
      int32_t card;
      if (!absl::SimpleAtoi(t_tokens[6 + i], &p) ||
          !absl::SimpleAtoi(t_tokens[7 + k + i], &card)) {
        return bad("table parents");
      }
      t.parents.push_back(p);
      t.parent_cardinalities.push_back(card);
    }
    t.smoothing = g.spec.smoothing;
    for (auto [line, target] :
         {std::pair{lines[l + 1], &t.counts}, std::pair{lines[l + 2], &t.probs}}) {
      const auto values = tokens(line);
      if (values.empty() || (values[0] != "counts" && values[0] != "probs")) {
        return bad("table body");
      }
      for (size_t i = 1; i < values.size(); ++i) {
        double d;
        if (!to_double(values[i], &d)) return bad("table value");
        target->push_back(d);
      }
    }
    if (t.column < g.structure.parents.size()) {
      g.structure.parents[t.column] = t.parents;
    }
    g.tables.push_back(std::move(t));
  }
  if (l >= lines.size() || lines[l] != "end") return bad("missing end marker");

  if (!g.toy.has_value()) {
    if (g.structure.order.size() != schema.size() ||
        g.tables.size() != schema.size() ||
        !IsTopologicallyValid(g.structure)) {
      return bad("structure does not match the schema");
    }
    for (size_t c = 0; c < g.tables.size(); ++c) {
      const ConditionalTable& t = g.tables[c];
      size_t rows = 1;
      for (const int32_t card : t.parent_cardinalities) rows *= card;
      if (t.column != c || t.arity != schema.column(c).cardinality ||
          t.counts.size() != rows * t.arity || t.probs.size() != rows * t.arity) {
        return bad("table shape");
      }
    }
  }
  return g;
}

}  // namespace recrisk
