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


// Command-line front end:
//
//   recrisk run         --config c.ini [--seed S] [--out DIR] [--records SPEC]
//                       [--threads N]
//   recrisk compare     --traditional T.csv --model-seeded MS.csv
//                       [--threshold t] [--allow-mixed] [--out DIR]
//   recrisk convergence --config c.ini [--seed S] [--out DIR] [--records SPEC]
//                       [--threads N]
//   recrisk dp-audit    --config c.ini [...] | --transcript F --epsilon E
//
// RECRISK_THREADS sets the thread count when --threads is absent.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "recrisk/experiment.h"
#include "recrisk/game.h"

namespace recrisk {
namespace {

namespace fs = std::filesystem;

struct CommonFlags {
  std::string config;
  std::optional<uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> records;
  std::optional<int> threads;
};

void AddCommonFlags(CLI::App* cmd, CommonFlags* f) {
  cmd->add_option("--config", f->config, "Experiment configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", f->seed, "Override experiment.master_seed");
  cmd->add_option("--out", f->out, "Override experiment.out");
  cmd->add_option("--records", f->records,
                  "Override records.select (random:K, first:K, ids:a,b or all)");
  cmd->add_option("--threads", f->threads, "Worker threads");
}

int Fail(const absl::Status& status) {
  std::cerr << "recrisk: " << status << "\n";
  return status.code() == absl::StatusCode::kInvalidArgument ? 2 : 1;
}

// Loads the config and applies flag and environment overrides.
absl::StatusOr<ExperimentConfig> ResolveConfig(const CommonFlags& f) {
  absl::StatusOr<ExperimentConfig> config = LoadExperimentConfig(f.config);
  if (!config.ok()) return config.status();
  if (f.seed) config->master_seed = Seed{*f.seed};
  if (f.out) config->out_dir = *f.out;
  if (f.records) {
    absl::StatusOr<RecordSelection> s = ParseRecordSelection(*f.records);
    if (!s.ok()) return s.status();
    config->records = *s;
  }
  if (f.threads) {
    config->threads = *f.threads;
  } else if (const char* env = std::getenv("RECRISK_THREADS")) {
    if (!absl::SimpleAtoi(env, &config->threads)) {
      return absl::InvalidArgumentError(
          absl::StrCat("RECRISK_THREADS: '", env, "' is not an integer"));
    }
  }
  if (absl::Status s = ValidateExperimentConfig(*config); !s.ok()) return s;
  return config;
}

// Writes via a temporary file and rename so readers never see partial files.
absl::Status WriteFileAtomic(const fs::path& path, const std::string& body) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat("cannot create ", path.parent_path().string(), ": ", ec.message()));
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << body;
    if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", tmp.string()));
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat("cannot rename to ", path.string(), ": ", ec.message()));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return std::string(std::istreambuf_iterator<char>(in), {});
}

int CmdRun(const CommonFlags& flags) {
  absl::StatusOr<ExperimentConfig> config = ResolveConfig(flags);
  if (!config.ok()) return Fail(config.status());
  absl::StatusOr<PreparedData> data = PrepareData(*config);
  if (!data.ok()) return Fail(data.status());
  absl::StatusOr<RunOutput> output = RunExperiment(*config, *data);
  if (!output.ok()) return Fail(output.status());

  const fs::path out(config->out_dir);
  for (const RecordOutcome& o : output->outcomes) {
    const fs::path file = out / "transcripts" /
                          absl::StrCat(GameKindName(o.kind), "_record_",
                                       o.record_id, ".csv");
    if (absl::Status s = WriteFileAtomic(file, SerializeTranscript(o.transcript));
        !s.ok()) {
      return Fail(s);
    }
  }
  for (const GameKind kind : config->games) {
    const fs::path file = out / absl::StrCat("results_", GameKindName(kind), ".csv");
    if (absl::Status s = WriteFileAtomic(file, FormatResults(*output, kind)); !s.ok()) {
      return Fail(s);
    }
    std::cout << "wrote " << file.string() << "\n";
  }
  if (!output->failures.empty()) {
    for (const auto& [id, status] : output->failures) {
      std::cerr << "recrisk: record " << id << " failed: " << status << "\n";
    }
    std::cerr << "recrisk: results are partial\n";
    return 1;
  }
  return 0;
}

struct CompareFlags {
  std::string traditional;
  std::string model_seeded;
  double threshold = 0.8;
  bool allow_mixed = false;
  std::string out = ".";
};

int CmdCompare(const CompareFlags& flags) {
  absl::StatusOr<std::string> t_text = ReadFile(flags.traditional);
  if (!t_text.ok()) return Fail(t_text.status());
  absl::StatusOr<std::string> ms_text = ReadFile(flags.model_seeded);
  if (!ms_text.ok()) return Fail(ms_text.status());
  absl::StatusOr<ResultsFile> t = ParseResults(*t_text);
  if (!t.ok()) return Fail(t.status());
  absl::StatusOr<ResultsFile> ms = ParseResults(*ms_text);
  if (!ms.ok()) return Fail(ms.status());
  if (t->kind != GameKind::kTraditional || ms->kind != GameKind::kModelSeeded) {
    return Fail(absl::InvalidArgumentError(
        "expected a traditional and a model_seeded results file, in that order"));
  }
  absl::StatusOr<Comparison> c =
      CompareResults(*t, *ms, flags.threshold, flags.allow_mixed);
  if (!c.ok()) return Fail(c.status());
  absl::StatusOr<std::string> dist = FormatComparisonDistributions(*c);
  if (!dist.ok()) return Fail(dist.status());
  const fs::path out(flags.out);
  if (absl::Status s = WriteFileAtomic(out / "comparison.csv", FormatComparison(*c));
      !s.ok()) {
    return Fail(s);
  }
  if (absl::Status s = WriteFileAtomic(out / "distributions.csv", *dist); !s.ok()) {
    return Fail(s);
  }
  std::cout << "records " << c->pairs.size() << "  rmsd " << c->rmsd
            << "  miss_rate "
            << (c->miss_rate ? absl::StrCat(*c->miss_rate) : "undefined") << "\n";
  if (t->partial || ms->partial) {
    std::cerr << "recrisk: warning: comparing partial results\n";
  }
  return 0;
}

int CmdConvergence(const CommonFlags& flags) {
  absl::StatusOr<ExperimentConfig> config = ResolveConfig(flags);
  if (!config.ok()) return Fail(config.status());
  absl::StatusOr<PreparedData> data = PrepareData(*config);
  if (!data.ok()) return Fail(data.status());
  absl::StatusOr<std::vector<ConvergenceRow>> rows = RunConvergence(*config, *data);
  if (!rows.ok()) return Fail(rows.status());
  const fs::path file = fs::path(config->out_dir) / "convergence.csv";
  if (absl::Status s = WriteFileAtomic(file, FormatConvergence(*config, *rows));
      !s.ok()) {
    return Fail(s);
  }
  std::cout << "wrote " << file.string() << "\n";
  return 0;
}

struct AuditFlags {
  std::string transcript;
  std::optional<double> epsilon;
  double delta = 0.0;
  double rho = 0.05;
};

int CmdDpAudit(const CommonFlags& common, const AuditFlags& flags) {
  std::vector<AuditResult> audits;
  uint64_t hash = 0;
  fs::path out_dir;
  if (!flags.transcript.empty()) {
    if (!flags.epsilon) {
      return Fail(absl::InvalidArgumentError("--transcript needs --epsilon"));
    }
    absl::StatusOr<std::string> text = ReadFile(flags.transcript);
    if (!text.ok()) return Fail(text.status());
    absl::StatusOr<GameTranscript> transcript = ParseTranscript(*text);
    if (!transcript.ok()) return Fail(transcript.status());
    absl::StatusOr<AuditResult> audit =
        AuditTranscript(*transcript, *flags.epsilon, flags.delta, flags.rho);
    if (!audit.ok()) return Fail(audit.status());
    audits.push_back(*std::move(audit));
    hash = transcript->config_hash;
    out_dir = common.out.value_or(".");
  } else {
    if (common.config.empty()) {
      return Fail(absl::InvalidArgumentError("need --config or --transcript"));
    }
    absl::StatusOr<ExperimentConfig> config = ResolveConfig(common);
    if (!config.ok()) return Fail(config.status());
    absl::StatusOr<PreparedData> data = PrepareData(*config);
    if (!data.ok()) return Fail(data.status());
    absl::StatusOr<std::vector<AuditResult>> result = RunDpAudit(*config, *data);
    if (!result.ok()) return Fail(result.status());
    audits = *std::move(result);
    hash = ExperimentHash(*config);
    out_dir = config->out_dir;
  }
  const fs::path file = out_dir / "dp_audit.csv";
  if (absl::Status s = WriteFileAtomic(file, FormatAudit(hash, audits)); !s.ok()) {
    return Fail(s);
  }
  size_t flagged = 0;
  for (const AuditResult& a : audits) flagged += a.flagged;
  std::cout << "wrote " << file.string() << "  flagged points " << flagged << "\n";
  return 0;
}

int Main(int argc, char** argv) {
  CLI::App app{"Per-record privacy risk estimation for synthetic data generators"};
  app.require_subcommand(1);

  CommonFlags run_flags, conv_flags, audit_common;
  CLI::App* run = app.add_subcommand("run", "Run the privacy games");
  AddCommonFlags(run, &run_flags);

  CompareFlags cmp;
  CLI::App* compare = app.add_subcommand("compare", "Compare two results files");
  compare->add_option("--traditional", cmp.traditional)->required();
  compare->add_option("--model-seeded", cmp.model_seeded)->required();
  compare->add_option("--threshold", cmp.threshold, "High-risk threshold t");
  compare->add_flag("--allow-mixed", cmp.allow_mixed,
                    "Compare files with different config hashes");
  compare->add_option("--out", cmp.out, "Output directory");

  CLI::App* convergence =
      app.add_subcommand("convergence", "AUC stability across n_eval");
  AddCommonFlags(convergence, &conv_flags);

  AuditFlags audit;
  CLI::App* dp_audit = app.add_subcommand("dp-audit", "Check against a DP bound");
  dp_audit->add_option("--config", audit_common.config)->check(CLI::ExistingFile);
  dp_audit->add_option("--seed", audit_common.seed);
  dp_audit->add_option("--out", audit_common.out);
  dp_audit->add_option("--records", audit_common.records);
  dp_audit->add_option("--threads", audit_common.threads);
  dp_audit->add_option("--transcript", audit.transcript,
                       "Audit an existing transcript instead")
      ->check(CLI::ExistingFile);
  dp_audit->add_option("--epsilon", audit.epsilon);
  dp_audit->add_option("--delta", audit.delta);
  dp_audit->add_option("--rho", audit.rho);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  if (*run) return CmdRun(run_flags);
  if (*compare) return CmdCompare(cmp);
  if (*convergence) return CmdConvergence(conv_flags);
  return CmdDpAudit(audit_common, audit);
}

}  // namespace
}  // namespace recrisk

int main(int argc, char** argv) { return recrisk::Main(argc, argv); }
