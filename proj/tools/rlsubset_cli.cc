// Copyright 2026 The rlsubset Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Links only the C API.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "rlsubset/rlsubset.h"

namespace {

enum ExitCode { kExitOk = 0, kExitRuntime = 1, kExitUsage = 2 };

int ExitFor(rls_status status) {
  switch (status) {
    case RLS_OK: return kExitOk;
    case RLS_ERR_IO:
    case RLS_ERR_NUMERIC:
    case RLS_ERR_INTERNAL: return kExitRuntime;
    default: return kExitUsage;
  }
}

// key=value log line on stderr.
void Log(const std::string& level, const std::string& cmd,
         const std::string& fields) {
  std::cerr << "level=" << level << " cmd=" << cmd;
  if (!fields.empty()) std::cerr << " " << fields;
  std::cerr << "\n";
}

std::string Quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += (c == '\n') ? ' ' : c;
  }
  return out + "\"";
}

int Report(const std::string& cmd, const std::string& stage, rls_status st) {
  Log("error", cmd,
      "stage=" + stage + " status=" + rls_status_name(st) +
          " msg=" + Quote(rls_last_error()));
  return ExitFor(st);
}

bool ReadText(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

// Owns a C handle and frees it on scope exit.
template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  ~Handle() { Free(ptr); }
};

struct StringHandle {
  char* ptr = nullptr;
  ~StringHandle() { rls_string_free(ptr); }
};

using Dataset = Handle<rls_dataset, rls_dataset_free>;
using Scores = Handle<rls_scores, rls_scores_free>;
using Manifest = Handle<rls_manifest, rls_manifest_free>;
using Schedule = Handle<rls_schedule, rls_schedule_free>;

struct ScoreArgs {
  std::string in;
  std::string out = "scores.json";
  double mu = 0.5;
  double sigma = 0.25;
  double lambda = 1.0;
  bool with_repr = false;
};

int RunScore(const ScoreArgs& a) {
  Dataset ds;
  if (auto st = rls_dataset_load(a.in.c_str(), &ds.ptr)) return Report("score", "load", st);
  rls_scoring_params p = rls_scoring_params_default();
  p.mu = a.mu;
  p.sigma = a.sigma;
  p.lambda = a.lambda;
  p.with_representativeness = a.with_repr ? 1 : 0;
  Scores scores;
  if (auto st = rls_scores_compute(ds.ptr, &p, &scores.ptr)) {
    return Report("score", "score", st);
  }
  if (auto st = rls_scores_save(scores.ptr, a.out.c_str())) {
    return Report("score", "write", st);
  }
  Log("info", "score",
      "records=" + std::to_string(rls_dataset_size(ds.ptr)) +
          " representativeness=" + (a.with_repr ? "on" : "off") + " out=" + a.out);
  return kExitOk;
}

struct SelectArgs {
  std::string in;
  std::string scores;
  std::string out = "manifest.json";
  std::size_t m = 0;
  double lambda = 1.0;
  std::string mode = "minirec";
};

int RunSelect(const SelectArgs& a, std::uint64_t seed) {
  rls_select_mode mode;
  if (a.mode == "minirec") {
    mode = RLS_MODE_MINIREC;
  } else if (a.mode == "random") {
    mode = RLS_MODE_RANDOM;
  } else {
    Log("error", "select", "stage=args msg=" + Quote("unknown mode " + a.mode));
    return kExitUsage;
  }
  Dataset ds;
  if (auto st = rls_dataset_load(a.in.c_str(), &ds.ptr)) return Report("select", "load", st);
  Scores scores;
  if (auto st = rls_scores_load(a.scores.c_str(), &scores.ptr)) {
    return Report("select", "load_scores", st);
  }
  Manifest manifest;
  if (auto st = rls_select(ds.ptr, scores.ptr, a.m, a.lambda, mode, seed,
                           &manifest.ptr)) {
    return Report("select", "select", st);
  }
  if (auto st = rls_manifest_save(manifest.ptr, a.out.c_str())) {
    return Report("select", "write", st);
  }
  Log("info", "select",
      "mode=" + a.mode + " m=" + std::to_string(a.m) + " out=" + a.out);
  return kExitOk;
}

struct ScheduleArgs {
  std::string manifest;
  std::string scores;
  std::string out = "schedule.json";
  std::string text_out;
  std::size_t k = 4;
};

int RunSchedule(const ScheduleArgs& a, std::uint64_t seed) {
  Manifest manifest;
  if (auto st = rls_manifest_load(a.manifest.c_str(), &manifest.ptr)) {
    return Report("schedule", "load_manifest", st);
  }
  Scores scores;
  if (auto st = rls_scores_load(a.scores.c_str(), &scores.ptr)) {
    return Report("schedule", "load_scores", st);
  }
  Schedule sched;
  if (auto st = rls_schedule_build(manifest.ptr, scores.ptr, a.k, seed, &sched.ptr)) {
    return Report("schedule", "partition", st);
  }
  if (auto st = rls_schedule_save_json(sched.ptr, a.out.c_str())) {
    return Report("schedule", "write", st);
  }
  if (!a.text_out.empty()) {
    if (auto st = rls_schedule_save_text(sched.ptr, a.text_out.c_str())) {
      return Report("schedule", "write_text", st);
    }
  }
  Log("info", "schedule", "K=" + std::to_string(a.k) + " out=" + a.out);
  return kExitOk;
}

bool LoadConfig(const std::string& cmd, const std::string& path,
                std::string& text) {
  if (path.empty()) {
    text = "{}";
    return true;
  }
  if (!ReadText(path, text)) {
    Log("error", cmd, "stage=load_config msg=" + Quote("cannot read " + path));
    return false;
  }
  return true;
}

struct SimulateArgs {
  std::string config;
  std::string out = "dataset.jsonl";
};

int RunSimulate(const SimulateArgs& a) {
  std::string text;
  if (!LoadConfig("simulate", a.config, text)) return kExitRuntime;
  if (auto st = rls_simulate_dataset(text.c_str(), a.out.c_str())) {
    return Report("simulate", "simulate", st);
  }
  Log("info", "simulate", "out=" + a.out);
  return kExitOk;
}

struct PipelineArgs {
  std::string config;
  std::string out_dir = "pipeline_out";
  bool dry_run = false;
  std::size_t compare_seeds = 0;
  std::uint64_t first_seed = 1;
  std::string summary_out;
};

int RunPipelineCmd(const PipelineArgs& a) {
  std::string text;
  if (!LoadConfig("pipeline", a.config, text)) return kExitRuntime;
  if (a.dry_run) {
    StringHandle resolved, plan;
    if (auto st = rls_pipeline_resolve_config(text.c_str(), &resolved.ptr, &plan.ptr)) {
      return Report("pipeline", "config", st);
    }
    std::cout << resolved.ptr << "\n" << plan.ptr;
    return kExitOk;
  }
  if (a.compare_seeds > 0) {
    StringHandle summary;
    if (auto st = rls_pipeline_compare(text.c_str(), a.first_seed,
                                       a.compare_seeds, &summary.ptr)) {
      return Report("pipeline", "compare", st);
    }
    if (a.summary_out.empty()) {
      std::cout << summary.ptr;
    } else {
      std::ofstream out(a.summary_out);
      out << summary.ptr;
      if (!out) {
        Log("error", "pipeline", "stage=write msg=" + Quote("cannot write " + a.summary_out));
        return kExitRuntime;
      }
    }
    Log("info", "pipeline", "compare_seeds=" + std::to_string(a.compare_seeds));
    return kExitOk;
  }
  StringHandle report;
  if (auto st = rls_pipeline_run(text.c_str(), a.out_dir.c_str(), &report.ptr)) {
    return Report("pipeline", "run", st);
  }
  Log("info", "pipeline", "out_dir=" + a.out_dir + " report=report.json");
  return kExitOk;
}

int RunVerifyHvp(std::uint64_t seed, std::size_t trials) {
  StringHandle table;
  int passed = 0;
  if (auto st = rls_verify_hvp(seed, trials, &table.ptr, &passed)) {
    return Report("verify-hvp", "verify", st);
  }
  std::cout << table.ptr;
  Log(passed ? "info" : "error", "verify-hvp",
      std::string("passed=") + (passed ? "true" : "false"));
  return passed ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reward-aware subset selection and curriculum scheduling for "
               "RL fine-tuning data"};
  app.require_subcommand(1);
  std::uint64_t seed = 1;
  app.add_option("--seed", seed, "Seed for every randomized step")
      ->capture_default_str();
  app.set_version_flag("--version", std::string(rls_version()));

  ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "Compute learnability / representativeness scores");
  score_cmd->fallthrough();
  score_cmd->add_option("input", score.in, "Dataset (JSONL)")->required();
  score_cmd->add_option("-o,--out", score.out, "Output score table")->capture_default_str();
  score_cmd->add_option("--mu", score.mu, "Learnability peak")->capture_default_str();
  score_cmd->add_option("--sigma", score.sigma, "Learnability width")->capture_default_str();
  score_cmd->add_option("--lambda", score.lambda,
                        "Representativeness weight recorded with the table")
      ->capture_default_str();
  score_cmd->add_flag("--with-representativeness", score.with_repr,
                      "Score representativeness from each record's grad");

  SelectArgs select;
  auto* select_cmd = app.add_subcommand("select", "Build the subset manifest");
  select_cmd->fallthrough();
  select_cmd->add_option("input", select.in, "Dataset (JSONL)")->required();
  select_cmd->add_option("--scores", select.scores, "Score table")->required();
  select_cmd->add_option("-o,--out", select.out, "Output manifest")->capture_default_str();
  select_cmd->add_option("--m", select.m, "Subset size")->required();
  select_cmd->add_option("--lambda", select.lambda,
                         "Representativeness weight (1 is the best reported setting)")
      ->capture_default_str();
  select_cmd->add_option("--mode", select.mode, "minirec or random")->capture_default_str();

  ScheduleArgs schedule;
  auto* schedule_cmd = app.add_subcommand("schedule", "Partition and order the subset");
  schedule_cmd->fallthrough();
  schedule_cmd->add_option("--manifest", schedule.manifest, "Subset manifest")->required();
  schedule_cmd->add_option("--scores", schedule.scores, "Score table")->required();
  schedule_cmd->add_option("-o,--out", schedule.out, "Output schedule (JSON)")
      ->capture_default_str();
  schedule_cmd->add_option("--text", schedule.text_out,
                           "Also write the flat trainer manifest here");
  schedule_cmd->add_option("--k", schedule.k, "Number of curriculum groups")
      ->capture_default_str();

  SimulateArgs simulate;
  auto* simulate_cmd = app.add_subcommand(
      "simulate", "Materialize a synthetic dataset scored by a trained proxy");
  simulate_cmd->fallthrough();
  simulate_cmd->add_option("--config", simulate.config, "Pipeline config (JSON)");
  simulate_cmd->add_option("-o,--out", simulate.out, "Output dataset (JSONL)")
      ->capture_default_str();

  PipelineArgs pipeline;
  auto* pipeline_cmd = app.add_subcommand("pipeline", "Run the end-to-end simulator pipeline");
  pipeline_cmd->fallthrough();
  pipeline_cmd->add_option("config", pipeline.config, "Pipeline config (JSON)")->required();
  pipeline_cmd->add_option("--out-dir", pipeline.out_dir, "Artifact directory")
      ->capture_default_str();
  pipeline_cmd->add_flag("--dry-run", pipeline.dry_run,
                         "Print the resolved config and stage plan");
  pipeline_cmd->add_option("--compare-seeds", pipeline.compare_seeds,
                           "Run paired minirec/random comparisons over this many seeds");
  pipeline_cmd->add_option("--first-seed", pipeline.first_seed, "First comparison seed")
      ->capture_default_str();
  pipeline_cmd->add_option("--summary", pipeline.summary_out,
                           "Write the comparison summary here instead of stdout");

  std::size_t hvp_trials = 1000;
  auto* hvp_cmd = app.add_subcommand("verify-hvp", "Check HVPs against finite differences");
  hvp_cmd->fallthrough();
  hvp_cmd->add_option("--trials", hvp_trials, "Random trials")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (*score_cmd) return RunScore(score);
  if (*select_cmd) return RunSelect(select, seed);
  if (*schedule_cmd) return RunSchedule(schedule, seed);
  if (*simulate_cmd) return RunSimulate(simulate);
  if (*pipeline_cmd) return RunPipelineCmd(pipeline);
  if (*hvp_cmd) return RunVerifyHvp(seed, hvp_trials);
  return kExitUsage;
}
