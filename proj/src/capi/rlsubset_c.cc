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

#include "rlsubset/rlsubset.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <map>
#include <new>
#include <sstream>
#include <string>

#include "rlsubset/curriculum.h"
#include "rlsubset/dataset.h"
#include "rlsubset/hvp.h"
#include "rlsubset/io.h"
#include "rlsubset/pipeline.h"
#include "rlsubset/scoring.h"
#include "rlsubset/selection.h"

struct rls_dataset {
  rlsubset::Dataset value;
};
struct rls_scores {
  rlsubset::ScoreTable value;
};
struct rls_manifest {
  rlsubset::SubsetManifest value;
};
struct rls_schedule {
  rlsubset::CurriculumSchedule value;
};

namespace {

thread_local std::string g_last_error;

rls_status SetError(rls_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
rls_status Guard(Fn&& fn) {
  try {
    fn();
    return RLS_OK;
  } catch (const rlsubset::Error& e) {
    return SetError(static_cast<rls_status>(e.code()),
                    std::string(rlsubset::ErrorCodeName(e.code())) +
                        " error: " + e.what());
  } catch (const std::bad_alloc&) {
    return SetError(RLS_ERR_INTERNAL, "internal error: out of memory");
  } catch (const std::exception& e) {
    return SetError(RLS_ERR_INTERNAL, std::string("internal error: ") + e.what());
  } catch (...) {
    return SetError(RLS_ERR_INTERNAL, "internal error: unknown exception");
  }
}

rls_status NullArgument(const char* name) {
  return SetError(RLS_ERR_NULL_ARGUMENT,
                  std::string("null argument: ") + name);
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::map<std::string, double> RewardMap(const rlsubset::ScoreTable& table) {
  std::map<std::string, double> r_bar;
  for (const auto& s : table.samples) r_bar[s.id] = s.r_bar;
  return r_bar;
}

}  // namespace

#define RLS_REQUIRE(arg) \
  if ((arg) == nullptr) return NullArgument(#arg)

extern "C" {

const char* rls_version(void) { return "0.1.0"; }

const char* rls_last_error(void) { return g_last_error.c_str(); }

const char* rls_status_name(rls_status status) {
  switch (status) {
    case RLS_OK: return "ok";
    case RLS_ERR_NULL_ARGUMENT: return "null_argument";
    default:
      if (status >= RLS_ERR_PARSE && status <= RLS_ERR_INTERNAL) {
        return rlsubset::ErrorCodeName(static_cast<rlsubset::ErrorCode>(status));
      }
      return "unknown";
  }
}

void rls_string_free(char* s) { std::free(s); }

rls_status rls_dataset_load(const char* path, rls_dataset** out) {
  RLS_REQUIRE(path);
  RLS_REQUIRE(out);
  *out = nullptr;
  return Guard([&] { *out = new rls_dataset{rlsubset::LoadDataset(path)}; });
}

rls_status rls_dataset_save(const rls_dataset* ds, const char* path) {
  RLS_REQUIRE(ds);
  RLS_REQUIRE(path);
  return Guard([&] { rlsubset::WriteDataset(ds->value, std::string(path)); });
}

size_t rls_dataset_size(const rls_dataset* ds) {
  return ds ? ds->value.size() : 0;
}

size_t rls_dataset_feature_dim(const rls_dataset* ds) {
  return ds ? ds->value.feature_dim : 0;
}

int rls_dataset_has_grad(const rls_dataset* ds) {
  return ds && ds->value.AllHaveGrad() ? 1 : 0;
}

void rls_dataset_free(rls_dataset* ds) { delete ds; }

rls_scoring_params rls_scoring_params_default(void) {
  const rlsubset::ScoringParams p;
  return rls_scoring_params{p.mu, p.sigma, p.lambda, 0};
}

rls_status rls_scores_compute(const rls_dataset* ds,
                              const rls_scoring_params* params,
                              rls_scores** out) {
  RLS_REQUIRE(ds);
  RLS_REQUIRE(params);
  RLS_REQUIRE(out);
  *out = nullptr;
  return Guard([&] {
    rlsubset::ScoringParams p;
    p.mu = params->mu;
    p.sigma = params->sigma;
    p.lambda = params->lambda;
    *out = new rls_scores{rlsubset::BuildScoreTable(
        ds->value, p, params->with_representativeness != 0)};
  });
}

rls_status rls_scores_load(const char* path, rls_scores** out) {
  RLS_REQUIRE(path);
  RLS_REQUIRE(out);
  *out = nullptr;
  return Guard([&] {
    *out = new rls_scores{
        rlsubset::ScoreTableFromJson(rlsubset::ReadFile(path))};
  });
}

rls_status rls_scores_save(const rls_scores* scores, const char* path) {
  RLS_REQUIRE(scores);
  RLS_REQUIRE(path);
  return Guard([&] {
    rlsubset::WriteFile(path, rlsubset::ScoreTableToJson(scores->value));
  });
}

size_t rls_scores_size(const rls_scores* scores) {
  return scores ? scores->value.samples.size() : 0;
}

int rls_scores_has_representativeness(const rls_scores* scores) {
  return scores && scores->value.has_representativeness() ? 1 : 0;
}

void rls_scores_free(rls_scores* scores) { delete scores; }

rls_status rls_select(const rls_dataset* ds, const rls_scores* scores,
                      size_t m, double lambda, rls_select_mode mode,
                      uint64_t seed, rls_manifest** out) {
  RLS_REQUIRE(ds);
  RLS_REQUIRE(scores);
  RLS_REQUIRE(out);
  *out = nullptr;
  return Guard([&] {
    // Both modes require the score table to cover the dataset.
    for (const auto& rec : ds->value.records) {
      if (scores->value.IndexOf(rec.id) < 0) {
        rlsubset::Fail(rlsubset::ErrorCode::kConfig,
                       "score table has no entry for id '" + rec.id + "'");
      }
    }
    rlsubset::SubsetManifest manifest;
    if (mode == RLS_MODE_RANDOM) {
      manifest = rlsubset::RandomSelect(ds->value, m, seed);
      manifest.lambda = lambda;
    } else if (mode == RLS_MODE_MINIREC) {
      rlsubset::GreedyOptions opts;
      opts.m = m;
      opts.lambda = lambda;
      manifest = rlsubset::GreedySelect(ds->value, scores->value, opts);
    } else {
      rlsubset::Fail(rlsubset::ErrorCode::kParameter, "unknown selection mode");
    }
    *out = new rls_manifest{std::move(manifest)};
  });
}

rls_status rls_manifest_load(const char* path, rls_manifest** out) {
  RLS_REQUIRE(path);
  RLS_REQUIRE(out);
  *out = nullptr;
  return Guard([&] {
    *out = new rls_manifest{rlsubset::ManifestFromJson(rlsubset::ReadFile(path))};
  });
}

rls_status rls_manifest_save(const rls_manifest* manifest, const char* path) {
  RLS_REQUIRE(manifest);
  RLS_REQUIRE(path);
  return Guard([&] {
    rlsubset::WriteFile(path, rlsubset::ManifestToJson(manifest->value));
  });
}

size_t rls_manifest_size(const rls_manifest* manifest) {
  return manifest ? manifest->value.picks.size() : 0;
}

const char* rls_manifest_id(const rls_manifest* manifest, size_t step) {
  if (manifest == nullptr || step >= manifest->value.picks.size()) return nullptr;
  return manifest->value.picks[step].id.c_str();
}

void rls_manifest_free(rls_manifest* manifest) { delete manifest; }

rls_status rls_schedule_build(const rls_manifest* manifest,
                              const rls_scores* scores, size_t k,
                              uint64_t seed, rls_schedule** out) {
  RLS_REQUIRE(manifest);
  RLS_REQUIRE(scores);
  RLS_REQUIRE(out);
  *out = nullptr;
  return Guard([&] {
    *out = new rls_schedule{rlsubset::BuildSchedule(
        manifest->value, RewardMap(scores->value), k, seed)};
  });
}

rls_status rls_schedule_load(const char* path, rls_schedule** out) {
  RLS_REQUIRE(path);
  RLS_REQUIRE(out);
  *out = nullptr;
  return Guard([&] {
    *out = new rls_schedule{rlsubset::ScheduleFromJson(rlsubset::ReadFile(path))};
  });
}

rls_status rls_schedule_save_json(const rls_schedule* schedule,
                                  const char* path) {
  RLS_REQUIRE(schedule);
  RLS_REQUIRE(path);
  return Guard([&] {
    rlsubset::WriteFile(path, rlsubset::ScheduleToJson(schedule->value));
  });
}

rls_status rls_schedule_save_text(const rls_schedule* schedule,
                                  const char* path) {
  RLS_REQUIRE(schedule);
  RLS_REQUIRE(path);
  return Guard([&] {
    rlsubset::WriteFile(path, rlsubset::ScheduleToText(schedule->value));
  });
}

size_t rls_schedule_group_count(const rls_schedule* schedule) {
  return schedule ? schedule->value.groups.size() : 0;
}

size_t rls_schedule_group_size(const rls_schedule* schedule, size_t group) {
  if (schedule == nullptr || group >= schedule->value.groups.size()) return 0;
  return schedule->value.groups[group].size();
}

void rls_schedule_free(rls_schedule* schedule) { delete schedule; }

rls_status rls_pipeline_resolve_config(const char* config_json,
                                       char** resolved_json,
                                       char** stage_plan) {
  RLS_REQUIRE(config_json);
  return Guard([&] {
    const auto cfg = rlsubset::ParsePipelineConfig(config_json);
    if (resolved_json) *resolved_json = CopyString(rlsubset::PipelineConfigToJson(cfg));
    if (stage_plan) *stage_plan = CopyString(rlsubset::DescribeStagePlan(cfg));
  });
}

rls_status rls_pipeline_run(const char* config_json, const char* out_dir,
                            char** report_json) {
  RLS_REQUIRE(config_json);
  RLS_REQUIRE(out_dir);
  return Guard([&] {
    const auto cfg = rlsubset::ParsePipelineConfig(config_json);
    const std::string report = rlsubset::RunPipeline(cfg, out_dir);
    if (report_json) *report_json = CopyString(report);
  });
}

rls_status rls_pipeline_compare(const char* config_json, uint64_t first_seed,
                                size_t count, char** summary_json) {
  RLS_REQUIRE(config_json);
  RLS_REQUIRE(summary_json);
  return Guard([&] {
    if (count == 0) {
      rlsubset::Fail(rlsubset::ErrorCode::kParameter, "seed count must be >= 1");
    }
    const auto cfg = rlsubset::ParsePipelineConfig(config_json);
    std::vector<std::uint64_t> seeds;
    for (size_t i = 0; i < count; ++i) seeds.push_back(first_seed + i);
    *summary_json = CopyString(
        rlsubset::PairedSummaryToJson(rlsubset::RunPairedComparison(cfg, seeds)));
  });
}

rls_status rls_simulate_dataset(const char* config_json, const char* out_path) {
  RLS_REQUIRE(config_json);
  RLS_REQUIRE(out_path);
  return Guard([&] {
    const auto cfg = rlsubset::ParsePipelineConfig(config_json);
    const auto data = rlsubset::PrepareData(cfg);
    rlsubset::WriteDataset(data.dataset, std::string(out_path));
  });
}

rls_status rls_verify_hvp(uint64_t seed, size_t trials, char** table,
                          int* passed) {
  RLS_REQUIRE(table);
  return Guard([&] {
    if (trials == 0) {
      rlsubset::Fail(rlsubset::ErrorCode::kParameter, "trials must be >= 1");
    }
    const auto res = rlsubset::RunHvpSuite(seed, trials);
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof line, "%-12s %-10s %-14s %-14s\n", "model",
                  "epsilon", "max_abs_error", "max_rel_error");
    out << line;
    for (const auto& r : res.examples) {
      std::snprintf(line, sizeof line, "%-12s %-10.3g %-14.3e %-14.3e\n",
                    r.label.c_str(), r.epsilon, r.max_abs_error, r.max_rel_error);
      out << line;
    }
    out << "\n";
    const bool q_ok = res.quadratic_max_abs_error < 1e-10;
    const bool l_ok = res.logistic_max_rel_error < 1e-6;
    const bool lin_ok = res.linearity_max_error < 1e-10;
    const bool sym_ok = res.symmetry_max_error < 1e-10;
    std::snprintf(line, sizeof line,
                  "trials=%zu\nquadratic  max_abs_error=%.3e (< 1e-10) %s\n",
                  res.trials, res.quadratic_max_abs_error, q_ok ? "ok" : "FAIL");
    out << line;
    std::snprintf(line, sizeof line,
                  "logistic   max_rel_error=%.3e (< 1e-6) %s\n",
                  res.logistic_max_rel_error, l_ok ? "ok" : "FAIL");
    out << line;
    std::snprintf(line, sizeof line,
                  "linearity  max_error=%.3e (< 1e-10) %s\n",
                  res.linearity_max_error, lin_ok ? "ok" : "FAIL");
    out << line;
    std::snprintf(line, sizeof line,
                  "symmetry   max_error=%.3e (< 1e-10) %s\n",
                  res.symmetry_max_error, sym_ok ? "ok" : "FAIL");
    out << line;
    *table = CopyString(out.str());
    if (passed) *passed = res.Passed() ? 1 : 0;
  });
}

}  // extern "C"
