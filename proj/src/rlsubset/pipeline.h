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

// End-to-end simulator pipeline: synthetic task -> proxy policy -> reward
// estimation -> scoring -> subset selection -> curriculum -> final training
// -> held-out evaluation.

#ifndef RLSUBSET_PIPELINE_H_
#define RLSUBSET_PIPELINE_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rlsubset/curriculum.h"
#include "rlsubset/dataset.h"
#include "rlsubset/grpo_sim.h"
#include "rlsubset/scoring.h"
#include "rlsubset/selection.h"

namespace rlsubset {

struct PipelineConfig {
  // Drives proxy training, rollouts, the held-out split and final training.
  std::uint64_t seed = 1;
  TaskOptions task;

  std::size_t proxy_subset_size = 256;
  GrpoOptions proxy;

  ScoringParams scoring;
  bool with_representativeness = true;

  SelectionMode mode = SelectionMode::kMiniRec;
  std::size_t m = 256;

  std::size_t k = 4;
  std::uint64_t curriculum_seed = 1;

  GrpoOptions train;

  double heldout_fraction = 0.3;
  std::size_t eval_n = 32;

  PipelineConfig();
};

// Parses a JSON config. Missing fields take their defaults; type, range and
// unknown-key errors are reported with the JSON pointer of the field.
PipelineConfig ParsePipelineConfig(const std::string& json_text);
std::string PipelineConfigToJson(const PipelineConfig& config);

// Human-readable stage plan for --dry-run.
std::string DescribeStagePlan(const PipelineConfig& config);

// Everything up to (and including) scoring; shared by both selection modes.
struct PreparedData {
  SyntheticTask task;
  std::vector<std::size_t> pool;     // task indices available for selection
  std::vector<std::size_t> heldout;  // task indices used only for evaluation
  Policy proxy;
  double pool_expected_reward_before = 0.0;
  double pool_expected_reward_after = 0.0;
  Dataset dataset;  // one record per pool sample, in pool order
  ScoreTable scores;
};

PreparedData PrepareData(const PipelineConfig& config);

struct PipelineOutcome {
  SubsetManifest manifest;
  CurriculumSchedule schedule;
  Policy final_policy;
  double heldout_mean_reward = 0.0;
  double heldout_expected_reward = 0.0;
};

PipelineOutcome FinishPipeline(const PipelineConfig& config,
                               const PreparedData& data);

// Runs all stages. When out_dir is non-empty every intermediate artifact is
// written there and the report lists the file names. Returns report JSON.
std::string RunPipeline(const PipelineConfig& config,
                        const std::string& out_dir);

// Aggregate mean of `values` per difficulty tier of the pool samples.
std::array<double, kNumTiers> MeanByTier(const PreparedData& data,
                                         const std::vector<double>& values);

struct PairedRow {
  std::uint64_t seed = 0;
  double minirec = 0.0;
  double random = 0.0;
  std::array<double, kNumTiers> mean_l{};
};

struct PairedSummary {
  std::vector<PairedRow> rows;
  std::size_t wins = 0;
  std::size_t losses = 0;
  std::size_t ties = 0;
  double mean_improvement = 0.0;
  // One-sided sign test P(X >= wins) for X ~ Binomial(wins + losses, 1/2).
  double sign_test_p = 1.0;
  // Seeds on which the medium tier has the highest mean learnability.
  std::size_t medium_l_highest = 0;
};

// Runs both selection modes on the same prepared data for each seed. The seed
// replaces config.seed, task.seed and curriculum_seed.
PairedSummary RunPairedComparison(const PipelineConfig& base,
                                  const std::vector<std::uint64_t>& seeds);

std::string PairedSummaryToJson(const PairedSummary& summary);

double SignTestPValue(std::size_t wins, std::size_t trials);

}  // namespace rlsubset

#endif  // RLSUBSET_PIPELINE_H_
