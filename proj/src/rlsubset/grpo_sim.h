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

// Desk-scale GRPO simulator: a softmax policy over a small item catalog,
// trained with group-relative advantages and the clipped surrogate objective
// on a synthetic next-item task with planted difficulty tiers.

#ifndef RLSUBSET_GRPO_SIM_H_
#define RLSUBSET_GRPO_SIM_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rlsubset/vec.h"

namespace rlsubset {

enum class Tier { kEasy = 0, kMedium = 1, kHard = 2 };
inline constexpr std::size_t kNumTiers = 3;
const char* TierName(Tier tier);

struct TierMix {
  double easy = 0.3;
  double medium = 0.4;
  double hard = 0.3;
};

struct TaskOptions {
  std::size_t item_count = 16;
  std::size_t context_dim = 8;
  std::size_t n_samples = 2000;
  TierMix tier_mix;
  std::uint64_t seed = 1;
  // Length of the planted target direction per tier. Hard samples carry no
  // signal at all; the noise vector has unit expected squared norm.
  double easy_signal = 3.0;
  double medium_signal = 1.0;
  // The initial ("base") policy already knows the item directions up to this
  // scale, so it solves strong-signal samples before any fine-tuning.
  double base_scale = 1.0;
};

struct TaskSample {
  std::string id;
  Vector context;
  std::size_t target = 0;
  Tier tier = Tier::kEasy;
};

struct SyntheticTask {
  std::size_t item_count = 0;
  std::size_t context_dim = 0;
  std::uint64_t seed = 0;
  double base_scale = 0.0;
  // Unit generative direction per item.
  std::vector<Vector> item_directions;
  std::vector<TaskSample> samples;
};

SyntheticTask GenerateTask(const TaskOptions& options);

// Mixes a base seed with stream indices (SplitMix64 finalizer).
std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t a,
                         std::uint64_t b = 0);

// pi(item | context) = softmax(W context), W is item_count x context_dim.
class Policy {
 public:
  Policy() = default;
  Policy(std::size_t item_count, std::size_t context_dim);

  std::size_t item_count() const { return item_count_; }
  std::size_t context_dim() const { return context_dim_; }
  const Vector& weights() const { return weights_; }
  Vector& weights() { return weights_; }
  double& at(std::size_t item, std::size_t k) {
    return weights_[item * context_dim_ + k];
  }
  double at(std::size_t item, std::size_t k) const {
    return weights_[item * context_dim_ + k];
  }

  Vector Logits(std::span<const double> context) const;
  Vector Probabilities(std::span<const double> context) const;
  double LogProbability(std::span<const double> context,
                        std::size_t item) const;

  bool operator==(const Policy&) const = default;

 private:
  std::size_t item_count_ = 0;
  std::size_t context_dim_ = 0;
  Vector weights_;
};

// The policy every training run starts from: row j = base_scale * u_j.
Policy InitialPolicy(const SyntheticTask& task);

struct RolloutBatch {
  std::size_t sample_index = 0;
  std::string sample_id;
  std::vector<std::size_t> items;
  // log pi_old(item | context) under the sampling policy.
  Vector old_log_probs;
  Vector rewards;
  Vector advantages;
};

// Draws n items i.i.d. from the policy. Rewards and advantages are left
// empty.
RolloutBatch Rollout(const Policy& policy, const TaskSample& sample,
                     std::size_t n, std::uint64_t seed);

// Hit reward: 1 if the item is the sample's target.
double Reward(const TaskSample& sample, std::size_t item);

// Fills rewards and advantages of a rollout batch.
void ScoreRollout(const TaskSample& sample, RolloutBatch& batch);

// (r - mean) / population std; all zeros when the std is below 1e-8.
Vector GroupAdvantages(std::span<const double> rewards);

// Mean of min(rho A, clip(rho, 1-eps, 1+eps) A).
double ClippedObjective(std::span<const double> ratios,
                        std::span<const double> advantages,
                        double epsilon_clip);

// The clipped objective of `policy` over all trajectories of the batches.
double BatchObjective(const Policy& policy, const SyntheticTask& task,
                      std::span<const RolloutBatch> batches,
                      double epsilon_clip);

// One gradient-ascent step on BatchObjective.
Policy PolicyUpdate(const Policy& policy, const SyntheticTask& task,
                    std::span<const RolloutBatch> batches,
                    double learning_rate, double epsilon_clip);

struct GrpoOptions {
  std::size_t steps = 200;
  std::size_t batch_size = 16;
  std::size_t rollouts = 8;
  double learning_rate = 0.5;
  double epsilon_clip = 0.2;
  // Gradient steps taken on each sampled batch before resampling.
  std::size_t update_epochs = 2;

  void Validate(const char* what) const;
};

// One rollout -> advantage -> update round on the given samples.
Policy GrpoStep(const Policy& policy, const SyntheticTask& task,
                std::span<const std::size_t> sample_indices,
                const GrpoOptions& options, std::uint64_t seed);

// Trains a policy, starting from InitialPolicy, on a random `subset_size` subset of `pool`.
Policy TrainProxy(const SyntheticTask& task,
                  std::span<const std::size_t> pool, std::size_t subset_size,
                  const GrpoOptions& options, std::uint64_t seed);

// Consumes ordered groups in sequence with an equal step budget per group;
// each step takes the next batch_size ids of the current group, wrapping.
Policy TrainOnSchedule(const SyntheticTask& task,
                       const std::vector<std::vector<std::size_t>>& groups,
                       const GrpoOptions& options, std::uint64_t seed);

struct RewardEstimate {
  std::size_t sample_index = 0;
  Vector rewards;
  double r_bar = 0.0;
};

// N rollouts per sample under the (proxy) policy.
std::vector<RewardEstimate> EstimateRewards(
    const Policy& policy, const SyntheticTask& task,
    std::span<const std::size_t> sample_indices, std::size_t n,
    std::uint64_t seed);

// Mean of pi(target | context) over the samples.
double ExpectedReward(const Policy& policy, const SyntheticTask& task,
                      std::span<const std::size_t> sample_indices);

// Per-sample optimization direction from a logistic surrogate of the
// target-vs-rest logit margin, taken in the flattened weight space.
Vector SurrogateDirection(const Policy& policy, const TaskSample& sample);

}  // namespace rlsubset

#endif  // RLSUBSET_GRPO_SIM_H_
