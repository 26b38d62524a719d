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

#include "rlsubset/grpo_sim.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "rlsubset/hvp.h"

namespace rlsubset {
namespace {

std::string SampleId(std::size_t index, std::size_t n) {
  const std::size_t width = std::max<std::size_t>(4, std::to_string(n).size());
  std::string digits = std::to_string(index);
  return "s" + std::string(width - std::min(width, digits.size()), '0') +
         digits;
}

std::size_t SampleCategorical(std::span<const double> probs, double u) {
  double cum = 0.0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    cum += probs[j];
    if (u < cum) return j;
  }
  // u landed in the rounding slack above the last cumulative sum.
  for (std::size_t j = probs.size(); j-- > 0;) {
    if (probs[j] > 0.0) return j;
  }
  return probs.size() - 1;
}

void ShuffleIndices(std::vector<std::size_t>& v, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = v.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(v[i - 1], v[pick(rng)]);
  }
}

}  // namespace

const char* TierName(Tier tier) {
  switch (tier) {
    case Tier::kEasy: return "easy";
    case Tier::kMedium: return "medium";
    case Tier::kHard: return "hard";
  }
  return "unknown";
}

std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t a,
                         std::uint64_t b) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(base) ^ a) ^ (b * 0xd1342543de82ef95ULL));
}

SyntheticTask GenerateTask(const TaskOptions& options) {
  const TierMix& mix = options.tier_mix;
  for (double p : {mix.easy, mix.medium, mix.hard}) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      Fail(ErrorCode::kParameter, "tier_mix proportions must be >= 0");
    }
  }
  if (std::abs(mix.easy + mix.medium + mix.hard - 1.0) > 1e-9) {
    Fail(ErrorCode::kParameter, "tier_mix proportions must sum to 1");
  }
  if (options.item_count < 2) {
    Fail(ErrorCode::kParameter, "item_count must be >= 2");
  }
  if (!std::isfinite(options.base_scale)) {
    Fail(ErrorCode::kParameter, "base_scale must be finite");
  }
  if (options.context_dim == 0 || options.n_samples == 0) {
    Fail(ErrorCode::kParameter, "context_dim and n_samples must be >= 1");
  }

  SyntheticTask task;
  task.item_count = options.item_count;
  task.context_dim = options.context_dim;
  task.seed = options.seed;
  task.base_scale = options.base_scale;

  const std::size_t dim = options.context_dim;
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  task.item_directions.resize(options.item_count);
  if (options.item_count <= 2 * dim) {
    // Randomly rotated cross-polytope: items come in antipodal pairs along
    // orthonormal axes, so distinct items never share direction.
    std::vector<Vector> basis;
    while (basis.size() * 2 < options.item_count) {
      Vector q(dim);
      for (double& x : q) x = gauss(rng);
      for (const Vector& b : basis) {
        const double proj = Dot(q, b);
        for (std::size_t k = 0; k < dim; ++k) q[k] -= proj * b[k];
      }
      const double norm = Norm(q);
      if (norm < 1e-6) continue;
      for (double& x : q) x /= norm;
      basis.push_back(std::move(q));
    }
    for (std::size_t j = 0; j < options.item_count; ++j) {
      Vector u = basis[j / 2];
      if (j % 2 == 1) {
        for (double& x : u) x = -x;
      }
      task.item_directions[j] = std::move(u);
    }
  } else {
    for (Vector& u : task.item_directions) {
      u.resize(dim);
      double norm = 0.0;
      while (norm < 1e-6) {
        for (double& x : u) x = gauss(rng);
        norm = Norm(u);
      }
      for (double& x : u) x /= norm;
    }
  }

  const std::size_t n = options.n_samples;
  const auto n_easy = std::min<std::size_t>(
      n, static_cast<std::size_t>(std::floor(n * mix.easy + 0.5)));
  const auto n_medium = std::min<std::size_t>(
      n - n_easy, static_cast<std::size_t>(std::floor(n * mix.medium + 0.5)));
  std::vector<Tier> tiers(n, Tier::kHard);
  std::fill_n(tiers.begin(), n_easy, Tier::kEasy);
  std::fill_n(tiers.begin() + static_cast<long>(n_easy), n_medium,
              Tier::kMedium);
  for (std::size_t i = n; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(tiers[i - 1], tiers[pick(rng)]);
  }

  std::uniform_int_distribution<std::size_t> target_dist(
      0, options.item_count - 1);
  const double noise_scale = 1.0 / std::sqrt(static_cast<double>(dim));
  task.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    TaskSample s;
    s.id = SampleId(i, n);
    s.tier = tiers[i];
    s.target = target_dist(rng);
    const double signal = s.tier == Tier::kEasy     ? options.easy_signal
                          : s.tier == Tier::kMedium ? options.medium_signal
                                                    : 0.0;
    s.context.resize(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      s.context[k] = signal * task.item_directions[s.target][k] +
                     noise_scale * gauss(rng);
    }
    task.samples.push_back(std::move(s));
  }
  return task;
}

Policy::Policy(std::size_t item_count, std::size_t context_dim)
    : item_count_(item_count),
      context_dim_(context_dim),
      weights_(item_count * context_dim, 0.0) {}

Vector Policy::Logits(std::span<const double> context) const {
  if (context.size() != context_dim_) {
    Fail(ErrorCode::kDimension, "policy: context dimension mismatch");
  }
  Vector z(item_count_);
  for (std::size_t j = 0; j < item_count_; ++j) {
    z[j] = Dot(std::span<const double>(weights_).subspan(j * context_dim_,
                                                         context_dim_),
               context);
  }
  return z;
}

Vector Policy::Probabilities(std::span<const double> context) const {
  Vector z = Logits(context);
  const double top = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double& x : z) {
    x = std::exp(x - top);
    total += x;
  }
  for (double& x : z) x /= total;
  return z;
}

double Policy::LogProbability(std::span<const double> context,
                              std::size_t item) const {
  const Vector z = Logits(context);
  const double top = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double x : z) total += std::exp(x - top);
  return z[item] - top - std::log(total);
}

Policy InitialPolicy(const SyntheticTask& task) {
  Policy policy(task.item_count, task.context_dim);
  for (std::size_t j = 0; j < task.item_count; ++j) {
    for (std::size_t c = 0; c < task.context_dim; ++c) {
      policy.at(j, c) = task.base_scale * task.item_directions[j][c];
    }
  }
  return policy;
}

RolloutBatch Rollout(const Policy& policy, const TaskSample& sample,
                     std::size_t n, std::uint64_t seed) {
  if (n < 2) Fail(ErrorCode::kParameter, "rollout needs N >= 2");
  const Vector probs = policy.Probabilities(sample.context);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RolloutBatch batch;
  batch.sample_id = sample.id;
  batch.items.reserve(n);
  batch.old_log_probs.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t item = SampleCategorical(probs, u(rng));
    batch.items.push_back(item);
    batch.old_log_probs.push_back(std::log(probs[item]));
  }
  return batch;
}

double Reward(const TaskSample& sample, std::size_t item) {
  return item == sample.target ? 1.0 : 0.0;
}

void ScoreRollout(const TaskSample& sample, RolloutBatch& batch) {
  batch.rewards.clear();
  for (std::size_t item : batch.items) batch.rewards.push_back(Reward(sample, item));
  batch.advantages = GroupAdvantages(batch.rewards);
}

Vector GroupAdvantages(std::span<const double> rewards) {
  if (rewards.size() < 2) {
    Fail(ErrorCode::kParameter, "group advantages need N >= 2");
  }
  const double n = static_cast<double>(rewards.size());
  const double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double sd = std::sqrt(var / n);
  Vector adv(rewards.size(), 0.0);
  if (sd < 1e-8) return adv;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    adv[i] = (rewards[i] - mean) / sd;
  }
  return adv;
}

double ClippedObjective(std::span<const double> ratios,
                        std::span<const double> advantages,
                        double epsilon_clip) {
  if (ratios.size() != advantages.size()) {
    Fail(ErrorCode::kDimension, "clipped objective: length mismatch");
  }
  if (!(epsilon_clip > 0.0 && epsilon_clip < 1.0)) {
    Fail(ErrorCode::kParameter, "epsilon_clip must be in (0, 1)");
  }
  if (ratios.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const double clipped =
        std::clamp(ratios[i], 1.0 - epsilon_clip, 1.0 + epsilon_clip);
    sum += std::min(ratios[i] * advantages[i], clipped * advantages[i]);
  }
  return sum / static_cast<double>(ratios.size());
}

double BatchObjective(const Policy& policy, const SyntheticTask& task,
                      std::span<const RolloutBatch> batches,
                      double epsilon_clip) {
  Vector ratios, advantages;
  for (const auto& b : batches) {
    const auto& ctx = task.samples.at(b.sample_index).context;
    for (std::size_t k = 0; k < b.items.size(); ++k) {
      ratios.push_back(
          std::exp(policy.LogProbability(ctx, b.items[k]) - b.old_log_probs[k]));
      advantages.push_back(b.advantages.at(k));
    }
  }
  return ClippedObjective(ratios, advantages, epsilon_clip);
}

Policy PolicyUpdate(const Policy& policy, const SyntheticTask& task,
                    std::span<const RolloutBatch> batches,
                    double learning_rate, double epsilon_clip) {
  if (!(epsilon_clip > 0.0 && epsilon_clip < 1.0)) {
    Fail(ErrorCode::kParameter, "epsilon_clip must be in (0, 1)");
  }
  std::size_t total = 0;
  for (const auto& b : batches) {
    if (b.advantages.size() != b.items.size() ||
        b.old_log_probs.size() != b.items.size()) {
      Fail(ErrorCode::kValidation,
           "rollout batch '" + b.sample_id + "' has inconsistent lengths");
    }
    total += b.items.size();
  }
  if (total == 0) return policy;

  const std::size_t items = policy.item_count();
  const std::size_t dim = policy.context_dim();
  Vector grad(items * dim, 0.0);
  for (const auto& b : batches) {
    const TaskSample& sample = task.samples.at(b.sample_index);
    const Vector probs = policy.Probabilities(sample.context);
    for (std::size_t k = 0; k < b.items.size(); ++k) {
      const double adv = b.advantages[k];
      if (adv == 0.0) continue;
      const std::size_t y = b.items[k];
      const double ratio = std::exp(std::log(probs[y]) - b.old_log_probs[k]);
      const double clipped =
          std::clamp(ratio, 1.0 - epsilon_clip, 1.0 + epsilon_clip);
      // The clipped branch is constant in the weights.
      if (clipped * adv < ratio * adv) continue;
      const double coeff = adv * ratio / static_cast<double>(total);
      for (std::size_t j = 0; j < items; ++j) {
        const double g = coeff * ((j == y ? 1.0 : 0.0) - probs[j]);
        for (std::size_t c = 0; c < dim; ++c) {
          grad[j * dim + c] += g * sample.context[c];
        }
      }
    }
  }
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (!std::isfinite(grad[i])) {
      std::ostringstream msg;
      msg << "non-finite policy gradient at item " << i / dim << ", component "
          << i % dim << " (batches=" << batches.size()
          << ", trajectories=" << total << ", lr=" << learning_rate << ")";
      Fail(ErrorCode::kNumeric, msg.str());
    }
  }
  Policy next = policy;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    next.weights()[i] += learning_rate * grad[i];
  }
  return next;
}

void GrpoOptions::Validate(const char* what) const {
  const std::string w(what);
  if (batch_size == 0) Fail(ErrorCode::kParameter, w + ": batch_size must be >= 1");
  if (rollouts < 2) Fail(ErrorCode::kParameter, w + ": N must be >= 2");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    Fail(ErrorCode::kParameter, w + ": learning_rate must be > 0");
  }
  if (!(epsilon_clip > 0.0 && epsilon_clip < 1.0)) {
    Fail(ErrorCode::kParameter, w + ": epsilon_clip must be in (0, 1)");
  }
  if (update_epochs == 0) {
    Fail(ErrorCode::kParameter, w + ": update_epochs must be >= 1");
  }
}

Policy GrpoStep(const Policy& policy, const SyntheticTask& task,
                std::span<const std::size_t> sample_indices,
                const GrpoOptions& options, std::uint64_t seed) {
  std::vector<RolloutBatch> batches;
  batches.reserve(sample_indices.size());
  bool any_signal = false;
  for (std::size_t idx : sample_indices) {
    const TaskSample& sample = task.samples.at(idx);
    RolloutBatch b =
        Rollout(policy, sample, options.rollouts, DeriveSeed(seed, idx));
    b.sample_index = idx;
    ScoreRollout(sample, b);
    for (double a : b.advantages) any_signal |= (a != 0.0);
    batches.push_back(std::move(b));
  }
  if (!any_signal) return policy;
  Policy current = policy;
  for (std::size_t e = 0; e < options.update_epochs; ++e) {
    current = PolicyUpdate(current, task, batches, options.learning_rate,
                           options.epsilon_clip);
  }
  return current;
}

Policy TrainProxy(const SyntheticTask& task,
                  std::span<const std::size_t> pool, std::size_t subset_size,
                  const GrpoOptions& options, std::uint64_t seed) {
  options.Validate("proxy");
  if (subset_size == 0 || subset_size > pool.size()) {
    Fail(ErrorCode::kParameter, "proxy subset_size must be in [1, " +
                                    std::to_string(pool.size()) + "]");
  }
  Policy policy = InitialPolicy(task);
  if (options.steps == 0) return policy;

  std::vector<std::size_t> order(pool.begin(), pool.end());
  ShuffleIndices(order, DeriveSeed(seed, 0));
  order.resize(subset_size);

  const std::size_t batch = std::min(options.batch_size, subset_size);
  std::size_t cursor = 0;
  std::size_t epoch = 0;
  std::vector<std::size_t> picked(batch);
  for (std::size_t step = 0; step < options.steps; ++step) {
    for (std::size_t b = 0; b < batch; ++b) {
      if (cursor == order.size()) {
        cursor = 0;
        ShuffleIndices(order, DeriveSeed(seed, 1, ++epoch));
      }
      picked[b] = order[cursor++];
    }
    policy = GrpoStep(policy, task, picked, options, DeriveSeed(seed, 2, step));
  }
  return policy;
}

Policy TrainOnSchedule(const SyntheticTask& task,
                       const std::vector<std::vector<std::size_t>>& groups,
                       const GrpoOptions& options, std::uint64_t seed) {
  options.Validate("train");
  if (groups.empty()) Fail(ErrorCode::kParameter, "empty training schedule");
  Policy policy = InitialPolicy(task);
  const std::size_t k = groups.size();
  std::size_t global_step = 0;
  std::vector<std::size_t> picked;
  for (std::size_t g = 0; g < k; ++g) {
    const auto& group = groups[g];
    if (group.empty()) Fail(ErrorCode::kParameter, "empty curriculum group");
    const std::size_t budget = options.steps / k + (g < options.steps % k ? 1 : 0);
    const std::size_t batch = std::min(options.batch_size, group.size());
    std::size_t cursor = 0;
    for (std::size_t s = 0; s < budget; ++s, ++global_step) {
      picked.clear();
      for (std::size_t b = 0; b < batch; ++b) {
        picked.push_back(group[cursor]);
        cursor = (cursor + 1) % group.size();
      }
      policy =
          GrpoStep(policy, task, picked, options, DeriveSeed(seed, 3, global_step));
    }
  }
  return policy;
}

std::vector<RewardEstimate> EstimateRewards(
    const Policy& policy, const SyntheticTask& task,
    std::span<const std::size_t> sample_indices, std::size_t n,
    std::uint64_t seed) {
  if (n < 2) Fail(ErrorCode::kParameter, "reward estimation needs N >= 2");
  std::vector<RewardEstimate> out;
  out.reserve(sample_indices.size());
  for (std::size_t idx : sample_indices) {
    const TaskSample& sample = task.samples.at(idx);
    RolloutBatch b = Rollout(policy, sample, n, DeriveSeed(seed, 4, idx));
    ScoreRollout(sample, b);
    RewardEstimate est;
    est.sample_index = idx;
    est.rewards = b.rewards;
    est.r_bar = std::accumulate(b.rewards.begin(), b.rewards.end(), 0.0) /
                static_cast<double>(n);
    out.push_back(std::move(est));
  }
  return out;
}

double ExpectedReward(const Policy& policy, const SyntheticTask& task,
                      std::span<const std::size_t> sample_indices) {
  if (sample_indices.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t idx : sample_indices) {
    const TaskSample& s = task.samples.at(idx);
    sum += policy.Probabilities(s.context)[s.target];
  }
  return sum / static_cast<double>(sample_indices.size());
}

Vector SurrogateDirection(const Policy& policy, const TaskSample& sample) {
  const std::size_t items = policy.item_count();
  const std::size_t dim = policy.context_dim();
  // phi such that weights . phi = z_target - mean_{j != target} z_j.
  Vector phi(items * dim, 0.0);
  const double rest = -1.0 / static_cast<double>(items - 1);
  for (std::size_t j = 0; j < items; ++j) {
    const double w = j == sample.target ? 1.0 : rest;
    for (std::size_t c = 0; c < dim; ++c) phi[j * dim + c] = w * sample.context[c];
  }
  const AnalyticModel model = LogisticPointModel{std::move(phi), 1};
  return SampleDirection(model, policy.weights());
}

}  // namespace rlsubset
