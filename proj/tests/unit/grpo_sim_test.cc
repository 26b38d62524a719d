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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.h"
#include "rlsubset/error.h"
#include "rlsubset/grpo_sim.h"
#include "test_util.h"

namespace rlsubset {
namespace {

using ::rlsubset::testing::CodeOf;

// A hand-built task: `items` items, contexts drawn around fixed axes.
SyntheticTask TinyTask(std::size_t items, std::size_t dim, std::size_t n,
                       std::uint64_t seed) {
  SyntheticTask t;
  t.item_count = items;
  t.context_dim = dim;
  t.seed = seed;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.3);
  for (std::size_t j = 0; j < items; ++j) {
    Vector u(dim, 0.0);
    u[j % dim] = (j / dim) % 2 ? -1.0 : 1.0;
    t.item_directions.push_back(u);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t target = i % items;
    Vector c = t.item_directions[target];
    for (double& x : c) x += g(rng);
    t.samples.push_back({"t" + std::to_string(i), c, target, Tier::kEasy});
  }
  return t;
}

double RowSumError(const Policy& p, const SyntheticTask& task) {
  double e = 0;
  for (const auto& s : task.samples) {
    const Vector pr = p.Probabilities(s.context);
    double sum = 0;
    for (double x : pr) {
      EXPECT_GE(x, 0.0);
      sum += x;
    }
    e = std::max(e, std::abs(sum - 1.0));
  }
  return e;
}

// Top-1 accuracy of a multinomial logistic probe trained by full-batch
// gradient descent on half the samples and evaluated on the other half.
double ProbeAccuracy(const SyntheticTask& task) {
  const std::size_t I = task.item_count, D = task.context_dim;
  const std::size_t half = task.samples.size() / 2;
  std::vector<double> w(I * (D + 1), 0.0);
  auto logits = [&](const Vector& x) {
    std::vector<double> z(I);
    for (std::size_t j = 0; j < I; ++j) {
      double v = w[j * (D + 1) + D];
      for (std::size_t k = 0; k < D; ++k) v += w[j * (D + 1) + k] * x[k];
      z[j] = v;
    }
    return z;
  };
  for (int it = 0; it < 300; ++it) {
    std::vector<double> grad(w.size(), 0.0);
    for (std::size_t i = 0; i < half; ++i) {
      const auto& s = task.samples[i];
      std::vector<double> z = logits(s.context);
      const double mx = *std::max_element(z.begin(), z.end());
      double sum = 0;
      for (double& v : z) sum += (v = std::exp(v - mx));
      for (std::size_t j = 0; j < I; ++j) {
        const double err = z[j] / sum - (j == s.target ? 1.0 : 0.0);
        for (std::size_t k = 0; k < D; ++k) grad[j * (D + 1) + k] += err * s.context[k];
        grad[j * (D + 1) + D] += err;
      }
    }
    for (std::size_t q = 0; q < w.size(); ++q) w[q] -= 0.5 * grad[q] / half;
  }
  std::size_t hit = 0;
  for (std::size_t i = half; i < task.samples.size(); ++i) {
    const auto& s = task.samples[i];
    const std::vector<double> z = logits(s.context);
    if (static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin()) ==
        s.target) {
      ++hit;
    }
  }
  return static_cast<double>(hit) / (task.samples.size() - half);
}

TEST(GenerateTaskTest, ShapesAndDeterminism) {
  TaskOptions o;
  o.n_samples = 500;
  const SyntheticTask a = GenerateTask(o);
  const SyntheticTask b = GenerateTask(o);
  ASSERT_EQ(a.samples.size(), 500u);
  EXPECT_EQ(a.item_directions.size(), 16u);
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    EXPECT_EQ(a.samples[i].context, b.samples[i].context);
    EXPECT_EQ(a.samples[i].target, b.samples[i].target);
    EXPECT_EQ(a.samples[i].tier, b.samples[i].tier);
    EXPECT_EQ(a.samples[i].context.size(), 8u);
    EXPECT_LT(a.samples[i].target, 16u);
  }
  for (const auto& u : a.item_directions) EXPECT_NEAR(Norm(u), 1.0, 1e-12);
  o.seed = 2;
  EXPECT_NE(GenerateTask(o).samples[0].context, a.samples[0].context);
}

TEST(GenerateTaskTest, TierProportions) {
  TaskOptions o;
  o.n_samples = 2000;
  const SyntheticTask t = GenerateTask(o);
  std::array<int, kNumTiers> c{};
  for (const auto& s : t.samples) ++c[static_cast<int>(s.tier)];
  EXPECT_NEAR(c[0] / 2000.0, 0.3, 0.05);
  EXPECT_NEAR(c[1] / 2000.0, 0.4, 0.05);
  EXPECT_NEAR(c[2] / 2000.0, 0.3, 0.05);
}

TEST(GenerateTaskTest, InvalidOptions) {
  TaskOptions o;
  o.tier_mix = {0.5, 0.5, 0.5};
  EXPECT_NE(CodeOf([&] { GenerateTask(o); }), ErrorCode::kInternal);
  o = TaskOptions{};
  o.item_count = 1;
  EXPECT_NE(CodeOf([&] { GenerateTask(o); }), ErrorCode::kInternal);
  o = TaskOptions{};
  o.n_samples = 0;
  EXPECT_NE(CodeOf([&] { GenerateTask(o); }), ErrorCode::kInternal);
}

TEST(GenerateTaskTest, EasyTierIsLinearlyDecodable) {
  TaskOptions o;
  o.tier_mix = {1, 0, 0};
  o.n_samples = 2000;
  EXPECT_GT(ProbeAccuracy(GenerateTask(o)), 0.9);
}

TEST(GenerateTaskTest, HardTierIsAtChance) {
  TaskOptions o;
  o.tier_mix = {0, 0, 1};
  o.n_samples = 2000;
  const double acc = ProbeAccuracy(GenerateTask(o));
  // 1000 held-out samples at chance 1/16: sd is about 0.0077.
  EXPECT_LT(std::abs(acc - 1.0 / 16), 0.04);
}

TEST(PolicyTest, UniformAtZeroWeights) {
  const Policy p(4, 3);
  const Vector pr = p.Probabilities(Vector{1, 2, 3});
  for (double x : pr) EXPECT_DOUBLE_EQ(x, 0.25);
  EXPECT_NEAR(p.LogProbability(Vector{1, 2, 3}, 2), std::log(0.25), 1e-15);
}

TEST(PolicyTest, StableForHugeLogits) {
  Policy p(3, 1);
  p.at(1, 0) = 1e6;
  const Vector pr = p.Probabilities(Vector{1});
  EXPECT_DOUBLE_EQ(pr[1], 1.0);
  EXPECT_TRUE(std::isfinite(p.LogProbability(Vector{1}, 0)));
}

TEST(RolloutTest, DegenerateSoftmaxRepeatsItem) {
  Policy p(4, 1);
  p.at(2, 0) = 100.0;
  const TaskSample s{"s", {1.0}, 2, Tier::kEasy};
  const RolloutBatch b = Rollout(p, s, 16, 3);
  for (std::size_t it : b.items) EXPECT_EQ(it, 2u);
  EXPECT_EQ(b.old_log_probs.size(), 16u);
}

TEST(RolloutTest, UniformFrequencies) {
  const Policy p(4, 1);
  const TaskSample s{"s", {1.0}, 0, Tier::kEasy};
  const std::size_t n = 10000;
  const RolloutBatch b = Rollout(p, s, n, 17);
  std::array<int, 4> c{};
  for (std::size_t it : b.items) ++c[it];
  const double sd = std::sqrt(n * 0.25 * 0.75);
  for (int x : c) EXPECT_LT(std::abs(x - n * 0.25), 4 * sd);
}

TEST(RolloutTest, SeedDeterminismAndErrors) {
  const Policy p(5, 2);
  const TaskSample s{"s", {1.0, -1.0}, 0, Tier::kEasy};
  EXPECT_EQ(Rollout(p, s, 8, 5).items, Rollout(p, s, 8, 5).items);
  EXPECT_EQ(CodeOf([&] { Rollout(p, s, 1, 5); }), ErrorCode::kParameter);
}

TEST(RewardTest, Hit) {
  const TaskSample s{"s", {1.0}, 3, Tier::kEasy};
  EXPECT_EQ(Reward(s, 3), 1.0);
  EXPECT_EQ(Reward(s, 2), 0.0);
  RolloutBatch b = Rollout(Policy(4, 1), s, 64, 1);
  ScoreRollout(s, b);
  const double mean = std::accumulate(b.rewards.begin(), b.rewards.end(), 0.0) / 64;
  EXPECT_GE(mean, 0.0);
  EXPECT_LE(mean, 1.0);
  EXPECT_EQ(b.advantages.size(), 64u);
}

TEST(GroupAdvantagesTest, Examples) {
  EXPECT_EQ(GroupAdvantages(Vector{1, 0}), (Vector{1, -1}));
  EXPECT_EQ(GroupAdvantages(Vector{0.7, 0.7, 0.7}), (Vector{0, 0, 0}));
}

TEST(GroupAdvantagesTest, Standardized) {
  std::mt19937_64 rng(51);
  std::normal_distribution<double> g(0.0, 3.0);
  for (int t = 0; t < 2000; ++t) {
    Vector r(2 + t % 15);
    for (double& x : r) x = t % 3 ? g(rng) : static_cast<double>(rng() % 2);
    const auto [m0, s0] = oracle::MeanStd(r);
    const Vector a = GroupAdvantages(r);
    if (s0 < 1e-8) {
      for (double x : a) EXPECT_EQ(x, 0.0);
      continue;
    }
    const auto [m, s] = oracle::MeanStd(a);
    EXPECT_LT(std::abs(m), 1e-9);
    EXPECT_LT(std::abs(s - 1.0), 1e-9);
  }
}

TEST(ClippedObjectiveTest, Examples) {
  EXPECT_DOUBLE_EQ(ClippedObjective(Vector{2}, Vector{1}, 0.2), 1.2);
  EXPECT_DOUBLE_EQ(ClippedObjective(Vector{0.5}, Vector{-1}, 0.2), -0.8);
  EXPECT_DOUBLE_EQ(ClippedObjective(Vector{1, 1, 1}, Vector{1, -2, 4}, 0.2), 1.0);
  EXPECT_EQ(CodeOf([] { ClippedObjective(Vector{1}, Vector{1, 2}, 0.2); }),
            ErrorCode::kDimension);
  EXPECT_EQ(CodeOf([] { ClippedObjective(Vector{1}, Vector{1}, 0.0); }),
            ErrorCode::kParameter);
}

TEST(ClippedObjectiveTest, EqualsUnclippedInsideTrustRegion) {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g;
  for (int t = 0; t < 1000; ++t) {
    const double eps = 0.05 + 0.4 * u(rng);
    Vector rho(1 + t % 9), adv(rho.size());
    double plain = 0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
      rho[i] = 1 - eps + 2 * eps * u(rng);
      adv[i] = g(rng);
      plain += rho[i] * adv[i];
    }
    plain /= rho.size();
    EXPECT_NEAR(ClippedObjective(rho, adv, eps), plain, 1e-12);
  }
}

class PolicyUpdateTest : public ::testing::Test {
 protected:
  void SetUp() override {
    task_ = TinyTask(4, 3, 12, 9);
    policy_ = Policy(4, 3);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(0.0, 0.5);
    for (double& w : policy_.weights()) w = g(rng);
    for (std::size_t i = 0; i < 6; ++i) {
      RolloutBatch b = Rollout(policy_, task_.samples[i], 8, 100 + i);
      b.sample_index = i;
      ScoreRollout(task_.samples[i], b);
      batches_.push_back(b);
    }
  }
  SyntheticTask task_;
  Policy policy_;
  std::vector<RolloutBatch> batches_;
};

TEST_F(PolicyUpdateTest, ZeroAdvantagesLeaveWeights) {
  for (auto& b : batches_) std::fill(b.advantages.begin(), b.advantages.end(), 0.0);
  EXPECT_EQ(PolicyUpdate(policy_, task_, batches_, 0.5, 0.2), policy_);
}

TEST_F(PolicyUpdateTest, PositiveAdvantageRaisesThatLogit) {
  RolloutBatch b;
  b.sample_index = 0;
  b.items = {2};
  b.old_log_probs = {policy_.LogProbability(task_.samples[0].context, 2)};
  b.rewards = {1.0};
  b.advantages = {1.0};
  const std::vector<RolloutBatch> one = {b};
  const Policy next = PolicyUpdate(policy_, task_, one, 0.1, 0.2);
  const Vector& x = task_.samples[0].context;
  EXPECT_GT(next.Logits(x)[2], policy_.Logits(x)[2]);
}

TEST_F(PolicyUpdateTest, SmallStepAscends) {
  for (double lr : {1e-2, 1e-3, 1e-4}) {
    const Policy next = PolicyUpdate(policy_, task_, batches_, lr, 0.2);
    EXPECT_GE(BatchObjective(next, task_, batches_, 0.2),
              BatchObjective(policy_, task_, batches_, 0.2));
  }
}

// The update direction must match a central-difference gradient of the
// batch objective.
TEST_F(PolicyUpdateTest, StepMatchesNumericGradient) {
  const double lr = 1e-7;
  const Policy next = PolicyUpdate(policy_, task_, batches_, lr, 0.2);
  for (std::size_t q = 0; q < policy_.weights().size(); ++q) {
    const double h = 1e-6;
    Policy plus = policy_, minus = policy_;
    plus.weights()[q] += h;
    minus.weights()[q] -= h;
    const double num = (BatchObjective(plus, task_, batches_, 0.2) -
                        BatchObjective(minus, task_, batches_, 0.2)) /
                       (2 * h);
    const double an = (next.weights()[q] - policy_.weights()[q]) / lr;
    EXPECT_NEAR(an, num, 1e-5) << "weight " << q;
  }
}

TEST_F(PolicyUpdateTest, RowsStayDistributions) {
  GrpoOptions o;
  o.learning_rate = 5.0;
  Policy p = policy_;
  std::vector<std::size_t> idx(task_.samples.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (int s = 0; s < 30; ++s) {
    p = GrpoStep(p, task_, idx, o, s);
    EXPECT_LT(RowSumError(p, task_), 1e-9);
  }
}

TEST(GrpoOptionsTest, Validate) {
  GrpoOptions o;
  EXPECT_NO_THROW(o.Validate("proxy"));
  o.rollouts = 1;
  EXPECT_EQ(CodeOf([&] { o.Validate("proxy"); }), ErrorCode::kParameter);
  o = GrpoOptions{};
  o.epsilon_clip = 1.5;
  EXPECT_EQ(CodeOf([&] { o.Validate("proxy"); }), ErrorCode::kParameter);
}

TEST(TrainProxyTest, ZeroStepsIsInitialPolicy) {
  const SyntheticTask t = GenerateTask(TaskOptions{});
  std::vector<std::size_t> pool(100);
  std::iota(pool.begin(), pool.end(), 0);
  GrpoOptions o;
  o.steps = 0;
  EXPECT_EQ(TrainProxy(t, pool, 50, o, 3), InitialPolicy(t));
}

TEST(TrainProxyTest, ImprovesOnEasyTaskAndIsDeterministic) {
  TaskOptions to;
  to.tier_mix = {1, 0, 0};
  to.n_samples = 300;
  to.base_scale = 0.0;
  const SyntheticTask t = GenerateTask(to);
  std::vector<std::size_t> pool(300);
  std::iota(pool.begin(), pool.end(), 0);
  GrpoOptions o;
  o.steps = 60;
  const Policy p = TrainProxy(t, pool, 128, o, 4);
  EXPECT_GT(ExpectedReward(p, t, pool), ExpectedReward(InitialPolicy(t), t, pool) + 0.2);
  EXPECT_EQ(p, TrainProxy(t, pool, 128, o, 4));
}

TEST(EstimateRewardsTest, DeterministicAndUniformPolicies) {
  SyntheticTask t = TinyTask(4, 4, 4, 1);
  Policy sure(4, 4);
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t k = 0; k < 4; ++k) sure.at(j, k) = 200.0 * t.item_directions[j][k];
  }
  const std::vector<std::size_t> idx = {0, 1, 2, 3};
  for (const auto& e : EstimateRewards(sure, t, idx, 8, 1)) EXPECT_EQ(e.r_bar, 1.0);
  const auto uni = EstimateRewards(Policy(4, 4), t, idx, 20000, 2);
  for (const auto& e : uni) {
    EXPECT_LT(std::abs(e.r_bar - 0.25), 4 * std::sqrt(0.25 * 0.75 / 20000));
  }
}

TEST(EstimateRewardsTest, HardBelowEasyUnderTrainedProxy) {
  const SyntheticTask t = GenerateTask(TaskOptions{});
  std::vector<std::size_t> pool(t.samples.size());
  std::iota(pool.begin(), pool.end(), 0);
  GrpoOptions o;
  o.steps = 50;
  const Policy p = TrainProxy(t, pool, 256, o, 5);
  const auto est = EstimateRewards(p, t, pool, 8, 6);
  std::array<double, kNumTiers> sum{}, cnt{};
  for (const auto& e : est) {
    const auto tier = static_cast<std::size_t>(t.samples[e.sample_index].tier);
    sum[tier] += e.r_bar;
    cnt[tier] += 1;
  }
  EXPECT_LT(sum[2] / cnt[2], sum[0] / cnt[0]);
}

TEST(TrainOnScheduleTest, DeterministicAndRejectsEmpty) {
  const SyntheticTask t = GenerateTask(TaskOptions{});
  const std::vector<std::vector<std::size_t>> groups = {{0, 1, 2, 3}, {4, 5, 6}};
  GrpoOptions o;
  o.steps = 8;
  EXPECT_EQ(TrainOnSchedule(t, groups, o, 2), TrainOnSchedule(t, groups, o, 2));
  EXPECT_NE(CodeOf([&] { TrainOnSchedule(t, {}, o, 2); }), ErrorCode::kInternal);
}

TEST(SurrogateDirectionTest, ShapeAndFinite) {
  const SyntheticTask t = GenerateTask(TaskOptions{});
  const Vector d = SurrogateDirection(InitialPolicy(t), t.samples[0]);
  EXPECT_EQ(d.size(), t.item_count * t.context_dim);
  EXPECT_TRUE(AllFinite(d));
  EXPECT_GT(Norm(d), 0.0);
}

TEST(DeriveSeedTest, DistinctStreams) {
  EXPECT_EQ(DeriveSeed(1, 2, 3), DeriveSeed(1, 2, 3));
  EXPECT_NE(DeriveSeed(1, 2, 3), DeriveSeed(1, 3, 2));
  EXPECT_NE(DeriveSeed(1, 2), DeriveSeed(2, 2));
}

}  // namespace
}  // namespace rlsubset
