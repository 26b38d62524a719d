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

#include "rlsubset/pipeline.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rlsubset/io.h"

namespace rlsubset {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void ConfigError(const std::string& pointer,
                              const std::string& message) {
  Fail(ErrorCode::kConfig, pointer + ": " + message);
}

void CheckKeys(const json& obj, const std::string& pointer,
               const std::set<std::string>& allowed) {
  if (!obj.is_object()) ConfigError(pointer.empty() ? "/" : pointer, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) ConfigError(pointer + "/" + key, "unknown field");
  }
}

void ReadCount(const json& obj, const std::string& pointer, const char* key,
               std::size_t& out) {
  if (!obj.contains(key)) return;
  const json& v = obj[key];
  if (!v.is_number_unsigned()) {
    ConfigError(pointer + "/" + key, "expected a non-negative integer");
  }
  out = v.get<std::size_t>();
}

void ReadSeed(const json& obj, const std::string& pointer, const char* key,
              std::uint64_t& out) {
  if (!obj.contains(key)) return;
  const json& v = obj[key];
  if (!v.is_number_unsigned()) {
    ConfigError(pointer + "/" + key, "expected a non-negative integer");
  }
  out = v.get<std::uint64_t>();
}

void ReadReal(const json& obj, const std::string& pointer, const char* key,
              double& out) {
  if (!obj.contains(key)) return;
  const json& v = obj[key];
  if (!v.is_number()) ConfigError(pointer + "/" + key, "expected a number");
  out = v.get<double>();
}

void Require(bool ok, const std::string& pointer, const char* message) {
  if (!ok) ConfigError(pointer, message);
}

void ReadGrpo(const json& root, const std::string& pointer, GrpoOptions& out,
              bool with_subset, std::size_t* subset_size) {
  if (!root.contains(pointer.substr(1))) return;
  const json& obj = root[pointer.substr(1)];
  std::set<std::string> allowed = {"steps",         "batch_size",
                                   "N",             "learning_rate",
                                   "epsilon_clip",  "update_epochs"};
  if (with_subset) allowed.insert("subset_size");
  CheckKeys(obj, pointer, allowed);
  if (with_subset) ReadCount(obj, pointer, "subset_size", *subset_size);
  ReadCount(obj, pointer, "steps", out.steps);
  ReadCount(obj, pointer, "batch_size", out.batch_size);
  ReadCount(obj, pointer, "N", out.rollouts);
  ReadReal(obj, pointer, "learning_rate", out.learning_rate);
  ReadReal(obj, pointer, "epsilon_clip", out.epsilon_clip);
  ReadCount(obj, pointer, "update_epochs", out.update_epochs);
  Require(out.batch_size >= 1, pointer + "/batch_size", "must be >= 1");
  Require(out.rollouts >= 2, pointer + "/N", "must be >= 2");
  Require(out.learning_rate > 0.0 && std::isfinite(out.learning_rate),
          pointer + "/learning_rate", "must be > 0");
  Require(out.epsilon_clip > 0.0 && out.epsilon_clip < 1.0,
          pointer + "/epsilon_clip", "must be in (0, 1)");
  Require(out.update_epochs >= 1, pointer + "/update_epochs", "must be >= 1");
  if (with_subset) {
    Require(*subset_size >= 1, pointer + "/subset_size", "must be >= 1");
  }
}

json GrpoToJson(const GrpoOptions& o) {
  return {{"steps", o.steps},
          {"batch_size", o.batch_size},
          {"N", o.rollouts},
          {"learning_rate", o.learning_rate},
          {"epsilon_clip", o.epsilon_clip},
          {"update_epochs", o.update_epochs}};
}

json ConfigJson(const PipelineConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["task"] = {{"item_count", c.task.item_count},
               {"context_dim", c.task.context_dim},
               {"n_samples", c.task.n_samples},
               {"tier_mix",
                {c.task.tier_mix.easy, c.task.tier_mix.medium,
                 c.task.tier_mix.hard}},
               {"seed", c.task.seed},
               {"easy_signal", c.task.easy_signal},
               {"medium_signal", c.task.medium_signal},
               {"base_scale", c.task.base_scale}};
  json proxy = GrpoToJson(c.proxy);
  proxy["subset_size"] = c.proxy_subset_size;
  j["proxy"] = std::move(proxy);
  j["scoring"] = {{"mu", c.scoring.mu},
                  {"sigma", c.scoring.sigma},
                  {"lambda", c.scoring.lambda},
                  {"with_representativeness", c.with_representativeness}};
  j["selection"] = {{"mode", SelectionModeName(c.mode)}, {"m", c.m}};
  j["curriculum"] = {{"K", c.k}, {"seed", c.curriculum_seed}};
  j["train"] = GrpoToJson(c.train);
  j["eval"] = {{"heldout_fraction", c.heldout_fraction}, {"eval_N", c.eval_n}};
  return j;
}

template <typename T>
json TierObject(const std::array<T, kNumTiers>& v) {
  return {{"easy", v[0]}, {"medium", v[1]}, {"hard", v[2]}};
}

// Runs one stage, prefixing any error with the stage name.
template <typename Fn>
auto Stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    Fail(e.code(), std::string("stage ") + name + ": " + e.what());
  }
}

std::vector<std::size_t> IndicesFor(const PreparedData& data,
                                    const std::vector<std::string>& ids) {
  std::map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < data.pool.size(); ++i) {
    by_id.emplace(data.task.samples[data.pool[i]].id, data.pool[i]);
  }
  std::vector<std::size_t> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(by_id.at(id));
  return out;
}

}  // namespace

PipelineConfig::PipelineConfig() {
  proxy.steps = 150;
  proxy.batch_size = 16;
  proxy.rollouts = 8;
  proxy.learning_rate = 1.0;
  proxy.epsilon_clip = 0.2;
  proxy.update_epochs = 2;
  train = proxy;
}

PipelineConfig ParsePipelineConfig(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kConfig, std::string("/: malformed JSON: ") + e.what());
  }
  PipelineConfig c;
  CheckKeys(root, "", {"seed", "task", "proxy", "scoring", "selection",
                       "curriculum", "train", "eval"});
  ReadSeed(root, "", "seed", c.seed);

  if (root.contains("task")) {
    const json& t = root["task"];
    CheckKeys(t, "/task", {"item_count", "context_dim", "n_samples", "tier_mix",
                           "seed", "easy_signal", "medium_signal",
                           "base_scale"});
    ReadCount(t, "/task", "item_count", c.task.item_count);
    ReadCount(t, "/task", "context_dim", c.task.context_dim);
    ReadCount(t, "/task", "n_samples", c.task.n_samples);
    ReadSeed(t, "/task", "seed", c.task.seed);
    ReadReal(t, "/task", "easy_signal", c.task.easy_signal);
    ReadReal(t, "/task", "medium_signal", c.task.medium_signal);
    ReadReal(t, "/task", "base_scale", c.task.base_scale);
    if (t.contains("tier_mix")) {
      const json& mix = t["tier_mix"];
      if (!mix.is_array() || mix.size() != 3) {
        ConfigError("/task/tier_mix", "expected [easy, medium, hard]");
      }
      double* slots[] = {&c.task.tier_mix.easy, &c.task.tier_mix.medium,
                         &c.task.tier_mix.hard};
      for (std::size_t i = 0; i < 3; ++i) {
        const std::string ptr = "/task/tier_mix/" + std::to_string(i);
        if (!mix[i].is_number()) ConfigError(ptr, "expected a number");
        *slots[i] = mix[i].get<double>();
        Require(*slots[i] >= 0.0, ptr, "must be >= 0");
      }
      const double sum =
          c.task.tier_mix.easy + c.task.tier_mix.medium + c.task.tier_mix.hard;
      Require(std::abs(sum - 1.0) <= 1e-9, "/task/tier_mix", "must sum to 1");
    }
    Require(c.task.item_count >= 2, "/task/item_count", "must be >= 2");
    Require(c.task.context_dim >= 1, "/task/context_dim", "must be >= 1");
    Require(c.task.n_samples >= 2, "/task/n_samples", "must be >= 2");
  }

  ReadGrpo(root, "/proxy", c.proxy, true, &c.proxy_subset_size);
  ReadGrpo(root, "/train", c.train, false, nullptr);

  if (root.contains("scoring")) {
    const json& s = root["scoring"];
    CheckKeys(s, "/scoring", {"mu", "sigma", "lambda", "with_representativeness"});
    ReadReal(s, "/scoring", "mu", c.scoring.mu);
    ReadReal(s, "/scoring", "sigma", c.scoring.sigma);
    ReadReal(s, "/scoring", "lambda", c.scoring.lambda);
    if (s.contains("with_representativeness")) {
      if (!s["with_representativeness"].is_boolean()) {
        ConfigError("/scoring/with_representativeness", "expected a boolean");
      }
      c.with_representativeness = s["with_representativeness"].get<bool>();
    }
    Require(c.scoring.sigma > 0.0, "/scoring/sigma", "must be > 0");
    Require(c.scoring.lambda >= 0.0, "/scoring/lambda", "must be >= 0");
  }

  if (root.contains("selection")) {
    const json& s = root["selection"];
    CheckKeys(s, "/selection", {"mode", "m"});
    if (s.contains("mode")) {
      if (!s["mode"].is_string()) ConfigError("/selection/mode", "expected a string");
      const std::string mode = s["mode"].get<std::string>();
      if (mode != "minirec" && mode != "random") {
        ConfigError("/selection/mode", "expected \"minirec\" or \"random\"");
      }
      c.mode = ParseSelectionMode(mode);
    }
    ReadCount(s, "/selection", "m", c.m);
    Require(c.m >= 1, "/selection/m", "must be >= 1");
  }

  if (root.contains("curriculum")) {
    const json& s = root["curriculum"];
    CheckKeys(s, "/curriculum", {"K", "seed"});
    ReadCount(s, "/curriculum", "K", c.k);
    ReadSeed(s, "/curriculum", "seed", c.curriculum_seed);
    Require(c.k >= 1, "/curriculum/K", "must be >= 1");
    Require(c.k <= c.m, "/curriculum/K", "must not exceed selection m");
  }

  if (root.contains("eval")) {
    const json& s = root["eval"];
    CheckKeys(s, "/eval", {"heldout_fraction", "eval_N"});
    ReadReal(s, "/eval", "heldout_fraction", c.heldout_fraction);
    ReadCount(s, "/eval", "eval_N", c.eval_n);
    Require(c.heldout_fraction > 0.0 && c.heldout_fraction < 1.0,
            "/eval/heldout_fraction", "must be in (0, 1)");
    Require(c.eval_n >= 2, "/eval/eval_N", "must be >= 2");
  }
  return c;
}

std::string PipelineConfigToJson(const PipelineConfig& config) {
  return ConfigJson(config).dump(2) + "\n";
}

std::string DescribeStagePlan(const PipelineConfig& c) {
  std::ostringstream out;
  const auto heldout = static_cast<std::size_t>(
      std::floor(c.task.n_samples * c.heldout_fraction + 0.5));
  out << "1. generate_task     items=" << c.task.item_count
      << " dim=" << c.task.context_dim << " n=" << c.task.n_samples
      << " seed=" << c.task.seed << "\n"
      << "2. split             heldout=" << heldout
      << " pool=" << c.task.n_samples - heldout << "\n"
      << "3. train_proxy       subset=" << c.proxy_subset_size
      << " steps=" << c.proxy.steps << " N=" << c.proxy.rollouts << "\n"
      << "4. estimate_rewards  N=" << c.proxy.rollouts << "\n"
      << "5. score             mu=" << c.scoring.mu << " sigma=" << c.scoring.sigma
      << " representativeness=" << (c.with_representativeness ? "on" : "off")
      << "\n"
      << "6. select            mode=" << SelectionModeName(c.mode) << " m=" << c.m
      << " lambda=" << c.scoring.lambda << "\n"
      << "7. schedule          K=" << c.k << " seed=" << c.curriculum_seed << "\n"
      << "8. train_final       steps=" << c.train.steps << " N=" << c.train.rollouts
      << "\n"
      << "9. evaluate          eval_N=" << c.eval_n << "\n";
  return out.str();
}

PreparedData PrepareData(const PipelineConfig& config) {
  PreparedData data;
  data.task = Stage("generate_task", [&] { return GenerateTask(config.task); });

  Stage("split", [&] {
    const std::size_t n = data.task.samples.size();
    const auto n_heldout = static_cast<std::size_t>(
        std::floor(static_cast<double>(n) * config.heldout_fraction + 0.5));
    if (n_heldout == 0 || n_heldout >= n) {
      Fail(ErrorCode::kParameter, "held-out split leaves an empty side");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(DeriveSeed(config.seed, 10));
    std::shuffle(order.begin(), order.end(), rng);
    data.heldout.assign(order.begin(), order.begin() + static_cast<long>(n_heldout));
    data.pool.assign(order.begin() + static_cast<long>(n_heldout), order.end());
    std::sort(data.heldout.begin(), data.heldout.end());
    std::sort(data.pool.begin(), data.pool.end());
    return 0;
  });

  data.proxy = Stage("train_proxy", [&] {
    return TrainProxy(data.task, data.pool, config.proxy_subset_size,
                      config.proxy, DeriveSeed(config.seed, 11));
  });
  const Policy fresh = InitialPolicy(data.task);
  data.pool_expected_reward_before = ExpectedReward(fresh, data.task, data.pool);
  data.pool_expected_reward_after = ExpectedReward(data.proxy, data.task, data.pool);

  data.dataset = Stage("estimate_rewards", [&] {
    const auto estimates =
        EstimateRewards(data.proxy, data.task, data.pool, config.proxy.rollouts,
                        DeriveSeed(config.seed, 12));
    std::vector<SampleRecord> records;
    records.reserve(estimates.size());
    for (const auto& est : estimates) {
      const TaskSample& s = data.task.samples[est.sample_index];
      SampleRecord rec;
      rec.id = s.id;
      rec.rollout_rewards = est.rewards;
      rec.features = s.context;
      if (config.with_representativeness) {
        rec.grad = SurrogateDirection(data.proxy, s);
      }
      rec.meta["tier"] = TierName(s.tier);
      rec.meta["target"] = std::to_string(s.target);
      records.push_back(std::move(rec));
    }
    return MakeDataset(std::move(records));
  });

  data.scores = Stage("score", [&] {
    ScoringParams params = config.scoring;
    return BuildScoreTable(data.dataset, params, config.with_representativeness);
  });
  return data;
}

PipelineOutcome FinishPipeline(const PipelineConfig& config,
                               const PreparedData& data) {
  PipelineOutcome out;
  out.manifest = Stage("select", [&] {
    if (config.mode == SelectionMode::kRandom) {
      SubsetManifest m =
          RandomSelect(data.dataset, config.m, DeriveSeed(config.seed, 13));
      m.lambda = config.scoring.lambda;
      return m;
    }
    GreedyOptions opts;
    opts.m = config.m;
    opts.lambda = config.scoring.lambda;
    opts.require_representativeness = config.with_representativeness;
    return GreedySelect(data.dataset, data.scores, opts);
  });

  out.schedule = Stage("schedule", [&] {
    std::map<std::string, double> r_bar;
    for (const auto& s : data.scores.samples) r_bar[s.id] = s.r_bar;
    return BuildSchedule(out.manifest, r_bar, config.k, config.curriculum_seed);
  });

  out.final_policy = Stage("train_final", [&] {
    std::vector<std::vector<std::size_t>> groups;
    for (const auto& g : out.schedule.groups) groups.push_back(IndicesFor(data, g));
    return TrainOnSchedule(data.task, groups, config.train,
                           DeriveSeed(config.seed, 14));
  });

  Stage("evaluate", [&] {
    const auto est = EstimateRewards(out.final_policy, data.task, data.heldout,
                                     config.eval_n, DeriveSeed(config.seed, 15));
    double sum = 0.0;
    for (const auto& e : est) sum += e.r_bar;
    out.heldout_mean_reward = sum / static_cast<double>(est.size());
    out.heldout_expected_reward =
        ExpectedReward(out.final_policy, data.task, data.heldout);
    return 0;
  });
  return out;
}

std::array<double, kNumTiers> MeanByTier(const PreparedData& data,
                                         const std::vector<double>& values) {
  std::array<double, kNumTiers> sum{};
  std::array<std::size_t, kNumTiers> count{};
  for (std::size_t i = 0; i < data.pool.size() && i < values.size(); ++i) {
    const auto t = static_cast<std::size_t>(data.task.samples[data.pool[i]].tier);
    sum[t] += values[i];
    ++count[t];
  }
  for (std::size_t t = 0; t < kNumTiers; ++t) {
    sum[t] = count[t] ? sum[t] / static_cast<double>(count[t]) : 0.0;
  }
  return sum;
}

std::string RunPipeline(const PipelineConfig& config,
                        const std::string& out_dir) {
  const PreparedData data = PrepareData(config);
  const PipelineOutcome out = FinishPipeline(config, data);

  json report;
  report["config"] = ConfigJson(config);

  std::array<std::size_t, kNumTiers> tier_counts{};
  for (std::size_t idx : data.pool) {
    tier_counts[static_cast<std::size_t>(data.task.samples[idx].tier)] += 1;
  }
  report["task"] = {{"n_samples", data.task.samples.size()},
                    {"pool_size", data.pool.size()},
                    {"heldout_size", data.heldout.size()},
                    {"pool_tier_counts", TierObject(tier_counts)}};
  report["proxy"] = {
      {"subset_size", config.proxy_subset_size},
      {"steps", config.proxy.steps},
      {"pool_expected_reward_before", data.pool_expected_reward_before},
      {"pool_expected_reward_after", data.pool_expected_reward_after}};

  std::vector<double> r_bar, l, l_norm;
  for (const auto& s : data.scores.samples) {
    r_bar.push_back(s.r_bar);
    l.push_back(s.l);
    l_norm.push_back(s.l_norm);
  }
  report["rewards"] = {{"mean_r_bar_by_tier", TierObject(MeanByTier(data, r_bar))}};
  report["scoring"] = {
      {"with_representativeness", data.scores.has_representativeness()},
      {"mean_l_by_tier", TierObject(MeanByTier(data, l))},
      {"mean_l_norm_by_tier", TierObject(MeanByTier(data, l_norm))}};

  std::map<std::string, Tier> tier_of;
  for (std::size_t idx : data.pool) {
    tier_of[data.task.samples[idx].id] = data.task.samples[idx].tier;
  }
  std::array<std::size_t, kNumTiers> picked{};
  for (const auto& p : out.manifest.picks) {
    picked[static_cast<std::size_t>(tier_of.at(p.id))] += 1;
  }
  report["selection"] = {{"mode", SelectionModeName(out.manifest.mode)},
                         {"m", out.manifest.m},
                         {"tier_counts", TierObject(picked)}};
  json sizes = json::array();
  for (const auto& g : out.schedule.groups) sizes.push_back(g.size());
  report["curriculum"] = {{"K", out.schedule.k}, {"group_sizes", sizes}};
  report["final"] = {{"train_steps", config.train.steps},
                     {"heldout_mean_reward", out.heldout_mean_reward},
                     {"heldout_expected_reward", out.heldout_expected_reward}};

  if (!out_dir.empty()) {
    Stage("write_artifacts", [&] {
      std::error_code ec;
      std::filesystem::create_directories(out_dir, ec);
      if (ec) Fail(ErrorCode::kIo, "cannot create '" + out_dir + "'");
      const std::filesystem::path dir(out_dir);
      WriteDataset(data.dataset, (dir / "dataset.jsonl").string());
      WriteFile((dir / "scores.json").string(), ScoreTableToJson(data.scores));
      WriteFile((dir / "manifest.json").string(), ManifestToJson(out.manifest));
      WriteFile((dir / "schedule.json").string(), ScheduleToJson(out.schedule));
      WriteFile((dir / "schedule.txt").string(), ScheduleToText(out.schedule));
      return 0;
    });
    report["artifacts"] = {{"dataset", "dataset.jsonl"},
                           {"scores", "scores.json"},
                           {"manifest", "manifest.json"},
                           {"schedule", "schedule.json"},
                           {"schedule_text", "schedule.txt"},
                           {"report", "report.json"}};
  }
  std::string text = report.dump(2) + "\n";
  if (!out_dir.empty()) {
    WriteFile((std::filesystem::path(out_dir) / "report.json").string(), text);
  }
  return text;
}

double SignTestPValue(std::size_t wins, std::size_t trials) {
  if (trials == 0 || wins == 0) return 1.0;
  // P(X = x), X ~ Binomial(trials, 1/2), in log space.
  auto pmf = [trials](std::size_t x) {
    return std::exp(std::lgamma(trials + 1.0) - std::lgamma(x + 1.0) -
                    std::lgamma(trials - x + 1.0) -
                    static_cast<double>(trials) * std::log(2.0));
  };
  // Sum whichever tail is shorter so small p-values keep their precision.
  double p = 0.0;
  if (2 * wins > trials) {
    for (std::size_t x = wins; x <= trials; ++x) p += pmf(x);
  } else {
    for (std::size_t x = 0; x < wins; ++x) p += pmf(x);
    p = 1.0 - p;
  }
  return std::clamp(p, 0.0, 1.0);
}

PairedSummary RunPairedComparison(const PipelineConfig& base,
                                  const std::vector<std::uint64_t>& seeds) {
  PairedSummary summary;
  double total_diff = 0.0;
  for (std::uint64_t seed : seeds) {
    PipelineConfig cfg = base;
    cfg.seed = seed;
    cfg.task.seed = seed;
    cfg.curriculum_seed = seed;
    const PreparedData data = PrepareData(cfg);

    PairedRow row;
    row.seed = seed;
    std::vector<double> l;
    for (const auto& s : data.scores.samples) l.push_back(s.l);
    row.mean_l = MeanByTier(data, l);

    cfg.mode = SelectionMode::kMiniRec;
    row.minirec = FinishPipeline(cfg, data).heldout_mean_reward;
    cfg.mode = SelectionMode::kRandom;
    row.random = FinishPipeline(cfg, data).heldout_mean_reward;

    const double diff = row.minirec - row.random;
    total_diff += diff;
    if (diff > 0) {
      ++summary.wins;
    } else if (diff < 0) {
      ++summary.losses;
    } else {
      ++summary.ties;
    }
    if (row.mean_l[1] > row.mean_l[0] && row.mean_l[1] > row.mean_l[2]) {
      ++summary.medium_l_highest;
    }
    summary.rows.push_back(row);
  }
  if (!seeds.empty()) {
    summary.mean_improvement = total_diff / static_cast<double>(seeds.size());
  }
  summary.sign_test_p = SignTestPValue(summary.wins, summary.wins + summary.losses);
  return summary;
}

std::string PairedSummaryToJson(const PairedSummary& summary) {
  json j;
  json rows = json::array();
  for (const auto& r : summary.rows) {
    rows.push_back({{"seed", r.seed},
                    {"minirec", r.minirec},
                    {"random", r.random},
                    {"improvement", r.minirec - r.random},
                    {"mean_l_by_tier", TierObject(r.mean_l)}});
  }
  j["rows"] = std::move(rows);
  j["wins"] = summary.wins;
  j["losses"] = summary.losses;
  j["ties"] = summary.ties;
  j["mean_improvement"] = summary.mean_improvement;
  j["sign_test_p"] = summary.sign_test_p;
  j["medium_l_highest"] = summary.medium_l_highest;
  return j.dump(2) + "\n";
}

}  // namespace rlsubset
