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

#include "rlsubset/io.h"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace rlsubset {
namespace {

using json = nlohmann::ordered_json;

json Parse(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, std::string(what) + ": " + e.what());
  }
}

// Wraps nlohmann's type/lookup errors as schema errors.
template <typename Fn>
auto Decode(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    Fail(ErrorCode::kSchema, std::string(what) + ": " + e.what());
  }
}

std::string Dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string ScoreTableToJson(const ScoreTable& table) {
  json j;
  j["params"] = {{"mu", table.params.mu},
                 {"sigma", table.params.sigma},
                 {"lambda", table.params.lambda}};
  if (table.global_direction) j["global_direction"] = *table.global_direction;
  json scores = json::object();
  for (const auto& s : table.samples) {
    json e = {{"r_bar", s.r_bar}, {"l", s.l}, {"l_norm", s.l_norm}};
    if (s.r) e["r"] = *s.r;
    if (s.r_norm) e["r_norm"] = *s.r_norm;
    scores[s.id] = std::move(e);
  }
  j["scores"] = std::move(scores);
  return Dump(j);
}

ScoreTable ScoreTableFromJson(const std::string& text) {
  const json j = Parse(text, "scores");
  return Decode("scores", [&] {
    ScoreTable t;
    const json& p = j.at("params");
    t.params.mu = p.at("mu").get<double>();
    t.params.sigma = p.at("sigma").get<double>();
    t.params.lambda = p.at("lambda").get<double>();
    if (j.contains("global_direction")) {
      t.global_direction = j.at("global_direction").get<Vector>();
    }
    for (const auto& [id, e] : j.at("scores").items()) {
      SampleScore s;
      s.id = id;
      s.r_bar = e.at("r_bar").get<double>();
      s.l = e.at("l").get<double>();
      s.l_norm = e.at("l_norm").get<double>();
      if (e.contains("r")) s.r = e.at("r").get<double>();
      if (e.contains("r_norm")) s.r_norm = e.at("r_norm").get<double>();
      if (t.global_direction.has_value() != s.r_norm.has_value()) {
        Fail(ErrorCode::kSchema,
             "scores: entry '" + id +
                 "' disagrees with the table on representativeness");
      }
      t.samples.push_back(std::move(s));
    }
    if (t.samples.empty()) Fail(ErrorCode::kSchema, "scores: no entries");
    return t;
  });
}

std::string ManifestToJson(const SubsetManifest& manifest) {
  json j;
  j["mode"] = SelectionModeName(manifest.mode);
  j["m"] = manifest.m;
  j["lambda"] = manifest.lambda;
  if (manifest.seed) j["seed"] = *manifest.seed;
  json picks = json::array();
  for (const auto& p : manifest.picks) {
    json e = {{"id", p.id}, {"step", p.step}};
    if (p.d_norm) e["d_norm"] = *p.d_norm;
    if (p.v) e["v"] = *p.v;
    picks.push_back(std::move(e));
  }
  j["picks"] = std::move(picks);
  return Dump(j);
}

SubsetManifest ManifestFromJson(const std::string& text) {
  const json j = Parse(text, "manifest");
  return Decode("manifest", [&] {
    SubsetManifest m;
    m.mode = ParseSelectionMode(j.at("mode").get<std::string>());
    m.m = j.at("m").get<std::size_t>();
    m.lambda = j.at("lambda").get<double>();
    if (j.contains("seed")) m.seed = j.at("seed").get<std::uint64_t>();
    for (const json& e : j.at("picks")) {
      Pick p;
      p.id = e.at("id").get<std::string>();
      p.step = e.at("step").get<std::size_t>();
      if (e.contains("d_norm")) p.d_norm = e.at("d_norm").get<double>();
      if (e.contains("v")) p.v = e.at("v").get<double>();
      if (p.step != m.picks.size()) {
        Fail(ErrorCode::kSchema, "manifest: step index out of order at '" +
                                     p.id + "'");
      }
      m.picks.push_back(std::move(p));
    }
    if (m.picks.size() != m.m) {
      Fail(ErrorCode::kSchema, "manifest: m does not match the pick count");
    }
    return m;
  });
}

std::string ScheduleToJson(const CurriculumSchedule& schedule) {
  json j;
  j["K"] = schedule.k;
  j["seed"] = schedule.seed;
  j["groups"] = schedule.groups;
  json rb = json::object();
  for (const auto& id : schedule.Flatten()) {
    auto it = schedule.r_bar.find(id);
    if (it != schedule.r_bar.end()) rb[id] = it->second;
  }
  j["r_bar"] = std::move(rb);
  return Dump(j);
}

CurriculumSchedule ScheduleFromJson(const std::string& text) {
  const json j = Parse(text, "schedule");
  return Decode("schedule", [&] {
    CurriculumSchedule s;
    s.k = j.at("K").get<std::size_t>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.groups = j.at("groups").get<IdGroups>();
    if (j.contains("r_bar")) {
      for (const auto& [id, v] : j.at("r_bar").items()) {
        s.r_bar[id] = v.get<double>();
      }
    }
    if (s.groups.size() != s.k) {
      Fail(ErrorCode::kSchema, "schedule: k does not match the group count");
    }
    return s;
  });
}

std::string ScheduleToText(const CurriculumSchedule& schedule) {
  if (schedule.groups.empty()) {
    Fail(ErrorCode::kValidation, "cannot emit an empty schedule");
  }
  std::ostringstream out;
  for (std::size_t g = 0; g < schedule.groups.size(); ++g) {
    out << "# group " << (g + 1) << "\n";
    for (const auto& id : schedule.groups[g]) out << id << "\n";
  }
  return out.str();
}

IdGroups ScheduleGroupsFromText(const std::string& text) {
  IdGroups groups;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# group", 0) == 0) {
      groups.emplace_back();
      continue;
    }
    if (groups.empty()) {
      Fail(ErrorCode::kParse, "schedule text: id before the first group header");
    }
    groups.back().push_back(line);
  }
  return groups;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write '" + path + "'");
  out << contents;
  if (!out) Fail(ErrorCode::kIo, "write failed for '" + path + "'");
}

}  // namespace rlsubset
