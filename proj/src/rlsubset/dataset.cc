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

#include "rlsubset/dataset.h"

#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"

namespace rlsubset {
namespace {

using json = nlohmann::ordered_json;

std::string LineTag(std::size_t line_number) {
  return "line " + std::to_string(line_number) + ": ";
}

Vector ReadNumberArray(const json& obj, const char* key,
                       std::size_t line_number) {
  const json& arr = obj.at(key);
  if (!arr.is_array()) {
    Fail(ErrorCode::kSchema,
         LineTag(line_number) + "'" + key + "' must be an array of numbers");
  }
  Vector out;
  out.reserve(arr.size());
  for (const json& v : arr) {
    if (!v.is_number()) {
      Fail(ErrorCode::kSchema,
           LineTag(line_number) + "'" + key + "' must contain only numbers");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
      Fail(ErrorCode::kValidation,
           LineTag(line_number) + "non-finite value in '" + key + "'");
    }
    out.push_back(x);
  }
  return out;
}

}  // namespace

bool Dataset::AllHaveGrad() const {
  for (const auto& r : records) {
    if (!r.grad) return false;
  }
  return !records.empty();
}

SampleRecord ParseSampleRecord(std::string_view line,
                               std::size_t line_number) {
  json obj;
  try {
    // NaN/Infinity literals are rejected by the parser itself.
    obj = json::parse(line);
  } catch (const json::out_of_range&) {
    // Literals such as 1e999 overflow to infinity.
    Fail(ErrorCode::kValidation, LineTag(line_number) + "non-finite number");
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, LineTag(line_number) + "malformed JSON: " +
                                std::string(e.what()));
  }
  if (!obj.is_object()) {
    Fail(ErrorCode::kSchema, LineTag(line_number) + "record must be an object");
  }
  for (const char* key : {"id", "rollout_rewards", "features"}) {
    if (!obj.contains(key)) {
      Fail(ErrorCode::kSchema,
           LineTag(line_number) + "missing required key '" + key + "'");
    }
  }

  SampleRecord rec;
  if (!obj["id"].is_string()) {
    Fail(ErrorCode::kSchema, LineTag(line_number) + "'id' must be a string");
  }
  rec.id = obj["id"].get<std::string>();
  if (rec.id.empty()) {
    Fail(ErrorCode::kValidation, LineTag(line_number) + "empty id");
  }
  rec.rollout_rewards = ReadNumberArray(obj, "rollout_rewards", line_number);
  if (rec.rollout_rewards.empty()) {
    Fail(ErrorCode::kValidation,
         LineTag(line_number) + "empty rollout_rewards");
  }
  rec.features = ReadNumberArray(obj, "features", line_number);
  if (rec.features.empty()) {
    Fail(ErrorCode::kValidation, LineTag(line_number) + "empty features");
  }
  if (obj.contains("grad") && !obj["grad"].is_null()) {
    rec.grad = ReadNumberArray(obj, "grad", line_number);
    if (rec.grad->empty()) {
      Fail(ErrorCode::kValidation, LineTag(line_number) + "empty grad");
    }
  }
  for (const auto& [key, value] : obj.items()) {
    if (key == "id" || key == "rollout_rewards" || key == "features" ||
        key == "grad") {
      continue;
    }
    rec.meta[key] = value.is_string() ? value.get<std::string>() : value.dump();
  }
  return rec;
}

Dataset MakeDataset(std::vector<SampleRecord> records,
                    std::string source_path) {
  if (records.empty()) Fail(ErrorCode::kValidation, "empty dataset");
  Dataset ds;
  ds.source_path = std::move(source_path);
  ds.feature_dim = records.front().features.size();
  std::set<std::string> seen;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const SampleRecord& r = records[i];
    const std::string where = "record " + std::to_string(i + 1) + ": ";
    if (r.rollout_rewards.empty()) {
      Fail(ErrorCode::kValidation, where + "empty rollout_rewards");
    }
    if (!AllFinite(r.rollout_rewards) || !AllFinite(r.features)) {
      Fail(ErrorCode::kValidation, where + "non-finite value");
    }
    if (r.features.size() != ds.feature_dim) {
      Fail(ErrorCode::kDimension,
           where + "feature dimension " + std::to_string(r.features.size()) +
               " differs from " + std::to_string(ds.feature_dim));
    }
    if (r.grad) {
      if (!AllFinite(*r.grad)) {
        Fail(ErrorCode::kValidation, where + "non-finite value in grad");
      }
      if (!ds.grad_dim) ds.grad_dim = r.grad->size();
      if (r.grad->size() != *ds.grad_dim) {
        Fail(ErrorCode::kDimension,
             where + "grad dimension " + std::to_string(r.grad->size()) +
                 " differs from " + std::to_string(*ds.grad_dim));
      }
    }
    if (!seen.insert(r.id).second) {
      Fail(ErrorCode::kValidation, where + "duplicate id '" + r.id + "'");
    }
  }
  ds.records = std::move(records);
  return ds;
}

Dataset LoadDataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open dataset '" + path + "'");

  std::vector<SampleRecord> records;
  std::string line;
  std::size_t line_number = 0;
  // Tracks the line each record came from so dimension errors can name it.
  std::vector<std::size_t> origin;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    records.push_back(ParseSampleRecord(line, line_number));
    origin.push_back(line_number);
  }
  if (records.empty()) Fail(ErrorCode::kValidation, "empty dataset");

  const std::size_t dim = records.front().features.size();
  std::optional<std::size_t> gdim;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.features.size() != dim) {
      Fail(ErrorCode::kDimension,
           LineTag(origin[i]) + "feature dimension " +
               std::to_string(r.features.size()) + " differs from " +
               std::to_string(dim));
    }
    if (r.grad) {
      if (!gdim) gdim = r.grad->size();
      if (r.grad->size() != *gdim) {
        Fail(ErrorCode::kDimension,
             LineTag(origin[i]) + "grad dimension " +
                 std::to_string(r.grad->size()) + " differs from " +
                 std::to_string(*gdim));
      }
    }
    if (!seen.insert(r.id).second) {
      Fail(ErrorCode::kValidation,
           LineTag(origin[i]) + "duplicate id '" + r.id + "'");
    }
  }
  return MakeDataset(std::move(records), path);
}

std::string SerializeSampleRecord(const SampleRecord& record) {
  json obj;
  obj["id"] = record.id;
  obj["rollout_rewards"] = record.rollout_rewards;
  obj["features"] = record.features;
  if (record.grad) obj["grad"] = *record.grad;
  for (const auto& [key, value] : record.meta) obj[key] = value;
  return obj.dump();
}

void WriteDataset(const Dataset& dataset, std::ostream& out) {
  for (const auto& r : dataset.records) out << SerializeSampleRecord(r) << '\n';
}

void WriteDataset(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIo, "cannot write dataset '" + path + "'");
  WriteDataset(dataset, out);
  if (!out) Fail(ErrorCode::kIo, "write failed for '" + path + "'");
}

double MeanReward(const SampleRecord& record) {
  if (record.rollout_rewards.empty()) {
    Fail(ErrorCode::kValidation, "empty rollout_rewards");
  }
  double sum = 0.0;
  for (double r : record.rollout_rewards) sum += r;
  return sum / static_cast<double>(record.rollout_rewards.size());
}

}  // namespace rlsubset
