// Copyright 2026 The flowseg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "flowseg/pipeline.hpp"

#include <cstdio>
#include <set>

#include <nlohmann/json.hpp>

namespace flowseg {

using nlohmann::json;

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "dataset_root", "sequences", "output_dir", "workers", "gaps", "model",
      "nms_iou_threshold", "top_n", "score_mode", "score_floor", "deltas", "assoc_mode",
      "flag_override", "protocol", "predictions_dir", "back_dir", "sr", "sr_thresholds",
      "seed", "num_sequences", "num_objects", "num_frames", "height", "width", "max_speed",
      "background_vx", "background_vy", "id_permute_prob", "dropout_prob", "jitter_px",
      "duplicate_prob", "input", "output", "fixed_radius"};
  return keys;
}

ScoreMode parse_score_mode(const std::string& s) {
  if (s == "fiou") return ScoreMode::kFiou;
  if (s == "mean_fiou_mos") return ScoreMode::kMeanFiouMos;
  fail(ErrorCode::kInvalidInput, "unknown score_mode '" + s + "'");
}

AssocMode parse_assoc_mode(const std::string& s) {
  if (s == "temporal") return AssocMode::kTemporalConsistency;
  if (s == "hungarian") return AssocMode::kHungarianOnly;
  if (s == "propagation") return AssocMode::kPropagationOnly;
  fail(ErrorCode::kInvalidInput, "unknown assoc_mode '" + s + "'");
}

FlagOverride parse_flag_override(const std::string& s) {
  if (s == "none") return FlagOverride::kNone;
  if (s == "all_true") return FlagOverride::kAllTrue;
  if (s == "all_false") return FlagOverride::kAllFalse;
  fail(ErrorCode::kInvalidInput, "unknown flag_override '" + s + "'");
}

Protocol parse_protocol(const std::string& s) {
  if (s == "frame") return Protocol::kFrame;
  if (s == "sequence") return Protocol::kSequence;
  fail(ErrorCode::kInvalidInput, "unknown protocol '" + s + "'");
}

const char* name_of(ScoreMode m) { return m == ScoreMode::kFiou ? "fiou" : "mean_fiou_mos"; }

const char* name_of(AssocMode m) {
  switch (m) {
    case AssocMode::kTemporalConsistency: return "temporal";
    case AssocMode::kHungarianOnly: return "hungarian";
    case AssocMode::kPropagationOnly: return "propagation";
  }
  return "?";
}

const char* name_of(FlagOverride f) {
  switch (f) {
    case FlagOverride::kNone: return "none";
    case FlagOverride::kAllTrue: return "all_true";
    case FlagOverride::kAllFalse: return "all_false";
  }
  return "?";
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const std::string& text) {
  json j;
  try {
    j = text.empty() ? json::object() : json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidInput, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::kInvalidInput, "config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known_keys().contains(key)) fail(ErrorCode::kInvalidInput, "unknown config key '" + key + "'");
  }

  PipelineConfig c;
  try {
    const std::string model = j.value("model", std::string("flowi"));
    if (model == "flowp") {
      c.selection = SelectionConfig::rgb_based();
    } else if (model == "flowi") {
      c.selection = SelectionConfig::flow_only();
    } else {
      fail(ErrorCode::kInvalidInput, "unknown model '" + model + "' (expected flowi or flowp)");
    }
    auto path = [&](const char* key, std::filesystem::path& dst) {
      if (j.contains(key)) dst = j[key].get<std::string>();
    };
    path("dataset_root", c.dataset_root);
    path("output_dir", c.output_dir);
    path("predictions_dir", c.predictions_dir);
    path("back_dir", c.back_dir);
    path("input", c.input);
    path("output", c.output);
    if (j.contains("sequences")) c.sequences = j["sequences"].get<std::vector<std::string>>();
    c.workers = j.value("workers", c.workers);
    if (j.contains("gaps")) c.gaps = FlowGapSet(j["gaps"].get<std::vector<int>>());
    c.selection.nms_iou_threshold = j.value("nms_iou_threshold", c.selection.nms_iou_threshold);
    c.selection.top_n = j.value("top_n", c.selection.top_n);
    if (j.contains("score_mode")) c.selection.score_mode = parse_score_mode(j["score_mode"].get<std::string>());
    c.selection.score_floor = j.value("score_floor", c.selection.score_floor);
    if (j.contains("deltas")) c.assoc.deltas = j["deltas"].get<std::vector<int>>();
    if (j.contains("assoc_mode")) c.assoc.mode = parse_assoc_mode(j["assoc_mode"].get<std::string>());
    if (j.contains("flag_override")) {
      c.assoc.flag_override = parse_flag_override(j["flag_override"].get<std::string>());
    }
    if (j.contains("protocol")) c.protocol = parse_protocol(j["protocol"].get<std::string>());
    c.sr = j.value("sr", c.sr);
    if (j.contains("sr_thresholds")) c.sr_thresholds = j["sr_thresholds"].get<std::vector<double>>();
    c.seed = j.value("seed", c.seed);
    c.num_sequences = j.value("num_sequences", c.num_sequences);
    c.num_objects = j.value("num_objects", c.num_objects);
    c.num_frames = j.value("num_frames", c.num_frames);
    c.height = j.value("height", c.height);
    c.width = j.value("width", c.width);
    c.max_speed = j.value("max_speed", c.max_speed);
    c.background_vx = j.value("background_vx", c.background_vx);
    c.background_vy = j.value("background_vy", c.background_vy);
    c.corruption.id_permute_prob = j.value("id_permute_prob", c.corruption.id_permute_prob);
    c.corruption.dropout_prob = j.value("dropout_prob", c.corruption.dropout_prob);
    c.corruption.jitter_px = j.value("jitter_px", c.corruption.jitter_px);
    c.corruption.duplicate_prob = j.value("duplicate_prob", c.corruption.duplicate_prob);
    if (j.contains("fixed_radius") && !j["fixed_radius"].is_null()) {
      c.fixed_radius = j["fixed_radius"].get<double>();
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidInput, std::string("config value has the wrong type: ") + e.what());
  } catch (const Error& e) {
    fail(ErrorCode::kInvalidInput, e.what());
  }
  if (c.workers < 1) fail(ErrorCode::kInvalidInput, "workers must be >= 1");
  try {
    c.selection.validate();
    c.assoc.validate();
    c.corruption.validate();
  } catch (const Error& e) {
    fail(ErrorCode::kInvalidInput, e.what());
  }
  return c;
}

std::string PipelineConfig::canonical_json() const {
  json j = {
      {"sequences", sequences},
      {"gaps", gaps.gaps()},
      {"nms_iou_threshold", selection.nms_iou_threshold},
      {"top_n", selection.top_n},
      {"score_mode", name_of(selection.score_mode)},
      {"score_floor", selection.score_floor},
      {"deltas", assoc.deltas},
      {"assoc_mode", name_of(assoc.mode)},
      {"flag_override", name_of(assoc.flag_override)},
      {"protocol", protocol == Protocol::kFrame ? "frame" : "sequence"},
      {"sr", sr},
      {"sr_thresholds", sr_thresholds},
      {"seed", seed},
      {"num_sequences", num_sequences},
      {"num_objects", num_objects},
      {"num_frames", num_frames},
      {"height", height},
      {"width", width},
      {"max_speed", max_speed},
      {"background_vx", background_vx},
      {"background_vy", background_vy},
      {"id_permute_prob", corruption.id_permute_prob},
      {"dropout_prob", corruption.dropout_prob},
      {"jitter_px", corruption.jitter_px},
      {"duplicate_prob", corruption.duplicate_prob},
      {"fixed_radius", fixed_radius ? json(*fixed_radius) : json(nullptr)},
  };
  return j.dump();
}

std::string PipelineConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_json()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace flowseg
