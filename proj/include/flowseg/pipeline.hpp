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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "flowseg/association.hpp"
#include "flowseg/error.hpp"
#include "flowseg/evaluation.hpp"
#include "flowseg/flow.hpp"
#include "flowseg/selection.hpp"
#include "flowseg/synth.hpp"

namespace flowseg {

// Everything a batch command needs. Built from a flat JSON object whose keys
// match the field names below (see README for the full list); unknown keys are
// rejected so typos do not silently fall back to defaults.
struct PipelineConfig {
  std::filesystem::path dataset_root;
  std::vector<std::string> sequences;  // empty: every subdirectory of the root
  std::filesystem::path output_dir;
  int workers = 1;

  FlowGapSet gaps;
  SelectionConfig selection;
  AssocConfig assoc;
  Protocol protocol = Protocol::kFrame;

  std::filesystem::path predictions_dir;  // associate / eval / combine (front) input
  std::filesystem::path back_dir;         // combine: layered behind predictions_dir
  bool sr = false;
  std::vector<double> sr_thresholds = default_sr_thresholds();

  // synth
  std::uint64_t seed = 0;
  int num_sequences = 1;
  int num_objects = 3;
  int num_frames = 20;
  int height = 96;
  int width = 128;
  int max_speed = 2;
  int background_vx = 0;
  int background_vy = 0;
  CorruptionSpec corruption;

  // flow-vis / losses
  std::filesystem::path input;
  std::filesystem::path output;
  std::optional<double> fixed_radius;

  static PipelineConfig from_json(const std::string& text);
  // Canonical JSON of the parameters that shape results. Paths and `workers`
  // are left out: they never change what a command computes.
  std::string canonical_json() const;
  // FNV-1a 64 of canonical_json(), as 16 hex digits.
  std::string hash() const;
};

// Failures of individual sequences are collected into <output>/errors.json
// and the first one (in sequence order) is rethrown after all sequences ran.
void run_select(const PipelineConfig& config);
void run_combine(const PipelineConfig& config);
void run_associate(const PipelineConfig& config);
void run_eval(const PipelineConfig& config);
void run_synth(const PipelineConfig& config);
void run_flow_vis(const PipelineConfig& config);
void run_losses(const PipelineConfig& config);

}  // namespace flowseg
