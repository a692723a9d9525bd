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

#include <optional>
#include <vector>

#include "flowseg/mask.hpp"

namespace flowseg {

enum class ScoreMode {
  kFiou,          // flow-only model: fIoU alone
  kMeanFiouMos,   // RGB + flow model: (MOS + fIoU) / 2
};

struct ScoredMask {
  Mask mask;
  double fiou = 0.0;
  std::optional<double> mos;
  int layer_rank = 0;  // 0 is frontmost

  // (mos + fiou) / 2 when mos is present, else fiou.
  double combined_score() const noexcept;
  double score(ScoreMode mode) const noexcept;
};

// Frame-level prediction: objects in layer order, front first.
struct FrameMasks {
  int frame_index = 0;
  std::vector<ScoredMask> objects;

  std::vector<Mask> masks() const;
  bool disjoint() const;
};

struct CandidateSet {
  std::vector<ScoredMask> candidates;
  int grid_side = 10;
};

struct SelectionConfig {
  double nms_iou_threshold = 0.5;
  int top_n = 5;
  ScoreMode score_mode = ScoreMode::kFiou;
  // Candidates scoring strictly below this are dropped before NMS.
  double score_floor = 0.0;

  static SelectionConfig flow_only();  // top 5, fIoU
  static SelectionConfig rgb_based();  // top 10, mean of fIoU and MOS
  void validate() const;
};

// Greedy suppression in descending score order (ties by candidate index).
// Empty and below-floor candidates are dropped first. A candidate survives iff
// its IoU with every kept mask is below the threshold.
std::vector<ScoredMask> nms(const CandidateSet& candidates, const SelectionConfig& config);

// NMS, top-n cut, layering by score and overlap removal (front owns contested
// pixels). Objects emptied by overlap removal are dropped.
FrameMasks select_frame(const CandidateSet& candidates, const SelectionConfig& config,
                        int frame_index = 0);

// Strips from each mask the pixels of all masks before it.
std::vector<Mask> remove_overlaps(std::vector<Mask> masks_front_first);

// Back objects lose pixels owned by any front object; emptied ones vanish.
FrameMasks combine_predictions(const FrameMasks& front, const FrameMasks& back);

// Training targets for one point prompt against ground-truth objects.
double fiou_target(const Mask& prediction, Pixel prompt, const FrameMasks& gt);
int mos_target(Pixel prompt, const FrameMasks& gt);

// side x side cell centres of a uniform partition, row by row.
std::vector<Pixel> grid_prompts(int height, int width, int side);

}  // namespace flowseg
