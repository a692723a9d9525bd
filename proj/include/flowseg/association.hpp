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

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "flowseg/flow.hpp"
#include "flowseg/mask.hpp"
#include "flowseg/selection.hpp"

namespace flowseg {

enum class AssocMode {
  kTemporalConsistency,  // update iff mean transitivity flag >= 0.5
  kHungarianOnly,        // always take the matched current mask
  kPropagationOnly,      // always warp the previous sequence mask
};

// Diagnostic override of every transitivity flag in temporal mode.
enum class FlagOverride { kNone, kAllTrue, kAllFalse };

struct AssocConfig {
  std::vector<int> deltas{1, 2, -1, -2};
  AssocMode mode = AssocMode::kTemporalConsistency;
  FlagOverride flag_override = FlagOverride::kNone;

  void validate() const;
};

enum class Decision { kUpdate, kPropagate };

struct ConsistencyRecord {
  int object = 0;
  std::vector<std::pair<int, bool>> per_delta;  // (delta t, flag), config order
  double mean = 0.0;
  Decision decision = Decision::kPropagate;
};

struct ThreewayResult {
  // m2 reordered so entry i is the m2 mask matched to m1[i] (empty if none).
  std::vector<Mask> m2_aligned;
  // Transitivity flag per m1 index.
  std::vector<bool> consistent;
};

// Three pairwise max-IoU matchings: m3 is aligned to m2, then m1 is matched
// against both m2 and the aligned m3; index i is consistent when both
// matchings pick the same position. Unmatched indices, or matches landing on a
// position with no m3 partner, are inconsistent.
ThreewayResult threeway_hungarian(std::span<const Mask> m1, std::span<const Mask> m2,
                                  std::span<const Mask> m3);

// Warps every object of `pred` along a contiguous chain of flow fields
// starting at pred's frame. Scores and ranks are carried unchanged.
FrameMasks neighbor_align(const FrameMasks& pred, std::span<const FlowField> chain);

// Flow fields carrying frame `from` onto frame `to`: the direct field if
// present, otherwise unit steps. Throws kMissingInput when neither exists.
std::vector<FlowField> flow_chain(const FlowSource& flows, int from, int to);

struct StepResult {
  std::vector<Mask> masks;      // after overlap removal in layer order
  std::vector<Mask> unlayered;  // chosen source per object, before overlap removal
  std::vector<ConsistencyRecord> records;
};

// One autoregressive update. `previous` holds the sequence masks of frame t-1,
// `flow` the gap +1 field at t-1 (may be null only in hungarian-only mode),
// `neighbors` the frame-level predictions of frame t+dt already aligned to t.
// `layer_order[i]` is object i's depth rank (0 = front).
StepResult temporal_consistency_step(std::span<const Mask> previous, const FlowField* flow,
                                     const FrameMasks& current,
                                     const std::map<int, FrameMasks>& neighbors,
                                     const AssocConfig& config,
                                     std::span<const int> layer_order);

struct SequenceTracks {
  int height = 0;
  int width = 0;
  int num_objects = 0;
  std::vector<int> layer_order;
  std::vector<std::vector<Mask>> frames;  // frames[t][i]
  std::vector<std::vector<ConsistencyRecord>> decisions;  // decisions[t], empty at t = 0

  int num_frames() const noexcept { return static_cast<int>(frames.size()); }
};

// Builds identity-consistent tracks; object count is fixed by frame 0.
SequenceTracks associate_sequence(const std::vector<FrameMasks>& frames, const FlowSource& flows,
                                  const AssocConfig& config);

}  // namespace flowseg
