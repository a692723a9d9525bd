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
#include <random>
#include <string>
#include <vector>

#include "flowseg/association.hpp"
#include "flowseg/evaluation.hpp"
#include "flowseg/flow.hpp"
#include "flowseg/selection.hpp"

namespace flowseg {

// Portable seeded generator: mt19937_64 output is fully specified, and the
// derived draws below avoid the implementation-defined std distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  double uniform01();                  // [0, 1)
  int uniform_int(int lo, int hi);     // inclusive
  bool bernoulli(double p);

 private:
  std::mt19937_64 engine_;
};

enum class ShapeKind { kRect, kEllipse };

struct ObjectSpec {
  ShapeKind shape = ShapeKind::kRect;
  int width = 16;   // bounding-box size in pixels
  int height = 16;
  int x = 0;        // top-left at frame 0
  int y = 0;
  int vx = 0;       // pixels per frame
  int vy = 0;
  int depth = 0;    // smaller is nearer the camera
};

struct CorruptionSpec {
  double id_permute_prob = 0.0;
  double dropout_prob = 0.0;
  int jitter_px = 0;
  // Chance of emitting an extra, slightly shifted lower-scored candidate per
  // object (exercises NMS in the candidate export).
  double duplicate_prob = 0.0;

  void validate() const;
};

struct SceneSpec {
  std::uint64_t seed = 0;
  int height = 96;
  int width = 128;
  int num_frames = 20;
  std::vector<ObjectSpec> objects;
  int background_vx = 0;
  int background_vy = 0;
  CorruptionSpec corruption;
  FlowGapSet gaps;

  void validate() const;
};

// Random scene whose objects stay fully inside the frame for every frame.
SceneSpec random_scene(std::uint64_t seed, int num_objects, int num_frames, int height = 96,
                       int width = 128, int max_speed = 2);

struct RenderedScene {
  SequenceTracks gt;                  // visible masks, layer_order = depth rank
  ObjectFrames raster;                // unoccluded, frame-clipped silhouettes
  MemoryFlowSource flows;             // every (frame, gap) in spec.gaps in range
  std::vector<std::string> warnings;  // objects clipped by the frame border
};

RenderedScene render(const SceneSpec& spec);

struct CorruptionEvent {
  int frame = 0;
  std::string kind;  // "dropout", "jitter", "permute", "duplicate"
  int object = -1;
  std::vector<int> detail;  // jitter (dx, dy) or the permutation
};

struct CorruptedSequence {
  std::vector<FrameMasks> frames;          // layered, identities scrambled
  std::vector<CandidateSet> candidates;    // raw per-frame candidates
  std::vector<CorruptionEvent> log;
};

// Per-frame independent corruption of ground truth. Scores are the fIoU of
// each emitted mask against its source object; MOS is 1.
CorruptedSequence corrupt(const SequenceTracks& gt, const CorruptionSpec& spec, std::uint64_t seed);

}  // namespace flowseg
