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

#include "flowseg/mask.hpp"

namespace flowseg {

// frames[t][i]: mask of object i at frame t. For ground truth and sequence
// tracks the index is a stable identity; for frame-level predictions it is
// just the per-frame layer position.
using ObjectFrames = std::vector<std::vector<Mask>>;

enum class Protocol {
  kFrame,     // identities matched independently per frame
  kSequence,  // one matching per sequence
};

// --- region and boundary measures ------------------------------------------

// One-pixel boundary map: a pixel is on the boundary when it differs from its
// right, lower or lower-right neighbour (last row/column compare along the
// edge only).
Mask boundary_map(const Mask& m);

// Disk dilation radius ceil(0.008 * image diagonal).
int boundary_tolerance(int height, int width, double bound_th = 0.008);

// Boundary F-score of one mask pair.
double boundary_f(const Mask& pred, const Mask& gt, double bound_th = 0.008);

// Mean over (object, frame) terms where the ground-truth object is present.
// pred[t][i] is compared with gt[t][i]; missing entries count as empty.
// With no ground-truth terms at all: 1 if pred is empty everywhere, else 0.
double j_measure(const ObjectFrames& pred, const ObjectFrames& gt);
double f_measure(const ObjectFrames& pred, const ObjectFrames& gt);

// --- identity matching protocols -------------------------------------------

struct Pairing {
  // gt_to_pred[t][i]: prediction index matched to GT object i at frame t, -1 if none.
  std::vector<std::vector<int>> gt_to_pred;
};

// Frame protocol: per-frame max-IoU assignment over the GT objects present.
// Sequence protocol: one assignment maximising the summed per-object mean IoU
// (mean over frames where the GT object is present).
Pairing hungarian_protocol_match(const ObjectFrames& pred, const ObjectFrames& gt,
                                 Protocol protocol);

// Reorders predictions so entry [t][i] is the match of GT object i.
ObjectFrames apply_pairing(const ObjectFrames& pred, const ObjectFrames& gt,
                           const Pairing& pairing);

struct SequenceScore {
  double j = 0.0;
  double f = 0.0;
  double jf = 0.0;
};

SequenceScore evaluate_sequence(const ObjectFrames& pred, const ObjectFrames& gt,
                                Protocol protocol);

// --- MoCA detection success rate -------------------------------------------

struct SuccessRate {
  std::vector<std::pair<double, double>> per_threshold;  // (tau, SR_tau)
  double mean = 0.0;
  int frames_evaluated = 0;
  int frames_skipped = 0;  // no GT box
};

// {0.5, 0.55, ..., 0.95}
std::vector<double> default_sr_thresholds();

// Per frame with a GT box: success iff the tight box around the union of all
// predicted masks overlaps the GT box with IoU >= tau. Empty predictions fail.
SuccessRate moca_sr(const ObjectFrames& pred, const std::map<int, BBox>& gt_boxes,
                    std::span<const double> thresholds);

// --- reference training losses ----------------------------------------------

struct ProbabilityMap {
  int height = 0;
  int width = 0;
  std::vector<double> p;  // row-major foreground probabilities in [0, 1]
};

struct LossItem {
  ProbabilityMap pred;
  Mask gt;
  double fiou = 0.0;
  double fiou_target = 0.0;
  double mos = 0.0;
  double mos_target = 0.0;
};

struct LossWeights {
  double lambda_f = 0.01;
  double lambda_m = 0.01;
};

inline constexpr double kBceEpsilon = 1e-7;

// Binary cross-entropy with log arguments floored at kBceEpsilon.
double bce(double p, double target);

// Mean over items of pixel-mean BCE(mask) + lambda_f * (fiou - target)^2.
double loss_flowi(std::span<const LossItem> items, const LossWeights& weights);
// loss_flowi plus lambda_m * BCE(mos, mos_target) per item.
double loss_flowp(std::span<const LossItem> items, const LossWeights& weights);

}  // namespace flowseg
