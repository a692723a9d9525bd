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

#include <cmath>
#include <string>

#include "flowseg/error.hpp"
#include "flowseg/evaluation.hpp"
#include "flowseg/log.hpp"

namespace flowseg {

std::vector<double> default_sr_thresholds() {
  std::vector<double> taus;
  for (int k = 0; k < 10; ++k) taus.push_back((50 + 5 * k) / 100.0);
  return taus;
}

SuccessRate moca_sr(const ObjectFrames& pred, const std::map<int, BBox>& gt_boxes,
                    std::span<const double> thresholds) {
  SuccessRate out;
  std::vector<int> successes(thresholds.size(), 0);
  for (std::size_t t = 0; t < pred.size(); ++t) {
    const auto box = gt_boxes.find(static_cast<int>(t));
    if (box == gt_boxes.end()) {
      ++out.frames_skipped;
      continue;
    }
    ++out.frames_evaluated;
    if (pred[t].empty()) continue;
    Mask all(pred[t].front().height(), pred[t].front().width());
    for (const auto& m : pred[t]) all |= m;
    if (all.empty()) continue;
    const double overlap = bbox_iou(tight_bbox(all), box->second);
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
      if (overlap >= thresholds[k]) ++successes[k];
    }
  }
  if (out.frames_skipped > 0) {
    logger().warn("moca_sr: {} frame(s) without a ground-truth box were skipped",
                  out.frames_skipped);
  }
  double total = 0.0;
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    const double sr = out.frames_evaluated == 0
                          ? 0.0
                          : static_cast<double>(successes[k]) / out.frames_evaluated;
    out.per_threshold.emplace_back(thresholds[k], sr);
    total += sr;
  }
  out.mean = thresholds.empty() ? 0.0 : total / static_cast<double>(thresholds.size());
  return out;
}

double bce(double p, double target) {
  if (!(p >= 0.0 && p <= 1.0)) {
    fail(ErrorCode::kParameter, "probability " + std::to_string(p) + " outside [0, 1]");
  }
  double loss = 0.0;
  if (target != 0.0) loss -= target * std::log(std::max(p, kBceEpsilon));
  if (target != 1.0) loss -= (1.0 - target) * std::log(std::max(1.0 - p, kBceEpsilon));
  return loss;
}

namespace {

double mask_bce(const LossItem& item) {
  const auto& pm = item.pred;
  if (pm.height != item.gt.height() || pm.width != item.gt.width() || pm.p.size() != item.gt.size()) {
    fail(ErrorCode::kShape, "probability map and ground-truth mask differ in size");
  }
  double sum = 0.0;
  std::size_t i = 0;
  for (int y = 0; y < pm.height; ++y) {
    for (int x = 0; x < pm.width; ++x, ++i) sum += bce(pm.p[i], item.gt.get(x, y) ? 1.0 : 0.0);
  }
  return sum / static_cast<double>(pm.p.size());
}

double flowi_term(const LossItem& item, const LossWeights& w) {
  const double diff = item.fiou - item.fiou_target;
  return mask_bce(item) + w.lambda_f * diff * diff;
}

void require_nonnegative(const LossWeights& w) {
  if (w.lambda_f < 0.0 || w.lambda_m < 0.0) fail(ErrorCode::kParameter, "loss weights must be >= 0");
}

}  // namespace

double loss_flowi(std::span<const LossItem> items, const LossWeights& weights) {
  require_nonnegative(weights);
  if (items.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& item : items) sum += flowi_term(item, weights);
  return sum / static_cast<double>(items.size());
}

double loss_flowp(std::span<const LossItem> items, const LossWeights& weights) {
  require_nonnegative(weights);
  if (items.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& item : items) {
    if (item.mos_target != 0.0 && item.mos_target != 1.0) {
      fail(ErrorCode::kParameter, "MOS targets must be binary");
    }
    sum += flowi_term(item, weights);
    if (weights.lambda_m != 0.0) sum += weights.lambda_m * bce(item.mos, item.mos_target);
  }
  return sum / static_cast<double>(items.size());
}

}  // namespace flowseg
