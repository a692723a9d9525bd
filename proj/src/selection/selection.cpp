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

#include "flowseg/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "flowseg/error.hpp"

namespace flowseg {

double ScoredMask::combined_score() const noexcept {
  return mos ? (*mos + fiou) / 2.0 : fiou;
}

double ScoredMask::score(ScoreMode mode) const noexcept {
  return mode == ScoreMode::kFiou ? fiou : combined_score();
}

std::vector<Mask> FrameMasks::masks() const {
  std::vector<Mask> out;
  out.reserve(objects.size());
  for (const auto& o : objects) out.push_back(o.mask);
  return out;
}

bool FrameMasks::disjoint() const {
  for (std::size_t i = 0; i < objects.size(); ++i) {
    for (std::size_t j = i + 1; j < objects.size(); ++j) {
      if (objects[i].mask.intersection_area(objects[j].mask) != 0) return false;
    }
  }
  return true;
}

SelectionConfig SelectionConfig::flow_only() { return SelectionConfig{}; }

SelectionConfig SelectionConfig::rgb_based() {
  SelectionConfig c;
  c.top_n = 10;
  c.score_mode = ScoreMode::kMeanFiouMos;
  return c;
}

void SelectionConfig::validate() const {
  if (!(nms_iou_threshold > 0.0 && nms_iou_threshold <= 1.0)) {
    fail(ErrorCode::kParameter, "nms_iou_threshold must lie in (0, 1]");
  }
  if (top_n < 1) fail(ErrorCode::kParameter, "top_n must be positive");
}

std::vector<ScoredMask> nms(const CandidateSet& candidates, const SelectionConfig& config) {
  config.validate();
  const auto& cands = candidates.candidates;
  for (std::size_t i = 1; i < cands.size(); ++i) {
    if (cands[i].mask.height() != cands[0].mask.height() ||
        cands[i].mask.width() != cands[0].mask.width()) {
      fail(ErrorCode::kShape, "candidate masks differ in size");
    }
  }

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (cands[i].mask.empty()) continue;
    if (cands[i].score(config.score_mode) < config.score_floor) continue;
    order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return cands[a].score(config.score_mode) > cands[b].score(config.score_mode);
  });

  std::vector<ScoredMask> kept;
  for (std::size_t idx : order) {
    const Mask& m = cands[idx].mask;
    const bool clear = std::all_of(kept.begin(), kept.end(), [&](const ScoredMask& k) {
      return iou(k.mask, m) < config.nms_iou_threshold;
    });
    if (clear) {
      kept.push_back(cands[idx]);
      kept.back().layer_rank = static_cast<int>(kept.size()) - 1;
    }
  }
  return kept;
}

std::vector<Mask> remove_overlaps(std::vector<Mask> masks) {
  if (masks.empty()) return masks;
  Mask owned(masks.front().height(), masks.front().width());
  for (auto& m : masks) {
    m.subtract(owned);
    owned |= m;
  }
  return masks;
}

FrameMasks select_frame(const CandidateSet& candidates, const SelectionConfig& config,
                        int frame_index) {
  std::vector<ScoredMask> kept = nms(candidates, config);
  // nms output is already in descending score order.
  if (kept.size() > static_cast<std::size_t>(config.top_n)) {
    kept.resize(static_cast<std::size_t>(config.top_n));
  }
  FrameMasks out;
  out.frame_index = frame_index;
  if (kept.empty()) return out;

  Mask owned(kept.front().mask.height(), kept.front().mask.width());
  for (auto& obj : kept) {
    obj.mask.subtract(owned);
    owned |= obj.mask;
    if (obj.mask.empty()) continue;
    obj.layer_rank = static_cast<int>(out.objects.size());
    out.objects.push_back(std::move(obj));
  }
  return out;
}

FrameMasks combine_predictions(const FrameMasks& front, const FrameMasks& back) {
  FrameMasks out;
  out.frame_index = front.frame_index;
  out.objects = front.objects;
  const ScoredMask* ref = !front.objects.empty() ? &front.objects.front()
                          : !back.objects.empty() ? &back.objects.front()
                                                  : nullptr;
  if (ref == nullptr) return out;

  Mask owned(ref->mask.height(), ref->mask.width());
  for (const auto& o : front.objects) owned |= o.mask;
  for (const auto& o : back.objects) {
    ScoredMask b = o;
    b.mask.subtract(owned);
    if (b.mask.empty()) continue;
    owned |= b.mask;
    out.objects.push_back(std::move(b));
  }
  for (std::size_t i = 0; i < out.objects.size(); ++i) out.objects[i].layer_rank = static_cast<int>(i);
  return out;
}

namespace {

void require_prompt_inside(Pixel prompt, const FrameMasks& gt, const Mask* reference) {
  const Mask* m = reference;
  if (m == nullptr && !gt.objects.empty()) m = &gt.objects.front().mask;
  if (m == nullptr) {
    if (prompt.x < 0 || prompt.y < 0) fail(ErrorCode::kParameter, "prompt outside frame");
    return;
  }
  if (!m->contains(prompt.x, prompt.y)) {
    fail(ErrorCode::kParameter, "prompt (" + std::to_string(prompt.x) + "," +
                                    std::to_string(prompt.y) + ") outside frame");
  }
}

const ScoredMask* object_at(Pixel prompt, const FrameMasks& gt) {
  for (const auto& o : gt.objects) {
    if (o.mask.get(prompt.x, prompt.y)) return &o;
  }
  return nullptr;
}

}  // namespace

double fiou_target(const Mask& prediction, Pixel prompt, const FrameMasks& gt) {
  require_prompt_inside(prompt, gt, &prediction);
  const ScoredMask* obj = object_at(prompt, gt);
  return obj == nullptr ? 0.0 : iou(prediction, obj->mask);
}

int mos_target(Pixel prompt, const FrameMasks& gt) {
  require_prompt_inside(prompt, gt, nullptr);
  return object_at(prompt, gt) != nullptr ? 1 : 0;
}

std::vector<Pixel> grid_prompts(int height, int width, int side) {
  if (side < 1) fail(ErrorCode::kParameter, "grid side must be at least 1");
  if (side > height || side > width) {
    fail(ErrorCode::kParameter, "grid side " + std::to_string(side) + " exceeds frame size");
  }
  std::vector<Pixel> points;
  points.reserve(static_cast<std::size_t>(side) * static_cast<std::size_t>(side));
  for (int i = 0; i < side; ++i) {
    // Integer form of floor((i + 0.5) * extent / side).
    const int y = static_cast<int>((2LL * i + 1) * height / (2LL * side));
    for (int j = 0; j < side; ++j) {
      const int x = static_cast<int>((2LL * j + 1) * width / (2LL * side));
      points.push_back({x, y});
    }
  }
  return points;
}

}  // namespace flowseg
