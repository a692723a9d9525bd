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

#include "flowseg/association.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "flowseg/assignment.hpp"
#include "flowseg/error.hpp"
#include "flowseg/log.hpp"

namespace flowseg {

namespace {

Assignment match_max_iou(std::span<const Mask> rows, std::span<const Mask> cols) {
  return solve_assignment(iou_matrix(rows, cols), Objective::kMaximize);
}

const Mask* first_mask(std::span<const Mask> a, std::span<const Mask> b, std::span<const Mask> c) {
  for (auto s : {a, b, c}) {
    if (!s.empty()) return &s.front();
  }
  return nullptr;
}

std::vector<Mask> layered(std::vector<Mask> masks, std::span<const int> layer_order) {
  std::vector<std::size_t> order(masks.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return layer_order[a] < layer_order[b];
  });
  if (masks.empty()) return masks;
  Mask owned(masks.front().height(), masks.front().width());
  for (std::size_t i : order) {
    masks[i].subtract(owned);
    owned |= masks[i];
  }
  return masks;
}

}  // namespace

void AssocConfig::validate() const {
  for (int d : deltas) {
    if (d == 0) fail(ErrorCode::kParameter, "association delta 0 is not allowed");
  }
}

ThreewayResult threeway_hungarian(std::span<const Mask> m1, std::span<const Mask> m2,
                                  std::span<const Mask> m3) {
  ThreewayResult out;
  out.consistent.assign(m1.size(), false);
  const Mask* ref = first_mask(m1, m2, m3);
  if (ref == nullptr) return out;
  const Mask blank(ref->height(), ref->width());

  // Align m3 to m2 positionally; positions without a partner hold `blank`.
  const Assignment a23 = match_max_iou(m2, m3);
  std::vector<Mask> m3_aligned(m2.size(), blank);
  std::vector<bool> has_partner(m2.size(), false);
  for (std::size_t j = 0; j < m2.size(); ++j) {
    const int k = a23.row_to_col[j];
    if (k >= 0) {
      m3_aligned[j] = m3[static_cast<std::size_t>(k)];
      has_partner[j] = true;
    }
  }

  const Assignment a13 = match_max_iou(m1, m3_aligned);
  const Assignment a12 = match_max_iou(m1, m2);

  out.m2_aligned.assign(m1.size(), blank);
  for (std::size_t i = 0; i < m1.size(); ++i) {
    const int j = a12.row_to_col[i];
    if (j < 0) continue;
    out.m2_aligned[i] = m2[static_cast<std::size_t>(j)];
    out.consistent[i] = j == a13.row_to_col[i] && has_partner[static_cast<std::size_t>(j)];
  }
  return out;
}

FrameMasks neighbor_align(const FrameMasks& pred, std::span<const FlowField> chain) {
  if (chain.empty()) {
    fail(ErrorCode::kMissingInput,
         "no flow chain to align frame " + std::to_string(pred.frame_index));
  }
  int frame = pred.frame_index;
  for (const auto& f : chain) {
    if (f.source_frame != frame) {
      fail(ErrorCode::kMissingInput, "flow chain broken at frame " + std::to_string(frame));
    }
    frame += f.gap;
  }
  FrameMasks out = pred;
  out.frame_index = frame;
  for (auto& obj : out.objects) {
    for (const auto& f : chain) obj.mask = warp_mask(obj.mask, f);
  }
  return out;
}

std::vector<FlowField> flow_chain(const FlowSource& flows, int from, int to) {
  if (from == to) return {};
  if (auto direct = flows.get(from, to - from)) return {std::move(*direct)};
  const int step = to > from ? 1 : -1;
  std::vector<FlowField> chain;
  for (int f = from; f != to; f += step) {
    auto field = flows.get(f, step);
    if (!field) {
      fail(ErrorCode::kMissingInput, "no flow from frame " + std::to_string(from) + " to frame " +
                                         std::to_string(to) + " (missing gap " +
                                         std::to_string(to - from) + " and gap " +
                                         std::to_string(step) + " at frame " + std::to_string(f) + ")");
    }
    chain.push_back(std::move(*field));
  }
  return chain;
}

StepResult temporal_consistency_step(std::span<const Mask> previous, const FlowField* flow,
                                     const FrameMasks& current,
                                     const std::map<int, FrameMasks>& neighbors,
                                     const AssocConfig& config,
                                     std::span<const int> layer_order) {
  config.validate();
  if (layer_order.size() != previous.size()) {
    fail(ErrorCode::kParameter, "layer_order must have one entry per object");
  }
  StepResult out;
  const std::size_t n = previous.size();
  if (n == 0) return out;

  std::vector<Mask> warped;
  warped.reserve(n);
  if (flow != nullptr) {
    if (flow->gap != 1) fail(ErrorCode::kParameter, "propagation needs the gap +1 flow");
    for (const auto& m : previous) warped.push_back(warp_mask(m, *flow));
  } else if (config.mode == AssocMode::kHungarianOnly) {
    warped.assign(previous.begin(), previous.end());
  } else {
    fail(ErrorCode::kMissingInput, "no flow available to propagate frame " +
                                       std::to_string(current.frame_index - 1));
  }

  const std::vector<Mask> cur = current.masks();
  out.records.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.records[i].object = static_cast<int>(i);

  std::vector<Mask> matched;
  switch (config.mode) {
    case AssocMode::kPropagationOnly:
      out.unlayered = warped;
      break;
    case AssocMode::kHungarianOnly: {
      matched = threeway_hungarian(warped, cur, cur).m2_aligned;
      out.unlayered = matched;
      for (auto& r : out.records) {
        r.mean = 1.0;
        r.decision = Decision::kUpdate;
      }
      break;
    }
    case AssocMode::kTemporalConsistency: {
      std::vector<int> hits(n, 0);
      int available = 0;
      for (int delta : config.deltas) {
        const auto it = neighbors.find(delta);
        if (it == neighbors.end()) continue;
        const std::vector<Mask> nb = it->second.masks();
        ThreewayResult tw = threeway_hungarian(warped, cur, nb);
        if (matched.empty()) matched = std::move(tw.m2_aligned);
        ++available;
        for (std::size_t i = 0; i < n; ++i) {
          bool flag = tw.consistent[i];
          if (config.flag_override == FlagOverride::kAllTrue) flag = true;
          if (config.flag_override == FlagOverride::kAllFalse) flag = false;
          out.records[i].per_delta.emplace_back(delta, flag);
          hits[i] += flag ? 1 : 0;
        }
      }
      if (matched.empty()) matched = threeway_hungarian(warped, cur, cur).m2_aligned;
      out.unlayered.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        auto& r = out.records[i];
        if (available > 0) {
          r.mean = static_cast<double>(hits[i]) / static_cast<double>(available);
        } else {
          // No neighbour evidence: fall back to the identity-preserving choice
          // unless the flags are forced.
          r.mean = config.flag_override == FlagOverride::kAllTrue ? 1.0 : 0.0;
        }
        r.decision = r.mean >= 0.5 ? Decision::kUpdate : Decision::kPropagate;
        out.unlayered[i] = r.decision == Decision::kUpdate ? matched[i] : warped[i];
      }
      break;
    }
  }
  if (config.mode == AssocMode::kPropagationOnly) {
    for (auto& r : out.records) {
      r.mean = 0.0;
      r.decision = Decision::kPropagate;
    }
  }
  out.masks = layered(out.unlayered, layer_order);
  return out;
}

SequenceTracks associate_sequence(const std::vector<FrameMasks>& frames, const FlowSource& flows,
                                  const AssocConfig& config) {
  config.validate();
  if (frames.empty()) fail(ErrorCode::kParameter, "associate_sequence needs at least one frame");
  const int num_frames = static_cast<int>(frames.size());

  SequenceTracks tracks;
  for (const auto& f : frames) {
    if (!f.objects.empty()) {
      tracks.height = f.objects.front().mask.height();
      tracks.width = f.objects.front().mask.width();
      break;
    }
  }
  const FrameMasks& first = frames.front();
  tracks.num_objects = static_cast<int>(first.objects.size());
  tracks.layer_order.resize(first.objects.size());
  std::iota(tracks.layer_order.begin(), tracks.layer_order.end(), 0);
  tracks.frames.resize(frames.size());
  tracks.decisions.resize(frames.size());
  if (tracks.num_objects == 0) {
    logger().warn("frame 0 has no predicted objects; tracks are empty");
    return tracks;
  }
  tracks.frames[0] = layered(first.masks(), tracks.layer_order);

  const bool needs_flow = config.mode != AssocMode::kHungarianOnly;
  for (int t = 1; t < num_frames; ++t) {
    std::optional<FlowField> flow = flows.get(t - 1, 1);
    if (!flow && needs_flow) {
      fail(ErrorCode::kMissingInput,
           "missing gap +1 flow at frame " + std::to_string(t - 1) + " needed for propagation");
    }

    FrameMasks current = frames[static_cast<std::size_t>(t)];
    current.frame_index = t;
    std::map<int, FrameMasks> neighbors;
    if (config.mode == AssocMode::kTemporalConsistency) {
      for (int delta : config.deltas) {
        const int source = t + delta;
        if (source < 0 || source >= num_frames) continue;
        FrameMasks pred = frames[static_cast<std::size_t>(source)];
        pred.frame_index = source;
        const auto chain = flow_chain(flows, source, t);
        neighbors.emplace(delta, neighbor_align(pred, chain));
      }
    }

    StepResult step = temporal_consistency_step(tracks.frames[static_cast<std::size_t>(t - 1)],
                                                flow ? &*flow : nullptr, current, neighbors,
                                                config, tracks.layer_order);
    tracks.frames[static_cast<std::size_t>(t)] = std::move(step.masks);
    tracks.decisions[static_cast<std::size_t>(t)] = std::move(step.records);
  }
  return tracks;
}

}  // namespace flowseg
