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

#include "flowseg/synth.hpp"

#include <algorithm>
#include <numeric>

#include "flowseg/error.hpp"
#include "flowseg/log.hpp"

namespace flowseg {

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

std::uint64_t Rng::next() { return engine_(); }

double Rng::uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

int Rng::uniform_int(int lo, int hi) {
  if (hi < lo) fail(ErrorCode::kParameter, "uniform_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) - lo) + 1;
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % span);
  std::uint64_t x = next();
  while (x >= limit) x = next();
  return static_cast<int>(static_cast<std::int64_t>(lo) + static_cast<std::int64_t>(x % span));
}

bool Rng::bernoulli(double p) { return uniform01() < p; }

void CorruptionSpec::validate() const {
  for (double p : {id_permute_prob, dropout_prob, duplicate_prob}) {
    if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::kParameter, "corruption probability outside [0, 1]");
  }
  if (jitter_px < 0) fail(ErrorCode::kParameter, "jitter_px must be >= 0");
}

void SceneSpec::validate() const {
  if (height < 1 || width < 1) fail(ErrorCode::kParameter, "scene frame size must be positive");
  if (num_frames < 1) fail(ErrorCode::kParameter, "scene needs at least one frame");
  if (objects.size() > 255) fail(ErrorCode::kParameter, "at most 255 objects per scene");
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto& o = objects[i];
    if (o.width < 1 || o.height < 1) fail(ErrorCode::kParameter, "object size must be positive");
    if (o.x < 0 || o.y < 0 || o.x + o.width > width || o.y + o.height > height) {
      fail(ErrorCode::kParameter, "object " + std::to_string(i) + " does not fit the frame at t=0");
    }
  }
  corruption.validate();
}

SceneSpec random_scene(std::uint64_t seed, int num_objects, int num_frames, int height, int width,
                       int max_speed) {
  Rng rng(seed);
  SceneSpec spec;
  spec.seed = seed;
  spec.height = height;
  spec.width = width;
  spec.num_frames = num_frames;
  const int travel = max_speed * (num_frames - 1);
  const int min_side = std::max(4, std::min(height, width) / 8);
  const int max_side = std::max(min_side, std::min(height, width) / 4);
  std::vector<int> depths(static_cast<std::size_t>(num_objects));
  std::iota(depths.begin(), depths.end(), 0);
  for (int i = num_objects - 1; i > 0; --i) std::swap(depths[static_cast<std::size_t>(i)], depths[static_cast<std::size_t>(rng.uniform_int(0, i))]);
  for (int i = 0; i < num_objects; ++i) {
    ObjectSpec o;
    o.shape = rng.bernoulli(0.5) ? ShapeKind::kRect : ShapeKind::kEllipse;
    o.width = rng.uniform_int(min_side, max_side);
    o.height = rng.uniform_int(min_side, max_side);
    o.vx = rng.uniform_int(-max_speed, max_speed);
    o.vy = rng.uniform_int(-max_speed, max_speed);
    // Keep the whole trajectory inside the frame.
    const int x_lo = std::max(0, -o.vx * (num_frames - 1));
    const int x_hi = width - o.width - std::max(0, o.vx * (num_frames - 1));
    const int y_lo = std::max(0, -o.vy * (num_frames - 1));
    const int y_hi = height - o.height - std::max(0, o.vy * (num_frames - 1));
    if (x_hi < x_lo || y_hi < y_lo) {
      fail(ErrorCode::kParameter, "frame too small for " + std::to_string(travel) + " px of travel");
    }
    o.x = rng.uniform_int(x_lo, x_hi);
    o.y = rng.uniform_int(y_lo, y_hi);
    o.depth = depths[static_cast<std::size_t>(i)];
    spec.objects.push_back(o);
  }
  return spec;
}

namespace {

Mask rasterize(const ObjectSpec& o, int t, int height, int width, bool* clipped) {
  Mask m(height, width);
  const int x0 = o.x + o.vx * t;
  const int y0 = o.y + o.vy * t;
  *clipped = x0 < 0 || y0 < 0 || x0 + o.width > width || y0 + o.height > height;
  // Ellipse inscribed in the box, tested at pixel centres in doubled coordinates.
  const long long w = o.width, h = o.height;
  for (int dy = 0; dy < o.height; ++dy) {
    for (int dx = 0; dx < o.width; ++dx) {
      if (o.shape == ShapeKind::kEllipse) {
        const long long ex = 2LL * dx + 1 - w;
        const long long ey = 2LL * dy + 1 - h;
        if (ex * ex * h * h + ey * ey * w * w > w * w * h * h) continue;
      }
      const int x = x0 + dx;
      const int y = y0 + dy;
      if (m.contains(x, y)) m.set(x, y);
    }
  }
  return m;
}

}  // namespace

RenderedScene render(const SceneSpec& spec) {
  spec.validate();
  const std::size_t n = spec.objects.size();
  RenderedScene out;

  // Front-to-back order; ties keep the listed order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return spec.objects[a].depth < spec.objects[b].depth;
  });

  out.gt.height = spec.height;
  out.gt.width = spec.width;
  out.gt.num_objects = static_cast<int>(n);
  out.gt.layer_order.resize(n);
  for (std::size_t rank = 0; rank < n; ++rank) out.gt.layer_order[order[rank]] = static_cast<int>(rank);
  out.gt.frames.resize(static_cast<std::size_t>(spec.num_frames));
  out.gt.decisions.resize(static_cast<std::size_t>(spec.num_frames));
  out.raster.resize(static_cast<std::size_t>(spec.num_frames));

  for (int t = 0; t < spec.num_frames; ++t) {
    auto& raster = out.raster[static_cast<std::size_t>(t)];
    for (std::size_t i = 0; i < n; ++i) {
      bool clipped = false;
      raster.push_back(rasterize(spec.objects[i], t, spec.height, spec.width, &clipped));
      if (clipped) {
        out.warnings.push_back("object " + std::to_string(i) + " clipped at frame " + std::to_string(t));
      }
    }
    auto& visible = out.gt.frames[static_cast<std::size_t>(t)];
    visible = raster;
    Mask owned(spec.height, spec.width);
    for (std::size_t i : order) {
      visible[i].subtract(owned);
      owned |= raster[i];
    }
  }
  for (const auto& w : out.warnings) logger().warn("synth: {}", w);

  for (int t = 0; t < spec.num_frames; ++t) {
    const auto& visible = out.gt.frames[static_cast<std::size_t>(t)];
    for (int g : spec.gaps.gaps()) {
      if (t + g < 0 || t + g >= spec.num_frames) continue;
      FlowField f = FlowField::constant(spec.height, spec.width,
                                        static_cast<float>(spec.background_vx * g),
                                        static_cast<float>(spec.background_vy * g), g, t);
      for (std::size_t i = 0; i < n; ++i) {
        const auto du = static_cast<float>(spec.objects[i].vx * g);
        const auto dv = static_cast<float>(spec.objects[i].vy * g);
        for (int y = 0; y < spec.height; ++y) {
          for (int x = 0; x < spec.width; ++x) {
            if (!visible[i].get(x, y)) continue;
            f.u[f.index(x, y)] = du;
            f.v[f.index(x, y)] = dv;
          }
        }
      }
      out.flows.put(std::move(f));
    }
  }
  return out;
}

CorruptedSequence corrupt(const SequenceTracks& gt, const CorruptionSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  CorruptedSequence out;
  for (int t = 0; t < gt.num_frames(); ++t) {
    const auto& objects = gt.frames[static_cast<std::size_t>(t)];
    std::vector<ScoredMask> emitted;
    std::vector<ScoredMask> extras;
    for (std::size_t i = 0; i < objects.size(); ++i) {
      const Mask& truth = objects[i];
      // Draw every variate unconditionally so the stream does not depend on
      // which corruptions fire.
      const bool drop = rng.bernoulli(spec.dropout_prob);
      const int dx = spec.jitter_px > 0 ? rng.uniform_int(-spec.jitter_px, spec.jitter_px) : 0;
      const int dy = spec.jitter_px > 0 ? rng.uniform_int(-spec.jitter_px, spec.jitter_px) : 0;
      const bool dup = rng.bernoulli(spec.duplicate_prob);
      if (truth.empty()) continue;
      if (drop) {
        out.log.push_back({t, "dropout", static_cast<int>(i), {}});
        continue;
      }
      ScoredMask sm;
      sm.mask = (dx != 0 || dy != 0) ? truth.translated(dx, dy) : truth;
      if (dx != 0 || dy != 0) out.log.push_back({t, "jitter", static_cast<int>(i), {dx, dy}});
      if (sm.mask.empty()) continue;
      sm.fiou = iou(sm.mask, truth);
      sm.mos = 1.0;
      if (dup) {
        ScoredMask copy;
        copy.mask = sm.mask.translated(1, 0);
        copy.fiou = 0.9 * iou(copy.mask, truth);
        copy.mos = 1.0;
        if (!copy.mask.empty()) {
          extras.push_back(std::move(copy));
          out.log.push_back({t, "duplicate", static_cast<int>(i), {}});
        }
      }
      emitted.push_back(std::move(sm));
    }

    std::vector<int> perm(emitted.size());
    std::iota(perm.begin(), perm.end(), 0);
    const bool permute = rng.bernoulli(spec.id_permute_prob);
    if (permute) {
      for (std::size_t k = perm.size(); k > 1; --k) {
        const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(k) - 1));
        std::swap(perm[k - 1], perm[j]);
      }
      out.log.push_back({t, "permute", -1, perm});
    }

    CandidateSet cands;
    FrameMasks frame;
    frame.frame_index = t;
    std::vector<Mask> raw;
    for (int p : perm) {
      cands.candidates.push_back(emitted[static_cast<std::size_t>(p)]);
      raw.push_back(emitted[static_cast<std::size_t>(p)].mask);
    }
    for (auto& e : extras) cands.candidates.push_back(std::move(e));
    const std::vector<Mask> layered = remove_overlaps(std::move(raw));
    for (std::size_t k = 0; k < layered.size(); ++k) {
      if (layered[k].empty()) continue;
      ScoredMask sm = emitted[static_cast<std::size_t>(perm[k])];
      sm.mask = layered[k];
      sm.layer_rank = static_cast<int>(frame.objects.size());
      frame.objects.push_back(std::move(sm));
    }
    for (std::size_t k = 0; k < cands.candidates.size(); ++k) cands.candidates[k].layer_rank = static_cast<int>(k);
    out.frames.push_back(std::move(frame));
    out.candidates.push_back(std::move(cands));
  }
  return out;
}

}  // namespace flowseg
