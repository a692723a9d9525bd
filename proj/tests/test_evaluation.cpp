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

#include <gtest/gtest.h>

#include "flowseg/evaluation.hpp"
#include "flowseg/synth.hpp"
#include "test_util.hpp"

namespace flowseg {
namespace {

using testing::code_of;
using testing::random_mask;
using testing::rect;

// Boundary F by brute-force Euclidean distance search.
double boundary_f_oracle(const Mask& pred, const Mask& gt, int r) {
  const Mask bp = boundary_map(pred), bg = boundary_map(gt);
  auto near = [&](const Mask& from, const Mask& to) {
    std::size_t hit = 0;
    for (int y = 0; y < from.height(); ++y) {
      for (int x = 0; x < from.width(); ++x) {
        if (!from.get(x, y)) continue;
        bool found = false;
        for (int v = 0; v < to.height() && !found; ++v) {
          for (int u = 0; u < to.width() && !found; ++u) {
            found = to.get(u, v) && (u - x) * (u - x) + (v - y) * (v - y) <= r * r;
          }
        }
        hit += found ? 1 : 0;
      }
    }
    return hit;
  };
  const double nf = static_cast<double>(bp.area()), ng = static_cast<double>(bg.area());
  double p, rc;
  if (nf == 0 && ng == 0) {
    p = rc = 1;
  } else if (nf == 0) {
    p = 1;
    rc = 0;
  } else if (ng == 0) {
    p = 0;
    rc = 1;
  } else {
    p = static_cast<double>(near(bp, bg)) / nf;
    rc = static_cast<double>(near(bg, bp)) / ng;
  }
  return p + rc == 0 ? 0.0 : 2 * p * rc / (p + rc);
}

// Boundary definition written out with explicit neighbour rules.
Mask boundary_oracle(const Mask& m) {
  const int h = m.height(), w = m.width();
  auto at = [&](int x, int y) { return x < w && y < h && m.get(x, y); };
  Mask b(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const bool s = m.get(x, y);
      bool e = false;
      if (x + 1 < w && y + 1 < h) {
        e = s != at(x + 1, y) || s != at(x, y + 1) || s != at(x + 1, y + 1);
      } else if (y + 1 == h && x + 1 < w) {
        e = s != at(x + 1, y);
      } else if (x + 1 == w && y + 1 < h) {
        e = s != at(x, y + 1);
      }
      b.set(x, y, e);
    }
  }
  return b;
}

TEST(Boundary, MapOfSquare) {
  const Mask sq = rect(8, 8, 2, 2, 5, 5);
  const Mask b = boundary_map(sq);
  // Pixels inside the square next to the outside on the right/bottom, plus
  // outside pixels whose right/lower neighbour is inside.
  EXPECT_EQ(b, boundary_oracle(sq));
  EXPECT_TRUE(b.get(4, 4));
  EXPECT_TRUE(b.get(1, 1));
  EXPECT_FALSE(b.get(3, 3));
  EXPECT_TRUE(boundary_map(Mask::full(5, 5)).empty());
}

TEST(Boundary, MatchesNeighbourRuleOnRandomMasks) {
  Rng rng(6);
  for (int i = 0; i < 50; ++i) {
    const Mask m = random_mask(rng, rng.uniform_int(1, 12), rng.uniform_int(1, 12), 0.5);
    EXPECT_EQ(boundary_map(m), boundary_oracle(m));
  }
}

TEST(Boundary, ToleranceFromDiagonal) {
  for (auto [h, w] : {std::pair{100, 100}, std::pair{480, 854}, std::pair{96, 128}, std::pair{1, 1}}) {
    int want = 0;
    while (want < 0.008 * std::sqrt(double(h) * h + double(w) * w)) ++want;
    EXPECT_EQ(boundary_tolerance(h, w), want) << h << "x" << w;
  }
  EXPECT_EQ(boundary_tolerance(480, 854), 8);
}

TEST(BoundaryF, IdenticalIsOne) {
  const Mask m = rect(100, 100, 10, 10, 40, 30);
  EXPECT_EQ(boundary_f(m, m), 1.0);
}

TEST(BoundaryF, FarDisplacementIsZero) {
  const Mask a = rect(100, 100, 10, 10, 18, 18);
  EXPECT_EQ(boundary_f(a.translated(20, 20), a), 0.0);
}

TEST(BoundaryF, ShiftWithinToleranceIsOne) {
  const int r = boundary_tolerance(100, 100);
  ASSERT_EQ(r, 2);
  const Mask a = rect(100, 100, 30, 30, 50, 50);
  EXPECT_EQ(boundary_f(a.translated(r - 1, 0), a), 1.0);
  EXPECT_EQ(boundary_f(a.translated(r, 0), a), 1.0);
  EXPECT_LT(boundary_f(a.translated(r + 1, 0), a), 1.0);
}

TEST(BoundaryF, EmptyCases) {
  const Mask e(20, 20), m = rect(20, 20, 5, 5, 10, 10);
  EXPECT_EQ(boundary_f(e, e), 1.0);
  EXPECT_EQ(boundary_f(e, m), 0.0);
  EXPECT_EQ(boundary_f(m, e), 0.0);
}

TEST(BoundaryF, MatchesDistanceOracle) {
  Rng rng(31);
  for (int i = 0; i < 60; ++i) {
    const int h = rng.uniform_int(3, 30), w = rng.uniform_int(3, 30);
    const Mask a = testing::random_box(rng, h, w) | testing::random_box(rng, h, w);
    const Mask b = rng.bernoulli(0.3) ? random_mask(rng, h, w, 0.3) : testing::random_box(rng, h, w);
    for (double th : {0.008, 0.05, 0.1}) {
      EXPECT_NEAR(boundary_f(a, b, th), boundary_f_oracle(a, b, boundary_tolerance(h, w, th)), 1e-12);
    }
  }
}

TEST(JMeasure, TwoFrameMean) {
  const Mask g = rect(4, 4, 0, 0, 2, 4);
  const ObjectFrames gt{{g}, {g}};
  const ObjectFrames pred{{rect(4, 4, 0, 0, 1, 4)}, {g}};
  EXPECT_DOUBLE_EQ(j_measure(pred, gt), 0.75);
}

TEST(JMeasure, SkipsAbsentGroundTruthAndPadsMissingPredictions) {
  const Mask g = rect(4, 4, 0, 0, 2, 2);
  const ObjectFrames gt{{g, Mask(4, 4)}, {g, g}};
  const ObjectFrames pred{{g, rect(4, 4, 3, 3, 4, 4)}, {g}};
  // Terms: (0,0)=1, (1,0)=1, (1,1)=missing prediction -> 0.
  EXPECT_DOUBLE_EQ(j_measure(pred, gt), 2.0 / 3.0);
}

TEST(JMeasure, NoGroundTruthTerms) {
  const ObjectFrames gt{{Mask(3, 3)}};
  EXPECT_EQ(j_measure({{Mask(3, 3)}}, gt), 1.0);
  EXPECT_EQ(j_measure({{rect(3, 3, 0, 0, 1, 1)}}, gt), 0.0);
}

TEST(JMeasure, LengthMismatch) {
  EXPECT_EQ(code_of([] { j_measure({{}}, {}); }), ErrorCode::kShape);
}

ObjectFrames scene_gt(std::uint64_t seed, int objects = 3, int frames = 10) {
  return render(random_scene(seed, objects, frames)).gt.frames;
}

TEST(Protocols, GroundTruthAgainstItselfIsPerfect) {
  const ObjectFrames gt = scene_gt(1);
  for (auto p : {Protocol::kFrame, Protocol::kSequence}) {
    const auto s = evaluate_sequence(gt, gt, p);
    EXPECT_EQ(s.j, 1.0);
    EXPECT_EQ(s.f, 1.0);
    EXPECT_EQ(s.jf, 1.0);
  }
}

TEST(Protocols, FrameProtocolIgnoresPerFrameOrder) {
  Rng rng(9);
  const ObjectFrames gt = scene_gt(2, 4);
  ObjectFrames pred = gt;
  for (auto& frame : pred) {
    for (auto& m : frame) m = m.translated(rng.uniform_int(-2, 2), rng.uniform_int(-2, 2));
  }
  const double base = evaluate_sequence(pred, gt, Protocol::kFrame).j;
  for (int k = 0; k < 10; ++k) {
    ObjectFrames shuffled = pred;
    for (auto& frame : shuffled) {
      for (std::size_t i = frame.size(); i > 1; --i) {
        std::swap(frame[i - 1], frame[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i) - 1))]);
      }
    }
    EXPECT_NEAR(evaluate_sequence(shuffled, gt, Protocol::kFrame).j, base, 1e-12);
  }
}

TEST(Protocols, SequenceProtocolPenalisesIdentitySwitches) {
  const ObjectFrames gt = scene_gt(3, 3);
  ObjectFrames pred = gt;
  for (std::size_t t = 0; t < pred.size(); t += 2) std::swap(pred[t][0], pred[t][1]);
  const double frame_j = evaluate_sequence(pred, gt, Protocol::kFrame).j;
  const double seq_j = evaluate_sequence(pred, gt, Protocol::kSequence).j;
  EXPECT_EQ(frame_j, 1.0);
  EXPECT_LT(seq_j, frame_j);
}

TEST(Protocols, SequenceNeverExceedsFrame) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const RenderedScene scene = render(random_scene(seed, 3, 8));
    CorruptionSpec cs;
    cs.id_permute_prob = 0.5;
    cs.dropout_prob = 0.2;
    cs.jitter_px = 2;
    const auto noisy = corrupt(scene.gt, cs, seed);
    ObjectFrames pred;
    for (const auto& f : noisy.frames) pred.push_back(f.masks());
    EXPECT_LE(evaluate_sequence(pred, scene.gt.frames, Protocol::kSequence).j,
              evaluate_sequence(pred, scene.gt.frames, Protocol::kFrame).j);
  }
}

TEST(Protocols, PairingIsOneToOnePerFrame) {
  const ObjectFrames gt = scene_gt(4, 4);
  ObjectFrames pred = gt;
  pred[3].pop_back();
  for (auto p : {Protocol::kFrame, Protocol::kSequence}) {
    const Pairing pairing = hungarian_protocol_match(pred, gt, p);
    for (std::size_t t = 0; t < gt.size(); ++t) {
      std::vector<int> used;
      for (int k : pairing.gt_to_pred[t]) {
        if (k < 0) continue;
        EXPECT_LT(static_cast<std::size_t>(k), pred[t].size());
        EXPECT_EQ(std::count(used.begin(), used.end(), k), 0);
        used.push_back(k);
      }
    }
  }
}

TEST(SuccessRate, PerfectAndEmptyPredictions) {
  const Mask g = rect(20, 20, 4, 4, 10, 12);
  const ObjectFrames pred{{g}, {g}};
  const std::map<int, BBox> boxes{{0, tight_bbox(g)}, {1, tight_bbox(g)}};
  const auto taus = default_sr_thresholds();
  const SuccessRate perfect = moca_sr(pred, boxes, taus);
  EXPECT_EQ(perfect.mean, 1.0);
  EXPECT_EQ(perfect.frames_evaluated, 2);
  ASSERT_EQ(perfect.per_threshold.size(), 10u);
  EXPECT_DOUBLE_EQ(perfect.per_threshold.front().first, 0.5);
  EXPECT_DOUBLE_EQ(perfect.per_threshold.back().first, 0.95);

  const SuccessRate empty = moca_sr({{Mask(20, 20)}, {}}, boxes, taus);
  EXPECT_EQ(empty.mean, 0.0);
  EXPECT_EQ(empty.frames_evaluated, 2);
}

TEST(SuccessRate, LowOverlapFailsEveryThreshold) {
  const ObjectFrames pred{{rect(10, 10, 0, 0, 4, 4)}};
  const std::map<int, BBox> boxes{{0, {2, 2, 6, 6}}};
  const SuccessRate sr = moca_sr(pred, boxes, default_sr_thresholds());
  EXPECT_EQ(sr.mean, 0.0);
}

TEST(SuccessRate, UnionOfObjectsAndSkippedFrames) {
  const ObjectFrames pred{{rect(10, 10, 0, 0, 2, 2), rect(10, 10, 6, 6, 8, 8)}, {rect(10, 10, 0, 0, 1, 1)}};
  const std::map<int, BBox> boxes{{0, {0, 0, 8, 8}}};
  const std::vector<double> taus{0.5, 1.0};
  const SuccessRate sr = moca_sr(pred, boxes, taus);
  EXPECT_EQ(sr.frames_evaluated, 1);
  EXPECT_EQ(sr.frames_skipped, 1);
  EXPECT_EQ(sr.per_threshold[1].second, 1.0);
  EXPECT_EQ(sr.mean, 1.0);
}

}  // namespace
}  // namespace flowseg
