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

#include <set>

#include <gtest/gtest.h>

#include "flowseg/selection.hpp"
#include "test_util.hpp"

namespace flowseg {
namespace {

using testing::code_of;
using testing::iou_bytes;
using testing::random_box;
using testing::rect;

ScoredMask scored(Mask m, double fiou, std::optional<double> mos = std::nullopt) {
  ScoredMask s;
  s.mask = std::move(m);
  s.fiou = fiou;
  s.mos = mos;
  return s;
}

CandidateSet random_candidates(Rng& rng, int h, int w) {
  CandidateSet c;
  const int n = rng.uniform_int(0, 14);
  for (int i = 0; i < n; ++i) {
    c.candidates.push_back(scored(random_box(rng, h, w), rng.uniform01(),
                                  rng.bernoulli(0.5) ? std::optional<double>(rng.uniform01())
                                                     : std::nullopt));
  }
  return c;
}

TEST(Nms, IdenticalMasksKeepHigherScore) {
  const Mask m = rect(8, 8, 1, 1, 5, 5);
  CandidateSet c{{scored(m, 0.8), scored(m, 0.9)}};
  const auto kept = nms(c, SelectionConfig{});
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].fiou, 0.9);
}

TEST(Nms, DisjointMasksAllKept) {
  CandidateSet c{{scored(rect(8, 8, 0, 0, 2, 2), 0.1), scored(rect(8, 8, 3, 3, 5, 5), 0.9),
                  scored(rect(8, 8, 6, 6, 8, 8), 0.5)}};
  const auto kept = nms(c, SelectionConfig{});
  ASSERT_EQ(kept.size(), 3u);
  EXPECT_EQ(kept[0].fiou, 0.9);
  EXPECT_EQ(kept[1].fiou, 0.5);
  EXPECT_EQ(kept[2].fiou, 0.1);
}

TEST(Nms, GreedyChainKeepsEnds) {
  // 1-D intervals of length 8 at offsets 0, 2, 4: IoU(A,B) = IoU(B,C) = 0.6,
  // IoU(A,C) = 1/3.
  const Mask a = rect(1, 12, 0, 0, 8, 1), b = rect(1, 12, 2, 0, 10, 1), c = rect(1, 12, 4, 0, 12, 1);
  ASSERT_DOUBLE_EQ(iou(a, b), 0.6);
  ASSERT_DOUBLE_EQ(iou(b, c), 0.6);
  ASSERT_DOUBLE_EQ(iou(a, c), 1.0 / 3.0);
  CandidateSet set{{scored(c, 0.7), scored(a, 0.9), scored(b, 0.8)}};
  const auto kept = nms(set, SelectionConfig{});
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].mask, a);
  EXPECT_EQ(kept[1].mask, c);
}

TEST(Nms, TiesKeepCandidateOrder) {
  const Mask m = rect(4, 4, 0, 0, 2, 2);
  CandidateSet c{{scored(m, 0.5, 0.1), scored(m, 0.5, 0.9)}};
  const auto kept = nms(c, SelectionConfig{});
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].mos, 0.1);
}

TEST(Nms, DropsEmptyAndBelowFloor) {
  SelectionConfig cfg;
  cfg.score_floor = 0.3;
  CandidateSet c{{scored(Mask(4, 4), 0.9), scored(rect(4, 4, 0, 0, 1, 1), 0.2),
                  scored(rect(4, 4, 2, 2, 4, 4), 0.3)}};
  const auto kept = nms(c, cfg);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].fiou, 0.3);
}

TEST(Nms, ScoreModeUsesMeanOfFiouAndMos) {
  const Mask m = rect(4, 4, 0, 0, 3, 3);
  CandidateSet c{{scored(m, 0.9, 0.0), scored(m, 0.6, 1.0)}};
  EXPECT_EQ(nms(c, SelectionConfig::flow_only())[0].fiou, 0.9);
  EXPECT_EQ(nms(c, SelectionConfig::rgb_based())[0].fiou, 0.6);
}

TEST(Nms, ShapeMismatchAndBadConfig) {
  CandidateSet c{{scored(rect(4, 4, 0, 0, 1, 1), 1), scored(rect(4, 5, 0, 0, 1, 1), 1)}};
  EXPECT_EQ(code_of([&] { nms(c, SelectionConfig{}); }), ErrorCode::kShape);
  SelectionConfig bad;
  bad.nms_iou_threshold = 0.0;
  EXPECT_EQ(code_of([&] { nms(CandidateSet{}, bad); }), ErrorCode::kParameter);
  bad = SelectionConfig{};
  bad.top_n = 0;
  EXPECT_EQ(code_of([&] { bad.validate(); }), ErrorCode::kParameter);
}

TEST(SelectionConfig, Presets) {
  EXPECT_EQ(SelectionConfig::flow_only().top_n, 5);
  EXPECT_EQ(SelectionConfig::flow_only().score_mode, ScoreMode::kFiou);
  EXPECT_EQ(SelectionConfig::rgb_based().top_n, 10);
  EXPECT_EQ(SelectionConfig::rgb_based().score_mode, ScoreMode::kMeanFiouMos);
  EXPECT_EQ(SelectionConfig{}.nms_iou_threshold, 0.5);
}

TEST(SelectFrame, SingleCandidateUnchanged) {
  const Mask m = rect(6, 6, 1, 2, 4, 5);
  const FrameMasks f = select_frame(CandidateSet{{scored(m, 0.4)}}, SelectionConfig{}, 3);
  EXPECT_EQ(f.frame_index, 3);
  ASSERT_EQ(f.objects.size(), 1u);
  EXPECT_EQ(f.objects[0].mask, m);
  EXPECT_EQ(f.objects[0].layer_rank, 0);
}

TEST(SelectFrame, BackMaskLosesIntersection) {
  const Mask front = rect(10, 10, 0, 0, 6, 6);
  const Mask back = rect(10, 10, 4, 4, 10, 10);
  ASSERT_LT(iou(front, back), 0.5);
  const FrameMasks f = select_frame(CandidateSet{{scored(back, 0.7), scored(front, 0.9)}}, SelectionConfig{});
  ASSERT_EQ(f.objects.size(), 2u);
  EXPECT_EQ(f.objects[0].mask, front);
  EXPECT_EQ(f.objects[1].mask, difference(back, front));
  EXPECT_EQ(f.objects[1].mask.area(), back.area() - front.intersection_area(back));
}

TEST(SelectFrame, TopNKeepsHighestScores) {
  CandidateSet c;
  for (int i = 0; i < 12; ++i) c.candidates.push_back(scored(rect(2, 24, 2 * i, 0, 2 * i + 1, 2), 0.01 * (i + 1)));
  SelectionConfig cfg;
  cfg.top_n = 10;
  const FrameMasks f = select_frame(c, cfg);
  ASSERT_EQ(f.objects.size(), 10u);
  for (std::size_t k = 0; k < 10; ++k) EXPECT_DOUBLE_EQ(f.objects[k].fiou, 0.01 * (12 - k));
}

TEST(SelectFrame, NoSurvivorsGivesEmptyFrame) {
  EXPECT_TRUE(select_frame(CandidateSet{}, SelectionConfig{}).objects.empty());
  EXPECT_TRUE(select_frame(CandidateSet{{scored(Mask(3, 3), 1.0)}}, SelectionConfig{}).objects.empty());
}

TEST(RemoveOverlaps, FrontOwnsContestedPixels) {
  const auto out = remove_overlaps({rect(4, 4, 0, 0, 3, 3), rect(4, 4, 1, 1, 4, 4), rect(4, 4, 0, 0, 4, 4)});
  EXPECT_EQ(out[0], rect(4, 4, 0, 0, 3, 3));
  EXPECT_EQ(out[1].area(), 16u - 9u - 2u);
  EXPECT_EQ(out[2].area(), 2u);
}

TEST(Combine, EmptyBackReturnsFront) {
  FrameMasks front{2, {scored(rect(6, 6, 0, 0, 2, 2), 0.9), scored(rect(6, 6, 3, 3, 5, 5), 0.8)}};
  front.objects[1].layer_rank = 1;
  const FrameMasks out = combine_predictions(front, FrameMasks{2, {}});
  ASSERT_EQ(out.objects.size(), 2u);
  EXPECT_EQ(out.objects[0].mask, front.objects[0].mask);
  EXPECT_EQ(out.objects[1].mask, front.objects[1].mask);
}

TEST(Combine, FullyCoveredBackObjectDropped) {
  const FrameMasks front{0, {scored(rect(6, 6, 0, 0, 4, 4), 0.9)}};
  const FrameMasks back{0, {scored(rect(6, 6, 1, 1, 3, 3), 0.9), scored(rect(6, 6, 4, 4, 6, 6), 0.5)}};
  const FrameMasks out = combine_predictions(front, back);
  ASSERT_EQ(out.objects.size(), 2u);
  EXPECT_EQ(out.objects[1].mask, rect(6, 6, 4, 4, 6, 6));
  EXPECT_EQ(out.objects[1].layer_rank, 1);
}

TEST(Combine, BackBlobFillsMissedObject) {
  const Mask gt1 = rect(12, 20, 1, 1, 7, 9), gt2 = rect(12, 20, 10, 2, 18, 10);
  const FrameMasks front{0, {scored(gt1, 0.95)}};
  const FrameMasks back{0, {scored(rect(12, 20, 0, 0, 19, 11), 0.6)}};
  const FrameMasks out = combine_predictions(front, back);
  ASSERT_EQ(out.objects.size(), 2u);
  EXPECT_EQ(out.objects[0].mask, gt1);
  EXPECT_EQ(out.objects[1].mask.intersection_area(gt2), gt2.area());
  EXPECT_EQ(out.objects[1].mask.intersection_area(gt1), 0u);
  EXPECT_TRUE(out.disjoint());
}

TEST(Combine, ShapeMismatch) {
  const FrameMasks front{0, {scored(rect(6, 6, 0, 0, 4, 4), 0.9)}};
  const FrameMasks back{0, {scored(rect(5, 6, 0, 0, 4, 4), 0.9)}};
  EXPECT_EQ(code_of([&] { combine_predictions(front, back); }), ErrorCode::kShape);
}

TEST(Targets, Fiou) {
  const Mask obj = rect(10, 10, 2, 2, 6, 6);
  const FrameMasks gt{0, {scored(obj, 1.0)}};
  EXPECT_EQ(fiou_target(obj, {0, 0}, gt), 0.0);
  EXPECT_EQ(fiou_target(obj, {3, 3}, gt), 1.0);
  EXPECT_EQ(fiou_target(rect(10, 10, 2, 2, 4, 6), {3, 3}, gt), 0.5);
  EXPECT_EQ(code_of([&] { fiou_target(obj, {10, 0}, gt); }), ErrorCode::kParameter);
}

TEST(Targets, Mos) {
  const FrameMasks gt{0, {scored(rect(10, 10, 2, 2, 6, 6), 1.0)}};
  EXPECT_EQ(mos_target({3, 3}, gt), 1);
  EXPECT_EQ(mos_target({7, 7}, gt), 0);
  const FrameMasks empty_gt{0, {}};
  for (const Pixel p : grid_prompts(10, 10, 5)) EXPECT_EQ(mos_target(p, empty_gt), 0);
  EXPECT_EQ(code_of([&] { mos_target({-1, 0}, gt); }), ErrorCode::kParameter);
}

TEST(GridPrompts, Examples) {
  EXPECT_EQ(grid_prompts(100, 100, 1), (std::vector<Pixel>{{50, 50}}));
  EXPECT_EQ(grid_prompts(4, 4, 2), (std::vector<Pixel>{{1, 1}, {3, 1}, {1, 3}, {3, 3}}));
  EXPECT_EQ(grid_prompts(480, 854, 10).size(), 100u);
  EXPECT_EQ(code_of([] { grid_prompts(4, 4, 0); }), ErrorCode::kParameter);
}

TEST(GridPrompts, DistinctInBoundsCellCentres) {
  for (int side : {1, 3, 10, 20}) {
    for (auto [h, w] : {std::pair{20, 20}, std::pair{97, 131}, std::pair{480, 854}}) {
      const auto pts = grid_prompts(h, w, side);
      ASSERT_EQ(pts.size(), static_cast<std::size_t>(side * side));
      std::set<std::pair<int, int>> seen;
      for (std::size_t k = 0; k < pts.size(); ++k) {
        const Pixel p = pts[k];
        EXPECT_TRUE(p.x >= 0 && p.x < w && p.y >= 0 && p.y < h);
        seen.insert({p.x, p.y});
        // Inside its own cell.
        const int i = static_cast<int>(k) / side, j = static_cast<int>(k) % side;
        EXPECT_GE(p.y * side, i * h);
        EXPECT_LT(p.y * side, (i + 1) * h);
        EXPECT_GE(p.x * side, j * w);
        EXPECT_LT(p.x * side, (j + 1) * w);
      }
      EXPECT_EQ(seen.size(), pts.size());
    }
  }
}

TEST(SelectionProperties, RandomCandidateSets) {
  Rng rng(500);
  for (int trial = 0; trial < 500; ++trial) {
    const int h = rng.uniform_int(4, 24), w = rng.uniform_int(4, 24);
    const CandidateSet c = random_candidates(rng, h, w);
    SelectionConfig cfg;
    cfg.nms_iou_threshold = 0.2 + 0.8 * rng.uniform01();
    cfg.top_n = rng.uniform_int(1, 8);
    cfg.score_mode = rng.bernoulli(0.5) ? ScoreMode::kFiou : ScoreMode::kMeanFiouMos;

    const auto kept = nms(c, cfg);
    for (std::size_t i = 0; i < kept.size(); ++i) {
      if (i > 0) EXPECT_GE(kept[i - 1].score(cfg.score_mode), kept[i].score(cfg.score_mode));
      for (std::size_t j = i + 1; j < kept.size(); ++j) {
        EXPECT_LT(iou_bytes(kept[i].mask, kept[j].mask), cfg.nms_iou_threshold);
      }
    }

    const FrameMasks f = select_frame(c, cfg);
    EXPECT_LE(f.objects.size(), static_cast<std::size_t>(cfg.top_n));
    EXPECT_TRUE(f.disjoint());

    const FrameMasks other = select_frame(random_candidates(rng, h, w), cfg);
    const FrameMasks both = combine_predictions(f, other);
    ASSERT_GE(both.objects.size(), f.objects.size());
    Mask front_cover(h, w), all_cover(h, w);
    for (std::size_t i = 0; i < f.objects.size(); ++i) {
      EXPECT_EQ(both.objects[i].mask, f.objects[i].mask);
      front_cover |= f.objects[i].mask;
    }
    for (const auto& o : both.objects) all_cover |= o.mask;
    EXPECT_GE(all_cover.area(), front_cover.area());
    EXPECT_TRUE(both.disjoint());
  }
}

}  // namespace
}  // namespace flowseg
