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

#include <algorithm>
#include <cmath>

#include "flowseg/assignment.hpp"
#include "flowseg/error.hpp"
#include "flowseg/evaluation.hpp"

namespace flowseg {

namespace {

const Mask* mask_at(const ObjectFrames& frames, std::size_t t, std::size_t i) {
  if (t >= frames.size() || i >= frames[t].size()) return nullptr;
  return &frames[t][i];
}

void require_same_length(const ObjectFrames& pred, const ObjectFrames& gt) {
  if (pred.size() != gt.size()) {
    fail(ErrorCode::kShape, "prediction has " + std::to_string(pred.size()) +
                                " frames, ground truth " + std::to_string(gt.size()));
  }
}

bool all_empty(const ObjectFrames& frames) {
  for (const auto& f : frames) {
    for (const auto& m : f) {
      if (!m.empty()) return false;
    }
  }
  return true;
}

Mask dilate_disk(const Mask& m, int radius) {
  std::vector<std::pair<int, int>> offsets;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      if (dx * dx + dy * dy <= radius * radius) offsets.emplace_back(dx, dy);
    }
  }
  Mask out(m.height(), m.width());
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m.get(x, y)) continue;
      for (auto [dx, dy] : offsets) {
        if (out.contains(x + dx, y + dy)) out.set(x + dx, y + dy);
      }
    }
  }
  return out;
}

// Pools `measure(pred, gt)` over every (frame, object) with a nonempty GT mask.
template <typename Measure>
double pooled_mean(const ObjectFrames& pred, const ObjectFrames& gt, Measure measure) {
  require_same_length(pred, gt);
  double sum = 0.0;
  std::size_t terms = 0;
  for (std::size_t t = 0; t < gt.size(); ++t) {
    for (std::size_t i = 0; i < gt[t].size(); ++i) {
      const Mask& g = gt[t][i];
      if (g.empty()) continue;
      const Mask* p = mask_at(pred, t, i);
      const Mask blank(g.height(), g.width());
      sum += measure(p ? *p : blank, g);
      ++terms;
    }
  }
  if (terms == 0) return all_empty(pred) ? 1.0 : 0.0;
  return sum / static_cast<double>(terms);
}

}  // namespace

Mask boundary_map(const Mask& seg) {
  const int h = seg.height();
  const int w = seg.width();
  Mask b(h, w);
  auto at = [&](int x, int y) { return seg.contains(x, y) && seg.get(x, y); };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const bool s = seg.get(x, y);
      bool edge = false;
      if (y == h - 1 && x == w - 1) {
        edge = false;
      } else if (y == h - 1) {
        edge = s != at(x + 1, y);
      } else if (x == w - 1) {
        edge = s != at(x, y + 1);
      } else {
        edge = s != at(x + 1, y) || s != at(x, y + 1) || s != at(x + 1, y + 1);
      }
      if (edge) b.set(x, y);
    }
  }
  return b;
}

int boundary_tolerance(int height, int width, double bound_th) {
  if (bound_th >= 1.0) return static_cast<int>(bound_th);
  return static_cast<int>(std::ceil(bound_th * std::hypot(static_cast<double>(height),
                                                          static_cast<double>(width))));
}

double boundary_f(const Mask& pred, const Mask& gt, double bound_th) {
  if (pred.height() != gt.height() || pred.width() != gt.width()) {
    fail(ErrorCode::kShape, "boundary_f: mask shapes differ");
  }
  const int radius = boundary_tolerance(gt.height(), gt.width(), bound_th);
  const Mask fg_b = boundary_map(pred);
  const Mask gt_b = boundary_map(gt);
  const auto n_fg = static_cast<double>(fg_b.area());
  const auto n_gt = static_cast<double>(gt_b.area());

  double precision = 0.0;
  double recall = 0.0;
  if (n_fg == 0 && n_gt > 0) {
    precision = 1.0;
  } else if (n_fg > 0 && n_gt == 0) {
    recall = 1.0;
  } else if (n_fg == 0 && n_gt == 0) {
    precision = recall = 1.0;
  } else {
    precision = static_cast<double>(fg_b.intersection_area(dilate_disk(gt_b, radius))) / n_fg;
    recall = static_cast<double>(gt_b.intersection_area(dilate_disk(fg_b, radius))) / n_gt;
  }
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double j_measure(const ObjectFrames& pred, const ObjectFrames& gt) {
  return pooled_mean(pred, gt, [](const Mask& p, const Mask& g) { return iou(p, g); });
}

double f_measure(const ObjectFrames& pred, const ObjectFrames& gt) {
  return pooled_mean(pred, gt, [](const Mask& p, const Mask& g) { return boundary_f(p, g); });
}

Pairing hungarian_protocol_match(const ObjectFrames& pred, const ObjectFrames& gt,
                                 Protocol protocol) {
  require_same_length(pred, gt);
  Pairing out;
  out.gt_to_pred.resize(gt.size());
  for (std::size_t t = 0; t < gt.size(); ++t) out.gt_to_pred[t].assign(gt[t].size(), -1);

  if (protocol == Protocol::kFrame) {
    for (std::size_t t = 0; t < gt.size(); ++t) {
      std::vector<std::size_t> present;
      for (std::size_t i = 0; i < gt[t].size(); ++i) {
        if (!gt[t][i].empty()) present.push_back(i);
      }
      if (present.empty() || pred[t].empty()) continue;
      Matrix w(present.size(), pred[t].size());
      for (std::size_t r = 0; r < present.size(); ++r) {
        for (std::size_t k = 0; k < pred[t].size(); ++k) w(r, k) = iou(gt[t][present[r]], pred[t][k]);
      }
      const Assignment a = solve_assignment(w, Objective::kMaximize);
      for (std::size_t r = 0; r < present.size(); ++r) out.gt_to_pred[t][present[r]] = a.row_to_col[r];
    }
    return out;
  }

  std::size_t num_gt = 0;
  std::size_t num_pred = 0;
  for (std::size_t t = 0; t < gt.size(); ++t) {
    num_gt = std::max(num_gt, gt[t].size());
    num_pred = std::max(num_pred, pred[t].size());
  }
  if (num_gt == 0 || num_pred == 0) return out;
  Matrix w(num_gt, num_pred);
  for (std::size_t i = 0; i < num_gt; ++i) {
    std::size_t present = 0;
    std::vector<double> sums(num_pred, 0.0);
    for (std::size_t t = 0; t < gt.size(); ++t) {
      const Mask* g = mask_at(gt, t, i);
      if (g == nullptr || g->empty()) continue;
      ++present;
      for (std::size_t k = 0; k < pred[t].size(); ++k) sums[k] += iou(*g, pred[t][k]);
    }
    if (present == 0) continue;
    for (std::size_t k = 0; k < num_pred; ++k) w(i, k) = sums[k] / static_cast<double>(present);
  }
  const Assignment a = solve_assignment(w, Objective::kMaximize);
  for (std::size_t t = 0; t < gt.size(); ++t) {
    for (std::size_t i = 0; i < gt[t].size(); ++i) {
      const int k = a.row_to_col[i];
      out.gt_to_pred[t][i] = (k >= 0 && static_cast<std::size_t>(k) < pred[t].size()) ? k : -1;
    }
  }
  return out;
}

ObjectFrames apply_pairing(const ObjectFrames& pred, const ObjectFrames& gt,
                           const Pairing& pairing) {
  require_same_length(pred, gt);
  ObjectFrames out(gt.size());
  for (std::size_t t = 0; t < gt.size(); ++t) {
    for (std::size_t i = 0; i < gt[t].size(); ++i) {
      const int k = pairing.gt_to_pred[t][i];
      if (k >= 0) {
        out[t].push_back(pred[t][static_cast<std::size_t>(k)]);
      } else {
        out[t].emplace_back(gt[t][i].height(), gt[t][i].width());
      }
    }
  }
  return out;
}

SequenceScore evaluate_sequence(const ObjectFrames& pred, const ObjectFrames& gt,
                                Protocol protocol) {
  const Pairing pairing = hungarian_protocol_match(pred, gt, protocol);
  const ObjectFrames aligned = apply_pairing(pred, gt, pairing);
  SequenceScore s;
  s.j = j_measure(aligned, gt);
  s.f = f_measure(aligned, gt);
  s.jf = (s.j + s.f) / 2.0;
  return s;
}

}  // namespace flowseg
