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
#include <numbers>

#include "flowseg/error.hpp"
#include "flowseg/flow.hpp"

namespace flowseg {

namespace {

std::vector<std::array<std::uint8_t, 3>> build_wheel() {
  // Segment lengths: red-yellow, yellow-green, green-cyan, cyan-blue,
  // blue-magenta, magenta-red.
  constexpr int kRY = 15, kYG = 6, kGC = 4, kCB = 11, kBM = 13, kMR = 6;
  std::vector<std::array<std::uint8_t, 3>> wheel;
  wheel.reserve(kRY + kYG + kGC + kCB + kBM + kMR);
  auto ramp = [](int i, int n) { return static_cast<std::uint8_t>(255 * i / n); };
  for (int i = 0; i < kRY; ++i) wheel.push_back({255, ramp(i, kRY), 0});
  for (int i = 0; i < kYG; ++i) wheel.push_back({static_cast<std::uint8_t>(255 - ramp(i, kYG)), 255, 0});
  for (int i = 0; i < kGC; ++i) wheel.push_back({0, 255, ramp(i, kGC)});
  for (int i = 0; i < kCB; ++i) wheel.push_back({0, static_cast<std::uint8_t>(255 - ramp(i, kCB)), 255});
  for (int i = 0; i < kBM; ++i) wheel.push_back({ramp(i, kBM), 0, 255});
  for (int i = 0; i < kMR; ++i) wheel.push_back({255, 0, static_cast<std::uint8_t>(255 - ramp(i, kMR))});
  return wheel;
}

}  // namespace

const std::vector<std::array<std::uint8_t, 3>>& color_wheel() {
  static const auto wheel = build_wheel();
  return wheel;
}

RgbImage flow_to_rgb(const FlowField& flow, FlowNormalization normalization) {
  flow.validate();
  double norm = 0.0;
  if (normalization.fixed_radius) {
    norm = *normalization.fixed_radius;
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      fail(ErrorCode::kParameter, "fixed flow normalizer must be positive");
    }
  } else {
    for (std::size_t i = 0; i < flow.u.size(); ++i) {
      norm = std::max(norm, std::hypot(static_cast<double>(flow.u[i]), static_cast<double>(flow.v[i])));
    }
  }

  const auto& wheel = color_wheel();
  const int ncols = static_cast<int>(wheel.size());
  RgbImage img;
  img.height = flow.height;
  img.width = flow.width;
  img.pixels.assign(flow.u.size() * 3, 255);
  if (norm == 0.0) return img;  // zero field: all white

  for (std::size_t i = 0; i < flow.u.size(); ++i) {
    const double u = static_cast<double>(flow.u[i]) / norm;
    const double v = static_cast<double>(flow.v[i]) / norm;
    const double rad = std::hypot(u, v);
    const double angle = std::atan2(-v, -u) / std::numbers::pi;
    const double fk = (angle + 1.0) / 2.0 * (ncols - 1);
    const int k0 = static_cast<int>(std::floor(fk));
    const int k1 = k0 + 1 == ncols ? 0 : k0 + 1;
    const double f = fk - k0;
    for (int c = 0; c < 3; ++c) {
      const double c0 = wheel[static_cast<std::size_t>(k0)][static_cast<std::size_t>(c)] / 255.0;
      const double c1 = wheel[static_cast<std::size_t>(k1)][static_cast<std::size_t>(c)] / 255.0;
      double col = (1.0 - f) * c0 + f * c1;
      if (rad <= 1.0) {
        col = 1.0 - rad * (1.0 - col);
      } else {
        col *= 0.75;  // out of range
      }
      img.pixels[i * 3 + static_cast<std::size_t>(c)] =
          static_cast<std::uint8_t>(std::floor(255.0 * col));
    }
  }
  return img;
}

}  // namespace flowseg
