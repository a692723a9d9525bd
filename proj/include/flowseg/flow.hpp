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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "flowseg/mask.hpp"

namespace flowseg {

// Dense displacement field. u points right (+x), v points down (+y), both in
// pixels. A field with gap g at source_frame t maps frame t onto frame t+g.
struct FlowField {
  int height = 0;
  int width = 0;
  std::vector<float> u;
  std::vector<float> v;
  int gap = 1;
  int source_frame = 0;

  static FlowField zeros(int height, int width, int gap = 1, int source_frame = 0);
  static FlowField constant(int height, int width, float du, float dv, int gap = 1,
                            int source_frame = 0);

  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(x);
  }
  // Throws kParameter on bad dimensions, non-finite entries or gap == 0.
  void validate() const;
};

// Ordered, duplicate-free list of nonzero frame gaps.
class FlowGapSet {
 public:
  FlowGapSet();  // {1, -1, 2, -2}
  explicit FlowGapSet(std::vector<int> gaps);

  static FlowGapSet slow_motion();  // {3, -3, 6, -6}

  const std::vector<int>& gaps() const noexcept { return gaps_; }

 private:
  std::vector<int> gaps_;
};

// Middlebury .flo codec: float magic 202021.25, int32 width, int32 height,
// then interleaved (u, v) float32 pairs, all little-endian.
FlowField read_flo(std::span<const std::uint8_t> bytes, int gap = 1, int source_frame = 0);
std::vector<std::uint8_t> write_flo(const FlowField& flow);

FlowField read_flo_file(const std::filesystem::path& path, int gap = 1, int source_frame = 0);
void write_flo_file(const std::filesystem::path& path, const FlowField& flow);

struct RgbImage {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> pixels;  // row-major RGB triplets

  std::uint8_t at(int x, int y, int channel) const {
    return pixels[(static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                   static_cast<std::size_t>(x)) * 3 + static_cast<std::size_t>(channel)];
  }
};

struct FlowNormalization {
  // Unset: divide by the largest magnitude in the field. Set: divide by this
  // fixed radius (must be > 0).
  std::optional<double> fixed_radius;

  static FlowNormalization per_frame_max() { return {}; }
  static FlowNormalization fixed(double radius) { return {radius}; }
};

// 55-entry Middlebury hue wheel, RGB per entry.
const std::vector<std::array<std::uint8_t, 3>>& color_wheel();

RgbImage flow_to_rgb(const FlowField& flow,
                     FlowNormalization normalization = FlowNormalization::per_frame_max());

// Forward nearest-neighbour splat: each set pixel p lands on p + round(d(p)),
// rounding half away from zero; targets outside the frame are dropped.
Mask warp_mask(const Mask& mask, const FlowField& flow);

// Path of the flow file for (frame, gap) below a sequence directory:
// flow/gap_<g>/<frame:05d>.flo
std::filesystem::path flow_file_path(const std::filesystem::path& sequence_dir, int frame,
                                     int gap);

// Random-access provider of flow fields keyed by (source frame, gap).
class FlowSource {
 public:
  virtual ~FlowSource() = default;
  // std::nullopt when the field does not exist; throws on unreadable data.
  virtual std::optional<FlowField> get(int frame, int gap) const = 0;
};

class MemoryFlowSource final : public FlowSource {
 public:
  void put(FlowField flow);
  std::optional<FlowField> get(int frame, int gap) const override;
  bool empty() const noexcept { return fields_.empty(); }

 private:
  std::map<std::pair<int, int>, FlowField> fields_;
};

// Reads sequence_dir/flow/gap_<g>/<frame>.flo on demand. A file that exists
// but fails to parse raises kMissingInput naming the path.
class DirectoryFlowSource final : public FlowSource {
 public:
  explicit DirectoryFlowSource(std::filesystem::path sequence_dir)
      : dir_(std::move(sequence_dir)) {}
  std::optional<FlowField> get(int frame, int gap) const override;

 private:
  std::filesystem::path dir_;
};

struct GapFlows {
  std::vector<FlowField> fields;
  std::vector<int> unavailable_gaps;  // target frame outside the sequence
};

GapFlows load_gap_flows(const std::filesystem::path& sequence_dir, int frame, int num_frames,
                        const FlowGapSet& gaps);

}  // namespace flowseg
