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

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "flowseg/flow.hpp"
#include "flowseg/mask.hpp"

namespace flowseg {

// Single-channel 8-bit label image: 0 is background, k >= 1 is object k.
struct LabelMap {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> labels;

  std::uint8_t max_label() const noexcept;
};

// Palette PNG in the DAVIS convention (index = label, VOC colour map).
void write_label_png(const std::filesystem::path& path, const LabelMap& map);
// Accepts palette (indices kept verbatim) or 8-bit grayscale PNGs.
LabelMap read_label_png(const std::filesystem::path& path);

void write_rgb_png(const std::filesystem::path& path, const RgbImage& image);
RgbImage read_rgb_png(const std::filesystem::path& path);

// Binary mask as grayscale 0/255; on read any nonzero value is foreground.
void write_mask_png(const std::filesystem::path& path, const Mask& mask);
Mask read_mask_png(const std::filesystem::path& path);

// masks[k] becomes label k+1. Masks must be pairwise disjoint and at most 255.
LabelMap masks_to_labels(std::span<const Mask> masks, int height, int width);
// Returns `count` masks; label k+1 fills masks[k]. Labels above count are ignored.
std::vector<Mask> labels_to_masks(const LabelMap& map, std::size_t count);

}  // namespace flowseg
