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

#include "flowseg/mask.hpp"

#include <algorithm>
#include <bit>
#include <string>

#include "flowseg/error.hpp"

namespace flowseg {

namespace {

std::size_t word_count(int height, int width) {
  const std::size_t bits = static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  return (bits + 63) / 64;
}

std::string shape_str(const Mask& m) {
  return std::to_string(m.height()) + "x" + std::to_string(m.width());
}

}  // namespace

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kShape: return "shape error";
    case ErrorCode::kInvalidInput: return "invalid input";
    case ErrorCode::kFormat: return "format error";
    case ErrorCode::kLength: return "length error";
    case ErrorCode::kParameter: return "parameter error";
    case ErrorCode::kEmptyMask: return "empty mask";
    case ErrorCode::kMissingInput: return "missing input";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kInternal: return "internal error";
  }
  return "unknown error";
}

Mask::Mask(int height, int width) : height_(height), width_(width) {
  if (height < 1 || width < 1) {
    fail(ErrorCode::kShape, "mask dimensions must be positive, got " +
                                std::to_string(height) + "x" + std::to_string(width));
  }
  words_.assign(word_count(height, width), 0);
}

Mask Mask::full(int height, int width) {
  Mask m(height, width);
  std::fill(m.words_.begin(), m.words_.end(), ~std::uint64_t{0});
  const std::size_t tail = m.size() & 63;
  if (tail != 0) {
    m.words_.back() = (std::uint64_t{1} << tail) - 1;
  }
  return m;
}

Mask Mask::from_bytes(int height, int width, std::span<const std::uint8_t> bytes) {
  Mask m(height, width);
  if (bytes.size() != m.size()) {
    fail(ErrorCode::kShape, "byte grid has " + std::to_string(bytes.size()) +
                                " entries, expected " + std::to_string(m.size()));
  }
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    if (bytes[i] != 0) {
      m.words_[i >> 6] |= std::uint64_t{1} << (i & 63);
    }
  }
  return m;
}

std::size_t Mask::area() const noexcept {
  std::size_t n = 0;
  for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

bool Mask::empty() const noexcept {
  return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

void Mask::require_same_shape(const Mask& other) const {
  if (height_ != other.height_ || width_ != other.width_) {
    fail(ErrorCode::kShape, "mask shape mismatch: " + shape_str(*this) + " vs " + shape_str(other));
  }
}

std::size_t Mask::intersection_area(const Mask& other) const {
  require_same_shape(other);
  std::size_t n = 0;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    n += static_cast<std::size_t>(std::popcount(words_[i] & other.words_[i]));
  }
  return n;
}

std::size_t Mask::union_area(const Mask& other) const {
  require_same_shape(other);
  std::size_t n = 0;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    n += static_cast<std::size_t>(std::popcount(words_[i] | other.words_[i]));
  }
  return n;
}

Mask& Mask::operator|=(const Mask& other) {
  require_same_shape(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

Mask& Mask::operator&=(const Mask& other) {
  require_same_shape(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

Mask& Mask::subtract(const Mask& other) {
  require_same_shape(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~other.words_[i];
  return *this;
}

Mask Mask::translated(int dx, int dy) const {
  Mask out(height_, width_);
  const int y_begin = std::max(0, -dy);
  const int y_end = std::min(height_, height_ - dy);
  const int x_begin = std::max(0, -dx);
  const int x_end = std::min(width_, width_ - dx);
  for (int y = y_begin; y < y_end; ++y) {
    for (int x = x_begin; x < x_end; ++x) {
      if (get(x, y)) out.set(x + dx, y + dy);
    }
  }
  return out;
}

std::vector<std::uint8_t> Mask::to_bytes() const {
  std::vector<std::uint8_t> out(size(), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>((words_[i >> 6] >> (i & 63)) & 1u);
  }
  return out;
}

double iou(const Mask& a, const Mask& b) {
  const std::size_t uni = a.union_area(b);
  if (uni == 0) return 0.0;
  return static_cast<double>(a.intersection_area(b)) / static_cast<double>(uni);
}

Matrix iou_matrix(std::span<const Mask> a, std::span<const Mask> b) {
  Matrix out(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out(i, j) = iou(a[i], b[j]);
  }
  return out;
}

BBox tight_bbox(const Mask& m) {
  if (!m.valid() || m.empty()) fail(ErrorCode::kEmptyMask, "tight_bbox of an empty mask");
  BBox box{m.width(), m.height(), 0, 0};
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (!m.get(x, y)) continue;
      box.x0 = std::min(box.x0, x);
      box.y0 = std::min(box.y0, y);
      box.x1 = std::max(box.x1, x + 1);
      box.y1 = std::max(box.y1, y + 1);
    }
  }
  return box;
}

double bbox_iou(const BBox& a, const BBox& b) {
  if (a.x0 >= a.x1 || a.y0 >= a.y1 || b.x0 >= b.x1 || b.y0 >= b.y1) {
    fail(ErrorCode::kParameter, "bbox_iou requires non-degenerate boxes");
  }
  const long long iw = std::max(0, std::min(a.x1, b.x1) - std::max(a.x0, b.x0));
  const long long ih = std::max(0, std::min(a.y1, b.y1) - std::max(a.y0, b.y0));
  const long long inter = iw * ih;
  return static_cast<double>(inter) / static_cast<double>(a.area() + b.area() - inter);
}

}  // namespace flowseg
