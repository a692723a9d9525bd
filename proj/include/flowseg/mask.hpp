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
#include <span>
#include <vector>

namespace flowseg {

struct Pixel {
  int x = 0;
  int y = 0;

  friend bool operator==(const Pixel&, const Pixel&) = default;
};

// Binary H x W occupancy grid packed into 64-bit words, row-major.
// Padding bits past height*width are always zero so word-parallel popcounts
// and comparisons need no masking.
class Mask {
 public:
  Mask() = default;
  Mask(int height, int width);

  static Mask full(int height, int width);
  // Nonzero entries of a row-major byte grid become set bits.
  static Mask from_bytes(int height, int width, std::span<const std::uint8_t> bytes);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }
  bool valid() const noexcept { return height_ > 0 && width_ > 0; }

  bool get(int x, int y) const noexcept {
    const std::size_t i = index(x, y);
    return (words_[i >> 6] >> (i & 63)) & 1u;
  }
  void set(int x, int y, bool on = true) noexcept {
    const std::size_t i = index(x, y);
    const std::uint64_t bit = std::uint64_t{1} << (i & 63);
    if (on) {
      words_[i >> 6] |= bit;
    } else {
      words_[i >> 6] &= ~bit;
    }
  }
  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  std::size_t area() const noexcept;
  bool empty() const noexcept;

  std::size_t intersection_area(const Mask& other) const;
  std::size_t union_area(const Mask& other) const;

  Mask& operator|=(const Mask& other);
  Mask& operator&=(const Mask& other);
  // Removes every pixel set in `other`.
  Mask& subtract(const Mask& other);

  // Moves the mask by (dx, dy); pixels leaving the frame are dropped.
  Mask translated(int dx, int dy) const;

  std::vector<std::uint8_t> to_bytes() const;
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  friend bool operator==(const Mask& a, const Mask& b) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }
  void require_same_shape(const Mask& other) const;

  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint64_t> words_;
};

inline Mask operator|(Mask a, const Mask& b) { return a |= b; }
inline Mask operator&(Mask a, const Mask& b) { return a &= b; }
inline Mask difference(Mask a, const Mask& b) { return a.subtract(b); }

// Intersection over union. Two empty masks score 0.
double iou(const Mask& a, const Mask& b);

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> data() const noexcept { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix iou_matrix(std::span<const Mask> a, std::span<const Mask> b);

// Half-open pixel box [x0, x1) x [y0, y1).
struct BBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  long long area() const noexcept {
    return static_cast<long long>(x1 - x0) * static_cast<long long>(y1 - y0);
  }
  friend bool operator==(const BBox&, const BBox&) = default;
};

BBox tight_bbox(const Mask& m);
double bbox_iou(const BBox& a, const BBox& b);

}  // namespace flowseg
