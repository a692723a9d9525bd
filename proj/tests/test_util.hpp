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

// Shared helpers and reference implementations for the tests. The oracles
// here work on plain byte grids so they share no code with the library.

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "flowseg/error.hpp"
#include "flowseg/mask.hpp"
#include "flowseg/synth.hpp"

namespace flowseg::testing {

// Error code thrown by fn, or kInternal if it returns normally.
inline ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

inline Mask rect(int h, int w, int x0, int y0, int x1, int y1) {
  Mask m(h, w);
  for (int y = std::max(0, y0); y < std::min(h, y1); ++y) {
    for (int x = std::max(0, x0); x < std::min(w, x1); ++x) m.set(x, y);
  }
  return m;
}

inline Mask random_mask(Rng& rng, int h, int w, double p) {
  Mask m(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (rng.bernoulli(p)) m.set(x, y);
    }
  }
  return m;
}

// Random axis-aligned box, at least 1x1, inside the frame.
inline Mask random_box(Rng& rng, int h, int w) {
  const int x0 = rng.uniform_int(0, w - 1);
  const int y0 = rng.uniform_int(0, h - 1);
  const int x1 = rng.uniform_int(x0 + 1, w);
  const int y1 = rng.uniform_int(y0 + 1, h);
  return rect(h, w, x0, y0, x1, y1);
}

inline double iou_bytes(const Mask& a, const Mask& b) {
  const auto x = a.to_bytes();
  const auto y = b.to_bytes();
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    inter += (x[i] && y[i]) ? 1 : 0;
    uni += (x[i] || y[i]) ? 1 : 0;
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

struct BruteAssignment {
  std::vector<int> row_to_col;
  double total = 0.0;
};

// Exhaustive search over all injective row->column maps of the zero-padded
// square matrix. Among optimal maps the one whose row sequence (dummy column
// written as `cols`) is lexicographically smallest wins.
inline BruteAssignment brute_force_assignment(const std::vector<std::vector<double>>& w,
                                              std::size_t rows, std::size_t cols, bool maximize) {
  const std::size_t n = std::max(rows, cols);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  BruteAssignment best;
  bool have = false;
  std::vector<int> best_key;
  do {
    double total = 0.0;
    std::vector<int> key(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      const auto c = static_cast<std::size_t>(perm[r]);
      if (c < cols) total += w[r][c];
      key[r] = c < cols ? perm[r] : static_cast<int>(cols);
    }
    const bool better = !have || (maximize ? total > best.total : total < best.total);
    const bool tie = have && total == best.total;
    if (better || (tie && key < best_key)) {
      have = true;
      best.total = total;
      best_key = key;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  best.row_to_col.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    best.row_to_col[r] = best_key[r] < static_cast<int>(cols) ? best_key[r] : -1;
  }
  return best;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("flowseg_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace flowseg::testing
