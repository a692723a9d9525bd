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

#include <cstddef>
#include <vector>

#include "flowseg/mask.hpp"

namespace flowseg {

enum class Objective { kMinimize, kMaximize };

struct Assignment {
  // row_to_col[r] is the matched column of row r, or -1 when r is unmatched.
  std::vector<int> row_to_col;
  // Sum of the matched weight entries, accumulated in row order.
  double total_weight = 0.0;

  std::size_t pairs() const noexcept;
};

// Optimal linear sum assignment on a possibly rectangular matrix. Exactly
// min(rows, cols) pairs are matched. Among equally optimal matchings the one
// with the lexicographically smallest row_to_col is returned, where "unmatched"
// sorts after every real column. Non-finite entries raise kInvalidInput.
Assignment solve_assignment(const Matrix& weights, Objective objective);

}  // namespace flowseg
