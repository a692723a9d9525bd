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

#include "flowseg/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flowseg/error.hpp"

namespace flowseg {

namespace {

// Minimum-cost perfect matching over the square submatrix picked out by `rows`
// and `cols` (shortest augmenting paths with potentials). Returns the cost of
// the optimum; `match` receives, per position in `rows`, a position in `cols`.
double min_cost_perfect(const Matrix& cost, const std::vector<int>& rows,
                        const std::vector<int>& cols, std::vector<int>* match) {
  const std::size_t n = rows.size();
  if (n == 0) {
    if (match) match->clear();
    return 0.0;
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  auto at = [&](std::size_t i, std::size_t j) {
    return cost(static_cast<std::size_t>(rows[i - 1]), static_cast<std::size_t>(cols[j - 1]));
  };
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = at(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_match(n, -1);
  for (std::size_t j = 1; j <= n; ++j) row_match[p[j] - 1] = static_cast<int>(j - 1);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += cost(static_cast<std::size_t>(rows[i]),
                  static_cast<std::size_t>(cols[static_cast<std::size_t>(row_match[i])]));
  }
  if (match) *match = std::move(row_match);
  return total;
}

}  // namespace

std::size_t Assignment::pairs() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(row_to_col.begin(), row_to_col.end(), [](int c) { return c >= 0; }));
}

Assignment solve_assignment(const Matrix& weights, Objective objective) {
  for (double w : weights.data()) {
    if (!std::isfinite(w)) fail(ErrorCode::kInvalidInput, "assignment weights must be finite");
  }
  const std::size_t rows = weights.rows();
  const std::size_t cols = weights.cols();
  Assignment result;
  result.row_to_col.assign(rows, -1);
  if (rows == 0 || cols == 0) return result;

  // Pad to a square cost matrix; dummy rows/columns cost nothing, so a dummy
  // column taken by a real row means that row stays unmatched.
  const std::size_t n = std::max(rows, cols);
  const double sign = objective == Objective::kMaximize ? -1.0 : 1.0;
  Matrix cost(n, n, 0.0);
  double scale = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      cost(r, c) = sign * weights(r, c);
      scale = std::max(scale, std::abs(weights(r, c)));
    }
  }
  const double tol = 1e-9 * (1.0 + scale * static_cast<double>(n));

  std::vector<int> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<int>(i);
  const double optimum = min_cost_perfect(cost, all, all, nullptr);

  // Fix rows one at a time, taking the smallest column that still admits an
  // optimal completion.
  std::vector<char> col_used(n, 0);
  double prefix = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<int> rest_rows;
    for (std::size_t i = r + 1; i < n; ++i) rest_rows.push_back(static_cast<int>(i));

    std::vector<int> candidates;
    for (std::size_t c = 0; c < n; ++c) {
      if (col_used[c]) continue;
      candidates.push_back(static_cast<int>(c));
      if (c >= cols) break;  // dummy columns are interchangeable
    }

    int chosen = -1;
    double best = std::numeric_limits<double>::infinity();
    int best_col = -1;
    for (int c : candidates) {
      std::vector<int> rest_cols;
      for (std::size_t j = 0; j < n; ++j) {
        if (!col_used[j] && static_cast<int>(j) != c) rest_cols.push_back(static_cast<int>(j));
      }
      const double value = prefix + cost(r, static_cast<std::size_t>(c)) +
                           min_cost_perfect(cost, rest_rows, rest_cols, nullptr);
      if (value <= optimum + tol) {
        chosen = c;
        break;
      }
      if (value < best) {
        best = value;
        best_col = c;
      }
    }
    if (chosen < 0) chosen = best_col;
    if (chosen < 0) fail(ErrorCode::kInternal, "assignment: no column left for row");
    col_used[static_cast<std::size_t>(chosen)] = 1;
    prefix += cost(r, static_cast<std::size_t>(chosen));
    if (static_cast<std::size_t>(chosen) < cols) result.row_to_col[r] = chosen;
  }

  for (std::size_t r = 0; r < rows; ++r) {
    if (result.row_to_col[r] >= 0) {
      result.total_weight += weights(r, static_cast<std::size_t>(result.row_to_col[r]));
    }
  }
  return result;
}

}  // namespace flowseg
