// Copyright (C) 2026 The ivmod Authors
// SPDX-License-Identifier: Apache-2.0

#include "ivmod/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ivmod/errors.hpp"

namespace ivmod {
namespace {

// Perfect matchings restricted to tight edges (zero reduced cost under the
// optimal potentials) are exactly the optimal assignments. Walking rows in
// order and giving each the lowest column that still admits a completion
// yields the lexicographically smallest optimum.
class TightGraph {
 public:
  TightGraph(std::vector<std::vector<std::size_t>> adjacency, std::vector<std::size_t> assignment)
      : adj_(std::move(adjacency)), row_to_col_(std::move(assignment)),
        col_to_row_(row_to_col_.size()), fixed_(row_to_col_.size(), 0),
        seen_(row_to_col_.size(), 0) {
    for (std::size_t r = 0; r < row_to_col_.size(); ++r) col_to_row_[row_to_col_[r]] = r;
  }

  std::vector<std::size_t> lexicographic() {
    const std::size_t n = row_to_col_.size();
    for (std::size_t row = 0; row < n; ++row) {
      for (std::size_t col : adj_[row]) {
        if (col == row_to_col_[row] || try_move(row, col)) break;
      }
      fixed_[row] = 1;
    }
    return row_to_col_;
  }

 private:
  // Gives `col` to `row` and re-routes the displaced row to the column `row`
  // released, through unfixed rows only.
  bool try_move(std::size_t row, std::size_t col) {
    const std::size_t released = row_to_col_[row];
    const std::size_t displaced = col_to_row_[col];
    if (fixed_[displaced]) return false;
    std::fill(seen_.begin(), seen_.end(), 0);
    seen_[col] = 1;
    fixed_[row] = 1;
    const bool ok = augment(displaced, released);
    fixed_[row] = 0;
    if (!ok) return false;
    row_to_col_[row] = col;
    col_to_row_[col] = row;
    return true;
  }

  bool augment(std::size_t row, std::size_t target) {
    for (std::size_t col : adj_[row]) {
      if (seen_[col]) continue;
      seen_[col] = 1;
      if (col == target) {
        row_to_col_[row] = col;
        col_to_row_[col] = row;
        return true;
      }
      const std::size_t owner = col_to_row_[col];
      if (fixed_[owner]) continue;
      if (augment(owner, target)) {
        row_to_col_[row] = col;
        col_to_row_[col] = row;
        return true;
      }
    }
    return false;
  }

  std::vector<std::vector<std::size_t>> adj_;
  std::vector<std::size_t> row_to_col_;
  std::vector<std::size_t> col_to_row_;
  std::vector<char> fixed_;
  std::vector<char> seen_;
};

}  // namespace

std::vector<std::size_t> solve_assignment(const CostMatrix& cost) {
  if (cost.rows != cost.cols) throw ArgumentError("solve_assignment: matrix is not square");
  const std::size_t n = cost.rows;
  if (n == 0) return {};

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based potentials; column 0 is the virtual source.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match_col(n + 1, 0), way(n + 1, 0);

  for (std::size_t row = 1; row <= n; ++row) {
    match_col[0] = row;
    std::size_t col0 = 0;
    std::vector<double> min_slack(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[col0] = 1;
      const std::size_t r0 = match_col[col0];
      double delta = kInf;
      std::size_t col1 = 0;
      for (std::size_t c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double reduced = cost(r0 - 1, c - 1) - u[r0] - v[c];
        if (reduced < min_slack[c]) {
          min_slack[c] = reduced;
          way[c] = col0;
        }
        if (min_slack[c] < delta) {
          delta = min_slack[c];
          col1 = c;
        }
      }
      for (std::size_t c = 0; c <= n; ++c) {
        if (used[c]) {
          u[match_col[c]] += delta;
          v[c] -= delta;
        } else {
          min_slack[c] -= delta;
        }
      }
      col0 = col1;
    } while (match_col[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      match_col[col0] = match_col[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  std::vector<std::size_t> assignment(n, 0);
  for (std::size_t c = 1; c <= n; ++c) assignment[match_col[c] - 1] = c - 1;

  double scale = 1.0;
  for (double value : cost.values) scale = std::max(scale, std::abs(value));
  const double tolerance = 1e-12 * scale * static_cast<double>(n);
  std::vector<std::vector<std::size_t>> tight(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const double reduced = cost(r, c) - u[r + 1] - v[c + 1];
      if (c == assignment[r] || std::abs(reduced) <= tolerance) tight[r].push_back(c);
    }
  }
  return TightGraph(std::move(tight), std::move(assignment)).lexicographic();
}

}  // namespace ivmod
