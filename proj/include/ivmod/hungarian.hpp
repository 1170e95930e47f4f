// Copyright (C) 2026 The ivmod Authors
// SPDX-License-Identifier: Apache-2.0
//
// Minimum-cost perfect assignment on a dense square cost matrix.

#pragma once

#include <cstddef>
#include <vector>

namespace ivmod {

// Row-major n x n cost matrix.
struct CostMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  CostMatrix() = default;
  CostMatrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), values(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

// Returns, for each row, the column assigned to it. O(n^3) shortest
// augmenting path with potentials. Among equal-cost optima the result is the
// lexicographically smallest: row 0 gets the lowest feasible column, then
// row 1, and so on. Throws ArgumentError if not square.
std::vector<std::size_t> solve_assignment(const CostMatrix& cost);

}  // namespace ivmod
