#pragma once

#include <algorithm>

namespace ipvt {

template <class Pred>
std::size_t CoverageGrid::cover_row(std::size_t row, std::ptrdiff_t lo, std::ptrdiff_t hi, Pred&& inside) {
  if (row_uncovered_[row] == 0) return 0;
  lo = std::max<std::ptrdiff_t>(lo, 0);
  hi = std::min<std::ptrdiff_t>(hi, static_cast<std::ptrdiff_t>(n_) - 1);
  if (lo > hi) return 0;
  std::size_t added = 0;
  std::size_t col = find_uncovered(row, static_cast<std::size_t>(lo));
  while (col <= static_cast<std::size_t>(hi)) {
    if (inside(center(col))) {
      covered_[row * n_ + col] = 1;
      next_[row * (n_ + 1) + col] = static_cast<std::uint32_t>(col + 1);
      ++added;
    }
    col = find_uncovered(row, col + 1);
  }
  row_uncovered_[row] -= added;
  covered_count_ += added;
  return added;
}

}  // namespace ipvt
