#pragma once

// Dense linear algebra over a prime field F_p with small p. Private helper
// for subfield computations; entries are reduced integers in [0, p).

#include <cstdint>
#include <vector>

namespace mmeval::ff::detail {

class FpMatrix {
 public:
  FpMatrix(std::size_t rows, std::size_t cols, std::uint32_t p)
      : rows_(rows), cols_(cols), p_(p), data_(rows * cols, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::uint32_t& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  std::uint32_t at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  /// In-place reduced row echelon form; returns the pivot column of each
  /// nonzero row.
  std::vector<std::size_t> rref() {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols_ && row < rows_; ++col) {
      std::size_t sel = row;
      while (sel < rows_ && at(sel, col) == 0) ++sel;
      if (sel == rows_) continue;
      swap_rows(sel, row);
      scale_row(row, inverse(at(row, col)));
      for (std::size_t r = 0; r < rows_; ++r) {
        if (r != row && at(r, col) != 0) add_row_multiple(r, row, p_ - at(r, col));
      }
      pivots.push_back(col);
      ++row;
    }
    return pivots;
  }

  std::size_t rank() const {
    FpMatrix copy = *this;
    return copy.rref().size();
  }

  /// Basis of {x : M x = 0}.
  std::vector<std::vector<std::uint32_t>> nullspace() const {
    FpMatrix m = *this;
    const auto pivots = m.rref();
    std::vector<bool> is_pivot(cols_, false);
    for (auto c : pivots) is_pivot[c] = true;
    std::vector<std::vector<std::uint32_t>> basis;
    for (std::size_t free = 0; free < cols_; ++free) {
      if (is_pivot[free]) continue;
      std::vector<std::uint32_t> v(cols_, 0);
      v[free] = 1;
      for (std::size_t r = 0; r < pivots.size(); ++r) {
        v[pivots[r]] = (p_ - m.at(r, free)) % p_;
      }
      basis.push_back(std::move(v));
    }
    return basis;
  }

  std::uint32_t inverse(std::uint32_t x) const {
    // p is small; Fermat is fine.
    std::uint64_t result = 1, base = x % p_;
    std::uint32_t e = p_ - 2;
    while (e) {
      if (e & 1) result = result * base % p_;
      base = base * base % p_;
      e >>= 1;
    }
    return static_cast<std::uint32_t>(result);
  }

 private:
  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t c = 0; c < cols_; ++c) std::swap(at(a, c), at(b, c));
  }
  void scale_row(std::size_t r, std::uint32_t s) {
    for (std::size_t c = 0; c < cols_; ++c) at(r, c) = static_cast<std::uint32_t>(std::uint64_t{at(r, c)} * s % p_);
  }
  void add_row_multiple(std::size_t dst, std::size_t src, std::uint32_t s) {
    for (std::size_t c = 0; c < cols_; ++c) {
      at(dst, c) = static_cast<std::uint32_t>((at(dst, c) + std::uint64_t{at(src, c)} * s) % p_);
    }
  }

  std::size_t rows_, cols_;
  std::uint32_t p_;
  std::vector<std::uint32_t> data_;
};

}  // namespace mmeval::ff::detail
