#include "mmeval/linalg.hpp"

#include <algorithm>
#include <string>

namespace mmeval::la {

FieldMatrix::FieldMatrix(ExtField field, std::size_t rows, std::size_t cols)
    : field_(std::move(field)), rows_(rows), cols_(cols), data_(rows * cols) {}

FieldMatrix FieldMatrix::identity(ExtField field, std::size_t n) {
  FieldMatrix m(std::move(field), n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = m.field().one();
  return m;
}

FieldMatrix FieldMatrix::multiply(const FieldMatrix& rhs) const {
  if (cols_ != rhs.rows_) {
    throw DimensionError("cannot multiply " + std::to_string(rows_) + "x" + std::to_string(cols_) + " by " +
                         std::to_string(rhs.rows_) + "x" + std::to_string(rhs.cols_));
  }
  FieldMatrix out(field_, rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const Elem& x = at(i, k);
      if (field_.is_zero(x)) continue;
      for (std::size_t j = 0; j < rhs.cols_; ++j) {
        const Elem& y = rhs.at(k, j);
        if (field_.is_zero(y)) continue;
        out.at(i, j) = field_.add(out.at(i, j), field_.mul(x, y));
      }
    }
  }
  return out;
}

FieldMatrix FieldMatrix::add(const FieldMatrix& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw DimensionError("matrix sum with mismatched shapes");
  FieldMatrix out(field_, rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = field_.add(data_[i], rhs.data_[i]);
  return out;
}

FieldMatrix FieldMatrix::kronecker(const FieldMatrix& rhs) const {
  FieldMatrix out(field_, rows_ * rhs.rows_, cols_ * rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      const Elem& x = at(i, j);
      if (field_.is_zero(x)) continue;
      for (std::size_t k = 0; k < rhs.rows_; ++k) {
        for (std::size_t l = 0; l < rhs.cols_; ++l) {
          const Elem& y = rhs.at(k, l);
          if (field_.is_zero(y)) continue;
          out.at(i * rhs.rows_ + k, j * rhs.cols_ + l) = field_.mul(x, y);
        }
      }
    }
  }
  return out;
}

FieldMatrix FieldMatrix::with_field(ExtField field) const {
  FieldMatrix out(std::move(field), rows_, cols_);
  out.data_ = data_;
  return out;
}

std::size_t FieldMatrix::rank() const {
  FieldMatrix m = *this;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols_ && row < rows_; ++col) {
    std::size_t sel = row;
    while (sel < rows_ && field_.is_zero(m.at(sel, col))) ++sel;
    if (sel == rows_) continue;
    if (sel != row) {
      for (std::size_t c = col; c < cols_; ++c) std::swap(m.at(sel, c), m.at(row, c));
    }
    const Elem pinv = field_.inv(m.at(row, col));
    for (std::size_t r = row + 1; r < rows_; ++r) {
      if (field_.is_zero(m.at(r, col))) continue;
      const Elem f = field_.mul(m.at(r, col), pinv);
      for (std::size_t c = col; c < cols_; ++c) {
        if (!field_.is_zero(m.at(row, c))) m.at(r, c) = field_.sub(m.at(r, c), field_.mul(f, m.at(row, c)));
      }
    }
    ++row;
  }
  return row;
}

std::vector<Elem> FieldMatrix::solve(std::vector<Elem> rhs) const {
  if (rows_ != cols_ || rhs.size() != rows_) throw DimensionError("solve needs a square system");
  const std::size_t n = rows_;
  FieldMatrix m = *this;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t sel = col;
    while (sel < n && field_.is_zero(m.at(sel, col))) ++sel;
    if (sel == n) throw SingularSystemError("linear system is singular");
    if (sel != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(m.at(sel, c), m.at(col, c));
      std::swap(rhs[sel], rhs[col]);
    }
    const Elem pinv = field_.inv(m.at(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      if (field_.is_zero(m.at(r, col))) continue;
      const Elem f = field_.mul(m.at(r, col), pinv);
      for (std::size_t c = col; c < n; ++c) m.at(r, c) = field_.sub(m.at(r, c), field_.mul(f, m.at(col, c)));
      rhs[r] = field_.sub(rhs[r], field_.mul(f, rhs[col]));
    }
  }
  std::vector<Elem> x(n);
  for (std::size_t i = n; i-- > 0;) {
    Elem acc = rhs[i];
    for (std::size_t c = i + 1; c < n; ++c) acc = field_.sub(acc, field_.mul(m.at(i, c), x[c]));
    x[i] = field_.mul(acc, field_.inv(m.at(i, i)));
  }
  return x;
}

std::optional<FieldMatrix> FieldMatrix::inverse() const {
  if (rows_ != cols_) throw DimensionError("inverse of a non-square matrix");
  const std::size_t n = rows_;
  FieldMatrix m = *this;
  FieldMatrix inv = identity(field_, n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t sel = col;
    while (sel < n && field_.is_zero(m.at(sel, col))) ++sel;
    if (sel == n) return std::nullopt;
    if (sel != col) {
      for (std::size_t c = 0; c < n; ++c) {
        std::swap(m.at(sel, c), m.at(col, c));
        std::swap(inv.at(sel, c), inv.at(col, c));
      }
    }
    const Elem pinv = field_.inv(m.at(col, col));
    for (std::size_t c = 0; c < n; ++c) {
      m.at(col, c) = field_.mul(m.at(col, c), pinv);
      inv.at(col, c) = field_.mul(inv.at(col, c), pinv);
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || field_.is_zero(m.at(r, col))) continue;
      const Elem f = m.at(r, col);
      for (std::size_t c = 0; c < n; ++c) {
        m.at(r, c) = field_.sub(m.at(r, c), field_.mul(f, m.at(col, c)));
        inv.at(r, c) = field_.sub(inv.at(r, c), field_.mul(f, inv.at(col, c)));
      }
    }
  }
  return inv;
}

std::size_t FieldMatrix::nnz() const {
  return static_cast<std::size_t>(
      std::count_if(data_.begin(), data_.end(), [&](const Elem& x) { return !field_.is_zero(x); }));
}

std::size_t FieldMatrix::row_nnz(std::size_t r) const {
  std::size_t k = 0;
  for (std::size_t c = 0; c < cols_; ++c) k += !field_.is_zero(at(r, c));
  return k;
}

std::size_t FieldMatrix::max_row_nnz() const {
  std::size_t best = 0;
  for (std::size_t r = 0; r < rows_; ++r) best = std::max(best, row_nnz(r));
  return best;
}

std::size_t FieldMatrix::max_col_nnz() const {
  std::size_t best = 0;
  for (std::size_t c = 0; c < cols_; ++c) {
    std::size_t k = 0;
    for (std::size_t r = 0; r < rows_; ++r) k += !field_.is_zero(at(r, c));
    best = std::max(best, k);
  }
  return best;
}

}  // namespace mmeval::la
