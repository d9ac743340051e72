#pragma once

// Dense matrices over a field level of the tower.

#include <cstddef>
#include <optional>
#include <vector>

#include "mmeval/ffield.hpp"

namespace mmeval::la {

using ff::Elem;
using ff::ExtField;

class FieldMatrix {
 public:
  FieldMatrix(ExtField field, std::size_t rows, std::size_t cols);

  static FieldMatrix identity(ExtField field, std::size_t n);

  const ExtField& field() const { return field_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Elem& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Elem& at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  /// Product over the field; skips zero entries of the left operand, so
  /// sparse left factors are cheap. Throws DimensionError.
  FieldMatrix multiply(const FieldMatrix& rhs) const;
  FieldMatrix add(const FieldMatrix& rhs) const;
  FieldMatrix kronecker(const FieldMatrix& rhs) const;

  /// Same entries interpreted over another level with the same ground field.
  FieldMatrix with_field(ExtField field) const;

  std::size_t rank() const;
  /// Solves A x = rhs for square invertible A. Throws SingularSystemError.
  std::vector<Elem> solve(std::vector<Elem> rhs) const;
  std::optional<FieldMatrix> inverse() const;

  std::size_t nnz() const;
  std::size_t max_row_nnz() const;
  std::size_t max_col_nnz() const;
  std::size_t row_nnz(std::size_t r) const;

  bool operator==(const FieldMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

 private:
  ExtField field_;
  std::size_t rows_, cols_;
  std::vector<Elem> data_;
};

}  // namespace mmeval::la
