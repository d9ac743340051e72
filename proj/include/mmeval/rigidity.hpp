#pragma once

// Vandermonde factorization V_n = Gamma * W * Itilde through the evaluation
// data structure, and the low-rank plus sparse split of a Kronecker product.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mmeval/ffield.hpp"
#include "mmeval/linalg.hpp"

namespace mmeval::rigidity {

using ff::Elem;
using ff::ExtField;
using la::FieldMatrix;

/// n x n matrix with entry (i, j) = alpha_i^j.
FieldMatrix build_vandermonde(const ExtField& F, std::span<const Elem> generators);

/// Rows indexed by F_{p^b}^m (cell order), columns by exponents < d
/// (little-endian), entry point^exponent. b is the degree of `ext` over its
/// ground field. Throws ParamError unless p^b > a d m.
FieldMatrix build_w(const ExtField& ext, unsigned d, unsigned m);

struct FactoredVandermonde {
  ExtField ext;  // F_{q^b}
  std::vector<Elem> generators;
  unsigned d = 0, m = 0, b = 0;
  FieldMatrix gamma;   // n x p^{bm}
  FieldMatrix w;       // p^{bm} x d^m
  FieldMatrix itilde;  // d^m x n
  std::size_t gamma_max_row_nnz = 0;
  /// Nonzero count after expanding each F_{q^b} entry over an F_p basis of
  /// size a b (row sparsity budget times a b).
  std::size_t expanded_row_nnz = 0;
};

/// Throws ParamError if d^m < n or a generator is outside F_q, and
/// VerificationError if the product check fails.
FactoredVandermonde factor_vandermonde(std::shared_ptr<const ff::BaseField> base, std::span<const Elem> generators,
                                       unsigned d, unsigned m);

/// True iff embed(V_n) == gamma * w * itilde entrywise.
bool verify_factorization(const FactoredVandermonde& fv);

struct Claim {
  std::optional<std::size_t> max_rank;
  std::optional<std::size_t> max_row_sparsity;
  std::optional<std::size_t> max_col_sparsity;
};

struct Certificate {
  std::size_t rank = 0;
  std::size_t row_sparsity = 0;
  std::size_t col_sparsity = 0;
  bool rank_ok = true;
  bool row_ok = true;
  bool col_ok = true;
  bool pass() const { return rank_ok && row_ok && col_ok; }
};

Certificate certify(const FieldMatrix& m, const Claim& claim);
std::string format_certificate(const Certificate& c, const Claim& claim);

struct SplitFactor {
  FieldMatrix L;
  FieldMatrix S;
};

struct SplitResult {
  FieldMatrix low_rank;  // terms with fewer than t sparse factors
  FieldMatrix sparse;    // the remaining terms
  std::size_t rank_low = 0;
  std::size_t row_sparsity = 0;
  std::size_t col_sparsity = 0;
  std::uint64_t rank_bound = 0;      // sum_{j<t} C(m,j) r^(m-j) q^j
  std::uint64_t sparsity_bound = 0;  // sum_{j>=t} C(m,j) s^j q^(m-j)
  bool sum_matches = false;          // low_rank + sparse == kron(L_i + S_i)
};

/// Throws DimensionError if the factors are not all q x q of one size or
/// t > m.
SplitResult kronecker_split(std::span<const SplitFactor> factors, unsigned t);

/// The 2 x 2 split W = L + S of the m = 1, d = 2 evaluation matrix over F_2:
/// L = [[1,0],[1,0]] (rank 1), S = [[0,0],[0,1]] (sparsity 1).
SplitFactor toy_factor();

std::uint64_t binomial(unsigned n, unsigned k);

}  // namespace mmeval::rigidity
