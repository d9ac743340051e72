#pragma once

// Dense univariate and multivariate polynomials over a tower level, Hasse
// derivatives, (Hermite) interpolation and subfield-grid evaluation.
//
// Multivariate exponents are encoded base-d little-endian: exponent vector
// (e_1..e_n) sits at flat index sum_j e_j d^(j-1). Grid tables over S^n use
// the same layout with base |S|.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <unordered_map>
#include <vector>

#include "mmeval/ffield.hpp"

namespace mmeval::poly {

using ff::Elem;
using ff::ExtField;
using Exponent = std::vector<unsigned>;

/// binom(n, k) mod p by Lucas' theorem.
std::uint32_t binom_mod(std::uint64_t n, std::uint64_t k, std::uint32_t p);

/// D[i][j] = binom(j, i) mod p for i <= max_order, j < width.
class PascalTable {
 public:
  PascalTable(std::uint32_t p, unsigned max_order, unsigned width);
  std::uint32_t operator()(unsigned i, unsigned j) const {
    if (i > max_order_ || j >= width_) return static_cast<std::uint32_t>(binom_mod(j, i, p_));
    return table_[std::size_t{i} * width_ + j];
  }
  unsigned max_order() const { return max_order_; }
  unsigned width() const { return width_; }

 private:
  std::uint32_t p_;
  unsigned max_order_, width_;
  std::vector<std::uint32_t> table_;
};

// ---------------------------------------------------------------------------
// Univariate

struct UniPoly {
  std::vector<Elem> coeffs;  // low-to-high; empty for zero

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  bool is_zero() const { return coeffs.empty(); }
  void trim();
  friend bool operator==(const UniPoly&, const UniPoly&) = default;
};

UniPoly make_poly(std::vector<Elem> coeffs);
UniPoly poly_add(const ExtField& F, const UniPoly& x, const UniPoly& y);
UniPoly poly_sub(const ExtField& F, const UniPoly& x, const UniPoly& y);
UniPoly poly_mul(const ExtField& F, const UniPoly& x, const UniPoly& y);
UniPoly poly_scale(const ExtField& F, const UniPoly& x, const Elem& c);

/// f(x) by Horner's rule: deg(f) multiplications and additions.
Elem horner_eval(const ExtField& F, const UniPoly& f, const Elem& x);

/// Polynomial of degree <= D through the first D+1 points, by Newton divided
/// differences. Throws DuplicateNodeError, InsufficientDataError.
UniPoly interpolate(const ExtField& F, std::span<const Elem> xs, std::span<const Elem> ys, unsigned D);

/// Lagrange basis values L_j(at) for the given distinct nodes, so that
/// h(at) = sum_j L_j(at) h(x_j) whenever deg h < |nodes|.
std::vector<Elem> lagrange_weights(const ExtField& F, std::span<const Elem> nodes, const Elem& at);

/// Hasse derivative of order k: sum_j binom(j, k) h_j t^(j-k).
UniPoly uni_hasse(const ExtField& F, const UniPoly& h, unsigned k);

struct HermiteData {
  Elem node;
  unsigned multiplicity = 0;
  std::vector<Elem> values;  // uni_hasse(h, k)(node) for k < multiplicity
};

/// Unique h of degree <= D matching the first D+1 conditions in node order.
/// Throws DuplicateNodeError; InsufficientDataError if the data is short or
/// a node lacks some order below its multiplicity.
UniPoly hermite_interpolate(const ExtField& F, std::span<const HermiteData> data, unsigned D);

/// Confluent interpolation with fixed nodes and multiplicities, the system
/// inverted once. Values are passed flattened in node order, orders 0..e-1
/// per node, truncated to the first D+1 conditions.
class HermiteSolver {
 public:
  HermiteSolver(const ExtField& F, std::span<const Elem> nodes, std::span<const unsigned> multiplicities,
                unsigned D);

  unsigned conditions() const { return D_ + 1; }
  /// Coefficients of the interpolant (D+1 entries, untrimmed).
  std::vector<Elem> solve(std::span<const Elem> values) const;
  /// w with h(at) = sum_r w_r values_r.
  std::vector<Elem> functional(const Elem& at) const;

 private:
  ExtField F_;
  unsigned D_;
  std::vector<Elem> inverse_;  // (D+1)^2, row-major
};

// ---------------------------------------------------------------------------
// Multivariate

struct MultiPoly {
  unsigned n = 0;
  unsigned d = 0;
  std::vector<Elem> coeffs;  // length d^n

  static MultiPoly zero(unsigned n, unsigned d);
  std::size_t size() const { return coeffs.size(); }
  bool is_zero() const;
  Exponent exponent(std::size_t index) const;
  std::size_t index(std::span<const unsigned> e) const;
  const Elem& coeff(std::span<const unsigned> e) const { return coeffs[index(e)]; }
  friend bool operator==(const MultiPoly&, const MultiPoly&) = default;
};

std::size_t checked_power(std::size_t base, unsigned exp);

/// Uniformly random coefficients drawn from F.
MultiPoly random_multipoly(const ExtField& F, unsigned n, unsigned d, std::mt19937_64& rng);
/// Random polynomial with `len` coefficients (trimmed).
UniPoly random_unipoly(const ExtField& F, std::size_t len, std::mt19937_64& rng);

/// All e in N^n with |e|_1 <= K, in graded order (total degree, then
/// little-endian lexicographic).
class ExponentSet {
 public:
  ExponentSet(unsigned n, unsigned K);
  unsigned n() const { return n_; }
  unsigned max_order() const { return K_; }
  std::size_t size() const { return list_.size(); }
  const Exponent& operator[](std::size_t i) const { return list_[i]; }
  const std::vector<Exponent>& list() const { return list_; }
  std::optional<std::size_t> find(std::span<const unsigned> e) const;
  /// Number of entries with |e|_1 <= k (entries with |e|_1 = k follow them).
  std::size_t prefix(unsigned k) const { return prefix_[k]; }

 private:
  std::uint64_t key(std::span<const unsigned> e) const;
  unsigned n_, K_;
  std::vector<Exponent> list_;
  std::vector<std::size_t> prefix_;
  std::unordered_map<std::uint64_t, std::size_t> lookup_;
};

/// Hasse derivative sum_e binom(e, b) f_e x^(e-b), same (n, d) bounds.
MultiPoly hasse_derivative(const ExtField& F, const MultiPoly& f, std::span<const unsigned> b);

/// All derivatives of order |b|_1 <= K, aligned with ExponentSet(n, K).
std::vector<MultiPoly> hasse_set(const ExtField& F, const MultiPoly& f, unsigned K);

/// f at one point by nested Horner (d^n - 1 multiplications).
Elem multi_eval(const ExtField& F, const MultiPoly& f, std::span<const Elem> point);

/// f over S^n by partial evaluation, last variable first. The table index of
/// (S[i_1], ..., S[i_n]) is sum_j i_j |S|^(j-1). Results do not depend on the
/// thread count.
std::vector<Elem> grid_eval(const ExtField& F, const MultiPoly& f, std::span<const Elem> S, unsigned threads = 1);

struct Curve {
  std::vector<UniPoly> components;
};

struct CurveShift {
  /// components[i][k] is the coefficient of Z^k in g~_i(t, Z), a polynomial in t.
  std::vector<std::vector<UniPoly>> components;
};

/// f(g_1(t), ..., g_n(t)).
UniPoly compose_on_curve(const ExtField& F, const MultiPoly& f, const Curve& g);

/// g~_i(t, Z) = sum_{k>=1} uni_hasse(g_i, k)(t) Z^(k-1).
CurveShift curve_shift(const ExtField& F, const Curve& g);

}  // namespace mmeval::poly
