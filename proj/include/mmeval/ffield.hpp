#pragma once

// Finite field towers F_p ⊂ F_q = F_p[Y0]/(v0) ⊂ F_q[Y1]/(v1).
//
// BaseField is the ground level F_q (the prime field is the case a = 1).
// Its elements are canonical integer codes sum_j c_j p^j, so the code order
// is the canonical element order (constant term varies fastest).
//
// ExtField is a degree-b extension of a BaseField. Its elements are Elem
// values holding b codes of the base field, low-to-high in Y1. A degree-1
// extension with modulus Y represents F_q itself, and because the embedding
// F_q -> F_{q^b} is "constant polynomial in Y1", an F_q element stored in an
// Elem is already a valid element of every extension of the same base.
//
// All arithmetic on ExtField charges ground-level (F_q) operations to the
// thread's active OpCounter, if one is installed.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mmeval/error.hpp"

namespace mmeval::ff {

// ---------------------------------------------------------------------------
// Operation counting

struct OpCounter {
  std::uint64_t adds = 0;
  std::uint64_t muls = 0;
  std::uint64_t invs = 0;

  std::uint64_t total() const { return adds + muls + invs; }
  void reset() { *this = OpCounter{}; }

  OpCounter& operator+=(const OpCounter& o) {
    adds += o.adds;
    muls += o.muls;
    invs += o.invs;
    return *this;
  }
  friend bool operator==(const OpCounter&, const OpCounter&) = default;
};

namespace detail {
inline thread_local OpCounter* tls_counter = nullptr;
}  // namespace detail

inline OpCounter* active_counter() { return detail::tls_counter; }

inline void charge(std::uint64_t adds, std::uint64_t muls, std::uint64_t invs = 0) {
  if (OpCounter* c = detail::tls_counter) {
    c->adds += adds;
    c->muls += muls;
    c->invs += invs;
  }
}

/// Installs `counter` as the active counter of the calling thread for the
/// lifetime of the scope. Passing nullptr suspends counting.
class CounterScope {
 public:
  explicit CounterScope(OpCounter* counter) : prev_(detail::tls_counter) {
    detail::tls_counter = counter;
  }
  explicit CounterScope(OpCounter& counter) : CounterScope(&counter) {}
  ~CounterScope() { detail::tls_counter = prev_; }
  CounterScope(const CounterScope&) = delete;
  CounterScope& operator=(const CounterScope&) = delete;

 private:
  OpCounter* prev_;
};

// ---------------------------------------------------------------------------
// Ground field F_q

using Code = std::uint16_t;
using Digit = std::uint32_t;

bool is_prime(std::uint32_t p);

class BaseField {
 public:
  /// F_p, represented with modulus Y.
  static std::shared_ptr<const BaseField> prime(std::uint32_t p);
  /// F_{p^a} with the canonical (lexicographically first) modulus.
  static std::shared_ptr<const BaseField> canonical(std::uint32_t p, unsigned a);
  /// F_p[Y0]/(modulus). `modulus` is low-to-high, monic, over [0, p).
  /// Throws ParamError if p is not prime or the modulus is reducible.
  static std::shared_ptr<const BaseField> with_modulus(std::uint32_t p,
                                                       std::vector<Digit> modulus);

  std::uint32_t characteristic() const { return p_; }
  unsigned degree() const { return a_; }
  std::uint32_t order() const { return q_; }
  const std::vector<Digit>& modulus() const { return modulus_; }

  Code zero() const { return 0; }
  Code one() const { return 1; }
  /// The residue class of Y0 (equals -v0(0) when a = 1).
  Code y0() const { return y0_; }

  // Raw arithmetic: not charged to any counter.
  Code add(Code x, Code y) const;
  Code sub(Code x, Code y) const { return add(x, neg_[y]); }
  Code neg(Code x) const { return neg_[x]; }
  Code mul(Code x, Code y) const {
    if (x == 0 || y == 0) return 0;
    return exp_[static_cast<std::size_t>(log_[x]) + log_[y]];
  }
  Code inv(Code x) const;
  Code pow(Code x, std::uint64_t e) const;

  std::vector<Digit> digits(Code x) const;
  Code from_digits(std::span<const Digit> digits) const;

  /// Cost charged for one coefficient extraction when extraction is counted:
  /// the op count of the conjugate route (a-1 p-th powerings and an a x a
  /// matrix-vector product against the precomputed inverse Vandermonde).
  const OpCounter& extraction_cost() const { return extraction_cost_; }
  /// Rows of the inverse of A[k][j] = Y0^{j p^k}, used by the conjugate route.
  const std::vector<std::vector<Code>>& conjugate_inverse() const { return conj_inv_; }

 private:
  BaseField() = default;
  void build_tables();
  void build_conjugate_system();
  static std::shared_ptr<BaseField> make_unchecked(std::uint32_t p, std::vector<Digit> modulus);

  std::uint32_t p_ = 0;
  unsigned a_ = 0;
  std::uint32_t q_ = 0;
  std::vector<Digit> modulus_;
  Code y0_ = 0;
  std::vector<Code> exp_;
  std::vector<std::uint32_t> log_;
  std::vector<Code> neg_;
  std::vector<Code> add_table_;  // q*q when q is small, else empty
  std::vector<std::vector<Code>> conj_inv_;
  OpCounter extraction_cost_;
};

// ---------------------------------------------------------------------------
// Polynomials over a BaseField (used for modulus search and certification).

using BasePoly = std::vector<Code>;  // low-to-high, trimmed

struct IrreducibilityCertificate {
  bool irreducible = false;
  /// Human-readable reason when not irreducible, e.g.
  /// "gcd(v, X^(q^1) - X) != 1".
  std::string failure;
};

/// gcd(v, X^{q^k} - X) = 1 for all k <= deg/2 and X^{q^deg} = X mod v.
IrreducibilityCertificate certify_irreducible(const BaseField& field, const BasePoly& v);

/// Lexicographically first monic irreducible polynomial of the given degree,
/// constant term varying fastest.
BasePoly find_irreducible(const BaseField& field, unsigned degree);

// ---------------------------------------------------------------------------
// Extension field F_{q^b}

inline constexpr std::size_t kMaxExtDegree = 16;

struct Elem {
  std::array<Code, kMaxExtDegree> c{};
  friend bool operator==(const Elem&, const Elem&) = default;
};

struct ElemHash {
  std::size_t operator()(const Elem& x) const noexcept;
};

class ExtField {
 public:
  /// Extension by the canonical modulus find_irreducible(base, degree).
  static ExtField build(std::shared_ptr<const BaseField> base, unsigned degree);
  /// F_q itself as a degree-1 extension with modulus Y.
  static ExtField trivial(std::shared_ptr<const BaseField> base) { return build(std::move(base), 1); }

  /// Throws ParamError if the modulus is not monic and irreducible.
  ExtField(std::shared_ptr<const BaseField> base, BasePoly modulus);

  const BaseField& base() const { return *base_; }
  const std::shared_ptr<const BaseField>& base_ptr() const { return base_; }
  unsigned degree() const { return b_; }
  unsigned absolute_degree() const { return base_->degree() * b_; }
  std::uint32_t characteristic() const { return base_->characteristic(); }
  /// q^b; throws ParamError when it does not fit in 64 bits.
  std::uint64_t order() const;
  const BasePoly& modulus() const { return modulus_; }

  Elem zero() const { return Elem{}; }
  Elem one() const {
    Elem e;
    e.c[0] = 1;
    return e;
  }
  static Elem embed(Code x) {
    Elem e;
    e.c[0] = x;
    return e;
  }
  Elem y1() const;
  bool is_zero(const Elem& x) const { return x == Elem{}; }

  Elem add(const Elem& x, const Elem& y) const;
  Elem sub(const Elem& x, const Elem& y) const;
  Elem neg(const Elem& x) const;
  Elem mul(const Elem& x, const Elem& y) const;
  Elem inv(const Elem& x) const;  // throws InvariantError on zero
  Elem pow(const Elem& x, std::uint64_t e) const;
  /// x * c for c in F_q.
  Elem scale(const Elem& x, Code c) const;
  /// Integer scalar k (reduced mod p).
  Elem scale_int(const Elem& x, std::uint64_t k) const {
    return scale(x, static_cast<Code>(k % characteristic()));
  }

  /// Coordinates over F_p: index j*a + k holds digit k of coefficient j.
  std::vector<Digit> prime_digits(const Elem& x) const;
  Elem from_prime_digits(std::span<const Digit> digits) const;

  /// Canonical order: compare from the highest Y1 coefficient down.
  bool canonical_less(const Elem& x, const Elem& y) const;
  /// Position in canonical order; requires order() to fit in 64 bits.
  std::uint64_t canonical_index(const Elem& x) const;
  Elem from_canonical_index(std::uint64_t index) const;
  /// Every element in canonical order (desk-scale fields only).
  std::vector<Elem> elements() const;

  Elem random(std::mt19937_64& rng) const;
  /// Validates the element: only the first b codes may be nonzero and each
  /// must be below q.
  bool is_valid(const Elem& x) const;

  std::string to_string(const Elem& x) const;

 private:
  std::shared_ptr<const BaseField> base_;
  unsigned b_ = 0;
  BasePoly modulus_;
  std::vector<Code> neg_low_;  // -modulus[j] for j < b
};

// ---------------------------------------------------------------------------
// Tower operations

/// (x, x^p, ..., x^{p^{k-1}}) with k the absolute degree of `field`.
std::vector<Elem> frobenius_conjugates(const ExtField& field, const Elem& x);

/// Coefficients (x_0..x_{a-1}) over F_p of x = sum x_j Y0^j, read back from
/// the representation. When `charge` is set, the op cost of the conjugate
/// route is charged to the active counter.
std::vector<Digit> extract_ground_coeffs(const BaseField& field, Code x, bool charge = true);

/// Same coefficients recovered algebraically from the Frobenius conjugates
/// by solving the Vandermonde system in Y0, Y0^p, ..., Y0^{p^{a-1}}.
std::vector<Digit> extract_ground_coeffs_by_conjugates(const BaseField& field, Code x);

/// Elements x of `ext` with x^{p^k} = x, sorted canonically. Requires k to
/// divide the absolute degree. Computed as the kernel of x -> x^{p^k} - x.
std::vector<Elem> enumerate_subfield(const ExtField& ext, unsigned k);

/// First nonzero element of `subfield` (canonical order) whose powers
/// 1, beta, ..., beta^{k-1} are linearly independent over F_p.
Elem subfield_basis_element(const ExtField& ext, unsigned k, std::span<const Elem> subfield);

/// Power basis {1, beta, ..., beta^{k-1}} of an embedded F_{p^k}, with a
/// precomputed reduction so decompositions are a single matrix-vector product.
class SubfieldBasis {
 public:
  SubfieldBasis(const ExtField& ext, const Elem& beta, unsigned k);

  const Elem& beta() const { return beta_; }
  unsigned dimension() const { return k_; }
  /// c with x = sum c_j beta^j; throws MembershipError if x is outside.
  std::vector<Digit> decompose(const Elem& x) const;
  Elem recompose(std::span<const Digit> c) const;

 private:
  const ExtField* ext_;
  Elem beta_;
  unsigned k_;
  std::vector<Elem> powers_;
  std::vector<std::vector<Digit>> reducer_;  // abs_degree x abs_degree
};

std::vector<Digit> decompose_over_basis(const ExtField& ext, const Elem& x, const Elem& beta, unsigned k);

/// The F_q element represented by x (an Elem with only c[0] set).
/// Throws MembershipError if x has a nonzero Y1 component.
Elem project_to_subfield(const ExtField& ext, const Elem& x);

}  // namespace mmeval::ff
