#pragma once

// Univariate evaluation data structure: f is re-indexed as an m-variate
// polynomial F by base-d digits of its exponents and F is tabulated over
// F_{p^b}^m. A query at alpha reads F along a curve through
// (alpha, alpha^d, ..., alpha^{d^{m-1}}) and interpolates.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <random>
#include <unordered_map>
#include <vector>

#include "mmeval/ffield.hpp"
#include "mmeval/poly.hpp"

namespace mmeval::pevds {

using ff::Elem;
using ff::ExtField;

inline constexpr std::uint32_t kFormatVersion = 1;

struct KroneckerParams {
  std::uint64_t n = 0;  // degree bound: deg f < n
  unsigned d = 0;
  unsigned m = 0;
};

/// F with coefficient of z^t equal to coefficient of X^(sum t_j d^j) in f.
/// Throws DegreeError if deg f >= d^m.
poly::MultiPoly inverse_kronecker(const poly::UniPoly& f, unsigned d, unsigned m);

/// m = max(1, ceil(log2 log2 n)), d smallest with d^m >= n. Requires n >= 2.
KroneckerParams ds_choose_params(std::uint64_t n);
/// Explicit (d, m); throws DegreeError if d^m < n.
KroneckerParams explicit_params(std::uint64_t n, unsigned d, unsigned m);

struct QueryStats {
  std::size_t cells_read = 0;  // distinct cells
  ff::OpCounter ops;
};

class EvalDataStructure {
 public:
  const ff::BaseField& base() const { return *base_; }
  const std::shared_ptr<const ff::BaseField>& base_ptr() const { return base_; }
  const ExtField& ext() const { return ext_; }
  const KroneckerParams& params() const { return params_; }
  std::uint32_t p() const { return base_->characteristic(); }
  unsigned a() const { return base_->degree(); }
  unsigned b() const { return ext_.degree(); }
  const std::vector<Elem>& subfield() const { return S_; }
  const std::vector<Elem>& cells() const { return cells_; }
  std::size_t cell_count() const { return cells_.size(); }
  /// Grid point of a cell, coordinates in F_{q^b}.
  std::vector<Elem> cell_point(std::size_t index) const;

  friend EvalDataStructure ds_build(std::shared_ptr<const ff::BaseField>, const poly::UniPoly&, KroneckerParams,
                                    unsigned);
  friend EvalDataStructure ds_load(std::istream&);
  friend Elem ds_query(const EvalDataStructure&, const Elem&, QueryStats*);

 private:
  EvalDataStructure(std::shared_ptr<const ff::BaseField> base, ExtField ext, KroneckerParams params);
  void prepare();

  std::shared_ptr<const ff::BaseField> base_;
  ExtField ext_;
  KroneckerParams params_;
  std::vector<Elem> S_;
  std::unordered_map<Elem, std::size_t, ff::ElemHash> pos_;
  std::vector<Elem> cells_;
  std::vector<Elem> weights_;  // Lagrange weights at Y0 over the first adm nodes
  std::vector<std::vector<Elem>> node_pows_;
};

/// Builds D_f. Throws DegreeError if deg f >= params.n or params.n > d^m.
EvalDataStructure ds_build(std::shared_ptr<const ff::BaseField> base, const poly::UniPoly& f, KroneckerParams params,
                           unsigned threads = 1);

/// f(alpha) for alpha in F_q. Fills `stats` if given.
Elem ds_query(const EvalDataStructure& ds, const Elem& alpha, QueryStats* stats = nullptr);

/// Binary persistence; see docs/ds_format.md. ds_load throws FormatError on
/// malformed or truncated input and VersionError on an unknown version.
void ds_save(const EvalDataStructure& ds, std::ostream& out);
EvalDataStructure ds_load(std::istream& in);

/// Recomputes `samples` random cells from f and compares.
bool ds_verify(const EvalDataStructure& ds, const poly::UniPoly& f, std::mt19937_64& rng, unsigned samples = 8);

}  // namespace mmeval::pevds
