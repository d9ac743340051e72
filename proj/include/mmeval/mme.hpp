#pragma once

// Multivariate multipoint evaluation over F_q = F_{p^a}.
//
// mme_naive evaluates each point directly. mme_v1, mme_v2 and mme_v3 lift
// every point to a curve with F_p coefficients, read the values (and Hasse
// derivatives) of f along the curve from tables precomputed over a subfield
// grid, interpolate, and evaluate the interpolant back at the anchor.

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mmeval/ffield.hpp"
#include "mmeval/poly.hpp"

namespace mmeval::mme {

using ff::Elem;
using ff::ExtField;
using Point = std::vector<Elem>;

struct MmeInstance {
  std::shared_ptr<const ff::BaseField> base;
  poly::MultiPoly f;  // coefficients in F_q
  std::vector<Point> points;
};

/// Throws DimensionError or ParamError on malformed instances.
void validate(const MmeInstance& inst);

/// Random f with N random points over F_q.
MmeInstance random_instance(std::shared_ptr<const ff::BaseField> base, unsigned n, unsigned d, std::size_t N,
                            std::mt19937_64& rng);

struct OpReport {
  ff::OpCounter preprocessing;
  ff::OpCounter local;
  ff::OpCounter total() const {
    ff::OpCounter t = preprocessing;
    t += local;
    return t;
  }
};

struct MmeOptions {
  enum class LocalMode {
    kWeights,  // fold interpolation and evaluation at Y0 into precomputed weights
    kFull,     // interpolate all coefficients, project to F_q, evaluate at Y0
  };
  LocalMode local_mode = LocalMode::kWeights;
  bool charge_extraction = true;
  unsigned threads = 1;
};

struct MmeRun {
  std::string algorithm;
  std::vector<Elem> values;
  OpReport ops;
  unsigned ext_degree = 0;     // b for v1/v2, a_{l+1} for v3
  std::uint64_t grid_cells = 0;
  std::size_t derivative_tables = 0;
  unsigned ell = 0;
  std::vector<unsigned> a_seq;                // v3
  std::vector<std::size_t> points_per_level;  // v3
};

MmeRun mme_naive(const MmeInstance& inst, const MmeOptions& opts = {});
MmeRun mme_v1(const MmeInstance& inst, const MmeOptions& opts = {});
MmeRun mme_v2(const MmeInstance& inst, const MmeOptions& opts = {});
MmeRun mme_v3(const MmeInstance& inst, unsigned ell, const MmeOptions& opts = {});

/// Key-value text report of a run, one "key=value" per line.
std::string op_report(const MmeRun& run);

// ---------------------------------------------------------------------------
// Parameter arithmetic

/// Smallest k with p^k > bound.
unsigned smallest_exponent_above(std::uint32_t p, std::uint64_t bound);
/// Smallest k with p^k >= x (x >= 1).
unsigned ceil_log(std::uint32_t p, std::uint64_t x);
/// Number of ceil_log applications taking a down to 1.
unsigned log_star(std::uint32_t p, std::uint64_t a);
/// a_0 = a, a_{i+1} smallest with p^{a_{i+1}} > d a_i; returns a_0..a_{ell+1}.
/// Throws DepthError if ell > log_star(p, a).
std::vector<unsigned> a_sequence(unsigned a, unsigned d, std::uint32_t p, unsigned ell);
/// Real iterated logarithm log_p applied i times; -infinity once undefined.
double iterated_log(std::uint32_t p, double a, unsigned i);
/// 2 max{2, log_p^(i)(a)} log_p(dp), rounded up slightly.
double descent_bound(unsigned a, unsigned d, std::uint32_t p, unsigned i);
/// Deepest ell with a_1 > ... strictly decreasing, capped by log_star.
unsigned default_ell(unsigned a, unsigned d, std::uint32_t p);

// ---------------------------------------------------------------------------
// Derivative tables

struct PointHash {
  std::size_t operator()(const Point& x) const noexcept;
};

/// Values of the Hasse derivatives d_e f, |e|_1 <= K, at a set of cells:
/// either the grid S^n (cell index little-endian in positions of S) or an
/// explicit point list. An empty table reads as identically zero.
class DerivativeTable {
 public:
  static DerivativeTable over_grid(ExtField F, std::vector<Elem> S, unsigned n, unsigned K);
  static DerivativeTable over_points(ExtField F, std::vector<Point> points, unsigned n, unsigned K);

  const ExtField& field() const { return F_; }
  const poly::ExponentSet& exponents() const { return exps_; }
  unsigned n() const { return n_; }
  std::size_t cells() const { return cells_; }
  bool is_grid() const { return grid_; }

  std::optional<std::size_t> cell_of(std::span<const Elem> point) const;
  void set_table(std::size_t e, std::vector<Elem> values);
  void set_value(std::size_t e, std::size_t cell, const Elem& v);
  Elem value(std::size_t e, std::size_t cell) const;
  bool zero_table(std::size_t e) const { return tables_[e].empty(); }

 private:
  DerivativeTable(ExtField F, unsigned n, unsigned K);

  ExtField F_;
  unsigned n_;
  poly::ExponentSet exps_;
  bool grid_ = true;
  std::size_t cells_ = 0;
  std::vector<Elem> S_;
  std::unordered_map<Elem, std::size_t, ff::ElemHash> s_pos_;
  std::unordered_map<Point, std::size_t, PointHash> point_pos_;
  std::vector<std::vector<Elem>> tables_;
};

/// Grid tables of hasse_set(f, K) over S^n.
DerivativeTable build_derivative_grid(const ExtField& F, std::vector<Elem> S, const poly::MultiPoly& f, unsigned K,
                                      unsigned threads = 1);

/// For each node gamma: (uni_hasse(h, k)(gamma))_{k < orders} with
/// h = f o g, read through the chain rule from table entries of order < orders.
/// Throws MissingDerivativeError when an exponent is absent and
/// InvariantError when g(gamma) is not a cell of the table.
std::vector<std::vector<Elem>> evaluate_derivatives_a(const ExtField& F, const poly::Curve& g,
                                                      const DerivativeTable& table, std::span<const Elem> nodes,
                                                      unsigned orders);

/// As evaluate_derivatives_a for h = (d_e f) o g, using table entries d_{e+b} f
/// scaled by binom(e+b, b) mod p.
std::vector<std::vector<Elem>> evaluate_derivatives_b(const ExtField& F, const poly::Curve& g,
                                                      std::span<const unsigned> e, const DerivativeTable& table,
                                                      std::span<const Elem> nodes, unsigned orders);

}  // namespace mmeval::mme
