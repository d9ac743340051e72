#include "mmeval/mme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mmeval/parallel.hpp"

namespace mmeval::mme {

namespace {

using poly::Exponent;
using poly::ExponentSet;
using poly::MultiPoly;

bool in_ground(const Elem& x) {
  for (std::size_t j = 1; j < ff::kMaxExtDegree; ++j) {
    if (x.c[j] != 0) return false;
  }
  return true;
}

// c * x where c lies in F_q is a scaling (b ground multiplications).
Elem mul_coeff(const ExtField& F, const Elem& c, const Elem& x) {
  if (in_ground(c)) return F.scale(x, c.c[0]);
  return F.mul(c, x);
}

std::uint64_t checked_mul(std::uint64_t x, std::uint64_t y) {
  if (y != 0 && x > std::numeric_limits<std::uint64_t>::max() / y) throw ParamError("parameter product overflows");
  return x * y;
}

struct Lift {
  ExtField ext;
  std::vector<Elem> S;
};

Lift lift(const std::shared_ptr<const ff::BaseField>& base, unsigned b) {
  ExtField ext = ExtField::build(base, b);
  auto S = ff::enumerate_subfield(ext, b);
  return {std::move(ext), std::move(S)};
}

// F_p coordinates of every point coordinate over the ground basis 1, Y0, ...
std::vector<std::vector<ff::Digit>> ground_curve(const ff::BaseField& base, const Point& alpha, bool charge) {
  std::vector<std::vector<ff::Digit>> out;
  out.reserve(alpha.size());
  for (const Elem& x : alpha) out.push_back(ff::extract_ground_coeffs(base, x.c[0], charge));
  return out;
}

void check_anchor(const ff::BaseField& base, const std::vector<std::vector<ff::Digit>>& curve, const Point& alpha) {
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    ff::Code acc = 0, pw = 1;
    for (ff::Digit c : curve[j]) {
      acc = base.add(acc, base.mul(static_cast<ff::Code>(c), pw));
      pw = base.mul(pw, base.y0());
    }
    if (acc != alpha[j].c[0]) throw InvariantError("curve does not pass through its anchor point at Y0");
  }
}

poly::Curve digits_to_curve(const std::vector<std::vector<ff::Digit>>& digits) {
  poly::Curve g;
  for (const auto& comp : digits) {
    std::vector<Elem> coeffs;
    for (ff::Digit c : comp) coeffs.push_back(ExtField::embed(static_cast<ff::Code>(c)));
    g.components.push_back(poly::make_poly(std::move(coeffs)));
  }
  return g;
}

std::vector<Elem> truncated_mul(const ExtField& F, const std::vector<Elem>& x, const std::vector<Elem>& y,
                                std::size_t len) {
  std::vector<Elem> out(len);
  for (std::size_t i = 0; i < x.size() && i < len; ++i) {
    if (F.is_zero(x[i])) continue;
    for (std::size_t j = 0; j < y.size() && i + j < len; ++j) {
      if (F.is_zero(y[j])) continue;
      out[i + j] = F.add(out[i + j], F.mul(x[i], y[j]));
    }
  }
  return out;
}

// Curve data at one node: the table cell of g(gamma) and, for every b with
// |b|_1 < orders, the series g~(gamma, Z)^b truncated below Z^(orders-|b|).
struct Jet {
  std::size_t cell = 0;
  std::vector<std::vector<Elem>> gb;
};

Jet make_jet(const ExtField& F, const poly::Curve& g, const Elem& gamma, const DerivativeTable& table,
             const ExponentSet& bset, unsigned orders) {
  const unsigned n = static_cast<unsigned>(g.components.size());
  const std::uint32_t p = F.characteristic();
  std::size_t len = 1;
  for (const auto& c : g.components) len = std::max(len, c.coeffs.size());
  std::vector<Elem> pw(len);
  pw[0] = F.one();
  for (std::size_t k = 1; k < len; ++k) pw[k] = F.mul(pw[k - 1], gamma);

  Point image(n);
  std::vector<std::vector<Elem>> gt(n, std::vector<Elem>(orders > 0 ? orders - 1 : 0));
  for (unsigned j = 0; j < n; ++j) {
    const auto& cj = g.components[j].coeffs;
    Elem acc = F.zero();
    for (std::size_t k = 0; k < cj.size(); ++k) {
      if (!F.is_zero(cj[k])) acc = F.add(acc, mul_coeff(F, cj[k], pw[k]));
    }
    image[j] = acc;
    for (unsigned m = 0; m + 1 < orders; ++m) {
      const unsigned order = m + 1;
      Elem s = F.zero();
      for (std::size_t u = order; u < cj.size(); ++u) {
        if (F.is_zero(cj[u])) continue;
        const std::uint32_t bin = poly::binom_mod(u, order, p);
        if (bin == 0) continue;
        s = F.add(s, F.scale_int(mul_coeff(F, cj[u], pw[u - order]), bin));
      }
      gt[j][m] = s;
    }
  }
  Jet jet;
  auto cell = table.cell_of(image);
  if (!cell) throw InvariantError("curve image is not a cell of the precomputed table");
  jet.cell = *cell;

  // powers[j][e] = g~_j^e truncated to `orders` terms.
  std::vector<std::vector<std::vector<Elem>>> powers(n);
  for (unsigned j = 0; j < n; ++j) {
    powers[j].resize(orders);
    if (orders == 0) continue;
    powers[j][0].assign(orders, F.zero());
    powers[j][0][0] = F.one();
    for (unsigned e = 1; e < orders; ++e) powers[j][e] = truncated_mul(F, powers[j][e - 1], gt[j], orders);
  }
  jet.gb.resize(bset.size());
  for (std::size_t bi = 0; bi < bset.size(); ++bi) {
    const Exponent& b = bset[bi];
    unsigned total = 0;
    for (unsigned v : b) total += v;
    const std::size_t blen = orders - total;
    std::vector<Elem> series(blen);
    series[0] = F.one();
    for (unsigned j = 0; j < n; ++j) {
      if (b[j] == 0) continue;
      series = truncated_mul(F, series, powers[j][b[j]], blen);
    }
    jet.gb[bi] = std::move(series);
  }
  return jet;
}

// Hasse derivatives of (d_e f) o g at the jet's node, orders 0..orders-1.
std::vector<Elem> jet_row(const ExtField& F, const Jet& jet, std::span<const unsigned> e, const DerivativeTable& table,
                          const ExponentSet& bset, unsigned orders) {
  const std::uint32_t p = F.characteristic();
  const unsigned n = table.n();
  std::vector<Elem> row(orders, F.zero());
  Exponent eb(n);
  for (std::size_t bi = 0; bi < bset.size(); ++bi) {
    const Exponent& b = bset[bi];
    unsigned total = 0;
    std::uint64_t cb = 1;
    for (unsigned j = 0; j < n; ++j) {
      eb[j] = e[j] + b[j];
      total += b[j];
      cb = cb * poly::binom_mod(eb[j], b[j], p) % p;
    }
    auto idx = table.exponents().find(eb);
    if (!idx) {
      unsigned order = total;
      for (unsigned j = 0; j < n; ++j) order += e[j];
      throw MissingDerivativeError("derivative table lacks a required exponent of order " + std::to_string(order));
    }
    if (cb == 0 || table.zero_table(*idx)) continue;
    const Elem v = table.value(*idx, jet.cell);
    if (F.is_zero(v)) continue;
    const Elem coef = F.scale_int(v, cb);
    const auto& s = jet.gb[bi];
    for (std::size_t m = 0; m < s.size(); ++m) {
      if (!F.is_zero(s[m])) row[total + m] = F.add(row[total + m], F.mul(coef, s[m]));
    }
  }
  return row;
}

std::vector<std::vector<Elem>> derivative_rows(const ExtField& F, const poly::Curve& g, std::span<const unsigned> e,
                                               const DerivativeTable& table, std::span<const Elem> nodes,
                                               unsigned orders) {
  if (g.components.size() != table.n()) throw DimensionError("curve has wrong number of components");
  if (e.size() != table.n()) throw DimensionError("exponent has wrong length");
  ExponentSet bset(table.n(), orders > 0 ? orders - 1 : 0);
  std::vector<std::vector<Elem>> rows;
  rows.reserve(nodes.size());
  for (const Elem& gamma : nodes) {
    const Jet jet = make_jet(F, g, gamma, table, bset, orders);
    rows.push_back(jet_row(F, jet, e, table, bset, orders));
  }
  return rows;
}

bool derivative_vanishes(std::span<const unsigned> e, unsigned d) {
  return std::any_of(e.begin(), e.end(), [d](unsigned v) { return v >= d; });
}

MmeRun constant_run(const MmeInstance& inst, std::string name) {
  MmeRun run;
  run.algorithm = std::move(name);
  run.values.assign(inst.points.size(), inst.f.coeffs[0]);
  return run;
}

}  // namespace

// ---------------------------------------------------------------------------

std::size_t PointHash::operator()(const Point& x) const noexcept {
  ff::ElemHash h;
  std::size_t seed = x.size();
  for (const Elem& e : x) seed ^= h(e) + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2);
  return seed;
}

void validate(const MmeInstance& inst) {
  if (!inst.base) throw ParamError("instance has no field");
  const auto& f = inst.f;
  if (f.n == 0) throw ParamError("polynomial must have at least one variable");
  if (f.d == 0) throw ParamError("degree bound d must be at least 1");
  if (f.coeffs.size() != poly::checked_power(f.d, f.n)) {
    throw DimensionError("coefficient vector length must be d^n");
  }
  const std::uint32_t q = inst.base->order();
  auto valid = [q](const Elem& x) { return in_ground(x) && x.c[0] < q; };
  for (const Elem& c : f.coeffs) {
    if (!valid(c)) throw ParamError("polynomial coefficient is not an element of the ground field");
  }
  for (const Point& pt : inst.points) {
    if (pt.size() != f.n) throw DimensionError("point has wrong number of coordinates");
    for (const Elem& x : pt) {
      if (!valid(x)) throw ParamError("point coordinate is not an element of the ground field");
    }
  }
}

// ---------------------------------------------------------------------------
// Parameter arithmetic

MmeInstance random_instance(std::shared_ptr<const ff::BaseField> base, unsigned n, unsigned d, std::size_t N,
                            std::mt19937_64& rng) {
  const ExtField Fq = ExtField::trivial(base);
  MmeInstance inst{std::move(base), poly::random_multipoly(Fq, n, d, rng), {}};
  inst.points.resize(N);
  for (auto& pt : inst.points) {
    pt.resize(n);
    for (auto& x : pt) x = Fq.random(rng);
  }
  return inst;
}

unsigned smallest_exponent_above(std::uint32_t p, std::uint64_t bound) {
  unsigned k = 0;
  std::uint64_t v = 1;
  while (v <= bound) {
    v = checked_mul(v, p);
    ++k;
  }
  return k;
}

unsigned ceil_log(std::uint32_t p, std::uint64_t x) {
  unsigned k = 0;
  std::uint64_t v = 1;
  while (v < x) {
    v = checked_mul(v, p);
    ++k;
  }
  return k;
}

unsigned log_star(std::uint32_t p, std::uint64_t a) {
  unsigned count = 0;
  while (a > 1) {
    a = ceil_log(p, a);
    ++count;
  }
  return count;
}

std::vector<unsigned> a_sequence(unsigned a, unsigned d, std::uint32_t p, unsigned ell) {
  const unsigned cap = log_star(p, a);
  if (ell > cap) {
    throw DepthError("depth " + std::to_string(ell) + " exceeds log*_p(a) = " + std::to_string(cap));
  }
  std::vector<unsigned> seq{a};
  for (unsigned i = 0; i <= ell; ++i) seq.push_back(smallest_exponent_above(p, checked_mul(d, seq.back())));
  return seq;
}

double iterated_log(std::uint32_t p, double a, unsigned i) {
  double x = a;
  for (unsigned k = 0; k < i; ++k) {
    if (!(x > 0)) return -std::numeric_limits<double>::infinity();
    x = std::log(x) / std::log(static_cast<double>(p));
  }
  return x;
}

double descent_bound(unsigned a, unsigned d, std::uint32_t p, unsigned i) {
  const double r = std::max(2.0, iterated_log(p, a, i));
  const double lp = std::log(static_cast<double>(d) * p) / std::log(static_cast<double>(p));
  return 2.0 * r * lp * (1.0 + 1e-9);
}

unsigned default_ell(unsigned a, unsigned d, std::uint32_t p) {
  const unsigned cap = log_star(p, a);
  if (cap == 0) return 0;
  const auto seq = a_sequence(a, d, p, cap);
  unsigned ell = 0;
  while (ell < cap && seq[ell + 1] < seq[ell]) ++ell;
  return ell;
}

// ---------------------------------------------------------------------------
// Derivative tables

DerivativeTable::DerivativeTable(ExtField F, unsigned n, unsigned K) : F_(std::move(F)), n_(n), exps_(n, K) {
  tables_.resize(exps_.size());
}

DerivativeTable DerivativeTable::over_grid(ExtField F, std::vector<Elem> S, unsigned n, unsigned K) {
  DerivativeTable t(std::move(F), n, K);
  t.grid_ = true;
  t.cells_ = poly::checked_power(S.size(), n);
  for (std::size_t i = 0; i < S.size(); ++i) t.s_pos_.emplace(S[i], i);
  t.S_ = std::move(S);
  return t;
}

DerivativeTable DerivativeTable::over_points(ExtField F, std::vector<Point> points, unsigned n, unsigned K) {
  DerivativeTable t(std::move(F), n, K);
  t.grid_ = false;
  t.cells_ = points.size();
  for (std::size_t i = 0; i < points.size(); ++i) t.point_pos_.emplace(std::move(points[i]), i);
  for (auto& tab : t.tables_) tab.assign(t.cells_, Elem{});
  return t;
}

std::optional<std::size_t> DerivativeTable::cell_of(std::span<const Elem> point) const {
  if (point.size() != n_) return std::nullopt;
  if (grid_) {
    std::size_t idx = 0;
    for (std::size_t j = n_; j-- > 0;) {
      auto it = s_pos_.find(point[j]);
      if (it == s_pos_.end()) return std::nullopt;
      idx = idx * S_.size() + it->second;
    }
    return idx;
  }
  auto it = point_pos_.find(Point(point.begin(), point.end()));
  if (it == point_pos_.end()) return std::nullopt;
  return it->second;
}

void DerivativeTable::set_table(std::size_t e, std::vector<Elem> values) {
  if (!values.empty() && values.size() != cells_) throw DimensionError("derivative table has wrong size");
  tables_[e] = std::move(values);
}

void DerivativeTable::set_value(std::size_t e, std::size_t cell, const Elem& v) {
  if (tables_[e].empty()) tables_[e].assign(cells_, Elem{});
  tables_[e][cell] = v;
}

Elem DerivativeTable::value(std::size_t e, std::size_t cell) const {
  if (tables_[e].empty()) return Elem{};
  return tables_[e][cell];
}

DerivativeTable build_derivative_grid(const ExtField& F, std::vector<Elem> S, const MultiPoly& f, unsigned K,
                                      unsigned threads) {
  std::vector<Elem> grid_nodes = S;
  DerivativeTable table = DerivativeTable::over_grid(F, std::move(S), f.n, K);
  const auto& exps = table.exponents();
  for (std::size_t i = 0; i < exps.size(); ++i) {
    if (derivative_vanishes(exps[i], f.d)) continue;
    MultiPoly deriv = poly::hasse_derivative(F, f, exps[i]);
    if (deriv.is_zero()) continue;
    table.set_table(i, poly::grid_eval(F, deriv, grid_nodes, threads));
  }
  return table;
}

std::vector<std::vector<Elem>> evaluate_derivatives_a(const ExtField& F, const poly::Curve& g,
                                                      const DerivativeTable& table, std::span<const Elem> nodes,
                                                      unsigned orders) {
  const Exponent zero(table.n(), 0);
  return derivative_rows(F, g, zero, table, nodes, orders);
}

std::vector<std::vector<Elem>> evaluate_derivatives_b(const ExtField& F, const poly::Curve& g,
                                                      std::span<const unsigned> e, const DerivativeTable& table,
                                                      std::span<const Elem> nodes, unsigned orders) {
  return derivative_rows(F, g, e, table, nodes, orders);
}

// ---------------------------------------------------------------------------
// Algorithms

MmeRun mme_naive(const MmeInstance& inst, const MmeOptions& opts) {
  validate(inst);
  MmeRun run;
  run.algorithm = "naive";
  const ExtField Fq = ExtField::trivial(inst.base);
  run.values.resize(inst.points.size());
  ff::CounterScope scope(run.ops.local);
  parallel_for(inst.points.size(), opts.threads,
               [&](std::size_t i) { run.values[i] = poly::multi_eval(Fq, inst.f, inst.points[i]); });
  return run;
}

MmeRun mme_v1(const MmeInstance& inst, const MmeOptions& opts) {
  validate(inst);
  if (inst.f.d == 1) return constant_run(inst, "v1");
  const auto& base = *inst.base;
  const std::uint32_t p = base.characteristic();
  const unsigned a = base.degree(), n = inst.f.n, d = inst.f.d;
  const std::uint64_t D = checked_mul(checked_mul(a, d), n);
  const unsigned b = smallest_exponent_above(p, D);

  MmeRun run;
  run.algorithm = "v1";
  run.ext_degree = b;

  std::optional<Lift> L;
  std::vector<Elem> grid, weights;
  std::vector<std::vector<Elem>> node_pows;
  std::unordered_map<Elem, std::size_t, ff::ElemHash> pos;
  const Elem y0 = ExtField::embed(base.y0());
  {
    ff::CounterScope scope(run.ops.preprocessing);
    L.emplace(lift(inst.base, b));
    if (L->S.size() <= D) throw InvariantError("subfield too small for plain interpolation");
    grid = poly::grid_eval(L->ext, inst.f, L->S, opts.threads);
    const std::span<const Elem> nodes(L->S.data(), D);
    if (opts.local_mode == MmeOptions::LocalMode::kWeights) weights = poly::lagrange_weights(L->ext, nodes, y0);
    node_pows.resize(D);
    for (std::size_t r = 0; r < D; ++r) {
      node_pows[r].resize(a);
      node_pows[r][0] = L->ext.one();
      for (unsigned k = 1; k < a; ++k) node_pows[r][k] = L->ext.mul(node_pows[r][k - 1], nodes[r]);
    }
  }
  for (std::size_t i = 0; i < L->S.size(); ++i) pos.emplace(L->S[i], i);
  run.grid_cells = grid.size();
  run.derivative_tables = 1;

  const ExtField& E = L->ext;
  const ExtField Fq = ExtField::trivial(inst.base);
  const std::size_t s = L->S.size();
  run.values.resize(inst.points.size());
  ff::CounterScope scope(run.ops.local);
  parallel_for(inst.points.size(), opts.threads, [&](std::size_t i) {
    const Point& alpha = inst.points[i];
    const auto curve = ground_curve(base, alpha, opts.charge_extraction);
    {
      ff::CounterScope quiet(nullptr);
      check_anchor(base, curve, alpha);
    }
    std::vector<Elem> vals(D);
    Elem acc = E.zero();
    for (std::size_t r = 0; r < D; ++r) {
      std::size_t cell = 0;
      for (unsigned j = n; j-- > 0;) {
        Elem coord = E.zero();
        for (unsigned k = 0; k < a; ++k) {
          if (curve[j][k] != 0) coord = E.add(coord, E.scale_int(node_pows[r][k], curve[j][k]));
        }
        auto it = pos.find(coord);
        if (it == pos.end()) throw InvariantError("curve point left the subfield grid");
        cell = cell * s + it->second;
      }
      if (opts.local_mode == MmeOptions::LocalMode::kWeights) {
        acc = E.add(acc, E.mul(weights[r], grid[cell]));
      } else {
        vals[r] = grid[cell];
      }
    }
    if (opts.local_mode == MmeOptions::LocalMode::kFull) {
      const std::span<const Elem> nodes(L->S.data(), D);
      poly::UniPoly h = poly::interpolate(E, nodes, vals, static_cast<unsigned>(D - 1));
      for (auto& c : h.coeffs) c = ff::project_to_subfield(E, c);
      acc = poly::horner_eval(Fq, h, y0);
    }
    run.values[i] = ff::project_to_subfield(E, acc);
  });
  return run;
}

MmeRun mme_v2(const MmeInstance& inst, const MmeOptions& opts) {
  validate(inst);
  if (inst.f.d == 1) return constant_run(inst, "v2");
  const auto& base = *inst.base;
  const std::uint32_t p = base.characteristic();
  const unsigned a = base.degree(), n = inst.f.n, d = inst.f.d;
  const std::uint64_t nodes_needed = checked_mul(a, d);
  const unsigned b = smallest_exponent_above(p, nodes_needed);
  const std::uint64_t conditions = checked_mul(nodes_needed, n);

  MmeRun run;
  run.algorithm = "v2";
  run.ext_degree = b;

  std::optional<Lift> L;
  std::optional<DerivativeTable> table;
  std::optional<poly::HermiteSolver> solver;
  std::vector<Elem> weights;
  const Elem y0 = ExtField::embed(base.y0());
  {
    ff::CounterScope scope(run.ops.preprocessing);
    L.emplace(lift(inst.base, b));
    if (checked_mul(L->S.size(), n) <= conditions - 1) throw InvariantError("Hermite data underdetermined");
    table.emplace(build_derivative_grid(L->ext, L->S, inst.f, n - 1, opts.threads));
    const std::vector<unsigned> mult(nodes_needed, n);
    solver.emplace(L->ext, std::span<const Elem>(L->S.data(), nodes_needed), mult,
                   static_cast<unsigned>(conditions - 1));
    if (opts.local_mode == MmeOptions::LocalMode::kWeights) weights = solver->functional(y0);
  }
  run.grid_cells = table->cells();
  run.derivative_tables = table->exponents().size();

  const ExtField& E = L->ext;
  const ExtField Fq = ExtField::trivial(inst.base);
  const std::span<const Elem> nodes(L->S.data(), nodes_needed);
  const ExponentSet bset(n, n - 1);
  const Exponent zero(n, 0);
  run.values.resize(inst.points.size());
  ff::CounterScope scope(run.ops.local);
  parallel_for(inst.points.size(), opts.threads, [&](std::size_t i) {
    const Point& alpha = inst.points[i];
    const auto digits = ground_curve(base, alpha, opts.charge_extraction);
    {
      ff::CounterScope quiet(nullptr);
      check_anchor(base, digits, alpha);
    }
    const poly::Curve g = digits_to_curve(digits);
    std::vector<Elem> values;
    values.reserve(conditions);
    for (const Elem& gamma : nodes) {
      const Jet jet = make_jet(E, g, gamma, *table, bset, n);
      auto row = jet_row(E, jet, zero, *table, bset, n);
      values.insert(values.end(), row.begin(), row.end());
    }
    Elem acc = E.zero();
    if (opts.local_mode == MmeOptions::LocalMode::kWeights) {
      for (std::size_t r = 0; r < values.size(); ++r) {
        if (!E.is_zero(values[r])) acc = E.add(acc, E.mul(weights[r], values[r]));
      }
    } else {
      poly::UniPoly h = poly::make_poly(solver->solve(values));
      for (auto& c : h.coeffs) c = ff::project_to_subfield(E, c);
      acc = poly::horner_eval(Fq, h, y0);
    }
    run.values[i] = ff::project_to_subfield(E, acc);
  });
  return run;
}

MmeRun mme_v3(const MmeInstance& inst, unsigned ell, const MmeOptions& opts) {
  validate(inst);
  const auto& base = *inst.base;
  const std::uint32_t p = base.characteristic();
  const unsigned a = base.degree(), n = inst.f.n, d = inst.f.d;
  const auto seq = a_sequence(a, d, p, ell);
  if (d == 1) {
    MmeRun run = constant_run(inst, "v3");
    run.ell = ell;
    run.a_seq = seq;
    return run;
  }

  MmeRun run;
  run.algorithm = "v3";
  run.ell = ell;
  run.a_seq = seq;
  run.ext_degree = seq[ell + 1];

  struct Level {
    ExtField F;
    std::vector<Elem> S;
    std::optional<ff::SubfieldBasis> basis;
    std::vector<std::vector<Elem>> node_pows;  // powers of every S element, up to the curve length below
  };
  std::vector<Level> levels;
  std::vector<poly::HermiteSolver> solvers;
  std::optional<DerivativeTable> top;
  {
    ff::CounterScope scope(run.ops.preprocessing);
    for (unsigned i = 0; i <= ell + 1; ++i) {
      ExtField F = i == 0 ? ExtField::trivial(inst.base) : ExtField::build(inst.base, seq[i]);
      std::vector<Elem> S = ff::enumerate_subfield(F, seq[i]);
      levels.push_back(Level{std::move(F), std::move(S), std::nullopt, {}});
    }
    for (unsigned i = 0; i <= ell; ++i) {
      Level& L = levels[i];
      const Elem beta = ff::subfield_basis_element(L.F, seq[i], L.S);
      L.basis.emplace(L.F, beta, seq[i]);
    }
    for (unsigned i = 1; i <= ell; ++i) {
      Level& L = levels[i];
      const unsigned len = seq[i - 1];
      L.node_pows.resize(L.S.size());
      for (std::size_t r = 0; r < L.S.size(); ++r) {
        L.node_pows[r].resize(len);
        L.node_pows[r][0] = L.F.one();
        for (unsigned k = 1; k < len; ++k) L.node_pows[r][k] = L.F.mul(L.node_pows[r][k - 1], L.S[r]);
      }
    }
    for (unsigned i = 0; i <= ell; ++i) {
      const std::uint64_t count = checked_mul(d, seq[i]);
      const Level& up = levels[i + 1];
      if (up.S.size() <= count) throw InvariantError("descent level subfield too small");
      const std::vector<unsigned> mult(count, n);
      solvers.emplace_back(up.F, std::span<const Elem>(up.S.data(), count), mult,
                           static_cast<unsigned>(checked_mul(count, n) - 1));
    }
    const Level& last = levels[ell + 1];
    top.emplace(build_derivative_grid(last.F, last.S, inst.f, (ell + 1) * (n - 1), opts.threads));
  }
  run.grid_cells = top->cells();
  run.derivative_tables = top->exponents().size();

  ff::CounterScope scope(run.ops.local);

  // Descent: Points_0 are the distinct input points; Points_{i+1} collects
  // the images of every curve through Points_i over the next subfield.
  std::vector<std::vector<Point>> points(ell + 1);
  std::vector<std::vector<std::vector<std::vector<ff::Digit>>>> curves(ell + 1);
  {
    std::unordered_map<Point, std::size_t, PointHash> seen;
    for (const Point& x : inst.points) {
      if (seen.emplace(x, points[0].size()).second) points[0].push_back(x);
    }
  }
  auto decompose_level = [&](unsigned i) {
    const Level& L = levels[i];
    curves[i].resize(points[i].size());
    parallel_for(points[i].size(), opts.threads, [&](std::size_t k) {
      auto& cv = curves[i][k];
      for (const Elem& x : points[i][k]) cv.push_back(L.basis->decompose(x));
      ff::CounterScope quiet(nullptr);
      for (unsigned j = 0; j < n; ++j) {
        if (!(L.basis->recompose(cv[j]) == points[i][k][j])) {
          throw InvariantError("descent curve does not pass through its anchor at beta");
        }
      }
    });
  };
  for (unsigned i = 0; i < ell; ++i) {
    decompose_level(i);
    const Level& up = levels[i + 1];
    std::unordered_map<Point, std::size_t, PointHash> seen;
    for (std::size_t k = 0; k < points[i].size(); ++k) {
      const auto& cv = curves[i][k];
      for (std::size_t r = 0; r < up.S.size(); ++r) {
        Point img(n);
        for (unsigned j = 0; j < n; ++j) {
          Elem acc = up.F.zero();
          for (std::size_t t = 0; t < cv[j].size(); ++t) {
            if (cv[j][t] != 0) acc = up.F.add(acc, up.F.scale_int(up.node_pows[r][t], cv[j][t]));
          }
          img[j] = acc;
        }
        if (seen.emplace(img, points[i + 1].size()).second) points[i + 1].push_back(std::move(img));
      }
    }
  }
  decompose_level(ell);
  for (const auto& lvl : points) run.points_per_level.push_back(lvl.size());

  // Unwind: Eval_i from Eval_{i+1} by Hermite interpolation in F_{q_{i+1}}.
  std::optional<DerivativeTable> below = std::move(top);
  for (unsigned i = ell + 1; i-- > 0;) {
    const Level& L = levels[i];
    const Level& up = levels[i + 1];
    DerivativeTable cur = DerivativeTable::over_points(L.F, points[i], n, i * (n - 1));
    const std::uint64_t count = checked_mul(d, seq[i]);
    const std::span<const Elem> nodes(up.S.data(), count);
    const ExponentSet bset(n, n - 1);
    const auto& exps = cur.exponents();
    const Elem beta = L.basis->beta();
    parallel_for(points[i].size(), opts.threads, [&](std::size_t k) {
      const poly::Curve g = digits_to_curve(curves[i][k]);
      std::vector<Jet> jets;
      jets.reserve(nodes.size());
      for (const Elem& gamma : nodes) jets.push_back(make_jet(up.F, g, gamma, *below, bset, n));
      std::vector<Elem> values;
      for (std::size_t ei = 0; ei < exps.size(); ++ei) {
        if (derivative_vanishes(exps[ei], d)) continue;
        values.clear();
        for (const Jet& jet : jets) {
          auto row = jet_row(up.F, jet, exps[ei], *below, bset, n);
          values.insert(values.end(), row.begin(), row.end());
        }
        auto coeffs = solvers[i].solve(values);
        Elem acc = L.F.zero();
        for (std::size_t c = coeffs.size(); c-- > 0;) {
          const Elem coeff = ff::project_to_subfield(up.F, coeffs[c]);
          acc = L.F.add(L.F.mul(acc, beta), coeff);
        }
        cur.set_value(ei, k, acc);
      }
    });
    below.emplace(std::move(cur));
  }

  run.values.resize(inst.points.size());
  for (std::size_t i = 0; i < inst.points.size(); ++i) {
    auto cell = below->cell_of(inst.points[i]);
    if (!cell) throw InvariantError("input point missing from level 0");
    run.values[i] = below->value(0, *cell);
  }
  return run;
}

std::string op_report(const MmeRun& run) {
  std::ostringstream os;
  auto counter = [&](const std::string& prefix, const ff::OpCounter& c) {
    os << prefix << "_adds=" << c.adds << '\n'
       << prefix << "_muls=" << c.muls << '\n'
       << prefix << "_invs=" << c.invs << '\n'
       << prefix << "_total=" << c.total() << '\n';
  };
  os << "algorithm=" << run.algorithm << '\n';
  os << "points=" << run.values.size() << '\n';
  os << "ext_degree=" << run.ext_degree << '\n';
  os << "grid_cells=" << run.grid_cells << '\n';
  os << "derivative_tables=" << run.derivative_tables << '\n';
  if (run.algorithm == "v3") {
    os << "ell=" << run.ell << '\n';
    os << "a_seq=";
    for (std::size_t i = 0; i < run.a_seq.size(); ++i) os << (i ? "," : "") << run.a_seq[i];
    os << '\n' << "points_per_level=";
    for (std::size_t i = 0; i < run.points_per_level.size(); ++i) os << (i ? "," : "") << run.points_per_level[i];
    os << '\n';
  }
  counter("preprocessing", run.ops.preprocessing);
  counter("local", run.ops.local);
  counter("total", run.ops.total());
  return os.str();
}

}  // namespace mmeval::mme
