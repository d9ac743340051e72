#include "mmeval/poly.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

#include "mmeval/linalg.hpp"
#include "mmeval/parallel.hpp"

namespace mmeval::poly {

namespace {

std::uint64_t powmod_u64(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = r * b % m;
    b = b * b % m;
    e >>= 1;
  }
  return r;
}

std::uint32_t small_binom(std::uint64_t n, std::uint64_t k, std::uint32_t p) {
  if (k > n) return 0;
  std::uint64_t num = 1, den = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    num = num * ((n - i) % p) % p;
    den = den * ((i + 1) % p) % p;
  }
  return static_cast<std::uint32_t>(num * powmod_u64(den, p - 2, p) % p);
}

void check_distinct(const ExtField& F, std::span<const Elem> nodes) {
  std::unordered_set<Elem, ff::ElemHash> seen;
  for (const Elem& x : nodes) {
    if (!seen.insert(x).second) throw DuplicateNodeError("repeated interpolation node " + F.to_string(x));
  }
}

}  // namespace

std::uint32_t binom_mod(std::uint64_t n, std::uint64_t k, std::uint32_t p) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  while (k > 0 || n > 0) {
    const std::uint64_t ni = n % p, ki = k % p;
    if (ki > ni) return 0;
    r = r * small_binom(ni, ki, p) % p;
    n /= p;
    k /= p;
  }
  return static_cast<std::uint32_t>(r);
}

PascalTable::PascalTable(std::uint32_t p, unsigned max_order, unsigned width)
    : p_(p), max_order_(max_order), width_(width), table_(std::size_t{max_order + 1} * width, 0) {
  for (unsigned i = 0; i <= max_order; ++i) {
    for (unsigned j = 0; j < width; ++j) {
      std::uint32_t v;
      if (i == 0) {
        v = 1 % p;
      } else if (i > j) {
        v = 0;
      } else {
        v = (table_[std::size_t{i - 1} * width + j - 1] + table_[std::size_t{i} * width + j - 1]) % p;
      }
      table_[std::size_t{i} * width + j] = v;
    }
  }
}

// ---------------------------------------------------------------------------
// Univariate

void UniPoly::trim() {
  while (!coeffs.empty() && coeffs.back() == Elem{}) coeffs.pop_back();
}

UniPoly make_poly(std::vector<Elem> coeffs) {
  UniPoly p{std::move(coeffs)};
  p.trim();
  return p;
}

UniPoly poly_add(const ExtField& F, const UniPoly& x, const UniPoly& y) {
  UniPoly out;
  out.coeffs.resize(std::max(x.coeffs.size(), y.coeffs.size()));
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
    if (i < x.coeffs.size() && i < y.coeffs.size()) {
      out.coeffs[i] = F.add(x.coeffs[i], y.coeffs[i]);
    } else {
      out.coeffs[i] = i < x.coeffs.size() ? x.coeffs[i] : y.coeffs[i];
    }
  }
  out.trim();
  return out;
}

UniPoly poly_sub(const ExtField& F, const UniPoly& x, const UniPoly& y) {
  UniPoly out;
  out.coeffs.resize(std::max(x.coeffs.size(), y.coeffs.size()));
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
    if (i < x.coeffs.size() && i < y.coeffs.size()) {
      out.coeffs[i] = F.sub(x.coeffs[i], y.coeffs[i]);
    } else {
      out.coeffs[i] = i < x.coeffs.size() ? x.coeffs[i] : F.neg(y.coeffs[i]);
    }
  }
  out.trim();
  return out;
}

UniPoly poly_mul(const ExtField& F, const UniPoly& x, const UniPoly& y) {
  if (x.is_zero() || y.is_zero()) return {};
  UniPoly out;
  out.coeffs.assign(x.coeffs.size() + y.coeffs.size() - 1, Elem{});
  for (std::size_t i = 0; i < x.coeffs.size(); ++i) {
    if (F.is_zero(x.coeffs[i])) continue;
    for (std::size_t j = 0; j < y.coeffs.size(); ++j) {
      if (F.is_zero(y.coeffs[j])) continue;
      out.coeffs[i + j] = F.add(out.coeffs[i + j], F.mul(x.coeffs[i], y.coeffs[j]));
    }
  }
  out.trim();
  return out;
}

UniPoly poly_scale(const ExtField& F, const UniPoly& x, const Elem& c) {
  UniPoly out;
  out.coeffs.reserve(x.coeffs.size());
  for (const Elem& v : x.coeffs) out.coeffs.push_back(F.mul(v, c));
  out.trim();
  return out;
}

Elem horner_eval(const ExtField& F, const UniPoly& f, const Elem& x) {
  if (f.coeffs.empty()) return F.zero();
  Elem acc = f.coeffs.back();
  for (std::size_t i = f.coeffs.size() - 1; i-- > 0;) acc = F.add(F.mul(acc, x), f.coeffs[i]);
  return acc;
}

UniPoly interpolate(const ExtField& F, std::span<const Elem> xs, std::span<const Elem> ys, unsigned D) {
  const std::size_t k = std::size_t{D} + 1;
  if (xs.size() < k || ys.size() < k) {
    throw InsufficientDataError("interpolation needs " + std::to_string(k) + " points, got " +
                                std::to_string(std::min(xs.size(), ys.size())));
  }
  xs = xs.first(k);
  check_distinct(F, xs);
  std::vector<Elem> c(ys.begin(), ys.begin() + k);
  for (std::size_t level = 1; level < k; ++level) {
    for (std::size_t i = k - 1; i >= level; --i) {
      c[i] = F.mul(F.sub(c[i], c[i - 1]), F.inv(F.sub(xs[i], xs[i - level])));
    }
  }
  std::vector<Elem> out(k);
  out[0] = c[k - 1];
  std::size_t len = 1;
  for (std::size_t i = k - 1; i-- > 0;) {
    // out <- out * (t - xs[i]) + c[i]
    for (std::size_t j = len; j > 0; --j) {
      out[j] = F.sub(out[j - 1], F.mul(out[j], xs[i]));
    }
    out[0] = F.add(F.neg(F.mul(out[0], xs[i])), c[i]);
    ++len;
  }
  return make_poly(std::move(out));
}

std::vector<Elem> lagrange_weights(const ExtField& F, std::span<const Elem> nodes, const Elem& at) {
  check_distinct(F, nodes);
  const std::size_t m = nodes.size();
  std::vector<Elem> w(m);
  for (std::size_t j = 0; j < m; ++j) {
    Elem num = F.one(), den = F.one();
    for (std::size_t i = 0; i < m; ++i) {
      if (i == j) continue;
      num = F.mul(num, F.sub(at, nodes[i]));
      den = F.mul(den, F.sub(nodes[j], nodes[i]));
    }
    w[j] = F.mul(num, F.inv(den));
  }
  return w;
}

UniPoly uni_hasse(const ExtField& F, const UniPoly& h, unsigned k) {
  if (k == 0) return h;
  if (h.degree() < static_cast<int>(k)) return {};
  const std::uint32_t p = F.characteristic();
  std::vector<Elem> out(h.coeffs.size() - k);
  for (std::size_t j = k; j < h.coeffs.size(); ++j) {
    out[j - k] = F.scale_int(h.coeffs[j], binom_mod(j, k, p));
  }
  return make_poly(std::move(out));
}

HermiteSolver::HermiteSolver(const ExtField& F, std::span<const Elem> nodes, std::span<const unsigned> mult,
                             unsigned D)
    : F_(F), D_(D) {
  if (nodes.size() != mult.size()) throw DimensionError("node and multiplicity lists differ in length");
  check_distinct(F, nodes);
  std::size_t total = 0;
  for (unsigned e : mult) total += e;
  const std::size_t k = std::size_t{D} + 1;
  if (total < k) {
    throw InsufficientDataError("Hermite data has " + std::to_string(total) + " conditions, degree bound " +
                                std::to_string(D) + " needs " + std::to_string(k));
  }
  const std::uint32_t p = F.characteristic();
  la::FieldMatrix M(F, k, k);
  std::size_t row = 0;
  for (std::size_t j = 0; j < nodes.size() && row < k; ++j) {
    std::vector<Elem> pw(k);
    pw[0] = F.one();
    for (std::size_t i = 1; i < k; ++i) pw[i] = F.mul(pw[i - 1], nodes[j]);
    for (unsigned order = 0; order < mult[j] && row < k; ++order, ++row) {
      for (std::size_t col = order; col < k; ++col) {
        M.at(row, col) = F.scale_int(pw[col - order], binom_mod(col, order, p));
      }
    }
  }
  auto inv = M.inverse();
  if (!inv) throw SingularSystemError("confluent Vandermonde system is singular");
  inverse_.resize(k * k);
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < k; ++c) inverse_[r * k + c] = inv->at(r, c);
  }
}

std::vector<Elem> HermiteSolver::solve(std::span<const Elem> values) const {
  const std::size_t k = std::size_t{D_} + 1;
  if (values.size() < k) throw InsufficientDataError("too few Hermite values");
  std::vector<Elem> c(k);
  for (std::size_t r = 0; r < k; ++r) {
    Elem acc = F_.zero();
    for (std::size_t j = 0; j < k; ++j) {
      if (F_.is_zero(values[j])) continue;
      acc = F_.add(acc, F_.mul(inverse_[r * k + j], values[j]));
    }
    c[r] = acc;
  }
  return c;
}

std::vector<Elem> HermiteSolver::functional(const Elem& at) const {
  const std::size_t k = std::size_t{D_} + 1;
  std::vector<Elem> pw(k);
  pw[0] = F_.one();
  for (std::size_t i = 1; i < k; ++i) pw[i] = F_.mul(pw[i - 1], at);
  std::vector<Elem> w(k, F_.zero());
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t r = 0; r < k; ++r) w[r] = F_.add(w[r], F_.mul(pw[j], inverse_[j * k + r]));
  }
  return w;
}

UniPoly hermite_interpolate(const ExtField& F, std::span<const HermiteData> data, unsigned D) {
  std::vector<Elem> nodes;
  std::vector<unsigned> mult;
  std::vector<Elem> values;
  for (const auto& h : data) {
    if (h.values.size() < h.multiplicity) {
      throw InsufficientDataError("node " + F.to_string(h.node) + " has multiplicity " +
                                  std::to_string(h.multiplicity) + " but only " + std::to_string(h.values.size()) +
                                  " derivative values");
    }
    nodes.push_back(h.node);
    mult.push_back(h.multiplicity);
    values.insert(values.end(), h.values.begin(), h.values.begin() + h.multiplicity);
  }
  HermiteSolver solver(F, nodes, mult, D);
  return make_poly(solver.solve(values));
}

// ---------------------------------------------------------------------------
// Multivariate

std::size_t checked_power(std::size_t base, unsigned exp) {
  std::size_t r = 1;
  for (unsigned i = 0; i < exp; ++i) {
    if (base != 0 && r > SIZE_MAX / base) throw ParamError("table size overflows");
    r *= base;
  }
  return r;
}

MultiPoly MultiPoly::zero(unsigned n, unsigned d) {
  if (d == 0) throw ParamError("degree bound d must be at least 1");
  return MultiPoly{n, d, std::vector<Elem>(checked_power(d, n))};
}

bool MultiPoly::is_zero() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](const Elem& x) { return x == Elem{}; });
}

Exponent MultiPoly::exponent(std::size_t index) const {
  Exponent e(n);
  for (unsigned j = 0; j < n; ++j) {
    e[j] = static_cast<unsigned>(index % d);
    index /= d;
  }
  return e;
}

std::size_t MultiPoly::index(std::span<const unsigned> e) const {
  std::size_t idx = 0;
  for (unsigned j = n; j-- > 0;) idx = idx * d + e[j];
  return idx;
}

ExponentSet::ExponentSet(unsigned n, unsigned K) : n_(n), K_(K) {
  std::vector<std::vector<Exponent>> by_degree(K + 1);
  Exponent e(n, 0);
  for (;;) {
    unsigned s = 0;
    for (unsigned v : e) s += v;
    if (s <= K) by_degree[s].push_back(e);
    unsigned j = 0;
    while (j < n && ++e[j] > K) e[j++] = 0;
    if (j == n) break;
  }
  prefix_.assign(K + 1, 0);
  for (unsigned k = 0; k <= K; ++k) {
    for (auto& x : by_degree[k]) {
      lookup_.emplace(key(x), list_.size());
      list_.push_back(std::move(x));
    }
    prefix_[k] = list_.size();
  }
}

std::uint64_t ExponentSet::key(std::span<const unsigned> e) const {
  std::uint64_t k = 0;
  for (unsigned j = n_; j-- > 0;) k = k * (K_ + 1) + e[j];
  return k;
}

std::optional<std::size_t> ExponentSet::find(std::span<const unsigned> e) const {
  if (e.size() != n_) return std::nullopt;
  for (unsigned v : e) {
    if (v > K_) return std::nullopt;
  }
  auto it = lookup_.find(key(e));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

MultiPoly hasse_derivative(const ExtField& F, const MultiPoly& f, std::span<const unsigned> b) {
  MultiPoly out = MultiPoly::zero(f.n, f.d);
  for (unsigned j = 0; j < f.n; ++j) {
    if (b[j] >= f.d) return out;
  }
  const std::uint32_t p = F.characteristic();
  Exponent e(f.n, 0), shifted(f.n);
  for (std::size_t idx = 0; idx < f.coeffs.size(); ++idx) {
    bool fits = true;
    std::uint64_t c = 1;
    for (unsigned j = 0; j < f.n && fits; ++j) {
      if (e[j] < b[j]) {
        fits = false;
      } else {
        shifted[j] = e[j] - b[j];
        c = c * binom_mod(e[j], b[j], p) % p;
      }
    }
    if (fits && c != 0 && !F.is_zero(f.coeffs[idx])) out.coeffs[out.index(shifted)] = F.scale_int(f.coeffs[idx], c);
    for (unsigned j = 0; j < f.n && ++e[j] == f.d; ++j) e[j] = 0;
  }
  return out;
}

std::vector<MultiPoly> hasse_set(const ExtField& F, const MultiPoly& f, unsigned K) {
  ExponentSet set(f.n, K);
  std::vector<MultiPoly> out;
  out.reserve(set.size());
  for (const auto& e : set.list()) out.push_back(hasse_derivative(F, f, e));
  return out;
}

Elem multi_eval(const ExtField& F, const MultiPoly& f, std::span<const Elem> point) {
  if (point.size() != f.n) throw DimensionError("point has wrong number of coordinates");
  std::vector<Elem> cur = f.coeffs;
  std::size_t len = cur.size();
  for (unsigned v = f.n; v-- > 0;) {
    const std::size_t inner = len / f.d;
    std::vector<Elem> next(inner);
    for (std::size_t r = 0; r < inner; ++r) {
      Elem acc = cur[r + (f.d - 1) * inner];
      for (unsigned j = f.d - 1; j-- > 0;) acc = F.add(F.mul(acc, point[v]), cur[r + j * inner]);
      next[r] = acc;
    }
    cur = std::move(next);
    len = inner;
  }
  return cur[0];
}

std::vector<Elem> grid_eval(const ExtField& F, const MultiPoly& f, std::span<const Elem> S, unsigned threads) {
  const std::size_t s = S.size();
  const unsigned d = f.d;
  std::vector<Elem> cur = f.coeffs;
  std::size_t outer = 1;  // s^(n - v - 1) after processing variable v
  for (unsigned v = f.n; v-- > 0;) {
    const std::size_t inner = checked_power(d, v);
    std::vector<Elem> next(inner * s * outer);
    parallel_for(s, threads, [&](std::size_t i) {
      const Elem& x = S[i];
      for (std::size_t o = 0; o < outer; ++o) {
        const Elem* src = cur.data() + o * inner * d;
        Elem* dst = next.data() + o * inner * s + i * inner;
        for (std::size_t r = 0; r < inner; ++r) {
          Elem acc = src[r + (d - 1) * inner];
          for (unsigned j = d - 1; j-- > 0;) acc = F.add(F.mul(acc, x), src[r + j * inner]);
          dst[r] = acc;
        }
      }
    });
    cur = std::move(next);
    outer *= s;
  }
  return cur;
}

UniPoly compose_on_curve(const ExtField& F, const MultiPoly& f, const Curve& g) {
  if (g.components.size() != f.n) throw DimensionError("curve has wrong number of components");
  std::vector<UniPoly> cur;
  cur.reserve(f.coeffs.size());
  for (const Elem& c : f.coeffs) cur.push_back(make_poly({c}));
  for (unsigned v = f.n; v-- > 0;) {
    const std::size_t inner = cur.size() / f.d;
    std::vector<UniPoly> next(inner);
    for (std::size_t r = 0; r < inner; ++r) {
      UniPoly acc = cur[r + (f.d - 1) * inner];
      for (unsigned j = f.d - 1; j-- > 0;) acc = poly_add(F, poly_mul(F, acc, g.components[v]), cur[r + j * inner]);
      next[r] = std::move(acc);
    }
    cur = std::move(next);
  }
  return cur[0];
}

CurveShift curve_shift(const ExtField& F, const Curve& g) {
  CurveShift out;
  for (const auto& gi : g.components) {
    std::vector<UniPoly> comp;
    for (unsigned k = 1; static_cast<int>(k) <= gi.degree(); ++k) comp.push_back(uni_hasse(F, gi, k));
    while (!comp.empty() && comp.back().is_zero()) comp.pop_back();
    out.components.push_back(std::move(comp));
  }
  return out;
}

MultiPoly random_multipoly(const ExtField& F, unsigned n, unsigned d, std::mt19937_64& rng) {
  MultiPoly f = MultiPoly::zero(n, d);
  for (auto& c : f.coeffs) c = F.random(rng);
  return f;
}

UniPoly random_unipoly(const ExtField& F, std::size_t len, std::mt19937_64& rng) {
  std::vector<Elem> c(len);
  for (auto& x : c) x = F.random(rng);
  return make_poly(std::move(c));
}

}  // namespace mmeval::poly
