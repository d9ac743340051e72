#pragma once

// Reference arithmetic for tests. Deliberately shares no code with the
// library: elements are plain digit vectors and every operation is
// schoolbook polynomial arithmetic followed by long division.

#include <cstdint>
#include <vector>

#include "mmeval/ffield.hpp"
#include "mmeval/poly.hpp"

namespace oracle {

using Digits = std::vector<int>;

// F_p[Y]/(m) with m monic of degree a, digits low-to-high.
struct GF {
  int p;
  Digits m;  // a+1 entries

  int a() const { return static_cast<int>(m.size()) - 1; }

  Digits zero() const { return Digits(a(), 0); }
  Digits one() const {
    Digits r = zero();
    r[0] = 1;
    return r;
  }

  Digits add(const Digits& x, const Digits& y) const {
    Digits r(a());
    for (int i = 0; i < a(); ++i) r[i] = (x[i] + y[i]) % p;
    return r;
  }

  Digits mul(const Digits& x, const Digits& y) const {
    std::vector<long> prod(2 * a(), 0);
    for (int i = 0; i < a(); ++i)
      for (int j = 0; j < a(); ++j) prod[i + j] = (prod[i + j] + long{x[i]} * y[j]) % p;
    for (int k = 2 * a() - 1; k >= a(); --k) {
      const long c = prod[k];
      if (c == 0) continue;
      for (int j = 0; j <= a(); ++j) prod[k - a() + j] = ((prod[k - a() + j] - c * m[j]) % p + p) % p;
    }
    Digits r(a());
    for (int i = 0; i < a(); ++i) r[i] = static_cast<int>(prod[i]);
    return r;
  }

  Digits pow(Digits x, std::uint64_t e) const {
    Digits r = one();
    while (e) {
      if (e & 1) r = mul(r, x);
      x = mul(x, x);
      e >>= 1;
    }
    return r;
  }

  Digits scalar(int c) const {
    Digits r = zero();
    r[0] = ((c % p) + p) % p;
    return r;
  }

  // Library element <-> digits; only the digit layout is shared.
  Digits from_lib(const mmeval::ff::BaseField& F, const mmeval::ff::Elem& x) const {
    auto d = F.digits(x.c[0]);
    return Digits(d.begin(), d.end());
  }
  mmeval::ff::Elem to_lib(const mmeval::ff::BaseField& F, const Digits& x) const {
    std::vector<mmeval::ff::Digit> d(x.begin(), x.end());
    return mmeval::ff::ExtField::embed(F.from_digits(d));
  }
};

inline GF from_field(const mmeval::ff::BaseField& F) {
  GF g{static_cast<int>(F.characteristic()), {}};
  for (auto v : F.modulus()) g.m.push_back(static_cast<int>(v));
  return g;
}

// Every element of F_p[Y]/(m), digits as base-p counter (constant fastest).
inline std::vector<Digits> all_elements(const GF& g) {
  std::vector<Digits> out;
  Digits x = g.zero();
  while (true) {
    out.push_back(x);
    int i = 0;
    while (i < g.a() && ++x[i] == g.p) x[i++] = 0;
    if (i == g.a()) break;
  }
  return out;
}

// Irreducible iff the ring has no zero divisors: brute force.
inline bool brute_irreducible(const GF& g) {
  const auto els = all_elements(g);
  for (std::size_t i = 1; i < els.size(); ++i)
    for (std::size_t j = i; j < els.size(); ++j)
      if (g.mul(els[i], els[j]) == g.zero()) return false;
  return true;
}

inline long binom_exact(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// f(x) summed term by term: each monomial by repeated multiplication.
inline Digits eval_terms(const GF& g, const mmeval::ff::BaseField& F, const mmeval::poly::MultiPoly& f,
                         const std::vector<Digits>& x) {
  Digits acc = g.zero();
  for (std::size_t idx = 0; idx < f.coeffs.size(); ++idx) {
    Digits term = g.from_lib(F, f.coeffs[idx]);
    std::size_t rest = idx;
    for (unsigned j = 0; j < f.n; ++j) {
      const unsigned e = static_cast<unsigned>(rest % f.d);
      rest /= f.d;
      for (unsigned k = 0; k < e; ++k) term = g.mul(term, x[j]);
    }
    acc = g.add(acc, term);
  }
  return acc;
}

}  // namespace oracle
