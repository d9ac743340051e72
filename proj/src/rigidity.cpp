#include "mmeval/rigidity.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <unordered_map>

#include "mmeval/mme.hpp"
#include "mmeval/poly.hpp"

namespace mmeval::rigidity {

namespace {

std::uint64_t upow(std::uint64_t base, unsigned e) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

std::uint64_t binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

FieldMatrix build_vandermonde(const ExtField& F, std::span<const Elem> generators) {
  const std::size_t n = generators.size();
  if (n == 0) throw ParamError("Vandermonde matrix needs at least one generator");
  FieldMatrix V(F, n, n);
  for (std::size_t i = 0; i < n; ++i) {
    Elem pw = F.one();
    for (std::size_t j = 0; j < n; ++j) {
      V.at(i, j) = pw;
      pw = F.mul(pw, generators[i]);
    }
  }
  return V;
}

FieldMatrix build_w(const ExtField& ext, unsigned d, unsigned m) {
  const std::uint32_t p = ext.characteristic();
  const unsigned a = ext.base().degree(), b = ext.degree();
  const std::uint64_t adm = std::uint64_t{a} * d * m;
  if (upow(p, b) <= adm) {
    throw ParamError("p^b = " + std::to_string(upow(p, b)) + " does not exceed adm = " + std::to_string(adm));
  }
  const auto S = ff::enumerate_subfield(ext, b);
  const std::size_t s = S.size();
  const std::size_t rows = poly::checked_power(s, m), cols = poly::checked_power(d, m);
  // Powers S[i]^e for e < d.
  std::vector<std::vector<Elem>> pw(s, std::vector<Elem>(d));
  for (std::size_t i = 0; i < s; ++i) {
    pw[i][0] = ext.one();
    for (unsigned e = 1; e < d; ++e) pw[i][e] = ext.mul(pw[i][e - 1], S[i]);
  }
  FieldMatrix W(ext, rows, cols);
  std::vector<std::size_t> pos(m);
  std::vector<unsigned> ex(m);
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t rest = r;
    for (unsigned j = 0; j < m; ++j) {
      pos[j] = rest % s;
      rest /= s;
    }
    for (std::size_t c = 0; c < cols; ++c) {
      std::size_t cr = c;
      Elem v = ext.one();
      for (unsigned j = 0; j < m; ++j) {
        ex[j] = static_cast<unsigned>(cr % d);
        cr /= d;
        if (ex[j] != 0) v = ext.mul(v, pw[pos[j]][ex[j]]);
      }
      W.at(r, c) = v;
    }
  }
  return W;
}

FactoredVandermonde factor_vandermonde(std::shared_ptr<const ff::BaseField> base, std::span<const Elem> generators,
                                       unsigned d, unsigned m) {
  const std::size_t n = generators.size();
  if (n == 0) throw ParamError("factorization needs at least one generator");
  if (d == 0 || m == 0) throw ParamError("d and m must be positive");
  if (poly::checked_power(d, m) < n) {
    throw ParamError("d^m = " + std::to_string(poly::checked_power(d, m)) + " is below n = " + std::to_string(n));
  }
  for (const Elem& g : generators) {
    if (g.c[0] >= base->order() || !(ff::project_to_subfield(ExtField::trivial(base), g) == g)) {
      throw ParamError("generator is not an element of the ground field");
    }
  }
  const std::uint32_t p = base->characteristic();
  const unsigned a = base->degree();
  const std::uint64_t adm = std::uint64_t{a} * d * m;
  const unsigned b = mme::smallest_exponent_above(p, adm);
  ExtField ext = ExtField::build(base, b);
  const ExtField Fq = ExtField::trivial(base);

  FieldMatrix W = build_w(ext, d, m);
  const auto S = ff::enumerate_subfield(ext, b);
  std::unordered_map<Elem, std::size_t, ff::ElemHash> pos;
  for (std::size_t i = 0; i < S.size(); ++i) pos.emplace(S[i], i);
  const std::size_t s = S.size();
  const std::vector<Elem> weights =
      poly::lagrange_weights(ext, std::span<const Elem>(S.data(), adm), ExtField::embed(base->y0()));

  FieldMatrix gamma(ext, n, W.rows());
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::vector<ff::Digit>> curve(m);
    Elem coord = generators[i];
    for (unsigned j = 0; j < m; ++j) {
      if (j > 0) coord = Fq.pow(coord, d);
      curve[j] = ff::extract_ground_coeffs(*base, coord.c[0], false);
    }
    for (std::size_t r = 0; r < adm; ++r) {
      std::size_t cell = 0;
      for (unsigned j = m; j-- > 0;) {
        Elem x = ext.zero(), pw = ext.one();
        for (unsigned k = 0; k < a; ++k) {
          if (curve[j][k] != 0) x = ext.add(x, ext.scale_int(pw, curve[j][k]));
          pw = ext.mul(pw, S[r]);
        }
        cell = cell * s + pos.at(x);
      }
      gamma.at(i, cell) = ext.add(gamma.at(i, cell), weights[r]);
    }
  }
  FieldMatrix itilde(ext, W.cols(), n);
  for (std::size_t j = 0; j < n; ++j) itilde.at(j, j) = ext.one();

  FactoredVandermonde fv{ext, std::vector<Elem>(generators.begin(), generators.end()), d, m, b,
                         std::move(gamma), std::move(W), std::move(itilde)};
  fv.gamma_max_row_nnz = fv.gamma.max_row_nnz();
  fv.expanded_row_nnz = fv.gamma_max_row_nnz * a * b;
  if (!verify_factorization(fv)) throw VerificationError("Gamma * W * Itilde differs from the Vandermonde matrix");
  return fv;
}

bool verify_factorization(const FactoredVandermonde& fv) {
  const FieldMatrix V = build_vandermonde(fv.ext, fv.generators);
  const FieldMatrix product = fv.gamma.multiply(fv.w.multiply(fv.itilde));
  return product == V;
}

Certificate certify(const FieldMatrix& m, const Claim& claim) {
  Certificate c;
  c.rank = m.rank();
  c.row_sparsity = m.max_row_nnz();
  c.col_sparsity = m.max_col_nnz();
  if (claim.max_rank) c.rank_ok = c.rank <= *claim.max_rank;
  if (claim.max_row_sparsity) c.row_ok = c.row_sparsity <= *claim.max_row_sparsity;
  if (claim.max_col_sparsity) c.col_ok = c.col_sparsity <= *claim.max_col_sparsity;
  return c;
}

std::string format_certificate(const Certificate& c, const Claim& claim) {
  std::ostringstream os;
  os << "rank=" << c.rank << '\n';
  os << "row_sparsity=" << c.row_sparsity << '\n';
  os << "col_sparsity=" << c.col_sparsity << '\n';
  if (claim.max_rank) os << "claim_rank_le=" << *claim.max_rank << ' ' << (c.rank_ok ? "PASS" : "FAIL") << '\n';
  if (claim.max_row_sparsity) {
    os << "claim_row_sparsity_le=" << *claim.max_row_sparsity << ' ' << (c.row_ok ? "PASS" : "FAIL") << '\n';
  }
  if (claim.max_col_sparsity) {
    os << "claim_col_sparsity_le=" << *claim.max_col_sparsity << ' ' << (c.col_ok ? "PASS" : "FAIL") << '\n';
  }
  return os.str();
}

SplitResult kronecker_split(std::span<const SplitFactor> factors, unsigned t) {
  if (factors.empty()) throw DimensionError("kronecker split needs at least one factor pair");
  const unsigned m = static_cast<unsigned>(factors.size());
  if (m > 20) throw DimensionError("too many Kronecker factors");
  if (t > m) throw DimensionError("threshold t exceeds the number of factors");
  const std::size_t q = factors[0].L.rows();
  for (const auto& f : factors) {
    if (f.L.rows() != q || f.L.cols() != q || f.S.rows() != q || f.S.cols() != q) {
      throw DimensionError("all split factors must be q x q with a common q");
    }
  }
  const ExtField& F = factors[0].L.field();
  const std::size_t dim = poly::checked_power(q, m);
  SplitResult out{FieldMatrix(F, dim, dim), FieldMatrix(F, dim, dim)};
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    const unsigned sparse_count = static_cast<unsigned>(std::popcount(mask));
    FieldMatrix term = (mask & 1u) ? factors[0].S : factors[0].L;
    for (unsigned i = 1; i < m; ++i) term = term.kronecker((mask >> i) & 1u ? factors[i].S : factors[i].L);
    if (sparse_count < t) {
      out.low_rank = out.low_rank.add(term);
    } else {
      out.sparse = out.sparse.add(term);
    }
  }
  FieldMatrix full = factors[0].L.add(factors[0].S);
  for (unsigned i = 1; i < m; ++i) full = full.kronecker(factors[i].L.add(factors[i].S));
  out.sum_matches = out.low_rank.add(out.sparse) == full;

  out.rank_low = out.low_rank.rank();
  out.row_sparsity = out.sparse.max_row_nnz();
  out.col_sparsity = out.sparse.max_col_nnz();
  std::uint64_t r = 0, s = 0;
  for (const auto& f : factors) {
    r = std::max<std::uint64_t>(r, f.L.rank());
    s = std::max<std::uint64_t>(s, std::max(f.S.max_row_nnz(), f.S.max_col_nnz()));
  }
  for (unsigned j = 0; j < t; ++j) out.rank_bound += binomial(m, j) * upow(r, m - j) * upow(q, j);
  for (unsigned j = t; j <= m; ++j) out.sparsity_bound += binomial(m, j) * upow(s, j) * upow(q, m - j);
  return out;
}

SplitFactor toy_factor() {
  const ExtField F2 = ExtField::trivial(ff::BaseField::prime(2));
  FieldMatrix L(F2, 2, 2), S(F2, 2, 2);
  L.at(0, 0) = F2.one();
  L.at(1, 0) = F2.one();
  S.at(1, 1) = F2.one();
  return {std::move(L), std::move(S)};
}

}  // namespace mmeval::rigidity
