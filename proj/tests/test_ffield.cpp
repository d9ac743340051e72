#include <gtest/gtest.h>

#include <random>
#include <set>

#include "mmeval/error.hpp"
#include "mmeval/ffield.hpp"
#include "oracle.hpp"

using namespace mmeval;
using ff::BaseField;
using ff::Elem;
using ff::ExtField;

namespace {

Elem code(ff::Code c) { return ExtField::embed(c); }

// Element of a degree-b extension given its F_q codes.
Elem ext_elem(std::initializer_list<ff::Code> codes) {
  Elem e;
  std::size_t i = 0;
  for (auto c : codes) e.c[i++] = c;
  return e;
}

}  // namespace

TEST(FindIrreducible, CanonicalModuli) {
  auto F2 = BaseField::prime(2);
  auto F3 = BaseField::prime(3);
  EXPECT_EQ(ff::find_irreducible(*F2, 2), (ff::BasePoly{1, 1, 1}));
  EXPECT_EQ(ff::find_irreducible(*F3, 2), (ff::BasePoly{1, 0, 1}));
  EXPECT_EQ(ff::find_irreducible(*F2, 1), (ff::BasePoly{0, 1}));
}

TEST(FindIrreducible, NoEarlierCandidateIsIrreducible) {
  for (int p : {2, 3, 5}) {
    for (int a = 2; a <= 3; ++a) {
      const auto chosen = ff::find_irreducible(*BaseField::prime(p), a);
      // Walk monic candidates with the constant term varying fastest.
      oracle::Digits low(a, 0);
      bool found = false;
      while (!found) {
        oracle::GF g{p, low};
        g.m.push_back(1);
        const bool irreducible = oracle::brute_irreducible(g);
        ff::BasePoly cand(low.begin(), low.end());
        cand.push_back(1);
        if (cand == chosen) {
          EXPECT_TRUE(irreducible) << "p=" << p << " a=" << a;
          found = true;
          break;
        } else {
          EXPECT_FALSE(irreducible) << "earlier irreducible candidate skipped, p=" << p << " a=" << a;
        }
        int i = 0;
        while (i < a && ++low[i] == p) low[i++] = 0;
        ASSERT_LT(i, a);
      }
    }
  }
}

TEST(Certificate, ReducibleModulusNamesFailedCheck) {
  auto F2 = BaseField::prime(2);
  const auto cert = ff::certify_irreducible(*F2, {1, 0, 1});  // (Y+1)^2
  EXPECT_FALSE(cert.irreducible);
  EXPECT_NE(cert.failure.find("gcd"), std::string::npos);
  try {
    BaseField::with_modulus(2, {1, 0, 1});
    FAIL() << "expected ParamError";
  } catch (const ParamError& e) {
    EXPECT_NE(std::string(e.what()).find("irreducibility certificate"), std::string::npos);
  }
}

TEST(ExtField, SmallFieldProducts) {
  const ExtField F4 = ExtField::build(BaseField::prime(2), 2);
  EXPECT_EQ(F4.modulus(), (ff::BasePoly{1, 1, 1}));
  EXPECT_EQ(F4.mul(F4.y1(), F4.y1()), ext_elem({1, 1}));

  const ExtField F9 = ExtField::build(BaseField::prime(3), 2);
  EXPECT_EQ(F9.modulus(), (ff::BasePoly{1, 0, 1}));
  EXPECT_EQ(F9.mul(F9.y1(), F9.y1()), ext_elem({2, 0}));

  const ExtField T = ExtField::trivial(BaseField::canonical(2, 2));
  EXPECT_EQ(T.degree(), 1u);
  EXPECT_EQ(T.modulus(), (ff::BasePoly{0, 1}));
}

TEST(ExtField, GroundArithmeticMatchesOracle) {
  for (auto [p, a] : {std::pair<int, int>{2, 3}, {3, 2}, {5, 2}, {7, 1}}) {
    auto base = BaseField::canonical(p, a);
    const ExtField F = ExtField::trivial(base);
    const oracle::GF g = oracle::from_field(*base);
    ASSERT_TRUE(oracle::brute_irreducible(g));
    for (const Elem& x : F.elements()) {
      for (const Elem& y : F.elements()) {
        ASSERT_EQ(g.from_lib(*base, F.mul(x, y)), g.mul(g.from_lib(*base, x), g.from_lib(*base, y)));
        ASSERT_EQ(g.from_lib(*base, F.add(x, y)), g.add(g.from_lib(*base, x), g.from_lib(*base, y)));
      }
      if (!F.is_zero(x)) EXPECT_EQ(F.mul(x, F.inv(x)), F.one());
    }
  }
}

TEST(ExtField, ExtensionFieldAxioms) {
  std::mt19937_64 rng(7);
  const ExtField F = ExtField::build(BaseField::canonical(3, 2), 3);
  EXPECT_EQ(F.order(), 729u);
  for (int t = 0; t < 200; ++t) {
    const Elem x = F.random(rng), y = F.random(rng), z = F.random(rng);
    EXPECT_EQ(F.mul(x, F.add(y, z)), F.add(F.mul(x, y), F.mul(x, z)));
    EXPECT_EQ(F.mul(F.mul(x, y), z), F.mul(x, F.mul(y, z)));
    EXPECT_EQ(F.pow(x, 729), x);
    EXPECT_EQ(F.sub(F.add(x, y), y), x);
    if (!F.is_zero(x)) EXPECT_EQ(F.mul(x, F.inv(x)), F.one());
  }
  EXPECT_THROW(F.inv(F.zero()), InvariantError);
}

TEST(ExtField, CanonicalIndexRoundTrip) {
  const ExtField F = ExtField::build(BaseField::canonical(2, 2), 2);
  const auto els = F.elements();
  ASSERT_EQ(els.size(), 16u);
  for (std::size_t i = 0; i < els.size(); ++i) {
    EXPECT_EQ(F.canonical_index(els[i]), i);
    EXPECT_EQ(F.from_canonical_index(i), els[i]);
    if (i) EXPECT_TRUE(F.canonical_less(els[i - 1], els[i]));
    EXPECT_EQ(F.from_prime_digits(F.prime_digits(els[i])), els[i]);
  }
}

TEST(ExtField, OperationCharges) {
  const ExtField F = ExtField::build(BaseField::canonical(2, 2), 3);
  ff::OpCounter c;
  {
    ff::CounterScope scope(c);
    F.mul(F.y1(), F.y1());
  }
  EXPECT_EQ(c.muls, 9u + 6u);
  EXPECT_EQ(c.adds, 4u + 6u);
  c.reset();
  {
    ff::CounterScope scope(c);
    F.add(F.y1(), F.one());
    ff::CounterScope quiet(nullptr);
    F.mul(F.y1(), F.y1());
  }
  EXPECT_EQ(c.adds, 3u);
  EXPECT_EQ(c.muls, 0u);
}

TEST(Frobenius, Conjugates) {
  const ExtField F4 = ExtField::build(BaseField::prime(2), 2);
  EXPECT_EQ(ff::frobenius_conjugates(F4, F4.y1()), (std::vector<Elem>{ext_elem({0, 1}), ext_elem({1, 1})}));
  const ExtField F9 = ExtField::build(BaseField::prime(3), 2);
  EXPECT_EQ(ff::frobenius_conjugates(F9, F9.y1()), (std::vector<Elem>{ext_elem({0, 1}), ext_elem({0, 2})}));
  const ExtField F = ExtField::build(BaseField::canonical(2, 2), 2);
  for (const Elem& c : ff::frobenius_conjugates(F, F.one())) EXPECT_EQ(c, F.one());
  EXPECT_EQ(ff::frobenius_conjugates(F, F.one()).size(), 4u);
}

TEST(Extraction, ReadbackAndConjugateRoute) {
  auto F4 = BaseField::canonical(2, 2);
  EXPECT_EQ(ff::extract_ground_coeffs(*F4, F4->add(F4->y0(), 1)), (std::vector<ff::Digit>{1, 1}));
  EXPECT_EQ(ff::extract_ground_coeffs(*F4, 0), (std::vector<ff::Digit>{0, 0}));
  auto F8 = BaseField::canonical(2, 3);
  std::mt19937_64 rng(11);
  for (int t = 0; t < 100; ++t) {
    const auto x = static_cast<ff::Code>(rng() % 8);
    EXPECT_EQ(ff::extract_ground_coeffs(*F8, x), ff::extract_ground_coeffs_by_conjugates(*F8, x));
  }
}

TEST(Extraction, ChargesConjugateRouteCost) {
  auto F = BaseField::canonical(3, 2);
  ff::OpCounter c;
  {
    ff::CounterScope scope(c);
    ff::extract_ground_coeffs(*F, 5);
  }
  EXPECT_EQ(c, F->extraction_cost());
  EXPECT_GT(c.total(), 0u);
  c.reset();
  {
    ff::CounterScope scope(c);
    ff::extract_ground_coeffs(*F, 5, false);
  }
  EXPECT_EQ(c.total(), 0u);
}

TEST(Subfield, Enumeration) {
  const ExtField F4 = ExtField::build(BaseField::prime(2), 2);
  EXPECT_EQ(ff::enumerate_subfield(F4, 1), (std::vector<Elem>{F4.zero(), F4.one()}));

  const ExtField F16 = ExtField::build(BaseField::canonical(2, 2), 2);
  const auto S = ff::enumerate_subfield(F16, 2);
  ASSERT_EQ(S.size(), 4u);
  const std::set<std::vector<ff::Digit>> members = [&] {
    std::set<std::vector<ff::Digit>> m;
    for (const auto& x : S) m.insert(F16.prime_digits(x));
    return m;
  }();
  for (const auto& x : S) {
    EXPECT_EQ(F16.pow(x, 4), x);
    for (const auto& y : S) {
      EXPECT_TRUE(members.count(F16.prime_digits(F16.add(x, y))));
      EXPECT_TRUE(members.count(F16.prime_digits(F16.mul(x, y))));
    }
  }

  const ExtField F64 = ExtField::build(BaseField::canonical(2, 2), 3);
  EXPECT_EQ(ff::enumerate_subfield(F64, 3).size(), 8u);
}

TEST(Subfield, BasisElement) {
  const ExtField F16 = ExtField::build(BaseField::canonical(2, 2), 2);
  EXPECT_EQ(ff::subfield_basis_element(F16, 1, ff::enumerate_subfield(F16, 1)), F16.one());
  const auto S2 = ff::enumerate_subfield(F16, 2);
  const Elem beta = ff::subfield_basis_element(F16, 2, S2);
  EXPECT_NE(beta, F16.zero());
  EXPECT_NE(beta, F16.one());
  EXPECT_NE(F16.mul(beta, beta), beta);  // degree 2 over F_2

  const ExtField F64 = ExtField::build(BaseField::canonical(2, 2), 3);
  const auto S3 = ff::enumerate_subfield(F64, 3);
  const Elem g = ff::subfield_basis_element(F64, 3, S3);
  const Elem g2 = F64.mul(g, g);
  std::set<std::vector<ff::Digit>> spans;
  for (int mask = 0; mask < 8; ++mask) {
    Elem x = F64.zero();
    if (mask & 1) x = F64.add(x, F64.one());
    if (mask & 2) x = F64.add(x, g);
    if (mask & 4) x = F64.add(x, g2);
    spans.insert(F64.prime_digits(x));
  }
  EXPECT_EQ(spans.size(), 8u);
}

TEST(Subfield, DecomposeRecompose) {
  const ExtField F = ExtField::build(BaseField::canonical(2, 2), 3);
  const auto S = ff::enumerate_subfield(F, 3);
  const Elem beta = ff::subfield_basis_element(F, 3, S);
  const ff::SubfieldBasis basis(F, beta, 3);
  EXPECT_EQ(basis.decompose(beta), (std::vector<ff::Digit>{0, 1, 0}));
  EXPECT_EQ(basis.decompose(F.zero()), (std::vector<ff::Digit>{0, 0, 0}));
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const Elem x = S[rng() % S.size()];
    EXPECT_EQ(basis.recompose(basis.decompose(x)), x);
  }
  EXPECT_THROW(basis.decompose(F.y1()), MembershipError);
}

TEST(Subfield, Projection) {
  const ExtField F = ExtField::build(BaseField::canonical(3, 2), 2);
  for (ff::Code c = 0; c < 9; ++c) EXPECT_EQ(ff::project_to_subfield(F, code(c)), code(c));
  EXPECT_THROW(ff::project_to_subfield(F, F.y1()), MembershipError);
}
