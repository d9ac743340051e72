#include <gtest/gtest.h>

#include <random>

#include "mmeval/error.hpp"
#include "mmeval/rigidity.hpp"
#include "oracle.hpp"

using namespace mmeval;
using ff::BaseField;
using ff::Elem;
using ff::ExtField;
using la::FieldMatrix;

namespace {

Elem c(ff::Code x) { return ExtField::embed(x); }

FieldMatrix mat(const ExtField& F, std::size_t r, std::size_t cols, std::initializer_list<ff::Code> v) {
  FieldMatrix m(F, r, cols);
  std::size_t i = 0;
  for (auto x : v) {
    m.at(i / cols, i % cols) = c(x);
    ++i;
  }
  return m;
}

}  // namespace

TEST(Vandermonde, Examples) {
  const ExtField F2 = ExtField::trivial(BaseField::prime(2));
  const std::vector<Elem> g{c(0), c(1)};
  EXPECT_EQ(rigidity::build_vandermonde(F2, g), mat(F2, 2, 2, {1, 0, 1, 1}));

  const ExtField F8 = ExtField::trivial(BaseField::canonical(2, 3));
  const auto all = F8.elements();
  EXPECT_EQ(rigidity::build_vandermonde(F8, all).rank(), 8u);
  const std::vector<Elem> rep{all[1], all[2], all[1], all[3]};
  EXPECT_EQ(rigidity::build_vandermonde(F8, rep).rank(), 3u);
}

TEST(W, SmallBlockAndKroneckerStructure) {
  // Rows for the nodes 0 and 1 form [[1,0],[1,1]].
  const ExtField F4 = ExtField::build(BaseField::prime(2), 2);
  const FieldMatrix W1 = rigidity::build_w(F4, 2, 1);
  ASSERT_EQ(W1.rows(), 4u);
  EXPECT_EQ(W1.at(0, 0), F4.one());
  EXPECT_EQ(W1.at(0, 1), F4.zero());
  EXPECT_EQ(W1.at(1, 0), F4.one());
  EXPECT_EQ(W1.at(1, 1), F4.one());
  const ExtField F8 = ExtField::build(BaseField::prime(2), 3);
  const FieldMatrix V1 = rigidity::build_w(F8, 2, 1);
  EXPECT_EQ(rigidity::build_w(F8, 2, 2), V1.kronecker(V1));
  EXPECT_THROW(rigidity::build_w(F4, 2, 2), ParamError);
}

TEST(W, TimesCoefficientsIsGridEval) {
  auto base = BaseField::canonical(2, 1);
  const ExtField F = ExtField::build(base, 3);
  std::mt19937_64 rng(2);
  const auto f = poly::random_multipoly(F, 2, 2, rng);
  const FieldMatrix W = rigidity::build_w(F, 2, 2);
  FieldMatrix coeff(F, f.coeffs.size(), 1);
  for (std::size_t i = 0; i < f.coeffs.size(); ++i) coeff.at(i, 0) = f.coeffs[i];
  const FieldMatrix prod = W.multiply(coeff);
  const auto grid = poly::grid_eval(F, f, ff::enumerate_subfield(F, 3));
  ASSERT_EQ(prod.rows(), grid.size());
  for (std::size_t r = 0; r < grid.size(); ++r) EXPECT_EQ(prod.at(r, 0), grid[r]);
}

TEST(Factorization, AllOfF4) {
  auto base = BaseField::canonical(2, 2);
  const auto gens = ExtField::trivial(base).elements();
  const auto fv = rigidity::factor_vandermonde(base, gens, 2, 2);
  EXPECT_EQ(fv.b, 4u);
  EXPECT_EQ(fv.gamma.rows(), 4u);
  EXPECT_EQ(fv.gamma.cols(), 256u);
  EXPECT_TRUE(rigidity::verify_factorization(fv));
  EXPECT_LE(fv.gamma_max_row_nnz, 16u);
  EXPECT_EQ(fv.expanded_row_nnz, fv.gamma_max_row_nnz * 2 * 4);

  // Independent check of the product against V built from the test oracle.
  const oracle::GF g = oracle::from_field(*base);
  const FieldMatrix prod = fv.gamma.multiply(fv.w.multiply(fv.itilde));
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_EQ(prod.at(i, j), g.to_lib(*base, g.pow(g.from_lib(*base, gens[i]), j)));
    }
  }
  rigidity::Claim claim;
  claim.max_row_sparsity = 16;
  EXPECT_TRUE(rigidity::certify(fv.gamma, claim).pass());
  EXPECT_EQ(prod.rank(), rigidity::build_vandermonde(fv.ext, gens).rank());
}

TEST(Factorization, SingleGeneratorAndRandomF8) {
  auto base = BaseField::canonical(2, 3);
  const ExtField Fq = ExtField::trivial(base);
  const std::vector<Elem> one{c(base->y0())};
  const auto fv1 = rigidity::factor_vandermonde(base, one, 2, 1);
  EXPECT_EQ(fv1.gamma.rows(), 1u);
  EXPECT_TRUE(rigidity::verify_factorization(fv1));

  std::mt19937_64 rng(5);
  std::vector<Elem> gens;
  for (int i = 0; i < 8; ++i) gens.push_back(Fq.random(rng));
  const auto fv = rigidity::factor_vandermonde(base, gens, 2, 3);
  EXPECT_TRUE(rigidity::verify_factorization(fv));
  rigidity::Claim claim;
  claim.max_row_sparsity = std::size_t{1} << fv.b;
  EXPECT_TRUE(rigidity::certify(fv.gamma, claim).pass());
}

TEST(Factorization, Errors) {
  auto base = BaseField::canonical(2, 2);
  const auto gens = ExtField::trivial(base).elements();
  EXPECT_THROW(rigidity::factor_vandermonde(base, gens, 2, 1), ParamError);
  const std::vector<Elem> bad{c(9)};
  EXPECT_THROW(rigidity::factor_vandermonde(base, bad, 2, 1), ParamError);
}

TEST(Certify, Examples) {
  const ExtField F = ExtField::trivial(BaseField::prime(3));
  rigidity::Claim rank_claim;
  rank_claim.max_rank = 4;
  EXPECT_TRUE(rigidity::certify(FieldMatrix::identity(F, 4), rank_claim).pass());
  rigidity::Claim sparse_claim;
  sparse_claim.max_row_sparsity = 0;
  sparse_claim.max_col_sparsity = 0;
  EXPECT_TRUE(rigidity::certify(FieldMatrix(F, 3, 3), sparse_claim).pass());
  rank_claim.max_rank = 3;
  const auto cert = rigidity::certify(FieldMatrix::identity(F, 4), rank_claim);
  EXPECT_FALSE(cert.pass());
  EXPECT_NE(rigidity::format_certificate(cert, rank_claim).find("claim_rank_le=3 FAIL"), std::string::npos);
}

TEST(Split, ThresholdExtremes) {
  const std::vector<rigidity::SplitFactor> f(2, rigidity::toy_factor());
  const auto t0 = rigidity::kronecker_split(f, 0);
  EXPECT_EQ(t0.low_rank.nnz(), 0u);
  const FieldMatrix full = f[0].L.add(f[0].S).kronecker(f[1].L.add(f[1].S));
  EXPECT_EQ(t0.sparse, full);

  const ExtField F2 = ExtField::trivial(BaseField::prime(2));
  std::vector<rigidity::SplitFactor> lonly(2, {rigidity::toy_factor().L, FieldMatrix(F2, 2, 2)});
  const auto tm = rigidity::kronecker_split(lonly, 2);
  EXPECT_EQ(tm.sparse.nnz(), 0u);
  EXPECT_EQ(tm.low_rank, lonly[0].L.kronecker(lonly[1].L));
  EXPECT_THROW(rigidity::kronecker_split(f, 3), DimensionError);
}

TEST(Split, ToyBounds) {
  const std::vector<rigidity::SplitFactor> f(2, rigidity::toy_factor());
  const auto r = rigidity::kronecker_split(f, 1);
  EXPECT_TRUE(r.sum_matches);
  EXPECT_EQ(r.rank_bound, 1u);
  EXPECT_EQ(r.sparsity_bound, 5u);
  EXPECT_LE(r.rank_low, 1u);
  EXPECT_LE(r.row_sparsity, 5u);
  EXPECT_LE(r.col_sparsity, 5u);
}
