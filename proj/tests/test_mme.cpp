#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mmeval/error.hpp"
#include "mmeval/mme.hpp"
#include "oracle.hpp"

using namespace mmeval;
using ff::BaseField;
using ff::Elem;
using ff::ExtField;
using mme::MmeInstance;
using poly::MultiPoly;

namespace {

Elem c(ff::Code x) { return ExtField::embed(x); }

MultiPoly mp(unsigned n, unsigned d, std::initializer_list<std::pair<std::vector<unsigned>, ff::Code>> terms) {
  MultiPoly f = MultiPoly::zero(n, d);
  for (const auto& [e, v] : terms) f.coeffs[f.index(e)] = c(v);
  return f;
}

std::vector<Elem> oracle_values(const MmeInstance& inst) {
  const oracle::GF g = oracle::from_field(*inst.base);
  std::vector<Elem> out;
  for (const auto& pt : inst.points) {
    std::vector<oracle::Digits> x;
    for (const auto& v : pt) x.push_back(g.from_lib(*inst.base, v));
    out.push_back(g.to_lib(*inst.base, oracle::eval_terms(g, *inst.base, inst.f, x)));
  }
  return out;
}

}  // namespace

TEST(Naive, Examples) {
  auto F2 = BaseField::prime(2);
  MmeInstance a{F2, mp(1, 2, {{{1}, 1}}), {{c(0)}, {c(1)}}};
  EXPECT_EQ(mme::mme_naive(a).values, (std::vector<Elem>{c(0), c(1)}));
  MmeInstance b{F2, mp(2, 2, {{{1, 0}, 1}, {{0, 1}, 1}}), {{c(1), c(1)}}};
  EXPECT_EQ(mme::mme_naive(b).values, (std::vector<Elem>{c(0)}));
}

TEST(Naive, MatchesTermOracle) {
  std::mt19937_64 rng(41);
  for (auto [p, a] : {std::pair<std::uint32_t, unsigned>{2, 3}, {3, 2}, {5, 1}}) {
    const auto inst = mme::random_instance(BaseField::canonical(p, a), 2, 3, 15, rng);
    EXPECT_EQ(mme::mme_naive(inst).values, oracle_values(inst));
  }
}

TEST(V1, HandExample) {
  auto F4 = BaseField::canonical(2, 2);
  const ff::Code y0 = F4->y0(), y0p1 = F4->add(y0, 1);
  MmeInstance inst{F4, mp(2, 2, {{{1, 1}, 1}}), {{c(y0), c(y0p1)}}};
  EXPECT_EQ(mme::mme_v1(inst).values, (std::vector<Elem>{c(1)}));
  EXPECT_EQ(mme::mme_naive(inst).values, (std::vector<Elem>{c(1)}));
}

TEST(V1, PrimeFieldPointsEqualGridLookup) {
  std::mt19937_64 rng(2);
  auto base = BaseField::canonical(3, 1);
  auto inst = mme::random_instance(base, 2, 3, 0, rng);
  for (ff::Code y = 0; y < 3; ++y)
    for (ff::Code x = 0; x < 3; ++x) inst.points.push_back({c(x), c(y)});
  const auto table = poly::grid_eval(ExtField::trivial(base), inst.f, ExtField::trivial(base).elements());
  EXPECT_EQ(mme::mme_v1(inst).values, table);
}

TEST(Algorithms, AgreeWithOracleOnRandomInstances) {
  std::mt19937_64 rng(99);
  int count = 0;
  for (std::uint32_t p : {2u, 3u}) {
    for (unsigned a = 1; a <= 3; ++a) {
      for (unsigned n = 1; n <= 2; ++n) {
        for (unsigned d = 2; d <= 3; ++d) {
          const auto inst = mme::random_instance(BaseField::canonical(p, a), n, d, 1 + rng() % 10, rng);
          const auto expect = oracle_values(inst);
          EXPECT_EQ(mme::mme_naive(inst).values, expect);
          EXPECT_EQ(mme::mme_v1(inst).values, expect);
          EXPECT_EQ(mme::mme_v2(inst).values, expect);
          EXPECT_EQ(mme::mme_v3(inst, 0).values, expect);
          ++count;
        }
      }
    }
  }
  EXPECT_EQ(count, 24);
}

TEST(Algorithms, FullLocalModeMatchesWeights) {
  std::mt19937_64 rng(5);
  mme::MmeOptions full;
  full.local_mode = mme::MmeOptions::LocalMode::kFull;
  const auto inst = mme::random_instance(BaseField::canonical(3, 2), 2, 2, 8, rng);
  const auto expect = mme::mme_naive(inst).values;
  EXPECT_EQ(mme::mme_v1(inst, full).values, expect);
  EXPECT_EQ(mme::mme_v2(inst, full).values, expect);
}

TEST(Algorithms, ThreadCountDoesNotChangeOutputOrCounts) {
  std::mt19937_64 rng(6);
  const auto inst = mme::random_instance(BaseField::canonical(2, 2), 2, 3, 12, rng);
  mme::MmeOptions many;
  many.threads = 4;
  const auto one = mme::mme_v2(inst), four = mme::mme_v2(inst, many);
  EXPECT_EQ(one.values, four.values);
  EXPECT_EQ(one.ops.preprocessing, four.ops.preprocessing);
  EXPECT_EQ(one.ops.local, four.ops.local);
}

TEST(V2, HermiteRegime) {
  // p^b = 8 > ad = 6 but adn = 18 > 8.
  std::mt19937_64 rng(12);
  const auto inst = mme::random_instance(BaseField::canonical(2, 3), 3, 2, 10, rng);
  const auto run = mme::mme_v2(inst);
  EXPECT_EQ(run.ext_degree, 3u);
  EXPECT_EQ(run.values, oracle_values(inst));
  EXPECT_EQ(mme::mme_v3(inst, 0).values, run.values);
}

TEST(Descent, ASequence) {
  EXPECT_EQ(mme::a_sequence(8, 2, 2, 2), (std::vector<unsigned>{8, 5, 4, 4}));
  EXPECT_EQ(mme::a_sequence(8, 2, 2, 0), (std::vector<unsigned>{8, 5}));
  EXPECT_THROW(mme::a_sequence(2, 2, 2, 10), DepthError);
}

TEST(Descent, BoundHoldsOnGrid) {
  for (std::uint32_t p : {2u, 3u}) {
    for (unsigned d = 2; d <= 8; ++d) {
      for (unsigned a = 2; a <= 64; ++a) {
        const unsigned ell = mme::log_star(p, a);
        const auto seq = mme::a_sequence(a, d, p, ell);
        for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
          EXPECT_GT(std::pow(double(p), seq[i + 1]), double(d) * seq[i]);
          EXPECT_LE(std::pow(double(p), seq[i + 1] - 1.0), double(d) * seq[i]);
        }
        for (std::size_t i = 0; i < seq.size(); ++i) {
          EXPECT_LE(seq[i], mme::descent_bound(a, d, p, i)) << "p=" << p << " d=" << d << " a=" << a << " i=" << i;
        }
      }
    }
  }
}

TEST(V3, DeepDescentMatchesOracle) {
  std::mt19937_64 rng(77);
  const auto inst = mme::random_instance(BaseField::canonical(2, 8), 2, 2, 3, rng);
  const auto run = mme::mme_v3(inst, 1);
  EXPECT_EQ(run.a_seq, (std::vector<unsigned>{8, 5, 4}));
  EXPECT_EQ(run.values, oracle_values(inst));
  ASSERT_EQ(run.points_per_level.size(), 2u);
  EXPECT_LE(run.points_per_level[1], run.points_per_level[0] * (std::size_t{1} << run.a_seq[1]));
}

TEST(V3, Level0EqualsV2) {
  std::mt19937_64 rng(3);
  const auto inst = mme::random_instance(BaseField::canonical(3, 2), 2, 3, 6, rng);
  const auto v3 = mme::mme_v3(inst, 0);
  EXPECT_EQ(v3.values, mme::mme_v2(inst).values);
  EXPECT_EQ(v3.ext_degree, mme::mme_v2(inst).ext_degree);
}

TEST(ChainRule, DerivativeRowsMatchComposition) {
  auto base = BaseField::canonical(3, 1);
  const ExtField F = ExtField::build(base, 3);
  const auto S = ff::enumerate_subfield(F, 3);
  std::mt19937_64 rng(19);
  for (int t = 0; t < 20; ++t) {
    const unsigned n = 1 + rng() % 2, d = 2 + rng() % 2, orders = 1 + rng() % 3;
    const MultiPoly f = poly::random_multipoly(F, n, d, rng);
    poly::Curve g;
    for (unsigned j = 0; j < n; ++j) {
      const bool constant = t % 5 == 0;
      g.components.push_back(poly::make_poly({c(rng() % 3), constant ? F.zero() : c(rng() % 3)}));
    }
    std::vector<unsigned> e(n);
    unsigned et = 0;
    for (auto& v : e) et += (v = rng() % 2);
    const auto table = mme::build_derivative_grid(F, S, f, et + orders - 1);
    const std::vector<Elem> nodes(S.begin(), S.begin() + 5);
    const auto rows_a = mme::evaluate_derivatives_a(F, g, table, nodes, orders);
    const auto rows_b = mme::evaluate_derivatives_b(F, g, e, table, nodes, orders);
    const auto zero = std::vector<unsigned>(n, 0);
    EXPECT_EQ(mme::evaluate_derivatives_b(F, g, zero, table, nodes, orders), rows_a);
    const auto ha = poly::compose_on_curve(F, f, g);
    const auto hb = poly::compose_on_curve(F, poly::hasse_derivative(F, f, e), g);
    for (std::size_t r = 0; r < nodes.size(); ++r) {
      for (unsigned k = 0; k < orders; ++k) {
        EXPECT_EQ(rows_a[r][k], poly::horner_eval(F, poly::uni_hasse(F, ha, k), nodes[r]));
        EXPECT_EQ(rows_b[r][k], poly::horner_eval(F, poly::uni_hasse(F, hb, k), nodes[r]));
      }
    }
  }
}

TEST(ChainRule, MissingOrderThrows) {
  const ExtField F = ExtField::build(BaseField::canonical(2, 1), 3);
  const auto S = ff::enumerate_subfield(F, 3);
  std::mt19937_64 rng(1);
  const auto f = poly::random_multipoly(F, 2, 2, rng);
  const auto table = mme::build_derivative_grid(F, S, f, 0);
  const poly::Curve g{{poly::make_poly({c(0), c(1)}), poly::make_poly({c(1), c(1)})}};
  const std::vector<Elem> nodes(S.begin(), S.begin() + 2);
  EXPECT_THROW(mme::evaluate_derivatives_a(F, g, table, nodes, 2), MissingDerivativeError);
}

TEST(ChainRule, CoefficientKilledInCharacteristic) {
  const std::vector<unsigned> e{1, 0}, b{1, 1};
  std::uint32_t cb = 1;
  for (int j = 0; j < 2; ++j) cb = cb * poly::binom_mod(e[j] + b[j], b[j], 2) % 2;
  EXPECT_EQ(cb, 0u);
}

TEST(OpCounts, ZeroPointsAndPreprocessingIndependence) {
  std::mt19937_64 rng(8);
  auto base = BaseField::canonical(2, 2);
  auto inst = mme::random_instance(base, 2, 3, 0, rng);
  const auto empty = mme::mme_v1(inst);
  EXPECT_TRUE(empty.values.empty());
  EXPECT_EQ(empty.ops.local.total(), 0u);
  EXPECT_GT(empty.ops.preprocessing.total(), 0u);
  for (std::size_t N : {5u, 20u}) {
    inst.points.clear();
    for (std::size_t i = 0; i < N; ++i) inst.points.push_back({ExtField::trivial(base).random(rng), c(1)});
    const auto run = mme::mme_v1(inst);
    EXPECT_EQ(run.ops.preprocessing, empty.ops.preprocessing);
    EXPECT_GT(run.ops.local.total(), 0u);
  }
}

TEST(OpCounts, NaiveCountsHorner) {
  std::mt19937_64 rng(10);
  const auto inst = mme::random_instance(BaseField::canonical(2, 2), 2, 4, 16, rng);
  const auto run = mme::mme_naive(inst);
  EXPECT_EQ(run.ops.preprocessing.total(), 0u);
  EXPECT_GE(run.ops.local.muls, 16u * (16 - 1));
}

TEST(Validate, RejectsMalformedInstances) {
  auto base = BaseField::canonical(2, 2);
  MmeInstance wrong_dim{base, mp(2, 2, {}), {{c(1)}}};
  EXPECT_THROW(mme::mme_naive(wrong_dim), DimensionError);
  MmeInstance out_of_field{base, mp(1, 2, {}), {{c(7)}}};
  EXPECT_THROW(mme::mme_v1(out_of_field), ParamError);
}

TEST(Report, KeyValueLines) {
  std::mt19937_64 rng(4);
  const auto inst = mme::random_instance(BaseField::canonical(2, 2), 2, 2, 3, rng);
  const std::string r = mme::op_report(mme::mme_v3(inst, 0));
  EXPECT_NE(r.find("algorithm=v3\n"), std::string::npos);
  EXPECT_NE(r.find("points=3\n"), std::string::npos);
  EXPECT_NE(r.find("preprocessing_total="), std::string::npos);
  EXPECT_NE(r.find("local_muls="), std::string::npos);
  EXPECT_NE(r.find("a_seq="), std::string::npos);
}
