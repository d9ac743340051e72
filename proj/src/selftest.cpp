#include "mmeval/selftest.hpp"

#include <functional>
#include <random>
#include <sstream>
#include <vector>

#include "mmeval/error.hpp"
#include "mmeval/ffield.hpp"
#include "mmeval/mme.hpp"
#include "mmeval/pevds.hpp"
#include "mmeval/poly.hpp"
#include "mmeval/rigidity.hpp"

namespace mmeval::selftest {

namespace {

using ff::Elem;
using ff::ExtField;

// A property returns the number of checks made, or a failure description.
struct Outcome {
  std::size_t checks = 0;
  std::string failure;
};

std::uint64_t name_hash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ull;
  return h;
}

class Suite {
 public:
  explicit Suite(const Options& opts) : opts_(opts) {}

  void property(const std::string& name, const std::function<void(std::mt19937_64&, Outcome&)>& body) {
    std::mt19937_64 rng(opts_.seed ^ name_hash(name));
    Outcome out;
    try {
      ff::CounterScope quiet(nullptr);
      body(rng, out);
    } catch (const Error& e) {
      out.failure = std::string(e.kind()) + ": " + e.what();
    }
    if (out.failure.empty()) {
      log_ << "PASS " << name << " checks=" << out.checks << '\n';
    } else {
      log_ << "FAIL " << name << " " << out.failure << '\n';
      if (result_.ok) result_.first_failure = name;
      result_.ok = false;
    }
  }

  Result finish() {
    log_ << (result_.ok ? "selftest ok" : "selftest failed: " + result_.first_failure) << '\n';
    result_.log = log_.str();
    return result_;
  }

  const Options& opts() const { return opts_; }

 private:
  Options opts_;
  std::ostringstream log_;
  Result result_;
};

bool check(Outcome& out, bool cond, const std::string& what) {
  ++out.checks;
  if (!cond && out.failure.empty()) out.failure = what;
  return cond;
}

Elem add_monomials(const ExtField& F, const poly::MultiPoly& f, std::span<const Elem> x, std::span<const Elem> z,
                   const std::vector<poly::MultiPoly>& derivs, const poly::ExponentSet& exps) {
  Elem acc = F.zero();
  for (std::size_t i = 0; i < exps.size(); ++i) {
    Elem term = poly::multi_eval(F, derivs[i], x);
    for (unsigned j = 0; j < f.n; ++j) term = F.mul(term, F.pow(z[j], exps[i][j]));
    acc = F.add(acc, term);
  }
  return acc;
}

void field_axioms(std::mt19937_64& rng, Outcome& out) {
  const std::pair<std::uint32_t, unsigned> grounds[] = {{2, 1}, {2, 2}, {3, 2}, {5, 1}};
  for (auto [p, a] : grounds) {
    for (unsigned b = 1; b <= 3; ++b) {
      const ExtField F = ExtField::build(ff::BaseField::canonical(p, a), b);
      const std::uint64_t order = F.order();
      for (int t = 0; t < 20; ++t) {
        const Elem x = F.random(rng), y = F.random(rng), z = F.random(rng);
        check(out, F.mul(x, F.mul(y, z)) == F.mul(F.mul(x, y), z), "multiplication not associative");
        check(out, F.mul(x, F.add(y, z)) == F.add(F.mul(x, y), F.mul(x, z)), "distributivity fails");
        check(out, F.pow(x, order) == x, "x^(q^b) != x");
        check(out, F.pow(F.add(x, y), p) == F.add(F.pow(x, p), F.pow(y, p)), "Frobenius not additive");
        if (!F.is_zero(x)) check(out, F.mul(x, F.inv(x)) == F.one(), "x * x^-1 != 1");
      }
    }
  }
}

void extraction(std::mt19937_64& rng, Outcome& out) {
  for (auto [p, a] : {std::pair<std::uint32_t, unsigned>{2, 3}, {3, 2}, {5, 2}}) {
    auto base = ff::BaseField::canonical(p, a);
    std::uniform_int_distribution<std::uint32_t> pick(0, base->order() - 1);
    for (int t = 0; t < 20; ++t) {
      const auto x = static_cast<ff::Code>(pick(rng));
      check(out, ff::extract_ground_coeffs(*base, x, false) == ff::extract_ground_coeffs_by_conjugates(*base, x),
            "coefficient extraction disagrees with the conjugate route");
    }
  }
}

void interpolation(std::mt19937_64& rng, Outcome& out) {
  const ExtField F = ExtField::build(ff::BaseField::canonical(3, 1), 3);
  const auto nodes = F.elements();
  for (int t = 0; t < 20; ++t) {
    const unsigned D = 1 + static_cast<unsigned>(rng() % 12);
    const poly::UniPoly h = poly::random_unipoly(F, D + 1, rng);
    std::vector<Elem> xs(nodes.begin(), nodes.begin() + D + 1), ys;
    for (const auto& x : xs) ys.push_back(poly::horner_eval(F, h, x));
    check(out, poly::interpolate(F, xs, ys, D) == h, "Newton interpolation round trip");

    std::vector<poly::HermiteData> data;
    unsigned total = 0;
    for (std::size_t i = 0; total <= D; ++i) {
      const unsigned mult = 1 + static_cast<unsigned>(rng() % 3);
      poly::HermiteData hd{nodes[i], mult, {}};
      for (unsigned k = 0; k < mult; ++k) hd.values.push_back(poly::horner_eval(F, poly::uni_hasse(F, h, k), nodes[i]));
      total += mult;
      data.push_back(std::move(hd));
    }
    check(out, poly::hermite_interpolate(F, data, D) == h, "Hermite interpolation round trip");
  }
}

void taylor(std::mt19937_64& rng, Outcome& out) {
  for (int t = 0; t < 20; ++t) {
    const std::uint32_t p = (t % 3 == 0) ? 2 : (t % 3 == 1 ? 3 : 5);
    const ExtField F = ExtField::trivial(ff::BaseField::canonical(p, 1 + t % 2));
    const unsigned n = 1 + static_cast<unsigned>(rng() % 3), d = 1 + static_cast<unsigned>(rng() % 4);
    const auto f = poly::random_multipoly(F, n, d, rng);
    const unsigned K = (d - 1) * n;
    const poly::ExponentSet exps(n, K);
    const auto derivs = poly::hasse_set(F, f, K);
    std::vector<Elem> x(n), z(n), xz(n);
    for (unsigned j = 0; j < n; ++j) {
      x[j] = F.random(rng);
      z[j] = F.random(rng);
      xz[j] = F.add(x[j], z[j]);
    }
    check(out, poly::multi_eval(F, f, xz) == add_monomials(F, f, x, z, derivs, exps), "Taylor identity");
  }
}

void hasse_composition(std::mt19937_64& rng, Outcome& out) {
  for (int t = 0; t < 20; ++t) {
    const std::uint32_t p = (t % 2 == 0) ? 2 : 3;
    const ExtField F = ExtField::trivial(ff::BaseField::canonical(p, 2));
    const unsigned n = 1 + static_cast<unsigned>(rng() % 3), d = 2 + static_cast<unsigned>(rng() % 4);
    const auto f = poly::random_multipoly(F, n, d, rng);
    std::vector<unsigned> ea(n), eb(n), sum(n);
    std::uint64_t coeff = 1;
    for (unsigned j = 0; j < n; ++j) {
      ea[j] = static_cast<unsigned>(rng() % d);
      eb[j] = static_cast<unsigned>(rng() % d);
      sum[j] = ea[j] + eb[j];
      coeff = coeff * poly::binom_mod(sum[j], ea[j], p) % p;
    }
    const auto lhs = poly::hasse_derivative(F, poly::hasse_derivative(F, f, eb), ea);
    auto rhs = poly::hasse_derivative(F, f, sum);
    for (auto& c : rhs.coeffs) c = F.scale_int(c, coeff);
    check(out, lhs == rhs, "Hasse composition rule");
  }
}

void grid(std::mt19937_64& rng, Outcome& out) {
  const ExtField F = ExtField::build(ff::BaseField::canonical(2, 2), 2);
  const auto S = ff::enumerate_subfield(F, 2);
  for (unsigned n = 1; n <= 3; ++n) {
    const auto f = poly::random_multipoly(F, n, 3, rng);
    const auto table = poly::grid_eval(F, f, S);
    std::vector<Elem> pt(n);
    for (std::size_t cell = 0; cell < table.size(); ++cell) {
      std::size_t rest = cell;
      for (unsigned j = 0; j < n; ++j) {
        pt[j] = S[rest % S.size()];
        rest /= S.size();
      }
      check(out, table[cell] == poly::multi_eval(F, f, pt), "grid_eval cell differs from direct evaluation");
    }
  }
}

void chain_rule(std::mt19937_64& rng, Outcome& out) {
  auto base = ff::BaseField::canonical(2, 2);
  const ExtField F = ExtField::build(base, 3);
  const auto S = ff::enumerate_subfield(F, 3);
  for (int t = 0; t < 10; ++t) {
    const unsigned n = 1 + static_cast<unsigned>(rng() % 2), d = 2 + static_cast<unsigned>(rng() % 2);
    const unsigned orders = 1 + static_cast<unsigned>(rng() % 3);
    const auto f = poly::random_multipoly(F, n, d, rng);
    std::vector<unsigned> e(n);
    unsigned e_total = 0;
    for (auto& v : e) e_total += (v = static_cast<unsigned>(rng() % 2));
    poly::Curve g;
    for (unsigned j = 0; j < n; ++j) {
      std::vector<Elem> c(2);
      for (auto& x : c) x = F.embed(static_cast<ff::Code>(rng() % 2));
      g.components.push_back(poly::make_poly(std::move(c)));
    }
    const auto table = mme::build_derivative_grid(F, S, f, e_total + orders - 1);
    const std::vector<Elem> nodes(S.begin(), S.begin() + 4);
    const auto got_a = mme::evaluate_derivatives_a(F, g, table, nodes, orders);
    const auto got_b = mme::evaluate_derivatives_b(F, g, e, table, nodes, orders);
    const auto ha = poly::compose_on_curve(F, f, g);
    const auto hb = poly::compose_on_curve(F, poly::hasse_derivative(F, f, e), g);
    for (std::size_t r = 0; r < nodes.size(); ++r) {
      for (unsigned k = 0; k < orders; ++k) {
        check(out, got_a[r][k] == poly::horner_eval(F, poly::uni_hasse(F, ha, k), nodes[r]), "chain rule (values)");
        check(out, got_b[r][k] == poly::horner_eval(F, poly::uni_hasse(F, hb, k), nodes[r]),
              "chain rule (derivatives)");
      }
    }
  }
}

void oracle(std::mt19937_64& rng, Outcome& out, const Options& opts) {
  mme::MmeOptions mo;
  mo.threads = opts.threads;
  for (std::uint32_t p : {2u, 3u}) {
    for (unsigned a = 1; a <= 2; ++a) {
      auto base = ff::BaseField::canonical(p, a);
      for (unsigned n = 1; n <= 2; ++n) {
        for (unsigned d = 2; d <= 3; ++d) {
          const auto inst = mme::random_instance(base, n, d, 6, rng);
          const auto expect = mme::mme_naive(inst, mo).values;
          std::vector<mme::MmeRun> runs{mme::mme_v1(inst, mo), mme::mme_v2(inst, mo), mme::mme_v3(inst, 0, mo)};
          const unsigned ell = mme::default_ell(a, d, p);
          if (ell > 0) runs.push_back(mme::mme_v3(inst, ell, mo));
          for (auto& run : runs) {
            if (opts.inject_fault && !run.values.empty()) {
              run.values[0] = ExtField::trivial(base).add(run.values[0], ExtField::trivial(base).one());
            }
            check(out, run.values == expect,
                  run.algorithm + " differs from naive at p=" + std::to_string(p) + " a=" + std::to_string(a) +
                      " n=" + std::to_string(n) + " d=" + std::to_string(d));
          }
        }
      }
    }
  }
}

void data_structure(std::mt19937_64& rng, Outcome& out, const Options& opts) {
  auto base = ff::BaseField::canonical(2, 2);
  const ExtField Fq = ExtField::trivial(base);
  const auto params = pevds::ds_choose_params(16);
  const auto f = poly::random_unipoly(Fq, 16, rng);
  const auto ds = pevds::ds_build(base, f, params, opts.threads);
  const std::uint64_t bound = std::uint64_t{ds.p()} * ds.a() * params.d * params.m;
  for (const Elem& alpha : Fq.elements()) {
    pevds::QueryStats stats;
    check(out, pevds::ds_query(ds, alpha, &stats) == poly::horner_eval(Fq, f, alpha), "query differs from Horner");
    check(out, stats.cells_read <= bound, "query read more than p*a*d*m cells");
  }
  std::ostringstream first;
  pevds::ds_save(ds, first);
  std::istringstream in(first.str());
  const auto loaded = pevds::ds_load(in);
  std::ostringstream second;
  pevds::ds_save(loaded, second);
  check(out, first.str() == second.str(), "save/load round trip changed bytes");
  check(out, pevds::ds_verify(loaded, f, rng), "stored cells disagree with f");
}

void rigidity_factor(std::mt19937_64&, Outcome& out) {
  auto base = ff::BaseField::canonical(2, 2);
  const auto gens = ExtField::trivial(base).elements();
  const auto fv = rigidity::factor_vandermonde(base, gens, 2, 2);
  check(out, rigidity::verify_factorization(fv), "Gamma * W * Itilde differs from V");
  rigidity::Claim claim;
  claim.max_row_sparsity = std::size_t{1} << fv.b;
  check(out, rigidity::certify(fv.gamma, claim).pass(), "Gamma row sparsity exceeds p^b");
}

void rigidity_split(std::mt19937_64&, Outcome& out) {
  const std::vector<rigidity::SplitFactor> factors(3, rigidity::toy_factor());
  for (unsigned t = 0; t <= 3; ++t) {
    const auto r = rigidity::kronecker_split(factors, t);
    check(out, r.sum_matches, "low-rank plus sparse does not sum to the Kronecker product");
    check(out, r.rank_low <= r.rank_bound, "low-rank part exceeds its rank bound");
    check(out, r.row_sparsity <= r.sparsity_bound && r.col_sparsity <= r.sparsity_bound,
          "sparse part exceeds its sparsity bound");
  }
}

}  // namespace

Result run(const Options& opts) {
  Suite suite(opts);
  suite.property("field.axioms", field_axioms);
  suite.property("field.extraction", extraction);
  suite.property("poly.interpolation", interpolation);
  suite.property("poly.taylor", taylor);
  suite.property("poly.hasse_composition", hasse_composition);
  suite.property("poly.grid_eval", grid);
  suite.property("mme.chain_rule", chain_rule);
  suite.property("mme.oracle", [&](std::mt19937_64& rng, Outcome& out) { oracle(rng, out, opts); });
  suite.property("pevds.query", [&](std::mt19937_64& rng, Outcome& out) { data_structure(rng, out, opts); });
  suite.property("rigidity.factorization", rigidity_factor);
  suite.property("rigidity.split", rigidity_split);
  Result r = suite.finish();
  r.log = "selftest seed=" + std::to_string(opts.seed) + "\n" + r.log;
  return r;
}

}  // namespace mmeval::selftest
