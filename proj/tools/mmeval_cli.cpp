// Command-line front end: eval, ds build/query, rigidity, bench, selftest.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mmeval/bench.hpp"
#include "mmeval/error.hpp"
#include "mmeval/io.hpp"
#include "mmeval/mme.hpp"
#include "mmeval/pevds.hpp"
#include "mmeval/rigidity.hpp"
#include "mmeval/selftest.hpp"

using namespace mmeval;

namespace {

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    io::write_text_file(path, text);
  }
}

int cmd_eval(const std::string& input, const std::string& algo, std::optional<unsigned> ell, bool stats,
             const std::string& out, unsigned threads) {
  const mme::MmeInstance inst = io::parse_instance(io::read_json_file(input));
  if (ell && algo != "v3") throw ParamError("--ell is only valid with --algo v3");
  mme::MmeOptions opts;
  opts.threads = threads;
  mme::MmeRun run;
  if (algo == "naive") {
    run = mme::mme_naive(inst, opts);
  } else if (algo == "v1") {
    run = mme::mme_v1(inst, opts);
  } else if (algo == "v2") {
    run = mme::mme_v2(inst, opts);
  } else if (algo == "v3") {
    const auto& base = *inst.base;
    const unsigned depth = ell ? *ell : mme::default_ell(base.degree(), inst.f.d, base.characteristic());
    run = mme::mme_v3(inst, depth, opts);
  } else {
    throw ParamError("unknown algorithm '" + algo + "'");
  }
  emit(out, io::results_to_json(*inst.base, run.values).dump() + "\n");
  if (stats) std::cerr << mme::op_report(run);
  return 0;
}

struct PolyFile {
  std::shared_ptr<const ff::BaseField> base;
  poly::UniPoly f;
  std::uint64_t n = 0;
};

PolyFile read_poly_file(const std::string& path) {
  const io::json j = io::read_json_file(path);
  if (!j.is_object() || !j.contains("field") || !j.contains("poly")) {
    throw ParseError(path + ": expected an object with 'field' and 'poly'");
  }
  PolyFile pf;
  pf.base = io::parse_field(j["field"]);
  const poly::MultiPoly mp = io::parse_poly(*pf.base, j["poly"]);
  if (mp.n != 1) throw ParamError("poly.n: the data structure takes a univariate polynomial (n = 1)");
  pf.f = poly::make_poly(mp.coeffs);
  pf.n = mp.d;
  return pf;
}

int cmd_ds_build(const std::string& poly_path, std::optional<unsigned> d, std::optional<unsigned> m,
                 const std::string& out, unsigned threads) {
  if (out.empty()) throw ParamError("ds build needs --out");
  const PolyFile pf = read_poly_file(poly_path);
  pevds::KroneckerParams params;
  if (d || m) {
    if (!d || !m) throw ParamError("--d and --m must be given together");
    params = pevds::explicit_params(pf.n, *d, *m);
  } else {
    params = pevds::ds_choose_params(pf.n);
  }
  const auto ds = pevds::ds_build(pf.base, pf.f, params, threads);
  std::ofstream file(out, std::ios::binary);
  if (!file) throw ParamError("cannot write '" + out + "'");
  pevds::ds_save(ds, file);
  std::cerr << "d=" << params.d << " m=" << params.m << " b=" << ds.b() << " cells=" << ds.cell_count() << '\n';
  return 0;
}

int cmd_ds_query(const std::string& ds_path, const std::string& point) {
  std::ifstream file(ds_path, std::ios::binary);
  if (!file) throw ParseError("cannot open '" + ds_path + "'");
  const auto ds = pevds::ds_load(file);
  const ff::Elem alpha = io::parse_element_text(ds.base(), point);
  pevds::QueryStats stats;
  const ff::Elem v = pevds::ds_query(ds, alpha, &stats);
  std::cout << io::element_to_json(ds.base(), v).dump() << '\n';
  std::cerr << "cells_read=" << stats.cells_read << '\n';
  return 0;
}

int cmd_rigidity(const std::string& gen_path, std::optional<unsigned> d, std::optional<unsigned> m,
                 const std::string& out) {
  const io::GeneratorInput in = io::parse_generators(io::read_json_file(gen_path));
  const std::size_t n = in.generators.size();
  unsigned dd, mm;
  if (d && m) {
    dd = *d;
    mm = *m;
  } else if (!d && !m) {
    const auto params = pevds::ds_choose_params(std::max<std::size_t>(n, 2));
    dd = params.d;
    mm = params.m;
  } else {
    throw ParamError("--d and --m must be given together");
  }
  const auto fv = rigidity::factor_vandermonde(in.field, in.generators, dd, mm);
  rigidity::Claim claim;
  std::size_t pb = 1;
  for (unsigned i = 0; i < fv.b; ++i) pb *= in.field->characteristic();
  claim.max_row_sparsity = pb;
  const auto cert = rigidity::certify(fv.gamma, claim);
  std::ostringstream os;
  os << "n=" << n << "\nd=" << dd << "\nm=" << mm << "\nb=" << fv.b << '\n';
  os << "gamma=" << fv.gamma.rows() << "x" << fv.gamma.cols() << '\n';
  os << "w=" << fv.w.rows() << "x" << fv.w.cols() << '\n';
  os << "itilde=" << fv.itilde.rows() << "x" << fv.itilde.cols() << '\n';
  os << "factorization=PASS\n";
  os << rigidity::format_certificate(cert, claim);
  os << "expanded_row_nnz=" << fv.expanded_row_nnz << '\n';
  os << "result=" << (cert.pass() ? "PASS" : "FAIL") << '\n';
  emit(out, os.str());
  if (!cert.pass()) throw VerificationError("certificate claims failed");
  return 0;
}

int cmd_split(const std::string& split_path, const std::string& out) {
  const io::SplitInput in = io::parse_split(io::read_json_file(split_path));
  const auto r = rigidity::kronecker_split(in.factors, in.t);
  const bool rank_ok = r.rank_low <= r.rank_bound;
  const bool sparse_ok = r.row_sparsity <= r.sparsity_bound && r.col_sparsity <= r.sparsity_bound;
  std::ostringstream os;
  os << "factors=" << in.factors.size() << "\nt=" << in.t << "\ndimension=" << r.low_rank.rows() << '\n';
  os << "sum_matches=" << (r.sum_matches ? "PASS" : "FAIL") << '\n';
  os << "rank_low=" << r.rank_low << " rank_bound=" << r.rank_bound << ' ' << (rank_ok ? "PASS" : "FAIL") << '\n';
  os << "row_sparsity=" << r.row_sparsity << " col_sparsity=" << r.col_sparsity
     << " sparsity_bound=" << r.sparsity_bound << ' ' << (sparse_ok ? "PASS" : "FAIL") << '\n';
  const bool pass = r.sum_matches && rank_ok && sparse_ok;
  os << "result=" << (pass ? "PASS" : "FAIL") << '\n';
  emit(out, os.str());
  if (!pass) throw VerificationError("kronecker split bounds failed");
  return 0;
}

int cmd_bench(std::uint64_t seed, unsigned threads, const std::string& out) {
  bench::BenchOptions opts;
  opts.seed = seed;
  opts.threads = threads;
  emit(out, "seed=" + std::to_string(seed) + "\n" + bench::format_bench(bench::run_bench(opts)));
  return 0;
}

int cmd_selftest(std::uint64_t seed, unsigned threads, const std::string& out) {
  selftest::Options opts;
  opts.seed = seed;
  opts.threads = threads;
  const auto result = selftest::run(opts);
  emit(out, result.log);
  if (!result.ok) throw VerificationError("selftest property failed: " + result.first_failure);
  return 0;
}

int report(const Error& e) {
  std::cerr << "error: code=" << e.exit_code() << " kind=" << e.kind() << " message=" << e.what() << '\n';
  return e.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multivariate multipoint evaluation over finite fields"};
  app.require_subcommand(1);
  unsigned threads = 1;
  app.add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 256u));

  std::string input, algo = "v1", out, poly_path, ds_path, point, gen_path, split_path;
  std::optional<unsigned> ell, d, m;
  bool stats = false;
  std::uint64_t seed = selftest::kDefaultSeed;

  auto* eval = app.add_subcommand("eval", "Evaluate a polynomial at a list of points");
  eval->add_option("--input", input, "Instance file")->required();
  eval->add_option("--algo", algo, "naive, v1, v2 or v3")->check(CLI::IsMember({"naive", "v1", "v2", "v3"}));
  eval->add_option("--ell", ell, "Descent depth for v3");
  eval->add_flag("--stats", stats, "Write the op report to stderr");
  eval->add_option("--out", out, "Results file (default stdout)");
  eval->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 256u));

  auto* ds = app.add_subcommand("ds", "Univariate evaluation data structure");
  ds->require_subcommand(1);
  auto* build = ds->add_subcommand("build", "Tabulate a univariate polynomial");
  build->add_option("--poly", poly_path, "Polynomial file")->required();
  build->add_option("--d", d, "Kronecker base");
  build->add_option("--m", m, "Kronecker variable count");
  build->add_option("--out", out, "Data structure file")->required();
  build->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 256u));
  auto* query = ds->add_subcommand("query", "Evaluate at one point");
  query->add_option("--ds", ds_path, "Data structure file")->required();
  query->add_option("--point", point, "Comma-separated F_p digits")->required();

  auto* rig = app.add_subcommand("rigidity", "Vandermonde factorization or Kronecker split report");
  rig->add_option("--generators", gen_path, "Generators file");
  rig->add_option("--split", split_path, "Split factors file");
  rig->add_option("--d", d, "Kronecker base");
  rig->add_option("--m", m, "Kronecker variable count");
  rig->add_option("--out", out, "Report file (default stdout)");

  auto* bench = app.add_subcommand("bench", "Op counts of naive against v1");
  bench->add_option("--seed", seed, "Instance seed");
  bench->add_option("--out", out, "Report file (default stdout)");
  bench->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 256u));

  auto* self = app.add_subcommand("selftest", "Seeded invariant suite");
  self->add_option("--seed", seed, "Property seed");
  self->add_option("--out", out, "Log file (default stdout)");
  self->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 256u));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: code=2 kind=UsageError message=" << e.what() << '\n';
    return 2;
  }

  try {
    if (*eval) return cmd_eval(input, algo, ell, stats, out, threads);
    if (*build) return cmd_ds_build(poly_path, d, m, out, threads);
    if (*query) return cmd_ds_query(ds_path, point);
    if (*rig) {
      if (gen_path.empty() == split_path.empty()) throw ParamError("rigidity needs exactly one of --generators, --split");
      return gen_path.empty() ? cmd_split(split_path, out) : cmd_rigidity(gen_path, d, m, out);
    }
    if (*bench) return cmd_bench(seed, threads, out);
    if (*self) return cmd_selftest(seed, threads, out);
  } catch (const Error& e) {
    return report(e);
  } catch (const std::exception& e) {
    std::cerr << "error: code=4 kind=InternalError message=" << e.what() << '\n';
    return 4;
  }
  return 0;
}
