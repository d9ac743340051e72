#include "mmeval/bench.hpp"

#include <chrono>
#include <iomanip>
#include <random>
#include <sstream>

#include "mmeval/error.hpp"
#include "mmeval/mme.hpp"
#include "mmeval/poly.hpp"

namespace mmeval::bench {

namespace {

BenchRow to_row(const mme::MmeRun& run, unsigned d, std::size_t N, double ms) {
  BenchRow row;
  row.algorithm = run.algorithm;
  row.d = d;
  row.points = N;
  row.preprocessing = run.ops.preprocessing;
  row.local = run.ops.local;
  row.wall_ms = ms;
  return row;
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchOptions& opts) {
  auto base = ff::BaseField::canonical(opts.p, opts.a);
  mme::MmeOptions mo;
  mo.threads = opts.threads;
  std::vector<BenchRow> rows;
  for (unsigned d : opts.degrees) {
    std::mt19937_64 rng(opts.seed + d);
    const std::size_t N = poly::checked_power(d, opts.n);
    const mme::MmeInstance inst = mme::random_instance(base, opts.n, d, N, rng);

    auto t0 = std::chrono::steady_clock::now();
    const mme::MmeRun naive = mme::mme_naive(inst, mo);
    auto t1 = std::chrono::steady_clock::now();
    const mme::MmeRun v1 = mme::mme_v1(inst, mo);
    auto t2 = std::chrono::steady_clock::now();
    if (naive.values != v1.values) throw VerificationError("bench: v1 disagrees with naive at d=" + std::to_string(d));
    rows.push_back(to_row(naive, d, N, std::chrono::duration<double, std::milli>(t1 - t0).count()));
    rows.push_back(to_row(v1, d, N, std::chrono::duration<double, std::milli>(t2 - t1).count()));
  }
  return rows;
}

double ratio(const std::vector<BenchRow>& rows, unsigned d) {
  const BenchRow* naive = nullptr;
  const BenchRow* v1 = nullptr;
  for (const auto& r : rows) {
    if (r.d != d) continue;
    if (r.algorithm == "naive") naive = &r;
    if (r.algorithm == "v1") v1 = &r;
  }
  if (!naive || !v1) throw ParamError("bench rows missing for d=" + std::to_string(d));
  return static_cast<double>(naive->total()) / static_cast<double>(v1->total());
}

std::string format_bench(const std::vector<BenchRow>& rows, bool with_wall) {
  std::ostringstream os;
  os << "algorithm\td\tN\tpre_adds\tpre_muls\tpre_invs\tlocal_adds\tlocal_muls\tlocal_invs\ttotal";
  if (with_wall) os << "\twall_ms";
  os << "\tnaive_over_v1\n";
  for (const auto& r : rows) {
    os << r.algorithm << '\t' << r.d << '\t' << r.points << '\t' << r.preprocessing.adds << '\t'
       << r.preprocessing.muls << '\t' << r.preprocessing.invs << '\t' << r.local.adds << '\t' << r.local.muls << '\t'
       << r.local.invs << '\t' << r.total();
    if (with_wall) os << '\t' << std::fixed << std::setprecision(2) << r.wall_ms;
    os << '\t' << std::fixed << std::setprecision(6) << ratio(rows, r.d) << '\n';
  }
  return os.str();
}

}  // namespace mmeval::bench
