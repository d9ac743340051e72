#pragma once

// Op-count benchmark: naive evaluation against mme_v1 at growing degree.

#include <cstdint>
#include <string>
#include <vector>

#include "mmeval/ffield.hpp"

namespace mmeval::bench {

struct BenchOptions {
  std::uint32_t p = 2;
  unsigned a = 2;
  unsigned n = 2;
  std::vector<unsigned> degrees{4, 8, 16};
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct BenchRow {
  std::string algorithm;
  unsigned d = 0;
  std::size_t points = 0;
  ff::OpCounter preprocessing;
  ff::OpCounter local;
  double wall_ms = 0;
  std::uint64_t total() const { return preprocessing.total() + local.total(); }
};

/// For each d: one instance with N = d^n points, run by naive and v1.
std::vector<BenchRow> run_bench(const BenchOptions& opts);

/// naive total / v1 total for degree d; rows must contain both.
double ratio(const std::vector<BenchRow>& rows, unsigned d);

/// Tab-separated table with a header line and a ratio column.
std::string format_bench(const std::vector<BenchRow>& rows, bool with_wall = true);

}  // namespace mmeval::bench
