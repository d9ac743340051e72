#pragma once

// Seeded invariant suite. The log is a pure function of the options.

#include <cstdint>
#include <string>

namespace mmeval::selftest {

inline constexpr std::uint64_t kDefaultSeed = 20240611;

struct Options {
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 1;
  /// Adds one to the first output of every fast evaluation before it is
  /// compared with the oracle. Library callers only.
  bool inject_fault = false;
};

struct Result {
  bool ok = true;
  std::string log;
  std::string first_failure;  // property name, empty when ok
};

Result run(const Options& opts);

}  // namespace mmeval::selftest
