#pragma once

#include <charconv>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ionlight::util {

// Pairwise (tree) summation: deterministic and independent of chunking, so
// threaded producers can fill a vector by index and the reduction is still
// bit-identical for any thread count.
double pairwise_sum(std::span<const double> values);

// Neumaier compensated accumulator for long alternating series.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double value);
  double value() const { return sum + comp; }
};

// Same accumulator at extended precision for series whose intermediate terms
// exceed the final value by many orders of magnitude.
struct CompensatedSumL {
  long double sum = 0.0L;
  long double comp = 0.0L;
  void add(long double value);
  long double value() const { return sum + comp; }
};

// Shortest round-trip decimal form of a double (std::to_chars), used for all
// numeric output so files are byte-stable across runs and thread counts.
std::string format_double(double value);

// FNV-1a 64-bit hash, printed as 16 hex digits; used to fingerprint configs.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t value);

// Runs fn(i) for i in [0, count) over at most `threads` workers with a
// static block partition. Caller writes results by index; no reductions
// happen inside, so output is identical for every thread count.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace ionlight::util
