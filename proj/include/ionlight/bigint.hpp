#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ionlight::util {

// Minimal signed arbitrary-precision integer: just enough exact arithmetic
// (add, subtract, multiply by machine word or BigInt, compare, convert to
// long double with a power-of-two scale) to evaluate factorial-weighted
// alternating sums without rounding. Magnitudes stay below ~10^100 for the
// supported inputs, so performance is irrelevant.
class BigInt {
 public:
  BigInt() = default;
  BigInt(std::int64_t value);  // NOLINT(google-explicit-constructor)

  static BigInt factorial(unsigned n);
  static BigInt binomial(unsigned n, unsigned k);

  BigInt& operator+=(const BigInt& other);
  BigInt& operator-=(const BigInt& other);
  BigInt& operator*=(const BigInt& other);
  BigInt& operator*=(std::int64_t value);
  friend BigInt operator+(BigInt a, const BigInt& b) { return a += b; }
  friend BigInt operator-(BigInt a, const BigInt& b) { return a -= b; }
  friend BigInt operator*(BigInt a, const BigInt& b) { return a *= b; }
  friend BigInt operator*(BigInt a, std::int64_t b) { return a *= b; }

  bool operator==(const BigInt& other) const;
  bool is_zero() const { return limbs_.empty(); }

  // Value as m * 2^exponent with m a long double; exact for |value| < 2^64.
  long double to_long_double() const;

  std::string to_string() const;

 private:
  // Base 2^32 little-endian magnitude; sign_ is +1 or -1 (ignored when zero).
  std::vector<std::uint32_t> limbs_;
  int sign_ = 1;

  void trim();
  static int compare_magnitude(const BigInt& a, const BigInt& b);
  static void add_magnitude(std::vector<std::uint32_t>& a,
                            const std::vector<std::uint32_t>& b);
  static void sub_magnitude(std::vector<std::uint32_t>& a,
                            const std::vector<std::uint32_t>& b);
};

}  // namespace ionlight::util
