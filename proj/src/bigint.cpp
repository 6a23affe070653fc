#include "ionlight/bigint.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ionlight::util {

BigInt::BigInt(std::int64_t value) {
  if (value < 0) {
    sign_ = -1;
    // Avoid overflow at INT64_MIN.
    std::uint64_t mag = static_cast<std::uint64_t>(-(value + 1)) + 1;
    while (mag) {
      limbs_.push_back(static_cast<std::uint32_t>(mag & 0xffffffffu));
      mag >>= 32;
    }
  } else {
    std::uint64_t mag = static_cast<std::uint64_t>(value);
    while (mag) {
      limbs_.push_back(static_cast<std::uint32_t>(mag & 0xffffffffu));
      mag >>= 32;
    }
  }
}

BigInt BigInt::factorial(unsigned n) {
  BigInt out(1);
  for (unsigned i = 2; i <= n; ++i) out *= static_cast<std::int64_t>(i);
  return out;
}

BigInt BigInt::binomial(unsigned n, unsigned k) {
  if (k > n) return BigInt(0);
  k = std::min(k, n - k);
  BigInt out(1);
  for (unsigned i = 0; i < k; ++i) {
    out *= static_cast<std::int64_t>(n - i);
    // Divide by (i+1): exact at every step because the running product is a
    // binomial prefix. Simple short division by a 32-bit value.
    const std::uint64_t d = i + 1;
    std::uint64_t rem = 0;
    for (std::size_t j = out.limbs_.size(); j-- > 0;) {
      const std::uint64_t cur = (rem << 32) | out.limbs_[j];
      out.limbs_[j] = static_cast<std::uint32_t>(cur / d);
      rem = cur % d;
    }
    out.trim();
  }
  return out;
}

void BigInt::trim() {
  while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
  if (limbs_.empty()) sign_ = 1;
}

int BigInt::compare_magnitude(const BigInt& a, const BigInt& b) {
  if (a.limbs_.size() != b.limbs_.size())
    return a.limbs_.size() < b.limbs_.size() ? -1 : 1;
  for (std::size_t i = a.limbs_.size(); i-- > 0;) {
    if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] < b.limbs_[i] ? -1 : 1;
  }
  return 0;
}

void BigInt::add_magnitude(std::vector<std::uint32_t>& a,
                           const std::vector<std::uint32_t>& b) {
  a.resize(std::max(a.size(), b.size()), 0u);
  std::uint64_t carry = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::uint64_t s = carry + a[i] + (i < b.size() ? b[i] : 0u);
    a[i] = static_cast<std::uint32_t>(s & 0xffffffffu);
    carry = s >> 32;
  }
  if (carry) a.push_back(static_cast<std::uint32_t>(carry));
}

// Requires |a| >= |b|.
void BigInt::sub_magnitude(std::vector<std::uint32_t>& a,
                           const std::vector<std::uint32_t>& b) {
  std::int64_t borrow = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::int64_t d = static_cast<std::int64_t>(a[i]) - borrow -
                     (i < b.size() ? static_cast<std::int64_t>(b[i]) : 0);
    if (d < 0) {
      d += (std::int64_t{1} << 32);
      borrow = 1;
    } else {
      borrow = 0;
    }
    a[i] = static_cast<std::uint32_t>(d);
  }
}

BigInt& BigInt::operator+=(const BigInt& other) {
  if (sign_ == other.sign_) {
    add_magnitude(limbs_, other.limbs_);
  } else {
    const int cmp = compare_magnitude(*this, other);
    if (cmp == 0) {
      limbs_.clear();
      sign_ = 1;
    } else if (cmp > 0) {
      sub_magnitude(limbs_, other.limbs_);
    } else {
      auto tmp = other.limbs_;
      sub_magnitude(tmp, limbs_);
      limbs_ = std::move(tmp);
      sign_ = other.sign_;
    }
  }
  trim();
  return *this;
}

BigInt& BigInt::operator-=(const BigInt& other) {
  BigInt neg = other;
  neg.sign_ = -neg.sign_;
  return *this += neg;
}

BigInt& BigInt::operator*=(const BigInt& other) {
  if (is_zero() || other.is_zero()) {
    limbs_.clear();
    sign_ = 1;
    return *this;
  }
  std::vector<std::uint32_t> out(limbs_.size() + other.limbs_.size(), 0u);
  for (std::size_t i = 0; i < limbs_.size(); ++i) {
    std::uint64_t carry = 0;
    for (std::size_t j = 0; j < other.limbs_.size(); ++j) {
      std::uint64_t cur = out[i + j] +
                          static_cast<std::uint64_t>(limbs_[i]) *
                              other.limbs_[j] +
                          carry;
      out[i + j] = static_cast<std::uint32_t>(cur & 0xffffffffu);
      carry = cur >> 32;
    }
    out[i + other.limbs_.size()] += static_cast<std::uint32_t>(carry);
  }
  limbs_ = std::move(out);
  sign_ *= other.sign_;
  trim();
  return *this;
}

BigInt& BigInt::operator*=(std::int64_t value) { return *this *= BigInt(value); }

bool BigInt::operator==(const BigInt& other) const {
  if (is_zero() && other.is_zero()) return true;
  return sign_ == other.sign_ && limbs_ == other.limbs_;
}

long double BigInt::to_long_double() const {
  long double out = 0.0L;
  for (std::size_t i = limbs_.size(); i-- > 0;) {
    out = out * 4294967296.0L + static_cast<long double>(limbs_[i]);
  }
  return sign_ < 0 ? -out : out;
}

std::string BigInt::to_string() const {
  if (is_zero()) return "0";
  // Repeated short division by 10^9.
  std::vector<std::uint32_t> work = limbs_;
  std::string out;
  while (!work.empty()) {
    std::uint64_t rem = 0;
    for (std::size_t j = work.size(); j-- > 0;) {
      const std::uint64_t cur = (rem << 32) | work[j];
      work[j] = static_cast<std::uint32_t>(cur / 1000000000ull);
      rem = cur % 1000000000ull;
    }
    while (!work.empty() && work.back() == 0) work.pop_back();
    for (int d = 0; d < 9; ++d) {
      out.push_back(static_cast<char>('0' + rem % 10));
      rem /= 10;
    }
  }
  while (out.size() > 1 && out.back() == '0') out.pop_back();
  if (sign_ < 0) out.push_back('-');
  std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace ionlight::util
