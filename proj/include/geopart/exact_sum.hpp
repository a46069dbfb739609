#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>

#include "geopart/errors.hpp"

namespace geopart {

// Order-independent floating-point summation. Every finite double is an
// integer multiple of 2^-1074, so the running sum is held exactly as a
// fixed-point two's-complement integer spanning the whole double range.
// Addition is associative and commutative, which makes reductions
// bit-identical no matter how the terms are grouped across ranks.
class ExactSum {
 public:
  ExactSum() = default;
  explicit ExactSum(double x) { add(x); }

  void add(double x) {
    if (x == 0.0) return;
    if (!std::isfinite(x)) throw InputError("ExactSum: non-finite term");
    int exponent = 0;
    const double mantissa = std::frexp(std::fabs(x), &exponent);
    auto bits = static_cast<std::uint64_t>(std::ldexp(mantissa, 53));
    int shift = exponent - 53 + kBias;
    if (shift < 0) {
      bits >>= -shift;  // subnormal: the dropped bits are zero
      shift = 0;
    }
    const auto limb = static_cast<std::size_t>(shift / 64);
    const unsigned offset = static_cast<unsigned>(shift % 64);
    const unsigned __int128 wide = static_cast<unsigned __int128>(bits) << offset;
    const auto low = static_cast<std::uint64_t>(wide);
    const auto high = static_cast<std::uint64_t>(wide >> 64);
    if (x > 0) {
      add_at(limb, low);
      if (high != 0) add_at(limb + 1, high);
    } else {
      sub_at(limb, low);
      if (high != 0) sub_at(limb + 1, high);
    }
  }

  ExactSum& operator+=(double x) {
    add(x);
    return *this;
  }

  ExactSum& operator+=(const ExactSum& other) {
    unsigned carry = 0;
    for (std::size_t i = 0; i < kLimbs; ++i) {
      const std::uint64_t a = limbs_[i];
      const std::uint64_t sum = a + other.limbs_[i];
      const unsigned c1 = sum < a;
      const std::uint64_t total = sum + carry;
      const unsigned c2 = total < sum;
      limbs_[i] = total;
      carry = c1 | c2;
    }
    return *this;
  }

  bool negative() const noexcept { return (limbs_[kLimbs - 1] >> 63) != 0; }

  // Deterministic rounding of the exact value: a function of the exact sum
  // only, accurate to a few ulps.
  double value() const {
    auto mag = limbs_;
    const bool neg = negative();
    if (neg) negate(mag);
    std::size_t top = kLimbs;
    while (top > 0 && mag[top - 1] == 0) --top;
    if (top == 0) return 0.0;
    double result = 0.0;
    const std::size_t lowest = top >= 3 ? top - 3 : 0;
    for (std::size_t i = lowest; i < top; ++i) {
      result += std::ldexp(static_cast<double>(mag[i]), static_cast<int>(64 * i) - kBias);
    }
    return neg ? -result : result;
  }

  friend bool operator==(const ExactSum&, const ExactSum&) = default;

 private:
  static constexpr int kBias = 1074;
  // 2098 value bits plus 64 bits of headroom for carries and the sign.
  static constexpr std::size_t kLimbs = 34;

  void add_at(std::size_t i, std::uint64_t x) noexcept {
    for (; i < kLimbs && x != 0; ++i) {
      const std::uint64_t before = limbs_[i];
      limbs_[i] = before + x;
      x = limbs_[i] < before ? 1 : 0;
    }
  }

  void sub_at(std::size_t i, std::uint64_t x) noexcept {
    for (; i < kLimbs && x != 0; ++i) {
      const std::uint64_t before = limbs_[i];
      limbs_[i] = before - x;
      x = before < x ? 1 : 0;
    }
  }

  static void negate(std::array<std::uint64_t, kLimbs>& v) noexcept {
    unsigned carry = 1;
    for (auto& limb : v) {
      limb = ~limb + carry;
      carry = (carry == 1 && limb == 0) ? 1 : 0;
    }
  }

  std::array<std::uint64_t, kLimbs> limbs_{};
};

}  // namespace geopart
