#pragma once

#include <cstdint>
#include <stdexcept>

namespace tmpc {

using u8 = std::uint8_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using u128 = unsigned __int128;
using i64 = std::int64_t;

// Arithmetic modulo a Mersenne prime p = 2^k - 1.  All values are kept
// canonical in [0, p).  Reduction uses k-bit folds; multiplication by a
// power of two is a k-bit rotation.
struct Field {
  u64 p = 0;
  int k = 0;

  Field() = default;

  explicit Field(u64 prime) : p(prime) {
    u64 x = prime + 1;  // must be a power of two (and may wrap to 0 for 2^64-1)
    if (prime < 3 || x == 0 || (x & (x - 1)) != 0)
      throw std::invalid_argument("field: modulus must be 2^k - 1 with 2 <= k <= 63");
    while ((x >>= 1) != 0) ++k;
    if (k > 61) throw std::invalid_argument("field: moduli above 2^61 - 1 are not supported");
  }

  // Folds an arbitrary 64-bit value into [0, p).
  u64 reduce(u64 x) const {
    while (x >> k) x = (x >> k) + (x & p);
    return x == p ? 0 : x;
  }

  u64 reduce128(u128 x) const {
    while (x >> k) x = (x >> k) + (x & p);
    u64 r = static_cast<u64>(x);
    return r == p ? 0 : r;
  }

  u64 add(u64 a, u64 b) const {
    u64 s = a + b;  // a, b < p <= 2^61 - 1, no overflow
    return s >= p ? s - p : s;
  }

  u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + (p - b); }

  u64 neg(u64 a) const { return a == 0 ? 0 : p - a; }

  u64 mul(u64 a, u64 b) const { return reduce128(static_cast<u128>(a) * b); }

  // Multiplies by 2^e (e may exceed k or be negative): a k-bit rotation.
  u64 mul_pow2(u64 a, i64 e) const {
    int r = static_cast<int>(((e % k) + k) % k);
    if (r == 0) return a == p ? 0 : a;
    u64 lo = static_cast<u64>((static_cast<u128>(a) << r) & p);
    u64 hi = a >> (k - r);
    u64 v = lo | hi;
    return v == p ? 0 : v;
  }

  u64 pow(u64 a, u64 e) const {
    u64 r = 1;
    a = reduce(a);
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }

  u64 inv(u64 a) const {
    if (a == 0) throw std::domain_error("field: inverse of zero");
    return pow(a, p - 2);
  }

  // Signed embedding: x in (-p/2, p/2] maps to x mod p.
  u64 encode(i64 v) const {
    if (v >= 0) return reduce(static_cast<u64>(v));
    u64 m = reduce(static_cast<u64>(-(v + 1)) + 1);
    return m == 0 ? 0 : p - m;
  }

  i64 decode(u64 v) const {
    v = reduce(v);
    return v <= p / 2 ? static_cast<i64>(v) : -static_cast<i64>(p - v);
  }
};

}  // namespace tmpc
