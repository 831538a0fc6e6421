#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tmpc/field.h"
#include "tmpc/prg.h"
#include "tmpc/serial.h"

using namespace tmpc;

namespace {
const u64 kPrimes[] = {31, 8191, (1ULL << 61) - 1};
}

TEST_CASE("modulus validation") {
  CHECK_THROWS(Field(0));
  CHECK_THROWS(Field(1));
  CHECK_THROWS(Field(30));
  CHECK_THROWS(Field(1ULL << 61));
  CHECK_THROWS(Field(~0ULL));
  CHECK(Field(31).k == 5);
  CHECK(Field(8191).k == 13);
  CHECK(Field((1ULL << 61) - 1).k == 61);
}

TEST_CASE("reduction matches wide-integer remainder") {
  Prg g(7);
  for (u64 p : kPrimes) {
    Field f(p);
    for (u64 x = 0; x < 1000; ++x) CHECK(f.reduce(x) == x % p);
    for (int i = 0; i < 20000; ++i) {
      u64 x = g.next_u64();
      CHECK(f.reduce(x) == x % p);
    }
    CHECK(f.reduce(p) == 0);
    CHECK(f.reduce(p - 1) == p - 1);
    u64 once = f.reduce(g.next_u64());
    CHECK(f.reduce(once) == once);  // idempotent on canonical values
    for (int i = 0; i < 20000; ++i) {
      u64 a = g.next_u64() % p, b = g.next_u64() % p;
      CHECK(f.mul(a, b) == static_cast<u64>(static_cast<u128>(a) * b % p));
    }
  }
}

TEST_CASE("ring axioms and inverses") {
  Prg g(11);
  for (u64 p : kPrimes) {
    Field f(p);
    for (int i = 0; i < 2000; ++i) {
      u64 a = g.next_field(f), b = g.next_field(f), c = g.next_field(f);
      CHECK(f.add(a, b) == f.add(b, a));
      CHECK(f.add(f.add(a, b), c) == f.add(a, f.add(b, c)));
      CHECK(f.mul(a, b) == f.mul(b, a));
      CHECK(f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c)));
      CHECK(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)));
      CHECK(f.add(a, f.neg(a)) == 0);
      CHECK(f.sub(a, b) == f.add(a, f.neg(b)));
      if (a != 0) CHECK(f.mul(a, f.inv(a)) == 1);
      CHECK(f.mul(a, 1) == a);
      CHECK(f.add(a, 0) == a);
    }
  }
}

TEST_CASE("multiplication by powers of two is a k-bit rotation") {
  Prg g(13);
  for (u64 p : kPrimes) {
    Field f(p);
    for (int i = 0; i < 500; ++i) {
      u64 a = g.next_field(f);
      CHECK(f.mul_pow2(a, 0) == a);
      CHECK(f.mul_pow2(a, f.k) == a);  // 2^k = 1 mod p
      for (i64 e = 1; e <= 2 * f.k; ++e) {
        CHECK(f.mul_pow2(a, e) == f.mul(a, f.pow(2, static_cast<u64>(e))));
        CHECK(f.mul_pow2(f.mul_pow2(a, e), -e) == a);
      }
    }
  }
}

TEST_CASE("signed embedding round-trips") {
  for (u64 p : kPrimes) {
    Field f(p);
    i64 half = static_cast<i64>(p / 2);
    for (i64 v : {i64(0), i64(1), i64(-1), i64(15), i64(-15), half, -half}) {
      CHECK(f.decode(f.encode(v)) == v);
    }
    CHECK(f.encode(-1) == p - 1);
    CHECK(f.decode(p - 1) == -1);
    CHECK(f.encode(half + 1) == f.encode(-(half)));  // wraps at p/2 boundary
  }
  Field f61((1ULL << 61) - 1);
  for (i64 v = -2000; v <= 2000; ++v) CHECK(f61.decode(f61.encode(v)) == v);
}

TEST_CASE("generator determinism, streams, and call-sequence sync") {
  Prg a(5), b(5), c(5, 1);
  Field f31(31);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    u64 va = a.next_u64();
    CHECK(va == b.next_u64());
    differs |= (va != c.next_u64());
  }
  CHECK(differs);

  // Two endpoints issuing the same interleaving of draw kinds stay aligned.
  Prg g1(42), g2(42);
  for (int i = 0; i < 200; ++i) {
    CHECK(g1.next_field(f31) == g2.next_field(f31));
    CHECK(g1.next_bit() == g2.next_bit());
    CHECK(g1.next_u64() == g2.next_u64());
  }
}

TEST_CASE("field draws are uniform") {
  Field f(31);
  Prg g(99);
  const int kDraws = 62000;
  int counts[31] = {};
  for (int i = 0; i < kDraws; ++i) {
    u64 v = g.next_field(f);
    REQUIRE(v < 31);
    counts[v]++;
  }
  double expect = kDraws / 31.0, chi2 = 0;
  for (int c : counts) chi2 += (c - expect) * (c - expect) / expect;
  CHECK(chi2 < 80.0);  // df = 30; well beyond the 99.9% quantile (~59.7)

  int ones = 0;
  for (int i = 0; i < 100000; ++i) ones += g.next_bit();
  CHECK(ones > 48500);
  CHECK(ones < 51500);
}

TEST_CASE("byte serialization round-trips") {
  std::vector<u8> buf;
  put_u32(buf, 0xdeadbeefu);
  put_u64(buf, 0x0123456789abcdefULL);
  put_u32(buf, 7);
  CHECK(buf.size() == 16);
  CHECK(get_u32(buf.data()) == 0xdeadbeefu);
  CHECK(get_u64(buf.data() + 4) == 0x0123456789abcdefULL);
  CHECK(get_u32(buf.data() + 12) == 7);
}
