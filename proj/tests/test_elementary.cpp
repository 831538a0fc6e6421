#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "tmpc/elem.h"

using namespace tmpc;

namespace {

const Field f61((u64{1} << 61) - 1);
const Field f8191(8191);

std::array<std::vector<RepShare>, 3> deal(const Field& f, u64 seed, const std::vector<u64>& xs) {
  Prg g(seed);
  std::array<std::vector<RepShare>, 3> out;
  for (u64 x : xs) {
    auto v = share_rep(f, g, x);
    for (size_t i = 0; i < 3; ++i) out[i].push_back(v[i]);
  }
  return out;
}

// Runs fn under each party's engine and opens the result; all three openings
// must agree.
template <class Fn>
std::vector<u64> secure_eval(const Field& f, u64 seed, Fn&& fn, bool ideal = false,
                             Metrics* metrics = nullptr) {
  auto r = run3(
      f, seed,
      [&](PartyCtx& ctx) {
        SecEngine eng(ctx);
        return open_rep(ctx, fn(eng, ctx.id));
      },
      ideal);
  CHECK(r.out[0] == r.out[1]);
  CHECK(r.out[1] == r.out[2]);
  if (metrics) *metrics = r.metrics;
  return r.out[0];
}

struct Acc {
  double avg;
  double worst;
};

Acc accuracy(const std::vector<u64>& outs, const std::vector<long double>& refs) {
  long double sum = 0.0L, worst = 0.0L;
  for (size_t i = 0; i < outs.size(); ++i) {
    long double rel = fabsl(static_cast<long double>(outs[i]) - refs[i]) / refs[i];
    sum += rel;
    worst = std::max(worst, rel);
  }
  long double tiny = ldexpl(1.0L, -60);
  return {-static_cast<double>(log2l(std::max(sum / static_cast<long double>(outs.size()), tiny))),
          -static_cast<double>(log2l(std::max(worst, tiny)))};
}

std::vector<u64> iota_u64(u64 from, u64 to) {  // inclusive range
  std::vector<u64> v;
  for (u64 i = from; i <= to; ++i) v.push_back(i);
  return v;
}

}  // namespace

TEST_CASE("msnzb one-hot exhaustive at the small prime") {
  // Every a in [0, 4096) at p = 8191; the one-hot must sit exactly at the
  // top set bit, and a = 0 must give the all-zero row.
  const int ell = 12;
  auto xs = iota_u64(0, 4095);
  auto in = deal(f8191, 901, xs);
  auto flat = secure_eval(f8191, 902, [&](SecEngine& eng, int id) {
    return eng.msnzb_onehot(in[static_cast<size_t>(id)], ell);
  });
  ClearEngine ceng(f8191);
  auto cflat = ceng.msnzb_onehot(xs, ell);
  REQUIRE(flat.size() == xs.size() * ell);
  for (size_t i = 0; i < xs.size(); ++i) {
    int expect = xs[i] == 0 ? -1 : 63 - __builtin_clzll(xs[i]);
    for (int j = 0; j < ell; ++j) {
      u64 h = flat[i * ell + static_cast<size_t>(j)];
      CHECK(h == (j == expect ? 1 : 0));
      CHECK(h == cflat[i * ell + static_cast<size_t>(j)]);
    }
  }
}

TEST_CASE("normalized mantissa is exact when no truncation is involved") {
  // ell <= w: the mantissa is a pure left shift of the argument, so the
  // secure value equals the cleartext one bit for bit.
  const int ell = 8, w = 9;
  auto xs = iota_u64(1, 255);
  auto in = deal(f8191, 903, xs);
  auto m = secure_eval(f8191, 904, [&](SecEngine& eng, int id) {
    FpVec<SecEngine> mm, hh;
    elemdetail::normalize(eng, in[static_cast<size_t>(id)], ell, w, mm, hh);
    return mm;
  });
  for (size_t i = 0; i < xs.size(); ++i) {
    int e = 63 - __builtin_clzll(xs[i]);
    u64 expect = xs[i] << (w - 1 - e);
    CHECK(m[i] == expect);
    CHECK(m[i] >= (u64{1} << (w - 1)));
    CHECK(m[i] < (u64{1} << w));
  }
}

TEST_CASE("reciprocal: frozen integer pipeline values") {
  // The cleartext engine is a deterministic integer pipeline; these values
  // were fixed from an independent trace of the same arithmetic.
  const RecipParams rp{24, 10, 34, 30, 5};
  const std::pair<u64, u64> golden[] = {
      {1, 17592186036224ull},   {2, 8796093018112ull},  {3, 5864062013440ull},
      {7, 2513169434624ull},    {100, 175921860224ull}, {4095, 4296016128ull},
      {9999, 1759394538ull},    {10000, 1759218601ull},
  };
  ClearEngine eng(f61);
  for (auto [a, want] : golden) {
    auto out = fp_reciprocal(eng, std::vector<u64>{a}, rp);
    CHECK(out[0] == want);
  }
  auto zero = fp_reciprocal(eng, std::vector<u64>{0}, rp);
  CHECK(zero[0] == 0);
}

TEST_CASE("reciprocal accuracy over the benchmark range") {
  const RecipParams rp{24, 10, 34, 30, 5};
  auto xs = iota_u64(1, 10000);
  std::vector<long double> refs;
  for (u64 i : xs) refs.push_back(ldexpl(1.0L, 44) / static_cast<long double>(i));

  ClearEngine ceng(f61);
  auto cout_ = fp_reciprocal(ceng, xs, rp);
  Acc ca = accuracy(cout_, refs);
  MESSAGE("clear reciprocal avg=" << ca.avg << " worst=" << ca.worst);
  CHECK(ca.avg >= 28.6);
  CHECK(ca.worst >= 23.0);

  auto in = deal(f61, 905, xs);
  auto sout = secure_eval(f61, 906, [&](SecEngine& eng, int id) {
    return fp_reciprocal(eng, in[static_cast<size_t>(id)], rp);
  });
  Acc sa = accuracy(sout, refs);
  MESSAGE("secure reciprocal avg=" << sa.avg << " worst=" << sa.worst);
  CHECK(sa.avg >= 28.6);
  CHECK(sa.worst >= 23.0);
  // The probabilistic truncation offsets stay within a few output ulps.
  for (size_t i = 0; i < xs.size(); ++i) {
    long double rel = fabsl(static_cast<long double>(sout[i]) - static_cast<long double>(cout_[i])) /
                      refs[i];
    CHECK(rel <= ldexpl(1.0L, -20));
  }
}

TEST_CASE("reciprocal in the hybrid model matches the accuracy gates") {
  const RecipParams rp{24, 10, 34, 30, 5};
  auto xs = iota_u64(1, 2000);
  std::vector<long double> refs;
  for (u64 i : xs) refs.push_back(ldexpl(1.0L, 44) / static_cast<long double>(i));
  auto in = deal(f61, 907, xs);
  auto out = secure_eval(
      f61, 908,
      [&](SecEngine& eng, int id) { return fp_reciprocal(eng, in[static_cast<size_t>(id)], rp); },
      /*ideal=*/true);
  Acc a = accuracy(out, refs);
  CHECK(a.avg >= 28.6);
  CHECK(a.worst >= 23.0);
}

TEST_CASE("division by a shared divisor") {
  const PrivDivParams dp{{4, 0, 40, 30, 5}, 30};
  const std::pair<u64, u64> golden[] = {
      {1, 357913941ull},
      {3, 1073741823ull},
      {9999, 3578781498558ull},
      {10000, 3579139412500ull},
  };
  ClearEngine ceng(f61);
  for (auto [a, want] : golden) {
    auto out = fp_div(ceng, std::vector<u64>{a}, std::vector<u64>{3}, dp);
    CHECK(out[0] == want);
  }

  auto xs = iota_u64(1, 10000);
  std::vector<u64> ds(xs.size(), 3);
  std::vector<long double> refs;
  for (u64 i : xs)
    refs.push_back(static_cast<long double>(i) / 3.0L * ldexpl(1.0L, 30));
  auto ina = deal(f61, 909, xs);
  auto ind = deal(f61, 910, ds);
  auto sout = secure_eval(f61, 911, [&](SecEngine& eng, int id) {
    return fp_div(eng, ina[static_cast<size_t>(id)], ind[static_cast<size_t>(id)], dp);
  });
  Acc sa = accuracy(sout, refs);
  MESSAGE("secure shared-divisor division avg=" << sa.avg << " worst=" << sa.worst);
  CHECK(sa.avg >= 28.6);
  CHECK(sa.worst >= 23.0);
}

TEST_CASE("inverse square root and square root accuracy") {
  const RsqrtParams sp{14, 10, 30, 29, 6};
  const std::pair<u64, u64> golden_rsqrt[] = {
      {1, 34359738368ull},
      {17, 8333460624ull},
      {4096, 536870912ull},
      {10000, 343597383ull},
  };
  const std::pair<u64, u64> golden_sqrt[] = {
      {1, 33554431ull},
      {17, 138348467ull},
      {4096, 2147483644ull},
      {10000, 3355443192ull},
  };
  ClearEngine ceng(f61);
  for (auto [a, want] : golden_rsqrt)
    CHECK(fp_rsqrt(ceng, std::vector<u64>{a}, sp)[0] == want);
  for (auto [a, want] : golden_sqrt)
    CHECK(fp_sqrt(ceng, std::vector<u64>{a}, sp)[0] == want);
  CHECK(fp_rsqrt(ceng, std::vector<u64>{0}, sp)[0] == 0);
  CHECK(fp_sqrt(ceng, std::vector<u64>{0}, sp)[0] == 0);

  auto xs = iota_u64(1, 10000);
  std::vector<long double> refs_r, refs_s;
  for (u64 i : xs) {
    long double v = static_cast<long double>(i) / 1024.0L;
    refs_r.push_back(ldexpl(1.0L, 30) / sqrtl(v));
    refs_s.push_back(ldexpl(1.0L, 30) * sqrtl(v));
  }
  auto in = deal(f61, 912, xs);
  auto rout = secure_eval(f61, 913, [&](SecEngine& eng, int id) {
    return fp_rsqrt(eng, in[static_cast<size_t>(id)], sp);
  });
  auto sout = secure_eval(f61, 914, [&](SecEngine& eng, int id) {
    return fp_sqrt(eng, in[static_cast<size_t>(id)], sp);
  });
  Acc ra = accuracy(rout, refs_r);
  Acc sa = accuracy(sout, refs_s);
  MESSAGE("secure rsqrt avg=" << ra.avg << " worst=" << ra.worst);
  MESSAGE("secure sqrt  avg=" << sa.avg << " worst=" << sa.worst);
  CHECK(ra.avg >= 28.3);
  CHECK(ra.worst >= 23.0);
  CHECK(sa.avg >= 28.3);
  CHECK(sa.worst >= 23.0);

  // Odd width/offset parity cannot be de-normalized by an integer shift.
  CHECK_THROWS_AS(fp_rsqrt(ceng, std::vector<u64>{5}, RsqrtParams{13, 10, 30, 29, 6}),
                  ConfigError);
}

TEST_CASE("square-root identities on random inputs") {
  // rsqrt * sqrt ~ 2^(2*delta) / 2^... : both halves come from one Newton
  // state, so their product must reproduce the argument's scale closely.
  const RsqrtParams sp{14, 10, 30, 29, 6};
  ClearEngine eng(f61);
  Prg g(915);
  for (int trial = 0; trial < 2000; ++trial) {
    u64 a = 1 + g.next_field(f61) % 16383;
    auto r = fp_rsqrt(eng, std::vector<u64>{a}, sp)[0];
    auto s = fp_sqrt(eng, std::vector<u64>{a}, sp)[0];
    // s / r = a * 2^-10 within relative 2^-25.
    long double ratio = static_cast<long double>(s) / static_cast<long double>(r);
    long double want = static_cast<long double>(a) / 1024.0L;
    CHECK(fabsl(ratio - want) / want <= ldexpl(1.0L, -25));
  }
}

TEST_CASE("exponential accuracy over the benchmark range") {
  ExpTable tb = build_exp_table(10, 14, 4, 27, 4, 0);
  const int delta = 38;
  auto xs = iota_u64(1, 10000);
  std::vector<long double> refs;
  for (u64 i : xs)
    refs.push_back(ldexpl(expl(static_cast<long double>(i) / 1024.0L), delta));

  ClearEngine ceng(f61);
  auto cout_ = fp_exp(ceng, xs, tb, delta, 0, 9.8);
  Acc ca = accuracy(cout_, refs);
  MESSAGE("clear exp avg=" << ca.avg << " worst=" << ca.worst);
  CHECK(ca.avg >= 24.7);
  CHECK(ca.worst >= 23.0);

  auto in = deal(f61, 916, xs);
  auto sout = secure_eval(f61, 917, [&](SecEngine& eng, int id) {
    return fp_exp(eng, in[static_cast<size_t>(id)], tb, delta, 0, 9.8);
  });
  Acc sa = accuracy(sout, refs);
  MESSAGE("secure exp avg=" << sa.avg << " worst=" << sa.worst);
  CHECK(sa.avg >= 24.7);
  CHECK(sa.worst >= 23.0);
  for (size_t i = 0; i < xs.size(); ++i) {
    long double rel = fabsl(static_cast<long double>(sout[i]) - static_cast<long double>(cout_[i])) /
                      refs[i];
    CHECK(rel <= ldexpl(1.0L, -18));
  }
}

TEST_CASE("exponential rejects impossible configurations") {
  CHECK_THROWS_AS(build_exp_table(10, 22, 4, 27, 4, 0), ConfigError);   // 2^12 range
  CHECK_THROWS_AS(build_exp_table(10, 14, 4, 45, 4, 0), ConfigError);   // beta too wide
  CHECK_THROWS_AS(build_exp_table(10, 14, 4, 27, 4, 1), ConfigError);   // positive mu
  ExpTable tb = build_exp_table(10, 14, 4, 27, 4, 0);
  ClearEngine eng(f61);
  // An output offset that large cannot hold exp of the contract range.
  CHECK_THROWS_AS(fp_exp(eng, std::vector<u64>{1}, tb, 50), ConfigError);
}

TEST_CASE("softmax-scale configurations") {
  // Per-pair exponential at offset 16 with contract floor -11, denominator
  // inversion at offset 24 -> 28.  End to end, every probability row must
  // sum to 1 within 2^-18.
  ExpTable tb = build_exp_table(16, 21, 10, 27, 4, -11);
  const RecipParams rp{28, 24, 28, 30, 5};
  ClearEngine eng(f61);
  Prg g(918);
  long double worst = 0.0L;
  for (int row = 0; row < 400; ++row) {
    std::vector<u64> logits(10);
    for (size_t j = 0; j + 1 < logits.size(); ++j) {
      // random shifted logits in [-11, 0], one class pinned at the max 0
      long double x = -static_cast<long double>(g.next_field(f61) % 11264) / 1024.0L;
      logits[j] = f61.encode(static_cast<i64>(llroundl(x * 65536.0L)));
    }
    logits.back() = 0;
    auto e = fp_exp(eng, logits, tb, 24, /*clamp_bits=*/26, /*arg_max=*/0.0);
    u64 den = 0;
    for (u64 v : e) den = f61.add(den, v);
    auto inv = fp_reciprocal(eng, std::vector<u64>{den}, rp);
    long double sum = 0.0L;
    for (u64 v : e) {
      u64 prob = eng.truncate(eng.mult({v}, {inv[0]}), 28)[0];
      sum += ldexpl(static_cast<long double>(prob), -24);
    }
    worst = std::max(worst, fabsl(sum - 1.0L));
  }
  MESSAGE("softmax row-sum worst error 2^" << log2l(worst));
  CHECK(worst <= ldexpl(1.0L, -18));
}

TEST_CASE("moment-scale inverse square root") {
  // Adam's second-moment denominator: arguments across [1, 2^32) at offset
  // 24, output at offset 28.
  const RsqrtParams sp{32, 24, 28, 29, 6};
  std::vector<u64> xs = {1, 2, 3, 17, 1000, u64{1} << 24, (u64{1} << 24) + 12345,
                         u64{5} << 24, (u64{1} << 32) - 1};
  Prg g(919);
  for (int i = 0; i < 4000; ++i) xs.push_back(1 + g.next_field(f61) % ((u64{1} << 32) - 1));
  std::vector<long double> refs;
  for (u64 v : xs)
    refs.push_back(ldexpl(1.0L, 28) / sqrtl(ldexpl(static_cast<long double>(v), -24)));
  auto in = deal(f61, 920, xs);
  auto out = secure_eval(f61, 921, [&](SecEngine& eng, int id) {
    return fp_rsqrt(eng, in[static_cast<size_t>(id)], sp);
  });
  Acc a = accuracy(out, refs);
  MESSAGE("moment rsqrt avg=" << a.avg << " worst=" << a.worst);
  CHECK(a.avg >= 24.5);
  CHECK(a.worst >= 22.0);
}

TEST_CASE("engine primitives agree between secure and clear") {
  // ge_zero and high_bits are the two branch points the numeric layer leans
  // on; check them directly over a signed range.
  std::vector<u64> xs;
  for (i64 v = -300; v <= 300; v += 7) xs.push_back(f61.encode(v));
  auto in = deal(f61, 922, xs);
  auto flags = secure_eval(f61, 923, [&](SecEngine& eng, int id) {
    return eng.ge_zero(in[static_cast<size_t>(id)], 20);
  });
  ClearEngine ceng(f61);
  auto cflags = ceng.ge_zero(xs, 20);
  for (size_t i = 0; i < xs.size(); ++i) {
    CHECK(flags[i] == cflags[i]);
    CHECK(flags[i] == (f61.decode(xs[i]) >= 0 ? 1u : 0u));
  }

  std::vector<u64> ys = {0, 1, 255, 256, 4095, 65535, 99999};
  auto iny = deal(f61, 924, ys);
  auto bits = secure_eval(f61, 925, [&](SecEngine& eng, int id) {
    return eng.high_bits(iny[static_cast<size_t>(id)], 17, 5);
  });
  auto cbits = ceng.high_bits(ys, 17, 5);
  CHECK(bits == cbits);
}
