#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <vector>

#include "tmpc/proto_basic.h"

using namespace tmpc;

namespace {

const Field f31(31);
const Field f8191(8191);
const Field f61((u64{1} << 61) - 1);

std::array<std::vector<RepShare>, 3> deal(const Field& f, u64 seed, const std::vector<u64>& xs) {
  Prg g(seed);
  std::array<std::vector<RepShare>, 3> out;
  for (u64 x : xs) {
    auto v = share_rep(f, g, x);
    for (size_t i = 0; i < 3; ++i) out[i].push_back(v[i]);
  }
  return out;
}

std::array<std::vector<BitShare>, 3> deal_bits(u64 seed, const std::vector<int>& xs) {
  Prg g(seed);
  std::array<std::vector<BitShare>, 3> out;
  for (int x : xs) {
    auto v = share_bit(g, x);
    for (size_t i = 0; i < 3; ++i) out[i].push_back(v[i]);
  }
  return out;
}

u64 reopen(const Field& f, const std::array<std::vector<RepShare>, 3>& o, size_t i) {
  return reconstruct_rep(f, {o[0][i], o[1][i], o[2][i]});
}

int reopen_bit(const std::array<std::vector<BitShare>, 3>& o, size_t i) {
  return reconstruct_bit({o[0][i], o[1][i], o[2][i]});
}

}  // namespace

TEST_CASE("opening completes every view") {
  Prg g(21);
  std::vector<u64> xs;
  for (int i = 0; i < 50; ++i) xs.push_back(g.next_field(f61));
  auto in = deal(f61, 22, xs);
  auto r = run3(f61, 23, [&](PartyCtx& ctx) { return open_rep(ctx, in[ctx.id]); });
  for (int p = 0; p < 3; ++p) CHECK(r.out[p] == xs);
  CHECK(r.metrics.rounds == 1);
  CHECK(r.metrics.bits_sent == 3 * 50 * 61);
  CHECK(r.metrics.messages == 6);

  auto rc = run3(f61, 24, [&](PartyCtx& ctx) { return open_rep_checked(ctx, in[ctx.id]); });
  for (int p = 0; p < 3; ++p) CHECK(rc.out[p] == xs);
  CHECK(rc.metrics.bits_sent == 2 * 3 * 50 * 61);
}

TEST_CASE("checked opening aborts on a tampered sub-share") {
  auto in = deal(f61, 25, {5, 6, 7});
  CHECK_THROWS_AS(run3(f61, 26,
                       [&](PartyCtx& ctx) {
                         auto mine = in[ctx.id];
                         if (ctx.id == 1) mine[1].s0 = f61.add(mine[1].s0, 1);
                         return open_rep_checked(ctx, mine);
                       }),
                  ProtocolAbort);
  // The passive opening trusts the single copy it receives.
  auto r = run3(f61, 27, [&](PartyCtx& ctx) { return open_rep(ctx, in[ctx.id]); });
  CHECK(r.out[0] == std::vector<u64>{5, 6, 7});
}

TEST_CASE("bit opening") {
  std::vector<int> xs = {0, 1, 1, 0, 1};
  auto in = deal_bits(28, xs);
  auto r = run3(f31, 29, [&](PartyCtx& ctx) { return open_bits(ctx, in[ctx.id]); });
  for (int p = 0; p < 3; ++p) CHECK(r.out[p] == xs);
  CHECK(r.metrics.rounds == 1);
  CHECK(r.metrics.bits_sent == 3 * 5);
  auto rc = run3(f31, 30, [&](PartyCtx& ctx) { return open_bits_checked(ctx, in[ctx.id]); });
  for (int p = 0; p < 3; ++p) CHECK(rc.out[p] == xs);
  CHECK_THROWS_AS(run3(f31, 31,
                       [&](PartyCtx& ctx) {
                         auto mine = in[ctx.id];
                         if (ctx.id == 2) mine[0].s1 ^= 1;
                         return open_bits_checked(ctx, mine);
                       }),
                  ProtocolAbort);
}

TEST_CASE("dealer input produces consistent sharings") {
  std::vector<u64> xs;
  for (u64 i = 0; i < 20; ++i) xs.push_back(i);
  for (int dealer = 0; dealer < 3; ++dealer) {
    auto r = run3(f31, 32 + static_cast<u64>(dealer), [&](PartyCtx& ctx) {
      return input_rep(ctx, dealer, ctx.id == dealer ? xs : std::vector<u64>{}, xs.size());
    });
    for (size_t i = 0; i < xs.size(); ++i) CHECK(reopen(f31, r.out, i) == xs[i]);
    CHECK(r.metrics.rounds == 1);
    CHECK(r.metrics.bits_sent == 20 * 5);
  }
  std::vector<int> bs = {1, 0, 1, 1};
  for (int dealer = 0; dealer < 3; ++dealer) {
    auto r = run3(f31, 36 + static_cast<u64>(dealer), [&](PartyCtx& ctx) {
      return input_bits(ctx, dealer, ctx.id == dealer ? bs : std::vector<int>{}, bs.size());
    });
    for (size_t i = 0; i < bs.size(); ++i) CHECK(reopen_bit(r.out, i) == bs[i]);
    CHECK(r.metrics.bits_sent == 4);
  }
}

TEST_CASE("multiplication, exhaustive small field") {
  std::vector<u64> as, bs;
  for (u64 a = 0; a < 31; ++a)
    for (u64 b = 0; b < 31; ++b) {
      as.push_back(a);
      bs.push_back(b);
    }
  auto ia = deal(f31, 40, as);
  auto ib = deal(f31, 41, bs);
  auto r = run3(f31, 42, [&](PartyCtx& ctx) { return mult_rep(ctx, ia[ctx.id], ib[ctx.id]); });
  for (size_t i = 0; i < as.size(); ++i)
    CHECK(reopen(f31, r.out, i) == f31.mul(as[i], bs[i]));
  CHECK(r.metrics.rounds == 1);
  CHECK(r.metrics.bits_sent == 3 * as.size() * 5);

  // Hybrid substitution: the ideal-functionality route opens to the same values.
  auto ri = run3(f31, 42, [&](PartyCtx& ctx) { return mult_rep(ctx, ia[ctx.id], ib[ctx.id]); },
                 /*ideal_mode=*/true);
  CHECK(ri.metrics.rounds == 1);
  for (size_t i = 0; i < as.size(); ++i)
    CHECK(reopen(f31, ri.out, i) == f31.mul(as[i], bs[i]));
}

TEST_CASE("multiplication at the production prime") {
  Prg g(43);
  std::vector<u64> as, bs;
  for (int i = 0; i < 500; ++i) {
    as.push_back(g.next_field(f61));
    bs.push_back(g.next_field(f61));
  }
  as.push_back(f61.p - 1);
  bs.push_back(f61.p - 1);
  auto ia = deal(f61, 44, as);
  auto ib = deal(f61, 45, bs);
  auto r = run3(f61, 46, [&](PartyCtx& ctx) { return mult_rep(ctx, ia[ctx.id], ib[ctx.id]); });
  for (size_t i = 0; i < as.size(); ++i)
    CHECK(reopen(f61, r.out, i) == f61.mul(as[i], bs[i]));
}

TEST_CASE("binary and") {
  std::vector<int> as, bs;
  for (int a = 0; a <= 1; ++a)
    for (int b = 0; b <= 1; ++b)
      for (int rep = 0; rep < 50; ++rep) {
        as.push_back(a);
        bs.push_back(b);
      }
  auto ia = deal_bits(47, as);
  auto ib = deal_bits(48, bs);
  auto r = run3(f31, 49, [&](PartyCtx& ctx) { return and_bits(ctx, ia[ctx.id], ib[ctx.id]); });
  for (size_t i = 0; i < as.size(); ++i) CHECK(reopen_bit(r.out, i) == (as[i] & bs[i]));
  CHECK(r.metrics.rounds == 1);
  CHECK(r.metrics.bits_sent == 3 * as.size());
  auto ri = run3(f31, 49, [&](PartyCtx& ctx) { return and_bits(ctx, ia[ctx.id], ib[ctx.id]); },
                 true);
  for (size_t i = 0; i < as.size(); ++i) CHECK(reopen_bit(ri.out, i) == (as[i] & bs[i]));
}

TEST_CASE("matrix product with one reshare per output") {
  Prg g(50);
  const size_t n = 3, k = 4, m = 5;
  std::vector<u64> av, bv;
  for (size_t i = 0; i < n * k; ++i) av.push_back(g.next_field(f61));
  for (size_t i = 0; i < k * m; ++i) bv.push_back(g.next_field(f61));
  auto ia = deal(f61, 51, av);
  auto ib = deal(f61, 52, bv);
  auto r = run3(f61, 53,
                [&](PartyCtx& ctx) { return matmul_rep(ctx, ia[ctx.id], ib[ctx.id], n, k, m); });
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < m; ++j) {
      u64 want = 0;
      for (size_t l = 0; l < k; ++l) want = f61.add(want, f61.mul(av[i * k + l], bv[l * m + j]));
      CHECK(reopen(f61, r.out, i * m + j) == want);
    }
  CHECK(r.metrics.rounds == 1);
  CHECK(r.metrics.bits_sent == 3 * n * m * 61);
}

TEST_CASE("matrix product accumulation never overflows") {
  // Worst case: long inner dimension with maximal entries.
  const size_t k = 64;
  std::vector<u64> av(k, f61.p - 1), bv(k, f61.p - 2);
  auto ia = deal(f61, 54, av);
  auto ib = deal(f61, 55, bv);
  auto r = run3(f61, 56, [&](PartyCtx& ctx) {
    return std::vector<RepShare>{inner_product(ctx, ia[ctx.id], ib[ctx.id])};
  });
  u64 want = 0;
  for (size_t l = 0; l < k; ++l) want = f61.add(want, f61.mul(av[l], bv[l]));
  CHECK(reopen(f61, r.out, 0) == want);
}

TEST_CASE("replicated to additive and back") {
  std::vector<u64> xs;
  for (u64 x = 0; x < 31; ++x) xs.push_back(x);
  auto in = deal(f31, 57, xs);
  auto r = run3(f31, 58, [&](PartyCtx& ctx) { return convert_to_add(ctx, in[ctx.id]); });
  for (size_t i = 0; i < xs.size(); ++i) {
    CHECK(f31.add(r.out[0][i], r.out[1][i]) == xs[i]);
    CHECK(r.out[2][i] == 0);
  }
  CHECK(r.metrics.rounds == 0);
  CHECK(r.metrics.bits_sent == 0);

  auto rt = run3(f31, 59, [&](PartyCtx& ctx) {
    return convert_from_add01(ctx, convert_to_add(ctx, in[ctx.id]));
  });
  for (size_t i = 0; i < xs.size(); ++i) CHECK(reopen(f31, rt.out, i) == xs[i]);
  CHECK(rt.metrics.rounds == 1);
  CHECK(rt.metrics.bits_sent == 2 * xs.size() * 5);
}

TEST_CASE("pair conversions, both placements, exhaustive") {
  std::vector<u64> xs, ys;
  for (u64 x = 0; x < 31; ++x)
    for (u64 y = 0; y < 31; ++y) {
      xs.push_back(x);
      ys.push_back(y);
    }
  std::vector<u64> zero(xs.size(), 0);
  auto r01 = run3(f31, 60, [&](PartyCtx& ctx) {
    const std::vector<u64>& mine = ctx.id == 0 ? xs : ctx.id == 1 ? ys : zero;
    return convert_from_add01(ctx, mine);
  });
  auto r02 = run3(f31, 61, [&](PartyCtx& ctx) {
    const std::vector<u64>& mine = ctx.id == 0 ? xs : ctx.id == 2 ? ys : zero;
    return convert_from_add02(ctx, mine);
  });
  for (size_t i = 0; i < xs.size(); ++i) {
    CHECK(reopen(f31, r01.out, i) == f31.add(xs[i], ys[i]));
    CHECK(reopen(f31, r02.out, i) == f31.add(xs[i], ys[i]));
  }
  auto ri = run3(f31, 61, [&](PartyCtx& ctx) {
    const std::vector<u64>& mine = ctx.id == 0 ? xs : ctx.id == 2 ? ys : zero;
    return convert_from_add02(ctx, mine);
  }, true);
  for (size_t i = 0; i < xs.size(); ++i)
    CHECK(reopen(f31, ri.out, i) == f31.add(xs[i], ys[i]));
}

TEST_CASE("two-summand quotient transfer, exhaustive") {
  // All additive sharings (x, y) of every even a: q must equal the wrap bit.
  std::vector<u64> xs, ys, qs;
  for (u64 a = 0; a < 31; a += 2)
    for (u64 x = 0; x < 31; ++x) {
      u64 y = f31.sub(a, x);
      xs.push_back(x);
      ys.push_back(y);
      qs.push_back(x + y >= 31 ? 1 : 0);
    }
  // Spec'd sanity row: shares (20, 15) of a = 4 wrap once.
  xs.push_back(20);
  ys.push_back(15);
  qs.push_back(1);
  std::vector<u64> zero(xs.size(), 0);
  auto r = run3(f31, 62, [&](PartyCtx& ctx) {
    const std::vector<u64>& mine = ctx.id == 0 ? xs : ctx.id == 1 ? ys : zero;
    return quotient_add(ctx, mine);
  });
  for (size_t i = 0; i < xs.size(); ++i) {
    CHECK(f31.add(r.out[0][i], r.out[1][i]) == qs[i]);
    CHECK(r.out[2][i] == 0);
  }
  CHECK(r.metrics.rounds == 2);
  CHECK(r.metrics.bits_sent == xs.size() * (2 * 5 + 1));
  auto ri = run3(f31, 62, [&](PartyCtx& ctx) {
    const std::vector<u64>& mine = ctx.id == 0 ? xs : ctx.id == 1 ? ys : zero;
    return quotient_add(ctx, mine);
  }, true);
  CHECK(ri.metrics.rounds == 1);
  for (size_t i = 0; i < xs.size(); ++i)
    CHECK(f31.add(ri.out[0][i], ri.out[1][i]) == qs[i]);
}

TEST_CASE("replicated quotient transfer, exhaustive") {
  // Dividend a multiple of 4; every sub-share pair (a0, a1) for each a.
  std::vector<std::array<u64, 3>> subs;
  std::vector<u64> qs;
  for (u64 a = 0; a < 31; a += 4)
    for (u64 a0 = 0; a0 < 31; ++a0)
      for (u64 a1 = 0; a1 < 31; ++a1) {
        u64 a2 = f31.sub(a, f31.add(a0, a1));
        subs.push_back({a0, a1, a2});
        qs.push_back((a0 + a1 + a2) / 31);
      }
  subs.push_back({30, 30, 6});  // spec'd example: sums to 66 = 4 + 2*31
  qs.push_back(2);
  std::array<std::vector<RepShare>, 3> in;
  for (auto& s : subs) {
    auto v = views_from_subshares(s);
    for (size_t p = 0; p < 3; ++p) in[p].push_back(v[p]);
  }
  auto r = run3(f31, 63, [&](PartyCtx& ctx) { return quotient_rep(ctx, in[ctx.id]); });
  for (size_t i = 0; i < subs.size(); ++i) CHECK(reopen(f31, r.out, i) == qs[i]);
  CHECK(r.metrics.rounds == 3);
  CHECK(r.metrics.bits_sent == subs.size() * (6 * 5 + 5));
  auto ri = run3(f31, 63, [&](PartyCtx& ctx) { return quotient_rep(ctx, in[ctx.id]); }, true);
  for (size_t i = 0; i < subs.size(); ++i) CHECK(reopen(f31, ri.out, i) == qs[i]);
}

TEST_CASE("binary quotient transfer, all sub-share patterns") {
  std::array<std::vector<BitShare>, 3> in;
  std::vector<int> qs;
  for (int t0 = 0; t0 <= 1; ++t0)
    for (int t1 = 0; t1 <= 1; ++t1)
      for (int t2 = 0; t2 <= 1; ++t2) {
        in[0].push_back(BitShare{static_cast<u8>(t0), static_cast<u8>(t1)});
        in[1].push_back(BitShare{static_cast<u8>(t1), static_cast<u8>(t2)});
        in[2].push_back(BitShare{static_cast<u8>(t2), static_cast<u8>(t0)});
        qs.push_back((t0 + t1 + t2) >> 1);
        // wrap identity: t0+t1+t2 = (t0^t1^t2) + 2q
        CHECK(t0 + t1 + t2 == ((t0 ^ t1 ^ t2) + 2 * ((t0 + t1 + t2) >> 1)));
      }
  auto r = run3(f31, 64, [&](PartyCtx& ctx) { return quotient_bin(ctx, in[ctx.id]); });
  for (size_t i = 0; i < qs.size(); ++i) CHECK(reopen_bit(r.out, i) == qs[i]);
  CHECK(r.metrics.rounds == 1);
  auto ri = run3(f31, 64, [&](PartyCtx& ctx) { return quotient_bin(ctx, in[ctx.id]); }, true);
  for (size_t i = 0; i < qs.size(); ++i) CHECK(reopen_bit(ri.out, i) == qs[i]);
}

TEST_CASE("bit to field conversion") {
  std::array<std::vector<BitShare>, 3> in;
  std::vector<u64> want;
  for (int t0 = 0; t0 <= 1; ++t0)
    for (int t1 = 0; t1 <= 1; ++t1)
      for (int t2 = 0; t2 <= 1; ++t2) {
        in[0].push_back(BitShare{static_cast<u8>(t0), static_cast<u8>(t1)});
        in[1].push_back(BitShare{static_cast<u8>(t1), static_cast<u8>(t2)});
        in[2].push_back(BitShare{static_cast<u8>(t2), static_cast<u8>(t0)});
        want.push_back(static_cast<u64>(t0 ^ t1 ^ t2));
      }
  for (const Field& f : {f31, f61}) {
    auto r = run3(f, 65, [&](PartyCtx& ctx) { return mod_convert(ctx, in[ctx.id]); });
    for (size_t i = 0; i < want.size(); ++i) CHECK(reopen(f, r.out, i) == want[i]);
    CHECK(r.metrics.rounds == 2);
    CHECK(r.metrics.bits_sent == want.size() * (3 * static_cast<u64>(f.k) + 1));
    auto ri = run3(f, 65, [&](PartyCtx& ctx) { return mod_convert(ctx, in[ctx.id]); }, true);
    CHECK(ri.metrics.rounds == 1);  // one trusted call in the hybrid accounting
    for (size_t i = 0; i < want.size(); ++i) CHECK(reopen(f, ri.out, i) == want[i]);
  }
}

TEST_CASE("field xor of converted bits matches binary xor") {
  Prg g(66);
  std::vector<int> as, bs;
  for (int i = 0; i < 32; ++i) {
    as.push_back(static_cast<int>(g.next_bit()));
    bs.push_back(static_cast<int>(g.next_bit()));
  }
  auto ia = deal_bits(67, as);
  auto ib = deal_bits(68, bs);
  auto r = run3(f61, 69, [&](PartyCtx& ctx) {
    std::vector<BitShare> x(as.size());
    for (size_t i = 0; i < as.size(); ++i) x[i] = bit_xor(ia[ctx.id][i], ib[ctx.id][i]);
    auto ax = mod_convert(ctx, x);           // field sharing of a^b
    auto aa = mod_convert(ctx, ia[ctx.id]);  // of a
    auto ab = mod_convert(ctx, ib[ctx.id]);  // of b
    // a^b = a + b - 2ab must hold over the field.
    auto prod = mult_rep(ctx, aa, ab);
    std::vector<RepShare> lhs(as.size());
    for (size_t i = 0; i < as.size(); ++i)
      lhs[i] = rep_sub(ctx.F, rep_add(ctx.F, aa[i], ab[i]),
                       rep_mul_pub(ctx.F, prod[i], 2));
    std::vector<RepShare> both;
    both.insert(both.end(), ax.begin(), ax.end());
    both.insert(both.end(), lhs.begin(), lhs.end());
    return open_rep(ctx, both);
  });
  for (size_t i = 0; i < as.size(); ++i) {
    CHECK(r.out[0][i] == static_cast<u64>(as[i] ^ bs[i]));
    CHECK(r.out[0][i] == r.out[0][as.size() + i]);
  }
}

TEST_CASE("bit decomposition, exhaustive small fields") {
  std::vector<u64> xs;
  for (u64 a = 0; a < 16; ++a) xs.push_back(a);
  auto in = deal(f31, 70, xs);
  auto r = run3(f31, 71, [&](PartyCtx& ctx) {
    BitRows rows = bit_decompose(ctx, in[ctx.id], 4);
    return open_bits(ctx, rows.v);
  });
  for (size_t i = 0; i < xs.size(); ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(r.out[0][i * 4 + static_cast<size_t>(j)] == static_cast<int>((xs[i] >> j) & 1));

  std::vector<u64> x2;
  for (u64 a = 0; a < 32; ++a) x2.push_back(a);
  for (u64 a : {u64{100}, u64{2047}, u64{4095}}) x2.push_back(a);
  auto in2 = deal(f8191, 72, x2);
  auto r2 = run3(f8191, 73, [&](PartyCtx& ctx) {
    BitRows rows = bit_decompose(ctx, in2[ctx.id], 12);
    return open_bits(ctx, rows.v);
  });
  for (size_t i = 0; i < x2.size(); ++i)
    for (int j = 0; j < 12; ++j)
      CHECK(r2.out[0][i * 12 + static_cast<size_t>(j)] == static_cast<int>((x2[i] >> j) & 1));
}

TEST_CASE("bit decomposition at the production prime") {
  Prg g(74);
  std::vector<u64> xs;
  for (int i = 0; i < 64; ++i) xs.push_back(g.next_field(f61) >> 1);  // <= (p-1)/2
  auto in = deal(f61, 75, xs);
  const int ell = 20;
  auto r = run3(f61, 76, [&](PartyCtx& ctx) {
    BitRows rows = bit_decompose(ctx, in[ctx.id], ell);
    return open_bits(ctx, rows.v);
  });
  for (size_t i = 0; i < xs.size(); ++i)
    for (int j = 0; j < ell; ++j)
      CHECK(r.out[0][i * ell + static_cast<size_t>(j)] == static_cast<int>((xs[i] >> j) & 1));
  auto ri = run3(f61, 76, [&](PartyCtx& ctx) {
    BitRows rows = bit_decompose(ctx, in[ctx.id], ell);
    return open_bits(ctx, rows.v);
  }, true);
  CHECK(ri.out[0] == r.out[0]);
}

TEST_CASE("bit composition and round trips") {
  // Compose freshly dealt bits.
  std::vector<u64> vals = {0, 1, 5, 10, 15};
  std::array<std::vector<BitShare>, 3> bits;
  Prg g(77);
  for (u64 v : vals)
    for (int j = 0; j < 4; ++j) {
      auto sh = share_bit(g, static_cast<int>((v >> j) & 1));
      for (size_t p = 0; p < 3; ++p) bits[p].push_back(sh[p]);
    }
  auto r = run3(f31, 78, [&](PartyCtx& ctx) {
    BitRows rows{vals.size(), 4, bits[ctx.id]};
    return bit_compose(ctx, rows);
  });
  for (size_t i = 0; i < vals.size(); ++i) CHECK(reopen(f31, r.out, i) == vals[i]);
  CHECK(r.metrics.rounds == 4 + 2);

  // decompose-then-compose is the identity, exhaustively at p=31.
  std::vector<u64> xs;
  for (u64 a = 0; a < 16; ++a) xs.push_back(a);
  auto in = deal(f31, 79, xs);
  auto rt = run3(f31, 80, [&](PartyCtx& ctx) {
    return bit_compose(ctx, bit_decompose(ctx, in[ctx.id], 4));
  });
  for (size_t i = 0; i < xs.size(); ++i) CHECK(reopen(f31, rt.out, i) == xs[i]);

  // Randomized at the production prime.
  Prg g2(81);
  std::vector<u64> ys;
  for (int i = 0; i < 48; ++i) ys.push_back(g2.next_u64() & ((u64{1} << 30) - 1));
  auto in2 = deal(f61, 82, ys);
  auto rt2 = run3(f61, 83, [&](PartyCtx& ctx) {
    return bit_compose(ctx, bit_decompose(ctx, in2[ctx.id], 30));
  });
  for (size_t i = 0; i < ys.size(); ++i) CHECK(reopen(f61, rt2.out, i) == ys[i]);
  auto rti = run3(f61, 83, [&](PartyCtx& ctx) {
    return bit_compose(ctx, bit_decompose(ctx, in2[ctx.id], 30));
  }, true);
  for (size_t i = 0; i < ys.size(); ++i) CHECK(reopen(f61, rti.out, i) == ys[i]);
}

TEST_CASE("conditional assignment") {
  Prg g(84);
  std::vector<u64> cs, as, bs;
  for (int i = 0; i < 40; ++i) {
    cs.push_back(g.next_bit());
    as.push_back(g.next_field(f61));
    bs.push_back(g.next_field(f61));
  }
  auto ic = deal(f61, 85, cs);
  auto ia = deal(f61, 86, as);
  auto ib = deal(f61, 87, bs);
  auto r = run3(f61, 88, [&](PartyCtx& ctx) {
    return cond_assign(ctx, ic[ctx.id], ia[ctx.id], ib[ctx.id]);
  });
  for (size_t i = 0; i < cs.size(); ++i)
    CHECK(reopen(f61, r.out, i) == (cs[i] ? as[i] : bs[i]));

  // Public candidates with an arithmetic selector: local.
  auto rp = run3(f61, 89, [&](PartyCtx& ctx) {
    return cond_assign_pub(ctx, as, bs, ic[ctx.id]);
  });
  CHECK(rp.metrics.bits_sent == 0);
  for (size_t i = 0; i < cs.size(); ++i)
    CHECK(reopen(f61, rp.out, i) == (cs[i] ? bs[i] : as[i]));

  // Public candidates with a binary selector.
  std::vector<int> cbits(cs.begin(), cs.end());
  auto icb = deal_bits(90, cbits);
  auto rb = run3(f61, 91, [&](PartyCtx& ctx) {
    return cond_assign_pub_bin(ctx, as, bs, icb[ctx.id]);
  });
  for (size_t i = 0; i < cs.size(); ++i)
    CHECK(reopen(f61, rb.out, i) == (cs[i] ? bs[i] : as[i]));
}

TEST_CASE("pipelined hybrid run matches the real run") {
  // Inputs whose squares stay <= (p-1)/2, the decomposition domain.
  std::vector<u64> xs = {1, 3, 6, 8, 10, 13};
  auto ia = deal(f31, 92, xs);
  auto ib = deal(f31, 93, xs);
  auto flow = [&](PartyCtx& ctx) {
    auto prod = mult_rep(ctx, ia[ctx.id], ib[ctx.id]);  // x^2 mod 31
    auto rows = bit_decompose(ctx, prod, 4);
    auto back = bit_compose(ctx, rows);
    return open_rep(ctx, back);
  };
  auto real = run3(f31, 94, flow);
  auto ideal = run3(f31, 94, flow, true);
  CHECK(real.out[0] == ideal.out[0]);
  for (size_t i = 0; i < xs.size(); ++i)
    CHECK(real.out[0][i] == f31.mul(xs[i], xs[i]));
}
