#pragma once

#include "tmpc/proto_basic.h"

// Division of a shared value by a public divisor.  The protocols here return
// floor(a/d) plus a small error (in {0,1} for the passive variants with a
// power-of-two divisor, {0,1,2} for general divisors, and (-2,2) for the
// active variant) instead of the catastrophic wrap-around error of naive
// masked division.

namespace tmpc {

enum class DivStyle {
  Fused,   // quotient transfer merged with the final reshare: 2 rounds
  Staged,  // convert -> quotient -> combine -> convert back: 3 rounds
};

// ---------------------------------------------------------------------------
// Pure integer models of the division pipeline.  Each protocol's output is a
// deterministic function of the sub-share values; these mirrors are shared by
// the tests and the command line tools so the protocols can be checked
// bit-for-bit without running the share exchange.
// ---------------------------------------------------------------------------

namespace divmodel {

// Two-summand division: x + y = a + q*p with a even, any d >= 1.
inline u64 div_add(const Field& f, u64 d, u64 x, u64 y) {
  u64 rp = f.p % d;
  u64 ap = f.p / d;
  u64 q = (x + y >= f.p) ? 1 : 0;
  i64 bx = static_cast<i64>((x + d - 1 - rp) / d);
  i64 by = static_cast<i64>(y / d);
  return static_cast<u64>(bx + by - static_cast<i64>((ap + 1) * q) + 1);
}

// Replicated division via doubling: works for any 0 <= a <= (p-1)/2 (the
// doubled dividend is even by construction).  Output offset is {0,1} when
// 2d divides p+1, {0,1,2} otherwise.
inline u64 div_rep(const Field& f, u64 d, u64 x, u64 y) {
  return div_add(f, 2 * d, f.add(x, x), f.add(y, y));
}

// Active-variant model over the three raw sub-shares (a, d multiples of 4).
inline u64 div_active(const Field& f, u64 d, u64 a0, u64 a1, u64 a2) {
  u64 sum = a0 + a1 + a2;
  u64 q = sum / f.p;
  u64 rp = f.p % d;
  u64 ap = f.p / d;
  u64 z = (rp >= d / 2) ? 1 : 0;
  u64 adj = (z + 1) * d - rp;
  i64 b = static_cast<i64>((a0 + d / 2) / d) + static_cast<i64>((a1 + d / 2) / d) +
          static_cast<i64>((a2 + adj + d / 2) / d);
  i64 c = b - static_cast<i64>((ap + z) * q) - 1;
  i64 m = c % static_cast<i64>(f.p);
  return static_cast<u64>(m < 0 ? m + static_cast<i64>(f.p) : m);
}

}  // namespace divmodel

// ---------------------------------------------------------------------------
// Two-summand division (x at party 0, y at party 1, a = x + y - q*p even,
// any d >= 1).  Everything after the quotient transfer is local.
// ---------------------------------------------------------------------------

inline std::vector<u64> div_pub_add(PartyCtx& ctx, const std::vector<u64>& xy, u64 d) {
  if (d == 0) throw ConfigError("division by zero");
  u64 rp = ctx.F.p % d;
  u64 ap = ctx.F.p / d;
  std::vector<u64> q = quotient_add(ctx, xy);
  std::vector<u64> out(xy.size(), 0);
  for (size_t i = 0; i < xy.size(); ++i) {
    u64 scaled = ctx.F.mul(q[i], ctx.F.reduce(ap + 1));
    if (ctx.id == 0) {
      u64 bx = (xy[i] + d - 1 - rp) / d;
      out[i] = ctx.F.add(ctx.F.sub(ctx.F.reduce(bx), scaled), 1);
    } else if (ctx.id == 1) {
      out[i] = ctx.F.sub(ctx.F.reduce(xy[i] / d), scaled);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Replicated division by a public divisor, 0 <= a <= (p-1)/2, any d >= 1.
// Internally doubles the additive split so the parity trick applies to any
// dividend.  The fused wiring sends, per value: round 1 carries the masked
// parity bit and the quotient mask (party 0 -> 2), the parity repair and the
// masked summand (party 1 -> 0); round 2 re-shares the quotient summands.
// Total: 5 field elements + 1 bit over 2 rounds.
// ---------------------------------------------------------------------------

inline std::vector<RepShare> div_pub(PartyCtx& ctx, const std::vector<RepShare>& a, u64 d,
                                     DivStyle style = DivStyle::Fused) {
  if (d == 0) throw ConfigError("division by zero");
  size_t n = a.size();
  if (ctx.ideal) {
    Field f = ctx.F;
    auto out = detail::call_ideal(ctx, detail::flatten_rep(a),
                              [f, n, d](const std::array<std::vector<u64>, 3>& in, Prg& g) {
                                std::vector<u64> z(n);
                                for (size_t i = 0; i < n; ++i) {
                                  u64 x = detail::subshare(in, 0, i);
                                  u64 y = f.add(detail::subshare(in, 1, i),
                                                detail::subshare(in, 2, i));
                                  z[i] = divmodel::div_rep(f, d, x, y);
                                }
                                return detail::redeal_rep(f, z, g);
                              });
    return detail::unflatten_rep(out);
  }
  if (style == DivStyle::Staged) {
    std::vector<u64> xy = convert_to_add(ctx, a);
    for (u64& v : xy) v = ctx.F.add(v, v);
    std::vector<u64> c = div_pub_add(ctx, xy, 2 * d);
    return convert_from_add01(ctx, c);
  }

  u64 d2 = 2 * d;
  u64 rp = ctx.F.p % d2;
  u64 ap1 = ctx.F.reduce(ctx.F.p / d2 + 1);
  std::vector<RepShare> b(n), q(n);
  std::vector<u64> st(n, 0), mask(n, 0);
  std::vector<int> bb(n, 0);

  RoundIO io1(ctx);
  for (size_t i = 0; i < n; ++i) {
    if (ctx.id == 0) {
      u64 x = ctx.F.add(a[i].s0, a[i].s0);
      int mu = ctx.prg_next.next_bit();
      u64 g0 = ctx.prg_next.next_field(ctx.F);
      mask[i] = ctx.prg_next.next_field(ctx.F);  // h0
      bb[i] = static_cast<int>(x & 1) ^ mu;
      io1.put_bit(2, bb[i]);
      b[i].s0 = ctx.F.sub(ctx.F.reduce((x + d2 - 1 - rp) / d2), g0);
      io1.put_field(2, b[i].s0);
    } else if (ctx.id == 1) {
      u64 y = ctx.F.add(ctx.F.add(a[i].s0, a[i].s1), ctx.F.add(a[i].s0, a[i].s1));
      int mu = ctx.prg_prev.next_bit();
      u64 g0 = ctx.prg_prev.next_field(ctx.F);
      q[i].s0 = ctx.prg_prev.next_field(ctx.F);  // h0
      u64 nu = ctx.prg_next.next_field(ctx.F);
      u64 g1 = ctx.prg_next.next_field(ctx.F);
      q[i].s1 = ctx.prg_next.next_field(ctx.F);  // h1
      io1.put_field(0, ctx.F.sub(static_cast<u64>(mu ^ static_cast<int>(y & 1)), nu));
      b[i].s0 = ctx.F.sub(ctx.F.add(ctx.F.reduce(y / d2), g0), g1);
      io1.put_field(0, b[i].s0);
      b[i].s1 = g1;
    } else {
      st[i] = ctx.prg_prev.next_field(ctx.F);   // nu
      b[i].s0 = ctx.prg_prev.next_field(ctx.F);  // g1
      mask[i] = ctx.prg_prev.next_field(ctx.F);  // h1
    }
  }
  io1.go();

  RoundIO io2(ctx);
  for (size_t i = 0; i < n; ++i) {
    if (ctx.id == 0) {
      u64 h = io1.get_field(1);
      b[i].s1 = io1.get_field(1);
      st[i] = bb[i] ? ctx.F.sub(1, h) : h;  // X with X + Y = q
      io2.put_field(2, ctx.F.sub(st[i], mask[i]));
    } else if (ctx.id == 2) {
      int bit = io1.get_bit(0);
      b[i].s1 = io1.get_field(0);
      st[i] = bit ? ctx.F.neg(st[i]) : st[i];  // Y
      io2.put_field(0, ctx.F.sub(st[i], mask[i]));
    }
  }
  io2.go();

  std::vector<RepShare> out(n);
  for (size_t i = 0; i < n; ++i) {
    if (ctx.id == 0) {
      q[i].s0 = ctx.F.add(ctx.F.sub(st[i], mask[i]), io2.get_field(2));
      q[i].s1 = mask[i];
    } else if (ctx.id == 2) {
      q[i].s0 = mask[i];
      q[i].s1 = ctx.F.add(io2.get_field(0), ctx.F.sub(st[i], mask[i]));
    }
    out[i] = rep_add_pub(ctx.F, ctx.id, rep_sub(ctx.F, b[i], rep_mul_pub(ctx.F, q[i], ap1)), 1);
  }
  return out;
}

// Truncation by 2^delta; delta = 0 still runs the protocol (output in {a, a+1}).
inline std::vector<RepShare> truncate_rep(PartyCtx& ctx, const std::vector<RepShare>& a,
                                          int delta, DivStyle style = DivStyle::Fused) {
  if (delta < 0 || delta >= ctx.F.k) throw ConfigError("truncation amount out of range");
  return div_pub(ctx, a, u64{1} << delta, style);
}

// Signed division: shifts by a public multiple of d so the dividend is
// nonnegative, divides, then shifts back.  Floor semantics for negatives;
// valid for -2^(k-2) - r <= a <= 2^(k-2) - r - 1 where r = omega*d - 2^(k-2).
inline std::vector<RepShare> div_pub_signed(PartyCtx& ctx, const std::vector<RepShare>& a,
                                            u64 d, DivStyle style = DivStyle::Fused) {
  if (d == 0) throw ConfigError("division by zero");
  u64 omega = ((u64{1} << (ctx.F.k - 2)) + d - 1) / d;
  std::vector<RepShare> shifted(a.size());
  for (size_t i = 0; i < a.size(); ++i)
    shifted[i] = rep_add_pub(ctx.F, ctx.id, a[i], ctx.F.reduce(omega * d));
  std::vector<RepShare> c = div_pub(ctx, shifted, d, style);
  for (size_t i = 0; i < c.size(); ++i)
    c[i] = rep_add_pub(ctx.F, ctx.id, c[i], ctx.F.neg(ctx.F.reduce(omega)));
  return c;
}

// ---------------------------------------------------------------------------
// Division hardened for the active setting: the quotient comes from the
// replicated quotient transfer (no additive conversion), and each sub-share
// is divided with round-half-up after a public adjustment of the third
// sub-share.  The adjustment (z+1)*d - r_p centers the rounding error: the
// output is floor(a/d) plus a term in (-2, 2].  Requires a, d multiples of 4.
// ---------------------------------------------------------------------------

inline std::vector<RepShare> div_pub_active(PartyCtx& ctx, const std::vector<RepShare>& a,
                                            u64 d) {
  if (d < 4 || d % 4 != 0) throw ConfigError("active division needs a divisor divisible by 4");
  u64 rp = ctx.F.p % d;
  u64 ap = ctx.F.p / d;
  u64 z = (rp >= d / 2) ? 1 : 0;
  u64 adj = (z + 1) * d - rp;
  std::vector<RepShare> q = quotient_rep(ctx, a);
  std::vector<RepShare> out(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    // Party ctx.id holds sub-share positions ctx.id (s0) and ctx.id+1 (s1);
    // the adjustment applies to position 2, and the divisions run over the
    // unreduced integers so both holders of a position agree exactly.
    u64 b0 = a[i].s0 + (ctx.id == 2 ? adj : 0);
    u64 b1 = a[i].s1 + (ctx.id == 1 ? adj : 0);
    RepShare b{ctx.F.reduce((b0 + d / 2) / d), ctx.F.reduce((b1 + d / 2) / d)};
    RepShare scaled = rep_mul_pub(ctx.F, q[i], ctx.F.reduce(ap + z));
    out[i] = rep_add_pub(ctx.F, ctx.id, rep_sub(ctx.F, b, scaled), ctx.F.neg(1));
  }
  return out;
}

// General-input wrapper: scales the dividend and divisor by 4 so the
// multiple-of-4 precondition holds.  Valid for 0 <= a <= (p-1)/4.
inline std::vector<RepShare> div_pub_active4(PartyCtx& ctx, const std::vector<RepShare>& a,
                                             u64 d) {
  if (d == 0) throw ConfigError("division by zero");
  std::vector<RepShare> a4(a.size());
  for (size_t i = 0; i < a.size(); ++i) a4[i] = rep_mul_pub(ctx.F, a[i], 4);
  return div_pub_active(ctx, a4, 4 * d);
}

}  // namespace tmpc
