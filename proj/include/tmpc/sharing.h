#pragma once

#include <array>
#include <vector>

#include "tmpc/context.h"

namespace tmpc {

// Replicated 2-of-3 sharing of a field element: the secret is a0+a1+a2 mod p
// and party i holds (s0, s1) = (a_i, a_{i+1 mod 3}).
struct RepShare {
  u64 s0 = 0;
  u64 s1 = 0;
};

// Same replication pattern over Z2: the secret is t0 ^ t1 ^ t2.
struct BitShare {
  u8 s0 = 0;
  u8 s1 = 0;
};

inline std::array<RepShare, 3> views_from_subshares(const std::array<u64, 3>& a) {
  return {RepShare{a[0], a[1]}, RepShare{a[1], a[2]}, RepShare{a[2], a[0]}};
}

inline std::array<RepShare, 3> share_rep(const Field& f, Prg& g, u64 x) {
  u64 a0 = g.next_field(f);
  u64 a1 = g.next_field(f);
  u64 a2 = f.sub(f.reduce(x), f.add(a0, a1));
  return views_from_subshares({a0, a1, a2});
}

inline u64 reconstruct_rep(const Field& f, const std::array<RepShare, 3>& v) {
  if (v[0].s1 != v[1].s0 || v[1].s1 != v[2].s0 || v[2].s1 != v[0].s0)
    throw VerificationError("sharing: replicated views are inconsistent");
  return f.add(f.add(v[0].s0, v[1].s0), v[2].s0);
}

inline std::array<BitShare, 3> share_bit(Prg& g, int x) {
  u8 t0 = static_cast<u8>(g.next_bit());
  u8 t1 = static_cast<u8>(g.next_bit());
  u8 t2 = static_cast<u8>((x & 1) ^ t0 ^ t1);
  return {BitShare{t0, t1}, BitShare{t1, t2}, BitShare{t2, t0}};
}

inline int reconstruct_bit(const std::array<BitShare, 3>& v) {
  if (v[0].s1 != v[1].s0 || v[1].s1 != v[2].s0 || v[2].s1 != v[0].s0)
    throw VerificationError("sharing: replicated bit views are inconsistent");
  return v[0].s0 ^ v[1].s0 ^ v[2].s0;
}

// Sharing of a public value known to everyone.  The value is split into
// three pseudorandom sub-shares derived from the value itself (every party
// can compute all three), so downstream protocols see the same generic share
// layout as for secret inputs; a degenerate (v, 0, 0) layout would correlate
// with the probabilistic-rounding carries of the division protocols.
inline RepShare rep_from_pub(const Field& f, int party, u64 v) {
  u64 s = v ^ 0x9e3779b97f4a7c15ULL;
  u64 x0 = f.reduce(splitmix64(s));
  u64 x1 = f.reduce(splitmix64(s));
  u64 xs[3] = {x0, x1, f.sub(f.sub(v, x0), x1)};
  RepShare r;
  r.s0 = xs[party];
  r.s1 = xs[(party + 1) % 3];
  return r;
}

// Sharing whose sub-share at position j equals v and is zero elsewhere; v
// must be known to the two parties holding position j (j and j-1).
inline RepShare rep_trivial(int party, int j, u64 v) {
  RepShare r;
  if (party == j) r.s0 = v;
  if ((party + 1) % 3 == j) r.s1 = v;
  return r;
}

inline BitShare bit_from_pub(int party, int v) {
  BitShare r;
  if (party == 0) r.s0 = static_cast<u8>(v & 1);
  if (party == 2) r.s1 = static_cast<u8>(v & 1);
  return r;
}

inline BitShare bit_trivial(int party, int j, int v) {
  BitShare r;
  if (party == j) r.s0 = static_cast<u8>(v & 1);
  if ((party + 1) % 3 == j) r.s1 = static_cast<u8>(v & 1);
  return r;
}

// Two-summand additive sharing helpers (x + y = secret mod p).
inline std::array<u64, 2> share_add(const Field& f, Prg& g, u64 x) {
  u64 a0 = g.next_field(f);
  return {a0, f.sub(f.reduce(x), a0)};
}

inline u64 reconstruct_add(const Field& f, const std::array<u64, 2>& v) {
  return f.add(v[0], v[1]);
}

inline RepShare rep_add(const Field& f, RepShare a, RepShare b) {
  return {f.add(a.s0, b.s0), f.add(a.s1, b.s1)};
}

inline RepShare rep_sub(const Field& f, RepShare a, RepShare b) {
  return {f.sub(a.s0, b.s0), f.sub(a.s1, b.s1)};
}

inline RepShare rep_neg(const Field& f, RepShare a) { return {f.neg(a.s0), f.neg(a.s1)}; }

inline RepShare rep_add_pub(const Field& f, int party, RepShare a, u64 c) {
  if (party == 0) a.s0 = f.add(a.s0, c);
  if (party == 2) a.s1 = f.add(a.s1, c);
  return a;
}

inline RepShare rep_mul_pub(const Field& f, RepShare a, u64 c) {
  return {f.mul(a.s0, c), f.mul(a.s1, c)};
}

inline RepShare rep_mul_pow2(const Field& f, RepShare a, i64 e) {
  return {f.mul_pow2(a.s0, e), f.mul_pow2(a.s1, e)};
}

inline BitShare bit_xor(BitShare a, BitShare b) {
  return {static_cast<u8>(a.s0 ^ b.s0), static_cast<u8>(a.s1 ^ b.s1)};
}

inline BitShare bit_xor_pub(int party, BitShare a, int c) {
  if (party == 0) a.s0 ^= static_cast<u8>(c & 1);
  if (party == 2) a.s1 ^= static_cast<u8>(c & 1);
  return a;
}

inline BitShare bit_not(int party, BitShare a) { return bit_xor_pub(party, a, 1); }

// Fresh pseudorandom zero sharing: zeta_i = F_i() - F_{i-1}() sums to zero
// over the three parties.
inline u64 zero_mask(PartyCtx& ctx) {
  return ctx.F.sub(ctx.prg_next.next_field(ctx.F), ctx.prg_prev.next_field(ctx.F));
}

inline u8 zero_mask_bit(PartyCtx& ctx) {
  return static_cast<u8>(ctx.prg_next.next_bit() ^ ctx.prg_prev.next_bit());
}

}  // namespace tmpc
