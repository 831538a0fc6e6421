#pragma once

#include <vector>

#include "tmpc/proto_basic.h"
#include "tmpc/proto_div.h"

namespace tmpc {

// Two interchangeable evaluation engines for the fixed-point numeric layer.
// SecEngine runs the three-party protocols on replicated shares; ClearEngine
// runs the identical integer pipeline on plain field elements with a
// deterministic floor on every division.  Code templated on the engine has a
// single implementation and two execution modes, and the cleartext mode is a
// bit-faithful reference for the secure one up to the probabilistic +1 that
// secure truncation may add.

struct SecEngine {
  using Val = RepShare;
  PartyCtx& ctx;

  explicit SecEngine(PartyCtx& c) : ctx(c) {}
  const Field& field() const { return ctx.F; }

  Val add(Val a, Val b) const { return rep_add(ctx.F, a, b); }
  Val sub(Val a, Val b) const { return rep_sub(ctx.F, a, b); }
  Val neg(Val a) const { return rep_neg(ctx.F, a); }
  Val add_pub(Val a, u64 c) const { return rep_add_pub(ctx.F, ctx.id, a, ctx.F.reduce(c)); }
  Val mul_pub(Val a, u64 c) const { return rep_mul_pub(ctx.F, a, ctx.F.reduce(c)); }
  Val mul_pow2(Val a, int e) const { return rep_mul_pow2(ctx.F, a, e); }
  Val from_pub(u64 c) const { return rep_from_pub(ctx.F, ctx.id, ctx.F.reduce(c)); }

  std::vector<Val> mult(const std::vector<Val>& a, const std::vector<Val>& b) {
    return mult_rep(ctx, a, b);
  }
  std::vector<Val> matmul(const std::vector<Val>& a, const std::vector<Val>& b, size_t n,
                          size_t k, size_t m) {
    return matmul_rep(ctx, a, b, n, k, m);
  }
  std::vector<Val> div_pub(const std::vector<Val>& a, u64 d) { return tmpc::div_pub(ctx, a, d); }
  std::vector<Val> truncate(const std::vector<Val>& a, int delta) {
    return truncate_rep(ctx, a, delta);
  }
  std::vector<Val> div_signed(const std::vector<Val>& a, u64 d) {
    return div_pub_signed(ctx, a, d);
  }
  std::vector<u64> open(const std::vector<Val>& a) { return open_rep(ctx, a); }

  // Field-domain one-hot of the most significant nonzero bit, row-major
  // n x ell; all-zero row for a = 0.  Requires 0 <= a < 2^ell.
  std::vector<Val> msnzb_onehot(const std::vector<Val>& a, int ell) {
    size_t n = a.size();
    BitRows rows = bit_decompose(ctx, a, ell);
    // Suffix-AND of complemented bits by doubling: W_j = AND_{i >= j} !a_i.
    std::vector<BitShare> w(rows.v);
    for (auto& b : w) b = bit_not(ctx.id, b);
    for (int s = 1; s < ell; s <<= 1) {
      size_t span = static_cast<size_t>(ell - s);
      std::vector<BitShare> l(n * span), r(n * span);
      for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < span; ++j) {
          l[i * span + j] = w[i * static_cast<size_t>(ell) + j];
          r[i * span + j] = w[i * static_cast<size_t>(ell) + j + static_cast<size_t>(s)];
        }
      auto g = and_bits(ctx, l, r);
      for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < span; ++j) w[i * static_cast<size_t>(ell) + j] = g[i * span + j];
    }
    // One-hot: x_j = W_{j+1} ^ W_j with W_ell = 1.
    std::vector<BitShare> x(n * static_cast<size_t>(ell));
    for (size_t i = 0; i < n; ++i) {
      for (int j = 0; j < ell - 1; ++j)
        x[i * static_cast<size_t>(ell) + static_cast<size_t>(j)] =
            bit_xor(w[i * static_cast<size_t>(ell) + static_cast<size_t>(j)],
                    w[i * static_cast<size_t>(ell) + static_cast<size_t>(j) + 1]);
      x[i * static_cast<size_t>(ell) + static_cast<size_t>(ell - 1)] =
          bit_not(ctx.id, w[i * static_cast<size_t>(ell) + static_cast<size_t>(ell - 1)]);
    }
    return mod_convert(ctx, x);
  }

  // Field-domain bits t .. ell-1 of a, row-major n x (ell-t).
  std::vector<Val> high_bits(const std::vector<Val>& a, int ell, int t) {
    size_t n = a.size();
    BitRows rows = bit_decompose(ctx, a, ell);
    size_t span = static_cast<size_t>(ell - t);
    std::vector<BitShare> sel(n * span);
    for (size_t i = 0; i < n; ++i)
      for (int j = t; j < ell; ++j) sel[i * span + static_cast<size_t>(j - t)] = rows.at(i, j);
    return mod_convert(ctx, sel);
  }

  // 0/1 field flag: 1 iff the signed decode of a is >= 0.  Requires
  // |a| < 2^ell (signed) and ell <= k-2.
  std::vector<Val> ge_zero(const std::vector<Val>& a, int ell) {
    if (ell < 1 || ell > ctx.F.k - 2) throw ConfigError("sign: width out of range");
    size_t n = a.size();
    std::vector<Val> shifted(n);
    for (size_t i = 0; i < n; ++i) shifted[i] = add_pub(a[i], u64{1} << ell);
    BitRows rows = bit_decompose(ctx, shifted, ell + 1);
    std::vector<BitShare> top(n);
    for (size_t i = 0; i < n; ++i) top[i] = rows.at(i, ell);
    return mod_convert(ctx, top);
  }
};

struct ClearEngine {
  using Val = u64;
  Field F;

  explicit ClearEngine(const Field& f) : F(f) {}
  const Field& field() const { return F; }

  Val add(Val a, Val b) const { return F.add(a, b); }
  Val sub(Val a, Val b) const { return F.sub(a, b); }
  Val neg(Val a) const { return F.neg(a); }
  Val add_pub(Val a, u64 c) const { return F.add(a, F.reduce(c)); }
  Val mul_pub(Val a, u64 c) const { return F.mul(a, F.reduce(c)); }
  Val mul_pow2(Val a, int e) const { return F.mul_pow2(a, e); }
  Val from_pub(u64 c) const { return F.reduce(c); }

  std::vector<Val> mult(const std::vector<Val>& a, const std::vector<Val>& b) const {
    std::vector<Val> z(a.size());
    for (size_t i = 0; i < a.size(); ++i) z[i] = F.mul(a[i], b[i]);
    return z;
  }
  std::vector<Val> matmul(const std::vector<Val>& a, const std::vector<Val>& b, size_t n,
                          size_t k, size_t m) const {
    if (a.size() != n * k || b.size() != k * m) throw ConfigError("matmul: dimension mismatch");
    std::vector<Val> z(n * m, 0);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < m; ++j) {
        u128 acc = 0;
        for (size_t t = 0; t < k; ++t) {
          acc += static_cast<u128>(a[i * k + t]) * b[t * m + j];
          if ((t + 1) % 15 == 0) acc = F.reduce128(acc);
        }
        z[i * m + j] = F.reduce128(acc);
      }
    return z;
  }
  std::vector<Val> div_pub(const std::vector<Val>& a, u64 d) const {
    if (d == 0) throw ConfigError("division by zero");
    std::vector<Val> z(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
      if (a[i] > (F.p - 1) / 2) throw ConfigError("division: dividend out of range");
      z[i] = a[i] / d;
    }
    return z;
  }
  std::vector<Val> truncate(const std::vector<Val>& a, int delta) const {
    if (delta < 0 || delta >= F.k) throw ConfigError("truncation amount out of range");
    return div_pub(a, u64{1} << delta);
  }
  std::vector<Val> div_signed(const std::vector<Val>& a, u64 d) const {
    if (d == 0) throw ConfigError("division by zero");
    std::vector<Val> z(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
      i64 v = F.decode(a[i]);
      i64 q = v / static_cast<i64>(d);
      if (v % static_cast<i64>(d) != 0 && v < 0) q -= 1;  // floor, not trunc
      z[i] = F.encode(q);
    }
    return z;
  }
  std::vector<u64> open(const std::vector<Val>& a) const { return a; }

  std::vector<Val> msnzb_onehot(const std::vector<Val>& a, int ell) const {
    if (ell < 1 || ell > F.k - 1) throw ConfigError("bits: width out of range");
    std::vector<Val> h(a.size() * static_cast<size_t>(ell), 0);
    for (size_t i = 0; i < a.size(); ++i) {
      if (a[i] >= (u64{1} << ell)) throw ConfigError("msnzb: value out of range");
      if (a[i] == 0) continue;
      int j = 63 - __builtin_clzll(a[i]);
      h[i * static_cast<size_t>(ell) + static_cast<size_t>(j)] = 1;
    }
    return h;
  }
  std::vector<Val> high_bits(const std::vector<Val>& a, int ell, int t) const {
    size_t span = static_cast<size_t>(ell - t);
    std::vector<Val> bits(a.size() * span);
    for (size_t i = 0; i < a.size(); ++i)
      for (int j = t; j < ell; ++j)
        bits[i * span + static_cast<size_t>(j - t)] = (a[i] >> j) & 1;
    return bits;
  }
  std::vector<Val> ge_zero(const std::vector<Val>& a, int ell) const {
    if (ell < 1 || ell > F.k - 2) throw ConfigError("sign: width out of range");
    std::vector<Val> z(a.size());
    for (size_t i = 0; i < a.size(); ++i) z[i] = F.decode(a[i]) >= 0 ? 1 : 0;
    return z;
  }
};

}  // namespace tmpc
