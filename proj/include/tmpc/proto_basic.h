#pragma once

#include <vector>

#include "tmpc/sharing.h"

namespace tmpc {

// ---------------------------------------------------------------------------
// Openings
// ---------------------------------------------------------------------------

// Semi-honest opening: each party forwards s1 to its predecessor (one element
// per value), completing every 2-of-3 view.
inline std::vector<u64> open_rep(PartyCtx& ctx, const std::vector<RepShare>& a) {
  RoundIO io(ctx);
  for (const RepShare& sh : a) io.put_field(ctx.prev(), sh.s1);
  io.go();
  std::vector<u64> out(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    u64 missing = io.get_field(ctx.next());
    out[i] = ctx.F.add(ctx.F.add(a[i].s0, a[i].s1), missing);
  }
  return out;
}

// Checked opening: the missing sub-share arrives from both parties holding
// it; a disagreement aborts.  Twice the traffic of open_rep.
inline std::vector<u64> open_rep_checked(PartyCtx& ctx, const std::vector<RepShare>& a) {
  RoundIO io(ctx);
  for (const RepShare& sh : a) {
    io.put_field(ctx.prev(), sh.s1);
    io.put_field(ctx.next(), sh.s0);
  }
  io.go();
  std::vector<u64> out(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    u64 m1 = io.get_field(ctx.next());
    u64 m2 = io.get_field(ctx.prev());
    if (m1 != m2) throw ProtocolAbort("open: inconsistent sub-share copies, aborting");
    out[i] = ctx.F.add(ctx.F.add(a[i].s0, a[i].s1), m1);
  }
  return out;
}

inline std::vector<int> open_bits(PartyCtx& ctx, const std::vector<BitShare>& a) {
  RoundIO io(ctx);
  for (const BitShare& sh : a) io.put_bit(ctx.prev(), sh.s1);
  io.go();
  std::vector<int> out(a.size());
  for (size_t i = 0; i < a.size(); ++i)
    out[i] = a[i].s0 ^ a[i].s1 ^ io.get_bit(ctx.next());
  return out;
}

inline std::vector<int> open_bits_checked(PartyCtx& ctx, const std::vector<BitShare>& a) {
  RoundIO io(ctx);
  for (const BitShare& sh : a) {
    io.put_bit(ctx.prev(), sh.s1);
    io.put_bit(ctx.next(), sh.s0);
  }
  io.go();
  std::vector<int> out(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    int m1 = io.get_bit(ctx.next());
    int m2 = io.get_bit(ctx.prev());
    if (m1 != m2) throw ProtocolAbort("open: inconsistent bit copies, aborting");
    out[i] = a[i].s0 ^ a[i].s1 ^ m1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Inputs: the dealer masks with the generator it shares with its successor,
// so only one element travels (dealer -> predecessor).
// ---------------------------------------------------------------------------

inline std::vector<RepShare> input_rep(PartyCtx& ctx, int dealer, const std::vector<u64>& xs,
                                       size_t n) {
  RoundIO io(ctx);
  std::vector<RepShare> out(n);
  if (ctx.id == dealer) {
    if (xs.size() != n) throw ConfigError("input: dealer value count mismatch");
    for (size_t i = 0; i < n; ++i) {
      u64 r = ctx.prg_next.next_field(ctx.F);
      u64 m = ctx.F.sub(ctx.F.reduce(xs[i]), r);
      out[i] = RepShare{m, r};
      io.put_field(ctx.prev(), m);
    }
    io.go();
  } else if (ctx.id == (dealer + 1) % 3) {
    for (size_t i = 0; i < n; ++i) out[i] = RepShare{ctx.prg_prev.next_field(ctx.F), 0};
    io.go();
  } else {
    io.go();
    for (size_t i = 0; i < n; ++i) out[i] = RepShare{0, io.get_field(dealer)};
  }
  return out;
}

inline std::vector<BitShare> input_bits(PartyCtx& ctx, int dealer, const std::vector<int>& xs,
                                        size_t n) {
  RoundIO io(ctx);
  std::vector<BitShare> out(n);
  if (ctx.id == dealer) {
    if (xs.size() != n) throw ConfigError("input: dealer value count mismatch");
    for (size_t i = 0; i < n; ++i) {
      u8 r = static_cast<u8>(ctx.prg_next.next_bit());
      u8 m = static_cast<u8>((xs[i] & 1) ^ r);
      out[i] = BitShare{m, r};
      io.put_bit(ctx.prev(), m);
    }
    io.go();
  } else if (ctx.id == (dealer + 1) % 3) {
    for (size_t i = 0; i < n; ++i)
      out[i] = BitShare{static_cast<u8>(ctx.prg_prev.next_bit()), 0};
    io.go();
  } else {
    io.go();
    for (size_t i = 0; i < n; ++i) out[i] = BitShare{0, static_cast<u8>(io.get_bit(dealer))};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ideal-evaluation helpers (test hooks; see Hub::ideal)
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<u64> flatten_rep(const std::vector<RepShare>& a) {
  std::vector<u64> v;
  v.reserve(2 * a.size());
  for (const RepShare& sh : a) {
    v.push_back(sh.s0);
    v.push_back(sh.s1);
  }
  return v;
}

inline std::vector<u64> flatten_bits(const std::vector<BitShare>& a) {
  std::vector<u64> v;
  v.reserve(2 * a.size());
  for (const BitShare& sh : a) {
    v.push_back(sh.s0);
    v.push_back(sh.s1);
  }
  return v;
}

inline std::vector<RepShare> unflatten_rep(const std::vector<u64>& v) {
  std::vector<RepShare> a(v.size() / 2);
  for (size_t i = 0; i < a.size(); ++i) a[i] = RepShare{v[2 * i], v[2 * i + 1]};
  return a;
}

inline std::vector<BitShare> unflatten_bits(const std::vector<u64>& v) {
  std::vector<BitShare> a(v.size() / 2);
  for (size_t i = 0; i < a.size(); ++i)
    a[i] = BitShare{static_cast<u8>(v[2 * i] & 1), static_cast<u8>(v[2 * i + 1] & 1)};
  return a;
}

// Sub-share j of element i, as deposited by party j (its s0 slot).
inline u64 subshare(const std::array<std::vector<u64>, 3>& in, int j, size_t i) {
  return in[static_cast<size_t>(j)][2 * i];
}

inline std::array<std::vector<u64>, 3> redeal_rep(const Field& f, const std::vector<u64>& secrets,
                                                  Prg& g) {
  std::array<std::vector<u64>, 3> out;
  for (u64 s : secrets) {
    auto v = share_rep(f, g, s);
    for (int i = 0; i < 3; ++i) {
      out[static_cast<size_t>(i)].push_back(v[static_cast<size_t>(i)].s0);
      out[static_cast<size_t>(i)].push_back(v[static_cast<size_t>(i)].s1);
    }
  }
  return out;
}

inline std::array<std::vector<u64>, 3> redeal_bits(const std::vector<int>& secrets, Prg& g) {
  std::array<std::vector<u64>, 3> out;
  for (int s : secrets) {
    auto v = share_bit(g, s);
    for (int i = 0; i < 3; ++i) {
      out[static_cast<size_t>(i)].push_back(v[static_cast<size_t>(i)].s0);
      out[static_cast<size_t>(i)].push_back(v[static_cast<size_t>(i)].s1);
    }
  }
  return out;
}

// One trusted-functionality evaluation counts as one round in the hybrid
// accounting; communication through the hub is free.
inline std::vector<u64> call_ideal(PartyCtx& ctx, std::vector<u64> payload, IdealFn fn) {
  ctx.metrics.rounds += 1;
  return ctx.hub->ideal(ctx.id, std::move(payload), std::move(fn));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Products: the standard replicated multiplication with a pseudorandom zero
// mask, one reshare element per output.
// ---------------------------------------------------------------------------

inline std::vector<RepShare> mult_rep(PartyCtx& ctx, const std::vector<RepShare>& a,
                                      const std::vector<RepShare>& b) {
  if (a.size() != b.size()) throw ConfigError("mult: operand size mismatch");
  if (ctx.ideal) {
    Field f = ctx.F;
    std::vector<u64> payload = detail::flatten_rep(a);
    std::vector<u64> pb = detail::flatten_rep(b);
    payload.insert(payload.end(), pb.begin(), pb.end());
    size_t n = a.size();
    auto out = detail::call_ideal(
        ctx, std::move(payload),
        [f, n](const std::array<std::vector<u64>, 3>& in, Prg& g) {
          std::vector<u64> z(n);
          for (size_t i = 0; i < n; ++i) {
            u64 av = f.add(f.add(in[0][2 * i], in[1][2 * i]), in[2][2 * i]);
            u64 bv = f.add(f.add(in[0][2 * (n + i)], in[1][2 * (n + i)]), in[2][2 * (n + i)]);
            z[i] = f.mul(av, bv);
          }
          return detail::redeal_rep(f, z, g);
        });
    return detail::unflatten_rep(out);
  }
  RoundIO io(ctx);
  std::vector<u64> z(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    u128 acc = static_cast<u128>(a[i].s0) * b[i].s0;
    acc += static_cast<u128>(a[i].s0) * b[i].s1;
    acc += static_cast<u128>(a[i].s1) * b[i].s0;
    z[i] = ctx.F.add(ctx.F.reduce128(acc), zero_mask(ctx));
    io.put_field(ctx.prev(), z[i]);
  }
  io.go();
  std::vector<RepShare> out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = RepShare{z[i], io.get_field(ctx.next())};
  return out;
}

inline std::vector<BitShare> and_bits(PartyCtx& ctx, const std::vector<BitShare>& a,
                                      const std::vector<BitShare>& b) {
  if (a.size() != b.size()) throw ConfigError("and: operand size mismatch");
  if (ctx.ideal) {
    std::vector<u64> payload = detail::flatten_bits(a);
    std::vector<u64> pb = detail::flatten_bits(b);
    payload.insert(payload.end(), pb.begin(), pb.end());
    size_t n = a.size();
    auto out = detail::call_ideal(
        ctx, std::move(payload),
        [n](const std::array<std::vector<u64>, 3>& in, Prg& g) {
          std::vector<int> z(n);
          for (size_t i = 0; i < n; ++i) {
            int av = static_cast<int>((in[0][2 * i] ^ in[1][2 * i] ^ in[2][2 * i]) & 1);
            int bv = static_cast<int>(
                (in[0][2 * (n + i)] ^ in[1][2 * (n + i)] ^ in[2][2 * (n + i)]) & 1);
            z[i] = av & bv;
          }
          return detail::redeal_bits(z, g);
        });
    return detail::unflatten_bits(out);
  }
  RoundIO io(ctx);
  std::vector<u8> z(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    z[i] = static_cast<u8>(((a[i].s0 & b[i].s0) ^ (a[i].s0 & b[i].s1) ^ (a[i].s1 & b[i].s0) ^
                            zero_mask_bit(ctx)) &
                           1);
    io.put_bit(ctx.prev(), z[i]);
  }
  io.go();
  std::vector<BitShare> out(a.size());
  for (size_t i = 0; i < a.size(); ++i)
    out[i] = BitShare{z[i], static_cast<u8>(io.get_bit(ctx.next()))};
  return out;
}

// Row-major (n x k) * (k x m) with one reshare per output entry; partial
// products are accumulated wide and folded periodically.
inline std::vector<RepShare> matmul_rep(PartyCtx& ctx, const std::vector<RepShare>& a,
                                        const std::vector<RepShare>& b, size_t n, size_t k,
                                        size_t m) {
  if (a.size() != n * k || b.size() != k * m) throw ConfigError("matmul: dimension mismatch");
  if (ctx.ideal) {
    Field f = ctx.F;
    std::vector<u64> payload = detail::flatten_rep(a);
    std::vector<u64> pb = detail::flatten_rep(b);
    payload.insert(payload.end(), pb.begin(), pb.end());
    auto out = detail::call_ideal(
        ctx, std::move(payload),
        [f, n, k, m](const std::array<std::vector<u64>, 3>& in, Prg& g) {
          auto val = [&](size_t idx) {
            return f.add(f.add(in[0][2 * idx], in[1][2 * idx]), in[2][2 * idx]);
          };
          std::vector<u64> z(n * m);
          for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < m; ++j) {
              u128 acc = 0;
              for (size_t l = 0; l < k; ++l) {
                acc += static_cast<u128>(val(i * k + l)) * val(n * k + l * m + j);
                if ((l & 31) == 31) acc = f.reduce128(acc);
              }
              z[i * m + j] = f.reduce128(acc);
            }
          return detail::redeal_rep(f, z, g);
        });
    return detail::unflatten_rep(out);
  }
  RoundIO io(ctx);
  std::vector<u64> z(n * m);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < m; ++j) {
      u128 acc = 0;
      int cnt = 0;
      for (size_t l = 0; l < k; ++l) {
        const RepShare& x = a[i * k + l];
        const RepShare& y = b[l * m + j];
        acc += static_cast<u128>(x.s0) * y.s0;
        acc += static_cast<u128>(x.s0) * y.s1;
        acc += static_cast<u128>(x.s1) * y.s0;
        if (++cnt == 15) {  // 45 summands < p^2 each; fold before 2^128 overflows
          acc = ctx.F.reduce128(acc);
          cnt = 0;
        }
      }
      u64 v = ctx.F.add(ctx.F.reduce128(acc), zero_mask(ctx));
      z[i * m + j] = v;
      io.put_field(ctx.prev(), v);
    }
  io.go();
  std::vector<RepShare> out(n * m);
  for (size_t i = 0; i < n * m; ++i) out[i] = RepShare{z[i], io.get_field(ctx.next())};
  return out;
}

inline RepShare inner_product(PartyCtx& ctx, const std::vector<RepShare>& a,
                              const std::vector<RepShare>& b) {
  return matmul_rep(ctx, a, b, 1, a.size(), 1)[0];
}

// ---------------------------------------------------------------------------
// Conversions between replicated and two-summand additive sharings
// ---------------------------------------------------------------------------

// Local split: party 0 keeps x = a0, party 1 keeps y = a1+a2, party 2 zeros.
inline std::vector<u64> convert_to_add(PartyCtx& ctx, const std::vector<RepShare>& a) {
  std::vector<u64> out(a.size(), 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (ctx.id == 0) out[i] = a[i].s0;
    if (ctx.id == 1) out[i] = ctx.F.add(a[i].s0, a[i].s1);
  }
  return out;
}

// x held by party 0, y by party 1, x+y the secret; one round, two elements.
inline std::vector<RepShare> convert_from_add01(PartyCtx& ctx, const std::vector<u64>& xy) {
  size_t n = xy.size();
  if (ctx.ideal) {
    Field f = ctx.F;
    auto out = detail::call_ideal(ctx, std::vector<u64>(xy),
                              [f, n](const std::array<std::vector<u64>, 3>& in, Prg& g) {
                                std::vector<u64> z(n);
                                for (size_t i = 0; i < n; ++i)
                                  z[i] = f.add(f.reduce(in[0][i]), f.reduce(in[1][i]));
                                return detail::redeal_rep(f, z, g);
                              });
    return detail::unflatten_rep(out);
  }
  RoundIO io(ctx);
  std::vector<RepShare> out(n);
  std::vector<u64> local(n);
  for (size_t i = 0; i < n; ++i) {
    if (ctx.id == 0) {
      u64 g0 = ctx.prg_next.next_field(ctx.F);
      local[i] = ctx.F.sub(xy[i], g0);  // a0
      io.put_field(2, local[i]);
    } else if (ctx.id == 1) {
      u64 g0 = ctx.prg_prev.next_field(ctx.F);
      u64 g1 = ctx.prg_next.next_field(ctx.F);
      local[i] = ctx.F.sub(ctx.F.add(xy[i], g0), g1);  // a1
      io.put_field(0, local[i]);
      out[i].s1 = g1;  // a2
    } else {
      out[i].s0 = ctx.prg_prev.next_field(ctx.F);  // a2 = g1
    }
  }
  io.go();
  for (size_t i = 0; i < n; ++i) {
    if (ctx.id == 0)
      out[i] = RepShare{local[i], io.get_field(1)};
    else if (ctx.id == 1)
      out[i].s0 = local[i];
    else
      out[i].s1 = io.get_field(0);
  }
  return out;
}

// x held by party 0, y by party 2; both messages travel in the same round.
inline std::vector<RepShare> convert_from_add02(PartyCtx& ctx, const std::vector<u64>& xy) {
  size_t n = xy.size();
  if (ctx.ideal) {
    Field f = ctx.F;
    auto out = detail::call_ideal(ctx, std::vector<u64>(xy),
                              [f, n](const std::array<std::vector<u64>, 3>& in, Prg& g) {
                                std::vector<u64> z(n);
                                for (size_t i = 0; i < n; ++i)
                                  z[i] = f.add(f.reduce(in[0][i]), f.reduce(in[2][i]));
                                return detail::redeal_rep(f, z, g);
                              });
    return detail::unflatten_rep(out);
  }
  RoundIO io(ctx);
  std::vector<RepShare> out(n);
  std::vector<u64> local(n);
  for (size_t i = 0; i < n; ++i) {
    if (ctx.id == 0) {
      u64 h0 = ctx.prg_next.next_field(ctx.F);
      local[i] = ctx.F.sub(xy[i], h0);  // x - h0
      io.put_field(2, local[i]);
      out[i].s1 = h0;  // a1
    } else if (ctx.id == 1) {
      out[i].s0 = ctx.prg_prev.next_field(ctx.F);  // a1 = h0
      out[i].s1 = ctx.prg_next.next_field(ctx.F);  // a2 = h1
    } else {
      u64 h1 = ctx.prg_prev.next_field(ctx.F);
      local[i] = ctx.F.sub(xy[i], h1);  // y - h1
      io.put_field(0, local[i]);
      out[i].s0 = h1;  // a2
    }
  }
  io.go();
  for (size_t i = 0; i < n; ++i) {
    if (ctx.id == 0)
      out[i].s0 = ctx.F.add(local[i], io.get_field(2));  // a0 = x+y-h0-h1
    else if (ctx.id == 2)
      out[i].s1 = ctx.F.add(io.get_field(0), local[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Quotient transfer for a two-summand additive sharing (x at party 0, y at
// party 1, x + y = a + q*p with a even).  Exposes q as the same kind of
// additive sharing.  The core trick: q has the parity of x + y, and that
// parity moves through one masked bit and one masked field element.
// ---------------------------------------------------------------------------

inline std::vector<u64> quotient_add(PartyCtx& ctx, const std::vector<u64>& xy) {
  size_t n = xy.size();
  if (ctx.ideal) {
    Field f = ctx.F;
    auto out = detail::call_ideal(ctx, std::vector<u64>(xy),
                              [f, n](const std::array<std::vector<u64>, 3>& in, Prg& g) {
                                std::array<std::vector<u64>, 3> o;
                                for (size_t i = 0; i < n; ++i) {
                                  u64 q = (in[0][i] + in[1][i]) >= f.p ? 1 : 0;
                                  u64 q0 = g.next_field(f);
                                  o[0].push_back(q0);
                                  o[1].push_back(f.sub(q, q0));
                                  o[2].push_back(0);
                                }
                                return o;
                              });
    return out;
  }
  RoundIO io(ctx);
  std::vector<u64> st(n);
  std::vector<int> bb(n);
  for (size_t i = 0; i < n; ++i) {
    if (ctx.id == 0) {
      int mu = ctx.prg_next.next_bit();
      bb[i] = static_cast<int>(xy[i] & 1) ^ mu;
      io.put_bit(2, bb[i]);
    } else if (ctx.id == 1) {
      int mu = ctx.prg_prev.next_bit();
      u64 nu = ctx.prg_next.next_field(ctx.F);
      u64 c = static_cast<u64>(mu ^ static_cast<int>(xy[i] & 1));
      io.put_field(0, ctx.F.sub(c, nu));
    } else {
      st[i] = ctx.prg_prev.next_field(ctx.F);  // nu
    }
  }
  io.go();
  std::vector<u64> out(n, 0);
  for (size_t i = 0; i < n; ++i) {
    if (ctx.id == 0) {
      u64 h = io.get_field(1);
      st[i] = bb[i] ? ctx.F.sub(1, h) : h;  // X with X + Y = q
    } else if (ctx.id == 2) {
      int b = io.get_bit(0);
      st[i] = b ? ctx.F.neg(st[i]) : st[i];  // Y
    }
  }
  // Second round moves party 2's summand to party 1 under a fresh mask.
  RoundIO io2(ctx);
  for (size_t i = 0; i < n; ++i) {
    if (ctx.id == 0) {
      u64 w = ctx.prg_prev.next_field(ctx.F);
      out[i] = ctx.F.sub(st[i], w);
    } else if (ctx.id == 2) {
      u64 w = ctx.prg_next.next_field(ctx.F);
      io2.put_field(1, ctx.F.add(st[i], w));
    }
  }
  io2.go();
  if (ctx.id == 1)
    for (size_t i = 0; i < n; ++i) out[i] = io2.get_field(2);
  return out;
}

// ---------------------------------------------------------------------------
// Bit-to-field conversion: the XOR of the three sub-share bits becomes an
// arithmetic sharing in two rounds (3|p|+1 bits per value).
// ---------------------------------------------------------------------------

inline std::vector<RepShare> mod_convert(PartyCtx& ctx, const std::vector<BitShare>& b) {
  size_t n = b.size();
  if (ctx.ideal) {
    Field f = ctx.F;
    auto out = detail::call_ideal(
        ctx, detail::flatten_bits(b),
        [f, n](const std::array<std::vector<u64>, 3>& in, Prg& g) {
          std::vector<u64> z(n);
          for (size_t i = 0; i < n; ++i)
            z[i] = (in[0][2 * i] ^ in[1][2 * i] ^ in[2][2 * i]) & 1;
          return detail::redeal_rep(f, z, g);
        });
    return detail::unflatten_rep(out);
  }
  // Fixed per-element draw order keeps the two endpoints of each pairwise
  // generator aligned: parties 0/1 take (mu, h0) from their shared stream,
  // parties 1/2 take (nu, h1) from theirs.
  std::vector<u64> h0(n), h1(n), nu(n), x(n);
  std::vector<int> masked(n);
  RoundIO io(ctx);
  for (size_t i = 0; i < n; ++i) {
    if (ctx.id == 0) {
      int mu = ctx.prg_next.next_bit();
      h0[i] = ctx.prg_next.next_field(ctx.F);
      masked[i] = (b[i].s0 ^ b[i].s1 ^ mu) & 1;  // t0 ^ t1, masked
      io.put_bit(2, masked[i]);
    } else if (ctx.id == 1) {
      int mu = ctx.prg_prev.next_bit();
      h0[i] = ctx.prg_prev.next_field(ctx.F);
      nu[i] = ctx.prg_next.next_field(ctx.F);
      h1[i] = ctx.prg_next.next_field(ctx.F);
      u64 c = static_cast<u64>((mu ^ b[i].s1) & 1);  // t2, masked
      io.put_field(0, ctx.F.sub(c, nu[i]));
    } else {
      nu[i] = ctx.prg_prev.next_field(ctx.F);
      h1[i] = ctx.prg_prev.next_field(ctx.F);
    }
  }
  io.go();
  RoundIO io2(ctx);
  for (size_t i = 0; i < n; ++i) {
    if (ctx.id == 0) {
      u64 h = io.get_field(1);
      x[i] = masked[i] ? ctx.F.sub(1, h) : h;  // X; X + Y = value of b
      io2.put_field(2, ctx.F.sub(x[i], h0[i]));
    } else if (ctx.id == 2) {
      int bm = io.get_bit(0);
      x[i] = bm ? ctx.F.neg(nu[i]) : nu[i];  // Y
      io2.put_field(0, ctx.F.sub(x[i], h1[i]));
    }
  }
  io2.go();
  std::vector<RepShare> out(n);
  for (size_t i = 0; i < n; ++i) {
    if (ctx.id == 0)
      out[i] = RepShare{ctx.F.add(ctx.F.sub(x[i], h0[i]), io2.get_field(2)), h0[i]};
    else if (ctx.id == 1)
      out[i] = RepShare{h0[i], h1[i]};
    else
      out[i] = RepShare{h1[i], ctx.F.add(io2.get_field(0), ctx.F.sub(x[i], h1[i]))};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Quotient transfer for replicated sharings.  With a = 0 mod 4 the wrap count
// q of S = a0+a1+a2 = a + q*p satisfies q = 2*bit1(S) - bit0(S) (p = 3 mod 4),
// and both low bits of S come from local sub-share bits plus one majority.
// ---------------------------------------------------------------------------

namespace detail {

// Trivial bit sharing of sub-share position j, built from a party's own view.
inline BitShare trivial_pos(int party, int j, u8 mine_s0, u8 mine_s1) {
  BitShare r;
  if (party == j) r.s0 = static_cast<u8>(mine_s0 & 1);
  if ((party + 1) % 3 == j) r.s1 = static_cast<u8>(mine_s1 & 1);
  return r;
}

// Majority of three shared bits via one AND: maj = ((x^z) & (y^z)) ^ z.
inline std::vector<BitShare> majority(PartyCtx& ctx, const std::vector<BitShare>& x,
                                      const std::vector<BitShare>& y,
                                      const std::vector<BitShare>& z) {
  std::vector<BitShare> l(x.size()), r(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    l[i] = bit_xor(x[i], z[i]);
    r[i] = bit_xor(y[i], z[i]);
  }
  auto g = and_bits(ctx, l, r);
  for (size_t i = 0; i < x.size(); ++i) g[i] = bit_xor(g[i], z[i]);
  return g;
}

}  // namespace detail

inline std::vector<RepShare> quotient_rep(PartyCtx& ctx, const std::vector<RepShare>& a) {
  size_t n = a.size();
  if (ctx.ideal) {
    Field f = ctx.F;
    auto out = detail::call_ideal(
        ctx, detail::flatten_rep(a),
        [f, n](const std::array<std::vector<u64>, 3>& in, Prg& g) {
          std::vector<u64> z(n);
          for (size_t i = 0; i < n; ++i) {
            u128 s = static_cast<u128>(detail::subshare(in, 0, i)) + detail::subshare(in, 1, i) +
                     detail::subshare(in, 2, i);
            z[i] = static_cast<u64>(s / f.p);
          }
          return detail::redeal_rep(f, z, g);
        });
    return detail::unflatten_rep(out);
  }
  // Trivial sharings of the two low bits of every sub-share.
  std::vector<BitShare> lo[3], hi[3];
  for (int j = 0; j < 3; ++j) {
    lo[j].resize(n);
    hi[j].resize(n);
  }
  for (size_t i = 0; i < n; ++i)
    for (int j = 0; j < 3; ++j) {
      lo[j][i] = detail::trivial_pos(ctx.id, j, static_cast<u8>(a[i].s0),
                                     static_cast<u8>(a[i].s1));
      hi[j][i] = detail::trivial_pos(ctx.id, j, static_cast<u8>(a[i].s0 >> 1),
                                     static_cast<u8>(a[i].s1 >> 1));
    }
  auto carry = detail::majority(ctx, lo[0], lo[1], lo[2]);
  // bit0(S) = xor of sub-share low bits; bit1(S) = xor of second bits ^ carry.
  std::vector<BitShare> both(2 * n);
  for (size_t i = 0; i < n; ++i) {
    both[i] = bit_xor(bit_xor(lo[0][i], lo[1][i]), lo[2][i]);
    both[n + i] = bit_xor(bit_xor(bit_xor(hi[0][i], hi[1][i]), hi[2][i]), carry[i]);
  }
  auto conv = mod_convert(ctx, both);
  std::vector<RepShare> out(n);
  for (size_t i = 0; i < n; ++i)
    out[i] = rep_sub(ctx.F, rep_mul_pub(ctx.F, conv[n + i], 2), conv[i]);
  return out;
}

// Wrap count of three binary sub-shares: t0+t1+t2 = a + 2q with q = maj.
inline std::vector<BitShare> quotient_bin(PartyCtx& ctx, const std::vector<BitShare>& a) {
  size_t n = a.size();
  if (ctx.ideal) {
    auto out = detail::call_ideal(
        ctx, detail::flatten_bits(a),
        [n](const std::array<std::vector<u64>, 3>& in, Prg& g) {
          std::vector<int> z(n);
          for (size_t i = 0; i < n; ++i) {
            int s = static_cast<int>((detail::subshare(in, 0, i) & 1) +
                                     (detail::subshare(in, 1, i) & 1) +
                                     (detail::subshare(in, 2, i) & 1));
            z[i] = s >> 1;
          }
          return detail::redeal_bits(z, g);
        });
    return detail::unflatten_bits(out);
  }
  std::vector<BitShare> t[3];
  for (int j = 0; j < 3; ++j) t[j].resize(n);
  for (size_t i = 0; i < n; ++i)
    for (int j = 0; j < 3; ++j) t[j][i] = detail::trivial_pos(ctx.id, j, a[i].s0, a[i].s1);
  return detail::majority(ctx, t[0], t[1], t[2]);
}

// ---------------------------------------------------------------------------
// Binary decomposition and composition
// ---------------------------------------------------------------------------

struct BitRows {
  size_t n = 0;
  int ell = 0;
  std::vector<BitShare> v;  // row-major: element i, bit j at v[i*ell + j]

  BitShare& at(size_t i, int j) { return v[i * static_cast<size_t>(ell) + static_cast<size_t>(j)]; }
  const BitShare& at(size_t i, int j) const {
    return v[i * static_cast<size_t>(ell) + static_cast<size_t>(j)];
  }
};

// Low ell bits of a (requires a <= (p-1)/2 and ell <= k-1).  Doubling the
// value makes both halves of the local split even-sum free: 2a = x' + y' -
// q'p with the wrap parity q' readable from the two low bits, and since
// p = -1 mod 2^(ell+1) a ripple-carry add of x', y', q' over ell+1 bit
// positions reproduces 2a bit-exactly.  x' is known to parties 0 and 2
// (trivial sharings); party 1 deals the bits of y'.
inline BitRows bit_decompose(PartyCtx& ctx, const std::vector<RepShare>& a, int ell) {
  size_t n = a.size();
  if (ell < 1 || ell > ctx.F.k - 1) throw ConfigError("bits: width out of range");
  if (ctx.ideal) {
    Field f = ctx.F;
    auto out = detail::call_ideal(
        ctx, detail::flatten_rep(a),
        [f, n, ell](const std::array<std::vector<u64>, 3>& in, Prg& g) {
          std::vector<int> z;
          z.reserve(n * static_cast<size_t>(ell));
          for (size_t i = 0; i < n; ++i) {
            u64 v = f.add(f.add(detail::subshare(in, 0, i), detail::subshare(in, 1, i)),
                          detail::subshare(in, 2, i));
            for (int j = 0; j < ell; ++j) z.push_back(static_cast<int>((v >> j) & 1));
          }
          return detail::redeal_bits(z, g);
        });
    BitRows rows;
    rows.n = n;
    rows.ell = ell;
    rows.v = detail::unflatten_bits(out);
    return rows;
  }
  // x' = 2*a0 mod p (parties 0 and 2), y' = 2*(a1+a2) mod p (party 1).
  std::vector<u64> xp(n, 0), yp(n, 0);
  for (size_t i = 0; i < n; ++i) {
    if (ctx.id == 0) xp[i] = ctx.F.add(a[i].s0, a[i].s0);
    if (ctx.id == 2) xp[i] = ctx.F.add(a[i].s1, a[i].s1);
    if (ctx.id == 1) {
      u64 y = ctx.F.add(a[i].s0, a[i].s1);
      yp[i] = ctx.F.add(y, y);
    }
  }
  // Party 1 deals the ell+1 low bits of y'.
  std::vector<int> dealt;
  if (ctx.id == 1)
    for (size_t i = 0; i < n; ++i)
      for (int j = 0; j <= ell; ++j) dealt.push_back(static_cast<int>((yp[i] >> j) & 1));
  auto ybits = input_bits(ctx, 1, dealt, n * static_cast<size_t>(ell + 1));
  // Trivial sharings of x' bits at position 0; initial carry q' = lsb(x'+y').
  auto xbit = [&](size_t i, int j) {
    u8 b = static_cast<u8>(xp[i] >> j);
    return detail::trivial_pos(ctx.id, 0, b, b);  // parties 0 and 2 both know x'
  };
  std::vector<BitShare> carry(n);
  for (size_t i = 0; i < n; ++i)
    carry[i] = bit_xor(xbit(i, 0), ybits[i * static_cast<size_t>(ell + 1)]);
  BitRows rows;
  rows.n = n;
  rows.ell = ell;
  rows.v.resize(n * static_cast<size_t>(ell));
  for (int j = 0; j < ell; ++j) {
    // carry into position j+1: maj(x'_j, y'_j, c_j)
    std::vector<BitShare> xs(n), ys(n);
    for (size_t i = 0; i < n; ++i) {
      xs[i] = xbit(i, j);
      ys[i] = ybits[i * static_cast<size_t>(ell + 1) + static_cast<size_t>(j)];
    }
    carry = detail::majority(ctx, xs, ys, carry);
    for (size_t i = 0; i < n; ++i) {
      BitShare xj1 = xbit(i, j + 1);
      BitShare yj1 = ybits[i * static_cast<size_t>(ell + 1) + static_cast<size_t>(j + 1)];
      rows.at(i, j) = bit_xor(bit_xor(xj1, yj1), carry[i]);  // bit j of a = bit j+1 of 2a
    }
  }
  return rows;
}

// Reassembles a field sharing from bit sharings: per position, the integer
// sum of the three sub-share bits equals the tracked value plus twice a wrap
// bit; chaining wrap and borrow bits leaves one power-of-two correction that
// two bit-to-field conversions absorb.
inline std::vector<RepShare> bit_compose(PartyCtx& ctx, const BitRows& rows) {
  size_t n = rows.n;
  int ell = rows.ell;
  if (ell < 1) throw ConfigError("compose: empty rows");
  if (ctx.ideal) {
    Field f = ctx.F;
    auto out = detail::call_ideal(
        ctx, detail::flatten_bits(rows.v),
        [f, n, ell](const std::array<std::vector<u64>, 3>& in, Prg& g) {
          std::vector<u64> z(n, 0);
          for (size_t i = 0; i < n; ++i)
            for (int j = 0; j < ell; ++j) {
              size_t idx = i * static_cast<size_t>(ell) + static_cast<size_t>(j);
              u64 bit = (in[0][2 * idx] ^ in[1][2 * idx] ^ in[2][2 * idx]) & 1;
              z[i] |= bit << j;
            }
          return detail::redeal_rep(f, z, g);
        });
    return detail::unflatten_rep(out);
  }
  // Column c turns raw bits a_c into a'_c = a_c ^ q_{c-1} ^ b_{c-1}, its
  // wrap q_c = majority of the a'_c sub-share bits, and the borrow
  // b_c = ((~a_c)^b_{c-1}) & (q_{c-1}^b_{c-1}) ^ b_{c-1}.  Both ANDs only
  // need the previous column's state, so they share one batched round.
  std::vector<u64> w0(n, 0), w1(n, 0);
  std::vector<BitShare> bprev(n), qprev(n), aprime(n);
  for (int c = 0; c < ell; ++c) {
    for (size_t i = 0; i < n; ++i) {
      aprime[i] = c == 0 ? rows.at(i, 0)
                         : bit_xor(bit_xor(rows.at(i, c), qprev[i]), bprev[i]);
      // accumulate 2^c * (sub-share bits of a'_c) into the local weighted sum
      w0[i] = ctx.F.add(w0[i], ctx.F.mul_pow2(aprime[i].s0 & 1, c));
      w1[i] = ctx.F.add(w1[i], ctx.F.mul_pow2(aprime[i].s1 & 1, c));
    }
    std::vector<BitShare> l(2 * n), r(2 * n);
    for (size_t i = 0; i < n; ++i) {
      BitShare t0 = detail::trivial_pos(ctx.id, 0, aprime[i].s0, aprime[i].s1);
      BitShare t1 = detail::trivial_pos(ctx.id, 1, aprime[i].s0, aprime[i].s1);
      BitShare t2 = detail::trivial_pos(ctx.id, 2, aprime[i].s0, aprime[i].s1);
      l[i] = bit_xor(t0, t2);
      r[i] = bit_xor(t1, t2);
      if (c > 0) {
        BitShare na = bit_not(ctx.id, rows.at(i, c));
        l[n + i] = bit_xor(na, bprev[i]);
        r[n + i] = bit_xor(qprev[i], bprev[i]);
      }
    }
    auto anded = and_bits(ctx, l, r);
    for (size_t i = 0; i < n; ++i) {
      BitShare t2 = detail::trivial_pos(ctx.id, 2, aprime[i].s0, aprime[i].s1);
      BitShare qnew = bit_xor(anded[i], t2);
      if (c > 0) bprev[i] = bit_xor(anded[n + i], bprev[i]);
      qprev[i] = qnew;
    }
  }
  // out = sum_j 2^j (a'_j + 2 q_j) - 2^ell (q_last + b_last)
  //     = local weighted sums - 2^ell (q_last + b_last).
  std::vector<BitShare> both(2 * n);
  for (size_t i = 0; i < n; ++i) {
    both[i] = qprev[i];
    both[n + i] = bprev[i];
  }
  auto conv = mod_convert(ctx, both);
  std::vector<RepShare> out(n);
  for (size_t i = 0; i < n; ++i) {
    RepShare corr = rep_mul_pow2(ctx.F, rep_add(ctx.F, conv[i], conv[n + i]), ell);
    out[i] = rep_sub(ctx.F, RepShare{w0[i], w1[i]}, corr);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Oblivious selection
// ---------------------------------------------------------------------------

// out = x + c*(y - x) for public per-element candidates, c an arithmetic
// 0/1 sharing; entirely local.
inline std::vector<RepShare> cond_assign_pub(PartyCtx& ctx, const std::vector<u64>& x,
                                             const std::vector<u64>& y,
                                             const std::vector<RepShare>& c) {
  std::vector<RepShare> out(c.size());
  for (size_t i = 0; i < c.size(); ++i) {
    u64 diff = ctx.F.sub(ctx.F.reduce(y[i]), ctx.F.reduce(x[i]));
    out[i] = rep_add_pub(ctx.F, ctx.id, rep_mul_pub(ctx.F, c[i], diff), ctx.F.reduce(x[i]));
  }
  return out;
}

// Same selection driven by a binary-shared flag: lift the bit to the field
// first, then select locally.
inline std::vector<RepShare> cond_assign_pub_bin(PartyCtx& ctx, const std::vector<u64>& x,
                                                 const std::vector<u64>& y,
                                                 const std::vector<BitShare>& c) {
  return cond_assign_pub(ctx, x, y, mod_convert(ctx, c));
}

// out = c*a + (1-c)*b = b + c*(a-b); one multiplication round.
inline std::vector<RepShare> cond_assign(PartyCtx& ctx, const std::vector<RepShare>& c,
                                         const std::vector<RepShare>& a,
                                         const std::vector<RepShare>& b) {
  std::vector<RepShare> diff(a.size());
  for (size_t i = 0; i < a.size(); ++i) diff[i] = rep_sub(ctx.F, a[i], b[i]);
  auto prod = mult_rep(ctx, c, diff);
  for (size_t i = 0; i < a.size(); ++i) prod[i] = rep_add(ctx.F, prod[i], b[i]);
  return prod;
}

}  // namespace tmpc
