#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "tmpc/engine.h"
#include "tmpc/tables.h"

namespace tmpc {

template <class E>
using FpVec = std::vector<typename E::Val>;

// Fixed-point elementary functions on shared values.  A value at offset
// alpha represents the real number a * 2^-alpha.  Every function first
// normalizes its argument with a one-hot decomposition of the most
// significant nonzero bit, runs a Newton (or series) iteration at a small
// internal mantissa width, and de-normalizes through public powers of two
// attached to the one-hot vector.  All intermediate products are audited
// against the field: anything that would exceed the safe dividend range is
// rejected up front as a configuration error.

namespace elemdetail {

// out_i = y_i * sum_j H[i][j] * 2^exps[j].  Exponents may be negative: the
// nonnegative group multiplies directly, the negative group multiplies by
// 2^(exps[j]+g) and truncates by g afterwards.  val_log2[j] bounds log2 of
// the y values conditioned on H_j = 1, so the products can be checked
// against the field (the bound may depend on j: when y is the raw argument,
// H_j = 1 pins it below 2^(j+1)).
template <class E>
FpVec<E> scale_by_onehot_pow2(E& eng, const FpVec<E>& y, const FpVec<E>& H, int ell,
                              const std::vector<int>& exps, const std::vector<int>& val_log2) {
  const Field& F = eng.field();
  size_t n = y.size();
  if (H.size() != n * static_cast<size_t>(ell) || exps.size() != static_cast<size_t>(ell) ||
      val_log2.size() != static_cast<size_t>(ell))
    throw ConfigError("scale: one-hot shape mismatch");
  int g = 0;
  for (int e : exps) g = std::max(g, -e);
  bool has_lo = false, has_hi = false;
  for (int e : exps) (e >= 0 ? has_lo : has_hi) = true;
  for (int j = 0; j < ell; ++j) {
    int weight = exps[j] >= 0 ? exps[j] : exps[j] + g;
    if (val_log2[static_cast<size_t>(j)] + weight + 1 > F.k - 1)
      throw ConfigError("scale: weighted product exceeds the safe dividend range");
  }
  std::vector<typename E::Val> wlo(n), whi(n);
  for (size_t i = 0; i < n; ++i) {
    typename E::Val lo = eng.from_pub(0), hi = eng.from_pub(0);
    for (int j = 0; j < ell; ++j) {
      const auto& h = H[i * static_cast<size_t>(ell) + static_cast<size_t>(j)];
      if (exps[j] >= 0)
        lo = eng.add(lo, eng.mul_pub(h, u64{1} << exps[j]));
      else
        hi = eng.add(hi, eng.mul_pub(h, u64{1} << (exps[j] + g)));
    }
    wlo[i] = lo;
    whi[i] = hi;
  }
  FpVec<E> out(n, eng.from_pub(0));
  if (has_lo) out = eng.mult(y, wlo);
  if (has_hi) {
    auto part = eng.truncate(eng.mult(y, whi), g);
    for (size_t i = 0; i < n; ++i) out[i] = eng.add(out[i], part[i]);
  }
  return out;
}

template <class E>
FpVec<E> scale_by_onehot_pow2(E& eng, const FpVec<E>& y, const FpVec<E>& H, int ell,
                              const std::vector<int>& exps, int val_log2) {
  return scale_by_onehot_pow2(eng, y, H, ell, exps,
                              std::vector<int>(static_cast<size_t>(ell), val_log2));
}

// Normalized mantissa m in [2^(w-1), 2^w) (0 when a = 0) plus the one-hot H.
template <class E>
void normalize(E& eng, const FpVec<E>& a, int ell, int w, FpVec<E>& m, FpVec<E>& H) {
  const Field& F = eng.field();
  if (ell < 1 || ell > F.k - 1) throw ConfigError("normalize: width out of range");
  if (w < 4 || w > F.k - 3) throw ConfigError("normalize: mantissa width out of range");
  H = eng.msnzb_onehot(a, ell);
  std::vector<int> exps(static_cast<size_t>(ell)), bound(static_cast<size_t>(ell));
  for (int j = 0; j < ell; ++j) {
    exps[static_cast<size_t>(j)] = w - 1 - j;
    bound[static_cast<size_t>(j)] = j + 1;  // H_j = 1 pins a < 2^(j+1)
  }
  m = scale_by_onehot_pow2(eng, a, H, ell, exps, bound);
  // a = 0 has an all-zero one-hot; park its mantissa at 2^(w-1) so the Newton
  // state stays bounded (the de-normalization still maps the output to 0).
  for (size_t i = 0; i < a.size(); ++i) {
    typename E::Val zero = eng.from_pub(1);
    for (int j = 0; j < ell; ++j)
      zero = eng.sub(zero, H[i * static_cast<size_t>(ell) + static_cast<size_t>(j)]);
    m[i] = eng.add(m[i], eng.mul_pow2(zero, w - 1));
  }
}

}  // namespace elemdetail

struct RecipParams {
  int ell;        // argument magnitude bound: 0 <= a < 2^ell
  int alpha;      // argument offset
  int delta;      // output offset: result ~ 2^delta / (a * 2^-alpha)
  int w = 30;     // internal mantissa width
  int iters = 5;  // Newton iterations
};

// Reciprocal by Newton iteration on the normalized mantissa; maps 0 to 0.
// De-normalization and the final combine add at most a few output ulps on
// top of the ~2^-(w-2) iteration error.
template <class E>
FpVec<E> fp_reciprocal(E& eng, const FpVec<E>& a, const RecipParams& p) {
  if (p.w < 8 || p.w > 30 || p.iters < 1 || p.iters > 10)
    throw ConfigError("reciprocal: bad mantissa width or iteration count");
  FpVec<E> m, H;
  elemdetail::normalize(eng, a, p.ell, p.w, m, H);
  size_t n = a.size();
  FpVec<E> X(n), Y(n);
  for (size_t i = 0; i < n; ++i) {
    X[i] = eng.add_pub(eng.neg(m[i]), u64{1} << p.w);        // 1 - m'
    Y[i] = eng.add_pub(eng.neg(m[i]), u64{1} << (p.w + 1));  // 2 - m' = 1 + x
  }
  for (int it = 2; it <= p.iters; ++it) {
    X = eng.truncate(eng.mult(X, X), p.w);
    auto upd = eng.truncate(eng.mult(Y, X), p.w);
    for (size_t i = 0; i < n; ++i) Y[i] = eng.add(Y[i], upd[i]);
  }
  int sstar = p.delta + p.alpha - p.w - 1;
  std::vector<int> exps(static_cast<size_t>(p.ell));
  for (int j = 0; j < p.ell; ++j) exps[static_cast<size_t>(j)] = sstar - j;
  return elemdetail::scale_by_onehot_pow2(eng, Y, H, p.ell, exps, p.w + 2);
}

struct PrivDivParams {
  RecipParams recip;  // reciprocal configuration for the divisor
  int lift;           // output offset gain: result ~ (a/d) * 2^(alpha_a + lift)
};

// Division by a shared divisor: multiply by the divisor's reciprocal, then
// shift the scale down so the output sits at the dividend offset plus lift.
template <class E>
FpVec<E> fp_div(E& eng, const FpVec<E>& a, const FpVec<E>& d, const PrivDivParams& p) {
  if (p.lift < 0 || p.lift > p.recip.delta) throw ConfigError("division: lift out of range");
  auto z = fp_reciprocal(eng, d, p.recip);
  auto prod = eng.mult(a, z);
  int sh = p.recip.delta - p.lift;
  return sh > 0 ? eng.truncate(prod, sh) : prod;
}

struct RsqrtParams {
  int ell;        // argument magnitude bound; ell - alpha must be even
  int alpha;      // argument offset
  int delta;      // output offset
  int w = 29;     // internal mantissa width (w <= 29 keeps y^2 in range)
  int iters = 6;  // Newton iterations
};

namespace elemdetail {

inline constexpr int kCorrShift = 30;

// Newton state for 1/sqrt on the normalized mantissa, plus the parity bit of
// the fitting exponent (as a field value; sqrt(2) corrections are linear in
// it).  y converges to 2^w / sqrt(m * 2^-w).
template <class E>
void rsqrt_core(E& eng, const FpVec<E>& a, const RsqrtParams& p, FpVec<E>& Y, FpVec<E>& m,
                FpVec<E>& H, FpVec<E>& r) {
  if (p.w < 8 || p.w > 29 || p.iters < 1 || p.iters > 10)
    throw ConfigError("rsqrt: bad mantissa width or iteration count");
  if ((p.ell - p.alpha) % 2 != 0)
    throw ConfigError("rsqrt: width and offset parity mismatch (ell - alpha must be even)");
  normalize(eng, a, p.ell, p.w, m, H);
  size_t n = a.size();
  FpVec<E> X(n);
  Y.resize(n);
  for (size_t i = 0; i < n; ++i)
    X[i] = eng.add_pub(eng.neg(m[i]), u64{3} << p.w);  // 3 - m'
  Y = eng.truncate(X, 1);
  for (int it = 2; it <= p.iters; ++it) {
    auto t = eng.truncate(eng.mult(Y, Y), p.w);
    auto tm = eng.truncate(eng.mult(t, m), p.w);
    for (size_t i = 0; i < n; ++i) X[i] = eng.add_pub(eng.neg(tm[i]), u64{3} << p.w);
    Y = eng.truncate(eng.mult(X, Y), p.w + 1);
  }
  r.assign(n, eng.from_pub(0));
  for (size_t i = 0; i < n; ++i)
    for (int j = 0; j < p.ell; ++j)
      if ((p.ell - 1 - j) % 2 == 1)
        r[i] = eng.add(r[i], H[i * static_cast<size_t>(p.ell) + static_cast<size_t>(j)]);
}

}  // namespace elemdetail

// Inverse square root: result ~ 2^delta / sqrt(a * 2^-alpha); maps 0 to 0.
template <class E>
FpVec<E> fp_rsqrt(E& eng, const FpVec<E>& a, const RsqrtParams& p) {
  using elemdetail::kCorrShift;
  FpVec<E> Y, m, H, r;
  elemdetail::rsqrt_core(eng, a, p, Y, m, H, r);
  size_t n = a.size();
  // Odd fitting exponent folds in 1/sqrt(2): corr = 2^S - r * R2.
  const u64 R2 = 314491699;  // round((1 - 2^-0.5) * 2^30)
  FpVec<E> corr(n);
  for (size_t i = 0; i < n; ++i)
    corr[i] = eng.add_pub(eng.neg(eng.mul_pub(r[i], R2)), u64{1} << kCorrShift);
  auto Yc = eng.truncate(eng.mult(Y, corr), kCorrShift);
  int sigma = p.delta + (p.alpha - p.ell) / 2 - p.w;
  std::vector<int> exps(static_cast<size_t>(p.ell));
  for (int j = 0; j < p.ell; ++j)
    exps[static_cast<size_t>(j)] = (p.ell - j) / 2 + sigma;  // ceil((ell-1-j)/2) + sigma
  return elemdetail::scale_by_onehot_pow2(eng, Yc, H, p.ell, exps, p.w + 1);
}

// Square root: result ~ sqrt(a * 2^-alpha) * 2^delta; maps 0 to 0.  Computed
// as m * (1/sqrt(m)) on the normalized mantissa so no intermediate leaves
// the safe range even for wide arguments.
template <class E>
FpVec<E> fp_sqrt(E& eng, const FpVec<E>& a, const RsqrtParams& p) {
  using elemdetail::kCorrShift;
  FpVec<E> Y, m, H, r;
  elemdetail::rsqrt_core(eng, a, p, Y, m, H, r);
  size_t n = a.size();
  auto sb = eng.truncate(eng.mult(m, Y), p.w);  // sqrt(m') * 2^w
  // Odd fitting exponent folds in sqrt(2): corr = 2^S + r * R1.
  const u64 R1 = 444758426;  // round((sqrt(2) - 1) * 2^30)
  FpVec<E> corr(n);
  for (size_t i = 0; i < n; ++i)
    corr[i] = eng.add_pub(eng.mul_pub(r[i], R1), u64{1} << kCorrShift);
  auto sc = eng.truncate(eng.mult(sb, corr), kCorrShift);
  int lp = p.ell / 2;  // max of ceil((ell-1-j)/2)
  int sigma = p.delta + (p.ell - p.alpha) / 2 - p.w - lp;
  std::vector<int> exps(static_cast<size_t>(p.ell));
  for (int j = 0; j < p.ell; ++j) exps[static_cast<size_t>(j)] = lp - (p.ell - j) / 2 + sigma;
  return elemdetail::scale_by_onehot_pow2(eng, sc, H, p.ell, exps, p.w + 1);
}

// Exponential from a per-bit factor table: the argument is clamped below at
// mu (optional), split into high bits (public factors selected obliviously)
// and a small residue (truncated series), and the product is reassembled
// with the power-of-two parts carried separately.  Result ~ exp(a * 2^-alpha)
// at offset delta.  arg_max promises an upper bound on the real argument
// (defaults to the table's contract range); it sizes the secret power-of-two
// chain, so a dishonest bound is rejected only when it provably overflows.
template <class E>
FpVec<E> fp_exp(E& eng, const FpVec<E>& a, const ExpTable& tb, int delta, int clamp_bits = 0,
                double arg_max = std::numeric_limits<double>::quiet_NaN()) {
  const Field& F = eng.field();
  size_t n = a.size();
  if (delta < 0 || delta > F.k - 2) throw ConfigError("exp: output offset out of range");
  double mu = static_cast<double>(tb.mu_scaled) / static_cast<double>(u64{1} << tb.alpha);
  if (std::isnan(arg_max)) arg_max = mu + std::ldexp(1.0, tb.ell - tb.alpha);
  const double log2e = 1.4426950408889634;
  if (log2e * (arg_max - mu) + tb.beta + 2 > 59 || log2e * arg_max + delta > 59)
    throw ConfigError("exp: argument range overflows the field; tighten arg_max or delta");
  FpVec<E> b(n);
  for (size_t i = 0; i < n; ++i)
    b[i] = eng.add_pub(a[i], F.encode(-tb.mu_scaled));
  if (clamp_bits > 0) {
    auto flag = eng.ge_zero(b, clamp_bits);
    b = eng.mult(flag, b);
  }
  auto bits = eng.high_bits(b, tb.ell, tb.t);  // n x (ell - t)
  size_t span = static_cast<size_t>(tb.ell - tb.t);
  // Residue: bsig = b - sum 2^i b_i < 2^t.
  FpVec<E> bsig(b);
  for (size_t i = 0; i < n; ++i)
    for (int j = tb.t; j < tb.ell; ++j)
      bsig[i] = eng.sub(bsig[i], eng.mul_pow2(bits[i * span + static_cast<size_t>(j - tb.t)],
                                              j));
  // Series at offset beta; residue powers stay exact (bsig^j < 2^(jt)).
  FpVec<E> T(n, eng.from_pub(u64{1} << tb.beta));
  FpVec<E> pw = bsig;
  int cur = 1;
  for (const ExpSeriesTerm& st : tb.series) {
    while (cur < st.j) {
      pw = eng.mult(pw, bsig);
      ++cur;
    }
    FpVec<E> term(n);
    for (size_t i = 0; i < n; ++i) term[i] = eng.mul_pub(pw[i], st.k);
    if (st.g > 0) term = eng.truncate(term, st.g);
    for (size_t i = 0; i < n; ++i) T[i] = eng.add(T[i], term[i]);
  }
  // Mantissa chain, smallest factors first; exp(mu)'s mantissa joins it.
  FpVec<E> M = T;
  if (tb.f_mu != (u64{1} << tb.beta)) {
    for (size_t i = 0; i < n; ++i) M[i] = eng.mul_pub(M[i], tb.f_mu);
    M = eng.truncate(M, tb.beta);
  }
  FpVec<E> echain;
  for (const ExpBitFactor& bf : tb.factors) {
    FpVec<E> fsel(n), esel(n);
    for (size_t i = 0; i < n; ++i) {
      const auto& bit = bits[i * span + static_cast<size_t>(bf.bit - tb.t)];
      fsel[i] = eng.add_pub(eng.mul_pub(bit, bf.f - (u64{1} << tb.beta)), u64{1} << tb.beta);
      if (bf.e > 0) esel[i] = eng.add_pub(eng.mul_pub(bit, (u64{1} << bf.e) - 1), 1);
    }
    M = eng.truncate(eng.mult(M, fsel), tb.beta);
    if (bf.e > 0) echain = echain.empty() ? esel : eng.mult(echain, esel);
  }
  FpVec<E> V = echain.empty() ? M : eng.mult(M, echain);
  int sh = delta + static_cast<int>(tb.e_mu) - tb.beta;
  if (sh >= 0) {
    for (size_t i = 0; i < n; ++i) V[i] = eng.mul_pow2(V[i], sh);
    return V;
  }
  return eng.truncate(V, -sh);
}

}  // namespace tmpc
