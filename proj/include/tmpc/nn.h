#pragma once

#include <cmath>
#include <utility>

#include "tmpc/elem.h"
#include "tmpc/prg.h"

namespace tmpc {

// Fixed-point layout used by the network code: weights and activations carry
// offset kActBits, class probabilities carry kProbBits.
inline constexpr int kActBits = 16;
inline constexpr int kProbBits = 24;

template <class V>
std::vector<V> transposed(const std::vector<V>& a, size_t r, size_t c) {
  std::vector<V> t(a.size());
  for (size_t i = 0; i < r; ++i)
    for (size_t j = 0; j < c; ++j) t[j * r + i] = a[i * c + j];
  return t;
}

// 0/1 activation mask: 1 iff the signed value is >= 0 (zero counts as
// positive).  Inputs must satisfy |u| < 2^ell.
template <class E>
FpVec<E> relu_prime(E& eng, const FpVec<E>& u, int ell) {
  return eng.ge_zero(u, ell);
}

template <class E>
FpVec<E> relu(E& eng, const FpVec<E>& u, int ell) {
  FpVec<E> z = relu_prime(eng, u, ell);
  return eng.mult(z, u);
}

// Row-wise maximum plus a one-hot flag vector marking the leftmost maximal
// position.  Tournament over pairs; each level costs one compare and one
// multiplication batch.  A flag stays attached to its original position, so
// when two subtree champions meet, every flag in the losing subtree must be
// multiplied by the (secret) outcome -- the champion's position within the
// subtree is not public.  Requires |x_i - x_j| < 2^cmp_bits.
template <class E>
std::pair<FpVec<E>, FpVec<E>> max_flag_rows(E& eng, const FpVec<E>& x, size_t n, size_t k,
                                            int cmp_bits) {
  if (k == 0) throw ConfigError("max: empty vector");
  FpVec<E> vals = x;
  FpVec<E> flags(n * k, eng.from_pub(1));
  std::vector<size_t> live(k), root(k);
  for (size_t j = 0; j < k; ++j) live[j] = j, root[j] = j;
  while (live.size() > 1) {
    size_t pairs = live.size() / 2;
    FpVec<E> diff(n * pairs);
    for (size_t i = 0; i < n; ++i)
      for (size_t t = 0; t < pairs; ++t)
        diff[i * pairs + t] = eng.sub(vals[i * k + live[2 * t]], vals[i * k + live[2 * t + 1]]);
    FpVec<E> f = eng.ge_zero(diff, cmp_bits);  // 1 iff first of the pair wins
    // Which pair (and side) each original position belongs to at this level.
    std::vector<size_t> pair_of(k, SIZE_MAX), side(k, 0);
    std::vector<size_t> slot_of(k, SIZE_MAX);
    for (size_t t = 0; t < live.size(); ++t) slot_of[live[t]] = t;
    for (size_t j = 0; j < k; ++j) {
      size_t s = slot_of[root[j]];
      if (s / 2 < pairs) pair_of[j] = s / 2, side[j] = s % 2;
    }
    // One batch: f*(a-b) for the winner value, flag*f or flag*(1-f) for every
    // position under one of the two subtrees.
    FpVec<E> l, r;
    l.reserve(n * (pairs + k));
    r.reserve(n * (pairs + k));
    for (size_t i = 0; i < n; ++i)
      for (size_t t = 0; t < pairs; ++t) {
        l.push_back(f[i * pairs + t]);
        r.push_back(diff[i * pairs + t]);
      }
    std::vector<size_t> touched;
    for (size_t j = 0; j < k; ++j)
      if (pair_of[j] != SIZE_MAX) touched.push_back(j);
    for (size_t i = 0; i < n; ++i)
      for (size_t j : touched) {
        auto fv = f[i * pairs + pair_of[j]];
        l.push_back(flags[i * k + j]);
        r.push_back(side[j] == 0 ? fv : eng.sub(eng.from_pub(1), fv));
      }
    FpVec<E> prod = eng.mult(l, r);
    for (size_t i = 0; i < n; ++i)
      for (size_t t = 0; t < pairs; ++t)
        vals[i * k + live[2 * t]] = eng.add(vals[i * k + live[2 * t + 1]], prod[i * pairs + t]);
    size_t base = n * pairs;
    for (size_t i = 0; i < n; ++i)
      for (size_t c = 0; c < touched.size(); ++c)
        flags[i * k + touched[c]] = prod[base + i * touched.size() + c];
    for (size_t j = 0; j < k; ++j)
      if (pair_of[j] != SIZE_MAX) root[j] = live[2 * pair_of[j]];
    std::vector<size_t> next;
    for (size_t t = 0; t < pairs; ++t) next.push_back(live[2 * t]);
    if (live.size() % 2) next.push_back(live.back());
    live = next;
  }
  FpVec<E> maxes(n);
  for (size_t i = 0; i < n; ++i) maxes[i] = vals[i * k + live[0]];
  return {maxes, flags};
}

// Softmax via per-class inverted sums: y_j = 1 / sum_k exp(u_k - u_j).  The
// diagonal term is the public constant 1, so only k(k-1) exponentials are
// evaluated per row.  Pair differences are clamped to [-11, +9]: the lower
// clamp bounds the absolute error by e^-11, the (asymmetric) upper clamp
// keeps the exponential chain inside the field and only engages for classes
// whose probability is below e^-9.
struct SoftmaxParams {
  ExpTable table;                     // argument offset kActBits
  RecipParams recip{41, 24, 24, 30, 5};
  int clamp_bits = 26;                // |diff - bound| < 2^26
  i64 hi_clamp = i64{9} << kActBits;  // +9.0 upper clamp on pair differences
  double arg_max = 9.01;
  int prob_bits = kProbBits;
};

inline SoftmaxParams make_softmax_params() {
  SoftmaxParams sp;
  sp.table = build_exp_table(kActBits, 21, 10, 27, 4, -11);
  return sp;
}

template <class E>
FpVec<E> softmax_rows(E& eng, const FpVec<E>& u, size_t n, size_t k, const SoftmaxParams& sp) {
  const Field& F = eng.field();
  if (k == 0) throw ConfigError("softmax: empty row");
  if (k == 1) return FpVec<E>(n, eng.from_pub(u64{1} << sp.prob_bits));
  size_t pairs = k * (k - 1);
  FpVec<E> diff(n * pairs);
  size_t idx = 0;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < k; ++j)
      for (size_t c = 0; c < k; ++c) {
        if (c == j) continue;
        diff[idx++] = eng.sub(u[i * k + c], u[i * k + j]);
      }
  // Upper clamp: d <- d + [d > hi] * (hi - d).
  FpVec<E> over(n * pairs), gap(n * pairs);
  for (size_t i = 0; i < n * pairs; ++i) {
    over[i] = eng.add_pub(diff[i], F.encode(-sp.hi_clamp));
    gap[i] = eng.neg(over[i]);
  }
  FpVec<E> hi = eng.ge_zero(over, sp.clamp_bits);
  FpVec<E> corr = eng.mult(hi, gap);
  for (size_t i = 0; i < n * pairs; ++i) diff[i] = eng.add(diff[i], corr[i]);
  FpVec<E> e = fp_exp(eng, diff, sp.table, sp.prob_bits, sp.clamp_bits, sp.arg_max);
  FpVec<E> den(n * k, eng.from_pub(u64{1} << sp.prob_bits));
  idx = 0;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < k; ++j)
      for (size_t c = 0; c < k; ++c) {
        if (c == j) continue;
        den[i * k + j] = eng.add(den[i * k + j], e[idx++]);
      }
  return fp_reciprocal(eng, den, sp.recip);
}

// Normalizes a batch to zero mean and unit variance: (x - mean) / sqrt(var +
// eps).  eps is given at offset 2*alpha and must be positive.  Values must
// satisfy |x| < 2^((rs.ell - 2*alpha)/2 + alpha - 1) so the variance stays in
// the rsqrt domain.
struct BatchNormParams {
  int alpha = kActBits;
  u64 eps = 1;  // at offset 2*alpha
  RsqrtParams rs{42, 32, 24, 29, 6};
};

template <class E>
FpVec<E> batch_norm(E& eng, const FpVec<E>& x, const BatchNormParams& bp) {
  size_t n = x.size();
  if (n < 2) throw ConfigError("batchnorm: need at least two elements");
  if (bp.eps == 0) throw ConfigError("batchnorm: eps must be positive");
  typename E::Val s = eng.from_pub(0);
  for (size_t i = 0; i < n; ++i) s = eng.add(s, x[i]);
  typename E::Val mean = eng.div_signed(FpVec<E>{s}, n)[0];
  FpVec<E> d(n);
  for (size_t i = 0; i < n; ++i) d[i] = eng.sub(x[i], mean);
  FpVec<E> sq = eng.mult(d, d);  // offset 2*alpha, nonnegative
  typename E::Val sv = eng.from_pub(0);
  for (size_t i = 0; i < n; ++i) sv = eng.add(sv, sq[i]);
  typename E::Val var = eng.div_pub(FpVec<E>{sv}, n)[0];
  typename E::Val guarded = eng.add_pub(var, bp.eps);
  typename E::Val is = fp_rsqrt(eng, FpVec<E>{guarded}, bp.rs)[0];
  FpVec<E> bcast(n, is);
  return eng.div_signed(eng.mult(d, bcast), u64{1} << bp.rs.delta);
}

// Adam optimizer in fixed point.  First moment at kActBits, second moment at
// kProbBits; bias corrections are public scalars round(2^12 / (1 - beta^t))
// recomputed each step; the learning rate 2^eta_log2 is folded into the final
// shift.  A public one-ulp floor on the corrected second moment keeps the
// inverse square root in range when gradients vanish.  Gradient magnitudes
// must stay below 2^4.
struct AdamParams {
  u64 beta1 = 58982;   // 0.9 at 2^16; the 0.09 variant is 5898
  u64 beta2 = 65470;   // 0.999 at 2^16
  int eta_log2 = -10;  // learning rate 2^-10
  int bhat_bits = 12;
  RsqrtParams rs{32, 24, 28, 29, 6};
};

template <class E>
struct AdamState {
  FpVec<E> m;  // offset kActBits
  FpVec<E> v;  // offset kProbBits
  int t = 0;
};

template <class E>
AdamState<E> make_adam_state(E& eng, size_t n) {
  AdamState<E> st;
  st.m.assign(n, eng.from_pub(0));
  st.v.assign(n, eng.from_pub(0));
  return st;
}

template <class E>
void adam_update(E& eng, FpVec<E>& w, const FpVec<E>& g, AdamState<E>& st, const AdamParams& ap) {
  size_t n = w.size();
  if (g.size() != n || st.m.size() != n || st.v.size() != n)
    throw ConfigError("adam: size mismatch");
  st.t += 1;
  u64 one = u64{1} << kActBits;
  FpVec<E> mnum(n), vnum(n);
  FpVec<E> g2 = eng.mult(g, g);  // offset 2*kActBits, nonnegative
  for (size_t i = 0; i < n; ++i) {
    mnum[i] = eng.add(eng.mul_pub(st.m[i], ap.beta1), eng.mul_pub(g[i], one - ap.beta1));
    vnum[i] = eng.add(eng.mul_pub(st.v[i], ap.beta2 << (2 * kActBits - kProbBits)),
                      eng.mul_pub(g2[i], one - ap.beta2));
  }
  st.m = eng.div_signed(mnum, one);
  st.v = eng.div_pub(vnum, u64{1} << kProbBits);
  long double b1t = std::pow(static_cast<long double>(ap.beta1) / one, st.t);
  long double b2t = std::pow(static_cast<long double>(ap.beta2) / one, st.t);
  u64 scale = u64{1} << ap.bhat_bits;
  u64 km = static_cast<u64>(std::llround(scale / (1.0L - b1t)));
  u64 kv = static_cast<u64>(std::llround(scale / (1.0L - b2t)));
  FpVec<E> mh(n), vh(n);
  for (size_t i = 0; i < n; ++i) mh[i] = eng.mul_pub(st.m[i], km);
  mh = eng.div_signed(mh, scale);
  for (size_t i = 0; i < n; ++i) vh[i] = eng.mul_pub(st.v[i], kv);
  vh = eng.div_pub(vh, scale);
  for (size_t i = 0; i < n; ++i) vh[i] = eng.add_pub(vh[i], 1);  // one-ulp floor
  FpVec<E> is = fp_rsqrt(eng, vh, ap.rs);
  FpVec<E> upd = eng.div_signed(eng.mult(mh, is), u64{1} << (ap.rs.delta - ap.eta_log2));
  for (size_t i = 0; i < n; ++i) w[i] = eng.sub(w[i], upd[i]);
}

// Fully connected network with ReLU hidden layers and softmax output,
// trained with Adam.  Weight matrices are stored input-major (fan_in x
// fan_out) so activations stay row-major per sample.
struct FfnnOpts {
  int relu_bits = 23;  // pre-activation magnitudes below 2^(relu_bits - kActBits)
  int cmp_bits = 24;   // logit compares for prediction flags
  AdamParams adam;
};

inline std::vector<i64> init_weights_fixed(size_t fan_in, size_t fan_out, u64 seed, u64 tweak) {
  double s = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Prg g(seed, tweak);
  std::vector<i64> w(fan_in * fan_out);
  for (auto& x : w) {
    double u = 2.0 * (static_cast<double>(g.next_u64() >> 11) * 0x1.0p-53) - 1.0;
    x = std::llround(u * s * static_cast<double>(u64{1} << kActBits));
  }
  return w;
}

template <class E>
struct Ffnn {
  std::vector<size_t> dims;
  std::vector<FpVec<E>> wt;  // wt[l]: dims[l] x dims[l+1]
  std::vector<AdamState<E>> opt;
};

template <class E>
Ffnn<E> make_ffnn(E& eng, const std::vector<size_t>& dims, u64 seed) {
  if (dims.size() < 2) throw ConfigError("ffnn: need at least one layer");
  Ffnn<E> net;
  net.dims = dims;
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    std::vector<i64> w = init_weights_fixed(dims[l], dims[l + 1], seed, 0x30 + l);
    FpVec<E> ws(w.size());
    for (size_t i = 0; i < w.size(); ++i) ws[i] = eng.from_pub(eng.field().encode(w[i]));
    net.wt.push_back(std::move(ws));
    net.opt.push_back(make_adam_state(eng, w.size()));
  }
  return net;
}

template <class E>
struct FfnnCache {
  std::vector<FpVec<E>> act;   // act[l]: input to layer l, m x dims[l]
  std::vector<FpVec<E>> mask;  // ReLU masks per hidden layer
  FpVec<E> logits;             // offset kActBits
  FpVec<E> probs;              // offset kProbBits
};

template <class E>
FpVec<E> ffnn_logits(E& eng, const Ffnn<E>& net, const FpVec<E>& x, size_t m,
                     const FfnnOpts& opts, FfnnCache<E>* cache = nullptr) {
  size_t L = net.wt.size();
  if (cache) {
    cache->act.assign(L, {});
    cache->mask.assign(L - 1, {});
  }
  FpVec<E> a = x;
  for (size_t l = 0; l < L; ++l) {
    if (cache) cache->act[l] = a;
    FpVec<E> u = eng.div_signed(eng.matmul(a, net.wt[l], m, net.dims[l], net.dims[l + 1]),
                                u64{1} << kActBits);
    if (l + 1 < L) {
      FpVec<E> z = eng.ge_zero(u, opts.relu_bits);
      if (cache) cache->mask[l] = z;
      a = eng.mult(z, u);
    } else {
      a = std::move(u);
    }
  }
  return a;
}

template <class E>
void ffnn_forward(E& eng, const Ffnn<E>& net, const FpVec<E>& x, size_t m,
                  const SoftmaxParams& sp, const FfnnOpts& opts, FfnnCache<E>& cache) {
  cache.logits = ffnn_logits(eng, net, x, m, opts, &cache);
  cache.probs = softmax_rows(eng, cache.logits, m, net.dims.back(), sp);
}

// Backpropagation and Adam step.  The output delta is probs - onehot at
// kProbBits; every weight gradient divides by 2^(kProbBits + log2(m)), which
// restores offset kActBits and folds in the 1/m batch mean.
template <class E>
void ffnn_backward_update(E& eng, Ffnn<E>& net, const FfnnCache<E>& cache,
                          const FpVec<E>& onehot, size_t m, const FfnnOpts& opts,
                          std::vector<FpVec<E>>* grads_out = nullptr) {
  size_t L = net.wt.size();
  if ((m & (m - 1)) != 0 || m == 0) throw ConfigError("ffnn: batch size must be a power of two");
  int mlog = 0;
  while ((size_t{1} << mlog) < m) ++mlog;
  if (grads_out) grads_out->assign(L, {});
  FpVec<E> delta(cache.probs.size());
  for (size_t i = 0; i < delta.size(); ++i) delta[i] = eng.sub(cache.probs[i], onehot[i]);
  for (size_t l = L; l-- > 0;) {
    FpVec<E> at = transposed<typename E::Val>(cache.act[l], m, net.dims[l]);
    FpVec<E> graw = eng.matmul(at, delta, net.dims[l], m, net.dims[l + 1]);
    FpVec<E> g = eng.div_signed(graw, u64{1} << (kProbBits + mlog));
    if (grads_out) (*grads_out)[l] = g;
    if (l > 0) {
      FpVec<E> wtT = transposed<typename E::Val>(net.wt[l], net.dims[l], net.dims[l + 1]);
      FpVec<E> draw = eng.matmul(delta, wtT, m, net.dims[l + 1], net.dims[l]);
      delta = eng.mult(cache.mask[l - 1], eng.div_signed(draw, u64{1} << kActBits));
    }
    adam_update(eng, net.wt[l], g, net.opt[l], opts.adam);
  }
}

struct BatchMetrics {
  int step = 0;
  double loss_proxy = 0;  // 1 - mean correct-class probability
  double accuracy = 0;
};

// Only aggregate scalars are opened: the summed correct-class probability and
// the predicted-hit count.
template <class E>
BatchMetrics batch_metrics(E& eng, int step, const FfnnCache<E>& cache, const FpVec<E>& onehot,
                           size_t m, size_t k, const FfnnOpts& opts) {
  const Field& F = eng.field();
  FpVec<E> py = eng.mult(cache.probs, onehot);
  typename E::Val s = eng.from_pub(0);
  for (const auto& v : py) s = eng.add(s, v);
  auto [mx, fl] = max_flag_rows(eng, cache.logits, m, k, opts.cmp_bits);
  (void)mx;
  FpVec<E> hits = eng.mult(fl, onehot);
  typename E::Val h = eng.from_pub(0);
  for (const auto& v : hits) h = eng.add(h, v);
  std::vector<u64> opened = eng.open(FpVec<E>{s, h});
  double denom = std::ldexp(static_cast<double>(m), 2 * kProbBits);
  BatchMetrics bm;
  bm.step = step;
  bm.loss_proxy = 1.0 - static_cast<double>(F.decode(opened[0])) / denom;
  bm.accuracy =
      static_cast<double>(F.decode(opened[1])) / std::ldexp(static_cast<double>(m), kProbBits);
  return bm;
}

// One pass over the samples in fixed batch order (no shuffling, so runs are
// reproducible).  Trailing samples that do not fill a batch are skipped.
template <class E>
std::vector<BatchMetrics> ffnn_train_epoch(E& eng, Ffnn<E>& net, const FpVec<E>& x,
                                           const FpVec<E>& onehot, size_t n_samples,
                                           size_t batch, const SoftmaxParams& sp,
                                           const FfnnOpts& opts, int step_base = 0) {
  size_t d = net.dims.front();
  size_t k = net.dims.back();
  if (x.size() != n_samples * d || onehot.size() != n_samples * k)
    throw ConfigError("ffnn: dataset shape mismatch");
  std::vector<BatchMetrics> out;
  for (size_t b = 0; (b + 1) * batch <= n_samples; ++b) {
    FpVec<E> xb(x.begin() + b * batch * d, x.begin() + (b + 1) * batch * d);
    FpVec<E> yb(onehot.begin() + b * batch * k, onehot.begin() + (b + 1) * batch * k);
    FfnnCache<E> cache;
    ffnn_forward(eng, net, xb, batch, sp, opts, cache);
    out.push_back(batch_metrics(eng, step_base + static_cast<int>(b) + 1, cache, yb, batch, k,
                                opts));
    ffnn_backward_update(eng, net, cache, yb, batch, opts);
  }
  return out;
}

// Fraction of samples whose predicted class (leftmost maximal logit) matches
// the label.  Flags are opened; evaluation is chunked to bound memory.
template <class E>
double ffnn_accuracy(E& eng, const Ffnn<E>& net, const FpVec<E>& x,
                     const std::vector<u8>& labels, const FfnnOpts& opts, size_t chunk = 256) {
  size_t d = net.dims.front();
  size_t k = net.dims.back();
  size_t n = labels.size();
  if (x.size() != n * d) throw ConfigError("ffnn: dataset shape mismatch");
  size_t correct = 0;
  for (size_t off = 0; off < n; off += chunk) {
    size_t m = std::min(chunk, n - off);
    FpVec<E> xb(x.begin() + off * d, x.begin() + (off + m) * d);
    FpVec<E> lg = ffnn_logits(eng, net, xb, m, opts);
    auto [mx, fl] = max_flag_rows(eng, lg, m, k, opts.cmp_bits);
    (void)mx;
    std::vector<u64> opened = eng.open(fl);
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < k; ++j)
        if (opened[i * k + j] == 1 && j == labels[off + i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

}  // namespace tmpc
