#include "tmpc/tables.h"

#include <algorithm>
#include <cmath>

#include "tmpc/transport.h"

namespace tmpc {

namespace {

// Splits v > 0 as (f/2^beta) * 2^e with f in [2^beta, 2^(beta+1)).
void mantissa_exp(long double v, int beta, u64& f, i64& e) {
  int e2 = 0;
  long double m = frexpl(v, &e2);  // m in [0.5, 1)
  f = static_cast<u64>(llroundl(ldexpl(m, beta + 1)));
  e = e2 - 1;
  if (f >> (beta + 1)) {  // mantissa rounded up to 2.0
    f >>= 1;
    e += 1;
  }
}

}  // namespace

ExpTable build_exp_table(int alpha, int ell, int t, int beta, int terms, i64 mu) {
  if (alpha < 0 || alpha > 40 || beta < alpha || beta > 40 || ell < 1 || ell > 60 || t < 1 ||
      t > ell || terms < 2 || terms > 8 || mu > 0)
    throw ConfigError("exp: invalid parameter set");
  if (ldexpl(1.0L, ell - alpha) > 80.0L)
    throw ConfigError("exp: argument range 2^(ell-alpha) is too wide for the field");

  ExpTable tb;
  tb.alpha = alpha;
  tb.ell = ell;
  tb.t = t;
  tb.beta = beta;
  tb.terms = terms;
  tb.mu_scaled = mu * (1LL << alpha);
  mantissa_exp(expl(static_cast<long double>(mu)), beta, tb.f_mu, tb.e_mu);

  for (int i = t; i < ell; ++i) {
    ExpBitFactor bf;
    bf.bit = i;
    mantissa_exp(expl(ldexpl(1.0L, i - alpha)), beta, bf.f, bf.e);
    tb.factors.push_back(bf);
  }
  std::sort(tb.factors.begin(), tb.factors.end(),
            [](const ExpBitFactor& a, const ExpBitFactor& b) { return a.f < b.f; });

  long double fact = 1.0L;
  for (int j = 1; j < terms; ++j) {
    fact *= j;
    ExpSeriesTerm st;
    st.j = j;
    int scale = beta - j * alpha;  // ideal weight of s^j/j! is 2^scale/j!
    st.g = std::max(0, 26 - scale + static_cast<int>(ceill(log2l(fact))));
    if (scale + st.g > 62) throw ConfigError("exp: series multiplier overflows");
    st.k = static_cast<u64>(llroundl(ldexpl(1.0L, scale + st.g) / fact));
    if (st.k != 0) tb.series.push_back(st);
  }

  // Worst-case mantissa chain (all bits set): residue series first, then
  // exp(mu), then the sorted per-bit mantissas; each step truncates by beta.
  long double smax = ldexpl(1.0L, t) - 1.0L;
  long double running = beta + smax / ldexpl(1.0L, alpha) * 1.4426950408889634L;
  long double peak = running;
  for (u64 f : {tb.f_mu}) {
    long double pre = running + log2l(static_cast<long double>(f));
    peak = std::max(peak, pre);
    running = pre - beta;
  }
  for (const ExpBitFactor& bf : tb.factors) {
    long double pre = running + log2l(static_cast<long double>(bf.f));
    peak = std::max(peak, pre);
    running = pre - beta;
  }
  tb.chain_log2_max = static_cast<double>(peak);
  if (peak >= 60.0L)
    throw ConfigError("exp: mantissa chain would overflow the field; lower beta or ell");
  return tb;
}

}  // namespace tmpc
