#pragma once

#include "tmpc/proto_div.h"

// Independent models of the division protocols' output distributions.
// enumerate_* sweeps every share value; closed_form_add evaluates the
// derived counting formulas; functionality_branch re-derives the output
// through residue bookkeeping only.  Agreement between all three is the
// correctness gate for the division layer.

namespace tmpc::oracle {

struct DivDist {
  u64 n0 = 0, n1 = 0, n2 = 0;  // counts of output = floor(a/d) + {0,1,2}
  friend bool operator==(const DivDist&, const DivDist&) = default;
};

inline i64 floor_div(i64 a, i64 b) {
  i64 q = a / b;
  return q * b > a ? q - 1 : q;
}

// Exhaustive sweep of the two-summand protocol output over all shares of a.
inline DivDist enumerate_add(const Field& f, u64 d, u64 a) {
  DivDist dist;
  u64 base = a / d;
  for (u64 x = 0; x < f.p; ++x) {
    u64 c = divmodel::div_add(f, d, x, f.sub(a, x));
    u64 off = c - base;
    if (off == 0)
      ++dist.n0;
    else if (off == 1)
      ++dist.n1;
    else if (off == 2)
      ++dist.n2;
    else
      throw VerificationError("two-summand division output out of range");
  }
  return dist;
}

// Same sweep for the replicated variant (first sub-share uniform).  The +2
// branch dies out exactly when 2d divides p+1 (so for every power-of-two
// divisor at a Mersenne prime); for other divisors it survives with
// probability O(a/p).
inline DivDist enumerate_rep(const Field& f, u64 d, u64 a) {
  DivDist dist;
  u64 base = a / d;
  for (u64 x = 0; x < f.p; ++x) {
    u64 c = divmodel::div_rep(f, d, x, f.sub(a, x));
    u64 off = c - base;
    if (off == 0)
      ++dist.n0;
    else if (off == 1)
      ++dist.n1;
    else if (off == 2)
      ++dist.n2;
    else
      throw VerificationError("replicated division output out of range");
  }
  return dist;
}

// Counting formulas for the two-summand output distribution (counts out of
// p).  Two regimes depending on the residues r_a = a mod d, r_p = p mod d.
inline DivDist closed_form_add(const Field& f, u64 d, u64 a) {
  u64 aa = a / d, ra = a % d;
  u64 ap = f.p / d, rp = f.p % d;
  DivDist dist;
  if (rp < ra) {
    dist.n0 = (ap - aa) * (d - ra) - 1;
    dist.n1 = (d - 2 * ra + rp) * aa + 2 * rp + (ap - 1) * ra + 1;
    dist.n2 = (ra - rp) * (aa + 1);
  } else {
    dist.n0 = f.p - a + rp * aa - ap * ra - 1;
    dist.n1 = a - rp * aa + ra * ap + 1;
    dist.n2 = 0;
  }
  return dist;
}

// Probability numerator of an exact output when d divides p+1 (r_p = d-1,
// the power-of-two divisor case): Pr[c = a/d] = (p - r_a(a_p+1) - a_a - 1)/p.
inline u64 exact_output_count(const Field& f, u64 d, u64 a) {
  u64 aa = a / d, ra = a % d;
  u64 ap = f.p / d;
  return f.p - ra * (ap + 1) - aa - 1;
}

// Residue-only re-derivation of the two-summand output: which branch the
// pair (a, x) lands in determines the additive error directly.
inline u64 functionality_branch(const Field& f, u64 d, u64 a, u64 x) {
  i64 aa = static_cast<i64>(a / d), ra = static_cast<i64>(a % d);
  i64 rp = static_cast<i64>(f.p % d);
  i64 r1 = static_cast<i64>(x % d);
  if (x <= a)  // no wrap: y = a - x
    return static_cast<u64>(aa + 1 + (r1 > rp ? 1 : 0) - (r1 > ra ? 1 : 0));
  // wrap: y = a + p - x
  return static_cast<u64>(aa + (r1 > rp ? 1 : 0) +
                          floor_div(ra + rp - r1, static_cast<i64>(d)));
}

// The naive baseline: mask, open, divide in the clear, unmask.  Returns the
// signed result; off by about -p/d whenever a + s wraps past p.
inline i64 baseline_masked_div(const Field& f, u64 d, u64 a, u64 s) {
  u64 opened = f.add(a, s);
  return static_cast<i64>(opened / d) - static_cast<i64>(s / d);
}

}  // namespace tmpc::oracle
