#pragma once

#include <vector>

#include "tmpc/field.h"

namespace tmpc {

// Fixed-point constants for the bit-table exponential.  The argument is
// decomposed as b = sum 2^i b_i at offset alpha; every high bit i selects the
// public factor exp(2^{i-alpha}) = (f/2^beta) * 2^e with f in [2^beta,
// 2^{beta+1}), while the t low bits form a small residue handled by a
// truncated series at offset beta.
struct ExpBitFactor {
  u64 f = 0;   // mantissa at offset beta, in [2^beta, 2^{beta+1})
  i64 e = 0;   // binary exponent
  int bit = 0; // argument bit index this factor belongs to
};

struct ExpSeriesTerm {
  int j = 0;    // power of the residue
  u64 k = 0;    // integer multiplier
  int g = 0;    // right shift after multiplying: term = s^j * k / 2^g
};

struct ExpTable {
  int alpha = 0;
  int ell = 0;
  int t = 0;
  int beta = 0;
  int terms = 0;
  i64 mu_scaled = 0;            // mu * 2^alpha, subtracted from the argument
  u64 f_mu = 0;                 // exp(mu) mantissa at offset beta
  i64 e_mu = 0;                 // exp(mu) binary exponent
  std::vector<ExpBitFactor> factors;   // bits t .. ell-1, sorted by ascending mantissa
  std::vector<ExpSeriesTerm> series;   // j = 1 .. terms-1
  double chain_log2_max = 0;           // log2 bound of the largest mantissa-chain operand
};

// mu must be a non-positive integer (the contracted lower bound of the real
// argument); the upper bound is mu + 2^(ell-alpha).
ExpTable build_exp_table(int alpha, int ell, int t, int beta, int terms, i64 mu);

}  // namespace tmpc
