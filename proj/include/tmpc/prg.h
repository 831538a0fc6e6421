#pragma once

#include <array>
#include <cstring>

#include "tmpc/field.h"

namespace tmpc {

inline u64 splitmix64(u64& s) {
  u64 z = (s += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic pseudorandom generator (ChaCha20 keystream).  Two parties
// holding the same (seed, stream) produce identical draw sequences, which is
// what the pairwise correlated-randomness setup relies on; both endpoints
// must therefore issue the exact same sequence of next_* calls.
class Prg {
 public:
  explicit Prg(u64 seed, u64 stream = 0) {
    static constexpr u32 kSigma[4] = {0x61707865, 0x3320646e, 0x79622d32, 0x6b206574};
    u64 s = seed;
    state_[0] = kSigma[0];
    state_[1] = kSigma[1];
    state_[2] = kSigma[2];
    state_[3] = kSigma[3];
    for (int i = 0; i < 4; ++i) {
      u64 w = splitmix64(s);
      state_[4 + 2 * i] = static_cast<u32>(w);
      state_[5 + 2 * i] = static_cast<u32>(w >> 32);
    }
    state_[12] = 0;  // block counter
    state_[13] = 0;
    state_[14] = static_cast<u32>(stream);
    state_[15] = static_cast<u32>(stream >> 32);
  }

  u64 next_u64() {
    if (pos_ + 8 > 64) refill();
    u64 v;
    std::memcpy(&v, block_.data() + pos_, 8);
    pos_ += 8;
    return v;
  }

  // Uniform element of [0, p) by rejection on the top k bits of a draw.
  u64 next_field(const Field& f) {
    for (;;) {
      u64 v = next_u64() >> (64 - f.k);
      if (v != f.p) return v;
    }
  }

  int next_bit() {
    if (bit_cnt_ == 0) {
      bit_buf_ = next_u64();
      bit_cnt_ = 64;
    }
    int b = static_cast<int>(bit_buf_ & 1);
    bit_buf_ >>= 1;
    --bit_cnt_;
    return b;
  }

 private:
  static u32 rotl(u32 x, int n) { return (x << n) | (x >> (32 - n)); }

  static void quarter(u32& a, u32& b, u32& c, u32& d) {
    a += b; d ^= a; d = rotl(d, 16);
    c += d; b ^= c; b = rotl(b, 12);
    a += b; d ^= a; d = rotl(d, 8);
    c += d; b ^= c; b = rotl(b, 7);
  }

  void refill() {
    u32 x[16];
    std::memcpy(x, state_.data(), sizeof(x));
    for (int i = 0; i < 10; ++i) {
      quarter(x[0], x[4], x[8], x[12]);
      quarter(x[1], x[5], x[9], x[13]);
      quarter(x[2], x[6], x[10], x[14]);
      quarter(x[3], x[7], x[11], x[15]);
      quarter(x[0], x[5], x[10], x[15]);
      quarter(x[1], x[6], x[11], x[12]);
      quarter(x[2], x[7], x[8], x[13]);
      quarter(x[3], x[4], x[9], x[14]);
    }
    for (int i = 0; i < 16; ++i) x[i] += state_[i];
    std::memcpy(block_.data(), x, 64);
    pos_ = 0;
    if (++state_[12] == 0) ++state_[13];
  }

  std::array<u32, 16> state_{};
  std::array<u8, 64> block_{};
  int pos_ = 64;
  u64 bit_buf_ = 0;
  int bit_cnt_ = 0;
};

}  // namespace tmpc
