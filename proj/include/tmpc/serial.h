#pragma once

#include <cstring>
#include <vector>

#include "tmpc/field.h"

namespace tmpc {

inline void put_u32(std::vector<u8>& v, u32 x) {
  for (int i = 0; i < 4; ++i) v.push_back(static_cast<u8>(x >> (8 * i)));
}

inline void put_u64(std::vector<u8>& v, u64 x) {
  for (int i = 0; i < 8; ++i) v.push_back(static_cast<u8>(x >> (8 * i)));
}

inline u32 get_u32(const u8* d) {
  u32 x = 0;
  for (int i = 0; i < 4; ++i) x |= static_cast<u32>(d[i]) << (8 * i);
  return x;
}

inline u64 get_u64(const u8* d) {
  u64 x = 0;
  for (int i = 0; i < 8; ++i) x |= static_cast<u64>(d[i]) << (8 * i);
  return x;
}

}  // namespace tmpc
