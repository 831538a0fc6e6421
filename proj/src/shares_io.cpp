#include "tmpc/shares_io.h"

#include <fstream>

#include "tmpc/serial.h"
#include "tmpc/transport.h"

namespace tmpc {

namespace {
constexpr u32 kMagic = 0x43504d54;  // "TMPC"
constexpr u32 kVersion = 1;
}  // namespace

void write_share_file(const std::string& path, const ShareFile& sf) {
  std::vector<u8> buf;
  put_u32(buf, kMagic);
  put_u32(buf, kVersion);
  put_u64(buf, sf.prime);
  buf.push_back(static_cast<u8>(sf.kind));
  put_u64(buf, sf.count());
  if (sf.kind == ShareKind::FieldRep) {
    for (const RepShare& e : sf.elems) {
      put_u64(buf, e.s0);
      put_u64(buf, e.s1);
    }
  } else {
    for (const BitShare& b : sf.bits) {
      put_u64(buf, b.s0);
      put_u64(buf, b.s1);
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("shares: cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw ConfigError("shares: short write to " + path);
}

ShareFile read_share_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("shares: cannot open " + path);
  std::vector<u8> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 25) throw ConfigError("shares: " + path + " is truncated");
  if (get_u32(buf.data()) != kMagic) throw ConfigError("shares: " + path + " has a bad magic");
  if (get_u32(buf.data() + 4) != kVersion)
    throw ConfigError("shares: " + path + " has an unsupported version");
  ShareFile sf;
  sf.prime = get_u64(buf.data() + 8);
  u8 kind = buf[16];
  if (kind > 1) throw ConfigError("shares: " + path + " has an unknown sharing kind");
  sf.kind = static_cast<ShareKind>(kind);
  u64 n = get_u64(buf.data() + 17);
  if (buf.size() != 25 + 16 * n) throw ConfigError("shares: " + path + " has a bad element count");
  const u8* d = buf.data() + 25;
  if (sf.kind == ShareKind::FieldRep) {
    sf.elems.resize(n);
    for (u64 i = 0; i < n; ++i) {
      sf.elems[i].s0 = get_u64(d + 16 * i);
      sf.elems[i].s1 = get_u64(d + 16 * i + 8);
    }
  } else {
    sf.bits.resize(n);
    for (u64 i = 0; i < n; ++i) {
      sf.bits[i].s0 = static_cast<u8>(get_u64(d + 16 * i) & 1);
      sf.bits[i].s1 = static_cast<u8>(get_u64(d + 16 * i + 8) & 1);
    }
  }
  return sf;
}

}  // namespace tmpc
