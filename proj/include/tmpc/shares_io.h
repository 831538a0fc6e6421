#pragma once

#include <string>
#include <vector>

#include "tmpc/sharing.h"

namespace tmpc {

enum class ShareKind : u8 { FieldRep = 0, BitRep = 1 };

// One party's slice of a shared vector, as stored on disk.
struct ShareFile {
  u64 prime = 0;
  ShareKind kind = ShareKind::FieldRep;
  std::vector<RepShare> elems;
  std::vector<BitShare> bits;

  size_t count() const { return kind == ShareKind::FieldRep ? elems.size() : bits.size(); }
};

void write_share_file(const std::string& path, const ShareFile& sf);
ShareFile read_share_file(const std::string& path);

}  // namespace tmpc
