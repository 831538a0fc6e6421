#pragma once

#include <string>
#include <vector>

#include "tmpc/field.h"

namespace tmpc {

// IDX containers (the standard format of the classic digit benchmarks):
// images are u8 n x rows x cols, labels are u8 n.
struct IdxImages {
  u32 n = 0;
  u32 rows = 0;
  u32 cols = 0;
  std::vector<u8> pixels;  // n * rows * cols, row-major per image
};

struct IdxLabels {
  u32 n = 0;
  std::vector<u8> labels;
};

IdxImages read_idx_images(const std::string& path);
IdxLabels read_idx_labels(const std::string& path);
void write_idx_images(const std::string& path, const IdxImages& im);
void write_idx_labels(const std::string& path, const IdxLabels& lb);

struct Dataset {
  IdxImages images;
  IdxLabels labels;
};

// Seeded synthetic digit-style dataset: per-class prototypes built from random
// soft blobs plus per-sample contrast jitter and pixel noise.  Written in the
// same IDX format, so real scans can be dropped in unchanged.
Dataset synth_digits(u64 seed, u32 n, u32 classes = 10, u32 rows = 28, u32 cols = 28);

}  // namespace tmpc
