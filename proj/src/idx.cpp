#include "tmpc/idx.h"

#include <cmath>
#include <fstream>

#include "tmpc/prg.h"
#include "tmpc/transport.h"

namespace tmpc {

namespace {

constexpr u32 kImageMagic = 0x00000803;
constexpr u32 kLabelMagic = 0x00000801;

void put_be32(std::vector<u8>& v, u32 x) {
  for (int i = 3; i >= 0; --i) v.push_back(static_cast<u8>(x >> (8 * i)));
}

u32 get_be32(const u8* d) {
  u32 x = 0;
  for (int i = 0; i < 4; ++i) x = (x << 8) | d[i];
  return x;
}

std::vector<u8> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("idx: cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::string& path, const std::vector<u8>& buf) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("idx: cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw ConfigError("idx: short write to " + path);
}

double uniform(Prg& g) { return static_cast<double>(g.next_u64() >> 11) * 0x1.0p-53; }

}  // namespace

IdxImages read_idx_images(const std::string& path) {
  std::vector<u8> buf = slurp(path);
  if (buf.size() < 16 || get_be32(buf.data()) != kImageMagic)
    throw ConfigError("idx: " + path + " is not an image file");
  IdxImages im;
  im.n = get_be32(buf.data() + 4);
  im.rows = get_be32(buf.data() + 8);
  im.cols = get_be32(buf.data() + 12);
  size_t want = 16 + static_cast<size_t>(im.n) * im.rows * im.cols;
  if (buf.size() != want) throw ConfigError("idx: " + path + " has a bad payload size");
  im.pixels.assign(buf.begin() + 16, buf.end());
  return im;
}

IdxLabels read_idx_labels(const std::string& path) {
  std::vector<u8> buf = slurp(path);
  if (buf.size() < 8 || get_be32(buf.data()) != kLabelMagic)
    throw ConfigError("idx: " + path + " is not a label file");
  IdxLabels lb;
  lb.n = get_be32(buf.data() + 4);
  if (buf.size() != 8 + static_cast<size_t>(lb.n))
    throw ConfigError("idx: " + path + " has a bad payload size");
  lb.labels.assign(buf.begin() + 8, buf.end());
  return lb;
}

void write_idx_images(const std::string& path, const IdxImages& im) {
  std::vector<u8> buf;
  put_be32(buf, kImageMagic);
  put_be32(buf, im.n);
  put_be32(buf, im.rows);
  put_be32(buf, im.cols);
  buf.insert(buf.end(), im.pixels.begin(), im.pixels.end());
  spit(path, buf);
}

void write_idx_labels(const std::string& path, const IdxLabels& lb) {
  std::vector<u8> buf;
  put_be32(buf, kLabelMagic);
  put_be32(buf, lb.n);
  buf.insert(buf.end(), lb.labels.begin(), lb.labels.end());
  spit(path, buf);
}

Dataset synth_digits(u64 seed, u32 n, u32 classes, u32 rows, u32 cols) {
  if (classes == 0 || n == 0) throw ConfigError("synth: need at least one class and one sample");
  Prg g(seed, 0x1d);
  size_t dim = static_cast<size_t>(rows) * cols;

  // Per-class prototype: a handful of soft blobs on the canvas.
  std::vector<std::vector<double>> proto(classes, std::vector<double>(dim, 0.0));
  for (u32 c = 0; c < classes; ++c) {
    for (int blob = 0; blob < 6; ++blob) {
      double cx = 0.15 * cols + 0.7 * cols * uniform(g);
      double cy = 0.15 * rows + 0.7 * rows * uniform(g);
      double sigma = 1.5 + 2.5 * uniform(g);
      double amp = 0.5 + 0.5 * uniform(g);
      for (u32 y = 0; y < rows; ++y)
        for (u32 x = 0; x < cols; ++x) {
          double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
          proto[c][y * cols + x] += amp * std::exp(-d2 / (2 * sigma * sigma));
        }
    }
    for (double& v : proto[c]) v = v > 1.0 ? 1.0 : v;
  }

  Dataset ds;
  ds.images.n = n;
  ds.images.rows = rows;
  ds.images.cols = cols;
  ds.images.pixels.resize(static_cast<size_t>(n) * dim);
  ds.labels.n = n;
  ds.labels.labels.resize(n);
  for (u32 i = 0; i < n; ++i) {
    u32 c = static_cast<u32>(g.next_u64() % classes);
    ds.labels.labels[i] = static_cast<u8>(c);
    double contrast = 0.75 + 0.5 * uniform(g);
    for (size_t j = 0; j < dim; ++j) {
      // Irwin-Hall noise: sum of three uniforms, roughly normal.
      double noise = (uniform(g) + uniform(g) + uniform(g) - 1.5) * 0.13;
      double v = proto[c][j] * contrast + noise;
      v = v < 0 ? 0 : (v > 1 ? 1 : v);
      ds.images.pixels[static_cast<size_t>(i) * dim + j] = static_cast<u8>(v * 255.0 + 0.5);
    }
  }
  return ds;
}

}  // namespace tmpc
