#pragma once

// Shared helpers for unit and acceptance tests: random instances, conversion
// between library types and the dense arrays used by the reference oracles,
// and scratch directories.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "maskrefine/maskrefine.hpp"
#include "reference.hpp"

namespace testing_support {

using namespace maskrefine;

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "mr") {
    static std::mt19937_64 g(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() /
            (tag + "_" + std::to_string(g()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline int rand_int(std::mt19937_64& g, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(g);
}

inline ref::Labels to_ref(const LabelMap& lm) {
  return ref::Labels(lm.data().begin(), lm.data().end());
}

inline LabelMap from_ref(Size size, const ref::Labels& v) {
  std::vector<ClassId> d(v.begin(), v.end());
  return LabelMap(size, std::move(d));
}

inline ref::Config to_ref(const ClassRegistry& reg) {
  ref::Config c;
  c.small.insert(reg.small_classes.begin(), reg.small_classes.end());
  c.large.insert(reg.large_classes.begin(), reg.large_classes.end());
  for (auto [i, j] : reg.similarity.pairs()) c.similar.insert({i, j});
  c.road = reg.road_id;
  c.sidewalk = reg.sidewalk_id;
  c.alpha = reg.alpha;
  c.beta = reg.beta;
  c.x_lo = reg.road_region.x_lo;
  c.x_hi = reg.road_region.x_hi;
  c.y_lo = reg.road_region.y_lo;
  c.y_hi = reg.road_region.y_hi;
  c.top_k = reg.road_region.top_k;
  return c;
}

inline MaskSet masks_from_bitmaps(Size size, const std::vector<ref::Bitmap>& bms) {
  MaskSet ms(size, {});
  for (const auto& b : bms) ms.push_back(BinaryMask::from_bitmap<std::uint8_t>(size, b));
  return ms;
}

/// Registry with `n` classes drawn from distinct ids in [0, 254], random
/// disjoint small/large sets, random directed similarity pairs and
/// random alpha/beta.
inline ClassRegistry random_registry(std::mt19937_64& g, int n) {
  std::vector<int> pool(255);
  for (int i = 0; i < 255; ++i) pool[i] = i;
  std::shuffle(pool.begin(), pool.end(), g);
  ClassRegistry reg;
  for (int k = 0; k < n; ++k)
    reg.classes.push_back({static_cast<ClassId>(pool[k]), "c" + std::to_string(pool[k]),
                           Rgb{static_cast<std::uint8_t>(g()), static_cast<std::uint8_t>(g()),
                               static_cast<std::uint8_t>(g())}});
  for (const auto& c : reg.classes) {
    switch (rand_int(g, 0, 2)) {
      case 0: reg.small_classes.insert(c.id); break;
      case 1: reg.large_classes.insert(c.id); break;
      default: break;
    }
  }
  for (const auto& a : reg.classes)
    for (const auto& b : reg.classes)
      if (rand_int(g, 0, 3) == 0) reg.similarity.insert(a.id, b.id);
  reg.road_id = reg.classes[rand_int(g, 0, n - 1)].id;
  reg.sidewalk_id = reg.classes[rand_int(g, 0, n - 1)].id;
  reg.alpha = std::uniform_real_distribution<double>(0.0, 1.0)(g);
  reg.beta = std::uniform_real_distribution<double>(0.0, 1.0)(g);
  reg.road_region.top_k = rand_int(g, 1, 4);
  reg.validate();
  return reg;
}

/// Label map of blocky regions over the registry classes, with a little void
/// when `allow_void`.
inline LabelMap random_labels(std::mt19937_64& g, Size size, const ClassRegistry& reg,
                              bool allow_void) {
  LabelMap lm(size, reg.classes[0].id);
  const int blocks = rand_int(g, 1, 6);
  for (int b = 0; b < blocks; ++b) {
    const int x0 = rand_int(g, 0, size.width - 1), y0 = rand_int(g, 0, size.height - 1);
    const int x1 = rand_int(g, x0, size.width - 1), y1 = rand_int(g, y0, size.height - 1);
    const ClassId id = reg.classes[rand_int(g, 0, static_cast<int>(reg.num_classes()) - 1)].id;
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) lm.at(x, y) = id;
  }
  for (auto& v : lm.data()) {
    const int r = rand_int(g, 0, 99);
    if (r < 10) v = reg.classes[rand_int(g, 0, static_cast<int>(reg.num_classes()) - 1)].id;
    else if (allow_void && r < 13) v = reg.void_id;
  }
  return lm;
}

/// Non-empty bitmap: a rectangle, optionally with random holes/extra pixels.
inline ref::Bitmap random_bitmap(std::mt19937_64& g, Size size) {
  ref::Bitmap b(size.pixels(), 0);
  const int x0 = rand_int(g, 0, size.width - 1), y0 = rand_int(g, 0, size.height - 1);
  const int x1 = rand_int(g, x0, size.width - 1), y1 = rand_int(g, y0, size.height - 1);
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) b[y * size.width + x] = 1;
  if (rand_int(g, 0, 2) == 0)
    for (auto& v : b)
      if (rand_int(g, 0, 9) == 0) v ^= 1;
  if (ref::area(b) == 0) b[rand_int(g, 0, static_cast<int>(b.size()) - 1)] = 1;
  return b;
}

struct LabelingInstance {
  Size size;
  ClassRegistry reg;
  LabelMap uda;
  std::vector<ref::Bitmap> bitmaps;
  MaskSet masks;
};

inline LabelingInstance random_labeling_instance(std::mt19937_64& g, int max_side = 32,
                                                 int max_masks = 8, int max_classes = 8,
                                                 bool allow_void = true) {
  LabelingInstance in;
  in.size = {rand_int(g, 1, max_side), rand_int(g, 1, max_side)};
  in.reg = random_registry(g, rand_int(g, 1, max_classes));
  in.uda = random_labels(g, in.size, in.reg, allow_void);
  const int n = rand_int(g, 0, max_masks);
  for (int k = 0; k < n; ++k) in.bitmaps.push_back(random_bitmap(g, in.size));
  // Occasionally a duplicate-area mask to exercise tie ordering.
  if (n >= 2 && rand_int(g, 0, 3) == 0) in.bitmaps.push_back(in.bitmaps[0]);
  in.masks = masks_from_bitmaps(in.size, in.bitmaps);
  return in;
}

inline ConfidenceMap random_confidence(std::mt19937_64& g, Size size) {
  ConfidenceMap c(size, 0.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& v : c.data()) {
    const int r = rand_int(g, 0, 9);
    v = r == 0 ? 1.0 : r == 1 ? 0.0 : u(g);
  }
  return c;
}

}  // namespace testing_support
