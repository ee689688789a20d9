#pragma once

// Class-level cross-domain mixing: pick half of the classes present in the
// source label map, then copy those pixels (image and label) onto the target.
//
// Selection uses std::mt19937_64, whose output sequence is fixed by the C++
// standard, with a hand-rolled unbiased bounded draw and Fisher-Yates shuffle
// so results match on every platform (std::uniform_int_distribution and
// std::shuffle are implementation-defined).

#include <array>
#include <cstdint>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "maskrefine/error.hpp"
#include "maskrefine/raster.hpp"
#include "maskrefine/registry.hpp"

namespace maskrefine {

struct MixMask {
  Size size;
  std::vector<std::uint8_t> data;  // 1 where the pixel comes from the source
  std::set<ClassId> selected_classes;

  bool operator[](std::size_t i) const noexcept { return data[i] != 0; }
  friend bool operator==(const MixMask&, const MixMask&) = default;
};

/// Uniform integer in [0, bound) by rejection sampling.
inline std::uint64_t bounded_draw(std::mt19937_64& gen, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = gen();
    if (r >= threshold) return r % bound;
  }
}

/// Distinct non-void classes in `y_s`, ascending.
inline std::vector<ClassId> classes_present(const LabelMap& y_s,
                                            ClassId void_id = kVoid) {
  std::array<bool, 256> seen{};
  for (ClassId v : y_s.data()) seen[v] = true;
  seen[void_id] = false;
  std::vector<ClassId> out;
  for (int v = 0; v < 256; ++v)
    if (seen[v]) out.push_back(static_cast<ClassId>(v));
  return out;
}

inline MixMask classmix_select(const LabelMap& y_s, std::uint64_t seed,
                               ClassId void_id = kVoid) {
  auto pool = classes_present(y_s, void_id);
  if (pool.empty()) throw ValueError("classmix: source label map is all void");
  const std::size_t k = pool.size();
  const std::size_t take = (k + 1) / 2;

  std::mt19937_64 gen(seed);
  // Partial Fisher-Yates: the first `take` slots become a uniform sample.
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + bounded_draw(gen, k - i);
    std::swap(pool[i], pool[j]);
  }

  MixMask m;
  m.size = y_s.size();
  m.selected_classes.insert(pool.begin(), pool.begin() + take);
  std::array<bool, 256> sel{};
  for (ClassId c : m.selected_classes) sel[c] = true;
  m.data.resize(y_s.pixels());
  for (std::size_t i = 0; i < y_s.pixels(); ++i) m.data[i] = sel[y_s[i]];
  return m;
}

struct MixedPair {
  ImageRaster image;
  LabelMap labels;
};

inline MixedPair classmix_apply(const MixMask& m, const ImageRaster& x_s,
                                const ImageRaster& x_t, const LabelMap& y_s,
                                const LabelMap& y_t) {
  require_same_size(x_s.size(), m.size, "classmix source image");
  require_same_size(x_t.size(), m.size, "classmix target image");
  require_same_size(y_s.size(), m.size, "classmix source labels");
  require_same_size(y_t.size(), m.size, "classmix target labels");
  MixedPair out{x_t, y_t};
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    if (m[i]) {
      out.image[i] = x_s[i];
      out.labels[i] = y_s[i];
    }
  }
  return out;
}

}  // namespace maskrefine
