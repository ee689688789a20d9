#pragma once

// Hand-built scenes for the three refinement mechanisms, on the Cityscapes
// catalog. Shared by the acceptance suite and the golden-file generator.

#include <vector>

#include "maskrefine/maskrefine.hpp"
#include "reference.hpp"

namespace fixtures {

using namespace maskrefine;

enum : ClassId {
  road = 0, sidewalk = 1, building = 2, pole = 5, sign = 7,
};

struct Scene {
  Size size;
  LabelMap uda;
  std::vector<ref::Bitmap> masks;
  ConfidenceMap conf;
};

inline ref::Bitmap box(Size s, int x0, int y0, int x1, int y1) {  // inclusive
  ref::Bitmap b(s.pixels(), 0);
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) b[y * s.width + x] = 1;
  return b;
}

inline void fill(LabelMap& lm, int x0, int y0, int x1, int y1, ClassId id) {
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) lm.at(x, y) = id;
}

/// A thin pole that the dense label only half-covers, inside a building.
/// The pole mask votes building 14 : pole 10, so majority says building while
/// the area-ratio rule (10/14 > 0.2) says pole.
inline Scene small_pole() {
  const Size s{16, 16};
  Scene sc{s, LabelMap(s, building), {}, ConfidenceMap(s, 1.0)};
  fill(sc.uda, 7, 4, 7, 13, pole);
  sc.masks.push_back(box(s, 0, 0, 15, 15));
  sc.masks.push_back(box(s, 7, 2, 8, 13));
  return sc;
}

/// The lower half is read as sidewalk except a road strip at the bottom.
/// A rank-2 central mask votes sidewalk and sits in the road region, so it
/// becomes road; flanking masks (outside the region) and a small rank-5
/// mask in the middle stay sidewalk.
inline Scene road_sidewalk() {
  const Size s{32, 32};
  Scene sc{s, LabelMap(s, building), {}, ConfidenceMap(s, 1.0)};
  fill(sc.uda, 0, 16, 31, 31, sidewalk);
  fill(sc.uda, 8, 28, 23, 31, road);
  sc.masks.push_back(box(s, 0, 0, 31, 15));    // 512, building
  sc.masks.push_back(box(s, 8, 16, 23, 31));   // 256, sidewalk 192 : road 64
  sc.masks.push_back(box(s, 0, 16, 7, 31));    // 128, left sidewalk
  sc.masks.push_back(box(s, 24, 16, 31, 31));  // 128, right sidewalk
  sc.masks.push_back(box(s, 14, 20, 17, 23));  // 16, rank 5
  return sc;
}

/// One coarse mask swallows a pole and the sign mounted on it; it is voted
/// pole. Fusion 3 hands confident sign pixels back to sign (sign -> pole is a
/// similar pair); the sign's left column is below the threshold and stays pole.
inline Scene pole_sign_merge() {
  const Size s{16, 16};
  Scene sc{s, LabelMap(s, building), {}, ConfidenceMap(s, 0.995)};
  fill(sc.uda, 7, 4, 8, 15, pole);
  fill(sc.uda, 5, 1, 10, 3, sign);
  sc.masks.push_back(box(s, 0, 0, 15, 15));
  ref::Bitmap merged = box(s, 7, 4, 8, 15);
  const ref::Bitmap head = box(s, 5, 1, 10, 3);
  for (std::size_t p = 0; p < merged.size(); ++p) merged[p] |= head[p];
  sc.masks.push_back(merged);
  for (int y = 1; y <= 3; ++y) sc.conf.at(5, y) = 0.98;
  return sc;
}

}  // namespace fixtures
