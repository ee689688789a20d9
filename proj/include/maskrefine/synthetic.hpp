#pragma once

// Deterministic driving-like scenes for benchmarks and smoke tests: a dense
// pseudo-label, a set of overlapping instance masks, and a confidence map.
// Class ids follow the Cityscapes train-id catalog.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "maskrefine/raster.hpp"
#include "maskrefine/registry.hpp"

namespace maskrefine::synthetic {

struct Scene {
  LabelMap uda;
  MaskSet masks;
  ConfidenceMap conf;
};

namespace detail {

struct Rect {
  int x0, y0, x1, y1;  // half-open
};

inline void fill(LabelMap& lm, Rect r, ClassId id) {
  r.x0 = std::max(r.x0, 0);
  r.y0 = std::max(r.y0, 0);
  r.x1 = std::min(r.x1, lm.width());
  r.y1 = std::min(r.y1, lm.height());
  for (int y = r.y0; y < r.y1; ++y)
    for (int x = r.x0; x < r.x1; ++x) lm.at(x, y) = id;
}

inline BinaryMask rect_mask(Size size, Rect r) {
  r.x0 = std::clamp(r.x0, 0, size.width - 1);
  r.x1 = std::clamp(r.x1, r.x0 + 1, size.width);
  r.y0 = std::clamp(r.y0, 0, size.height - 1);
  r.y1 = std::clamp(r.y1, r.y0 + 1, size.height);
  std::vector<BinaryMask::Span> spans;
  for (int y = r.y0; y < r.y1; ++y) {
    const auto row = static_cast<std::uint32_t>(y) * size.width;
    spans.push_back({row + static_cast<std::uint32_t>(r.x0),
                     row + static_cast<std::uint32_t>(r.x1)});
  }
  return BinaryMask::from_spans(size, std::move(spans));
}

inline int uniform(std::mt19937_64& g, int lo, int hi) {  // inclusive
  return lo + static_cast<int>(g() % static_cast<std::uint64_t>(hi - lo + 1));
}

}  // namespace detail

/// Builds a scene with exactly `num_masks` masks (at least 1).
inline Scene make_scene(Size size, std::size_t num_masks, std::uint64_t seed) {
  using detail::Rect;
  using detail::uniform;
  std::mt19937_64 g(seed);
  const int W = size.width, H = size.height;
  enum : ClassId {
    road = 0, sidewalk, building, wall, fence, pole, light, sign, vegetation,
    terrain, sky, person, rider, car
  };

  Scene s{LabelMap(size, sky), MaskSet(size, {}), ConfidenceMap(size, 1.0)};
  detail::fill(s.uda, {0, H * 35 / 100, W, H * 60 / 100}, building);
  detail::fill(s.uda, {0, H * 35 / 100, W / 6, H * 60 / 100}, vegetation);
  detail::fill(s.uda, {0, H * 60 / 100, W, H}, sidewalk);
  detail::fill(s.uda, {W / 5, H * 60 / 100, W * 4 / 5, H}, road);
  for (int k = 0; k < 6; ++k) {
    const int x = uniform(g, 0, W - 8);
    detail::fill(s.uda, {x, H * 30 / 100, x + std::max(2, W / 200), H * 70 / 100}, pole);
    detail::fill(s.uda, {x - 6, H * 30 / 100, x + 8, H * 34 / 100}, sign);
  }
  for (int k = 0; k < 5; ++k) {
    const int x = uniform(g, W / 5, W * 3 / 5);
    const int y = uniform(g, H * 62 / 100, H * 85 / 100);
    detail::fill(s.uda, {x, y, x + W / 12, y + H / 12}, car);
  }

  // Big region masks first, then object-sized boxes with log-uniform area.
  std::vector<Rect> rects = {
      {W / 5, H * 60 / 100, W * 4 / 5, H},
      {0, 0, W, H * 35 / 100},
      {0, H * 35 / 100, W, H * 60 / 100},
      {0, H * 60 / 100, W / 5, H},
  };
  std::uniform_real_distribution<double> logside(std::log(4.0), std::log(W / 4.0));
  while (rects.size() < std::max<std::size_t>(num_masks, 1)) {
    const int w = static_cast<int>(std::exp(logside(g)));
    const int h = std::max(2, static_cast<int>(std::exp(logside(g)) * H / W));
    const int x = uniform(g, 0, std::max(0, W - w));
    const int y = uniform(g, 0, std::max(0, H - h));
    rects.push_back({x, y, x + w, y + h});
  }
  rects.resize(std::max<std::size_t>(num_masks, 1));
  for (const auto& r : rects) s.masks.push_back(detail::rect_mask(size, r));

  std::uniform_real_distribution<double> c(0.8, 1.0);
  for (auto& v : s.conf.data()) v = c(g);
  return s;
}

}  // namespace maskrefine::synthetic
