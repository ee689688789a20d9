#pragma once

#include <algorithm>
#include <array>
#include <cstdint>

#include "maskrefine/error.hpp"
#include "maskrefine/raster.hpp"
#include "maskrefine/registry.hpp"

namespace maskrefine {

inline constexpr Rgb kMaskBackground{128, 128, 128};

/// Palette color per pixel; void and unknown ids render black.
inline ImageRaster render_label(const LabelMap& lm, const ClassRegistry& reg) {
  std::array<Rgb, 256> lut{};
  for (const auto& c : reg.classes) lut[c.id] = c.color;
  lut[reg.void_id] = {0, 0, 0};
  ImageRaster out(lm.size(), Rgb{});
  for (std::size_t i = 0; i < lm.pixels(); ++i) out[i] = lut[lm[i]];
  return out;
}

/// splitmix64 finalizer over the mask index. Channels are kept away from the
/// mid-gray background.
inline Rgb mask_tint(std::uint64_t index) {
  std::uint64_t z = index + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  auto ch = [&](int shift) {
    return static_cast<std::uint8_t>(32 + ((z >> shift) & 0xFF) * 192 / 255);
  };
  Rgb c{ch(0), ch(8), ch(16)};
  if (c == kMaskBackground) c.r = 32;
  return c;
}

/// Masks tinted by input index and drawn in paint order (largest first), so
/// overlaps show the smaller mask.
inline ImageRaster render_masks(const MaskSet& ms) {
  if (ms.empty()) throw ValueError("render_masks: empty mask set");
  ImageRaster out(ms.size(), kMaskBackground);
  auto px = out.data();
  for (std::size_t i : area_order(ms)) {
    const Rgb tint = mask_tint(i);
    for (const auto& s : ms[i].spans())
      std::fill(px.begin() + s.begin, px.begin() + s.end, tint);
  }
  return out;
}

/// out = alpha * top + (1 - alpha) * base, rounded.
inline ImageRaster blend(const ImageRaster& top, const ImageRaster& base, double alpha) {
  require_same_size(top.size(), base.size(), "blend");
  alpha = std::clamp(alpha, 0.0, 1.0);
  ImageRaster out(top.size(), Rgb{});
  auto mix = [&](std::uint8_t a, std::uint8_t b) {
    return static_cast<std::uint8_t>(alpha * a + (1.0 - alpha) * b + 0.5);
  };
  for (std::size_t i = 0; i < out.pixels(); ++i)
    out[i] = {mix(top[i].r, base[i].r), mix(top[i].g, base[i].g),
              mix(top[i].b, base[i].b)};
  return out;
}

}  // namespace maskrefine
