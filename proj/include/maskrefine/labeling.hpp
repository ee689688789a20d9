#pragma once

// Class assignment for unlabeled instance masks.
//
// Two labelers are provided: plain majority voting over the dense pseudo-label,
// and semantic-guided mask labeling (SGML), which prefers a small-area class
// hiding under a large-area majority when its share is high enough, and fixes
// large "sidewalk" masks in the lower-center of the frame to road.

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "maskrefine/error.hpp"
#include "maskrefine/raster.hpp"
#include "maskrefine/registry.hpp"

namespace maskrefine {

/// Classes under a mask, most frequent first; ties by ascending id. Void is
/// never counted.
struct MaskVote {
  std::vector<ClassId> ids;
  std::vector<std::uint64_t> counts;

  bool empty() const noexcept { return ids.empty(); }
};

inline MaskVote vote(const BinaryMask& mask, const LabelMap& uda,
                     ClassId void_id = kVoid) {
  require_same_size(mask.size(), uda.size(), "vote");
  std::array<std::uint64_t, 256> hist{};
  const auto px = uda.data();
  for (const auto& s : mask.spans())
    for (std::uint32_t i = s.begin; i < s.end; ++i) ++hist[px[i]];
  hist[void_id] = 0;

  MaskVote v;
  for (int id = 0; id < 256; ++id)
    if (hist[id]) v.ids.push_back(static_cast<ClassId>(id));
  std::stable_sort(v.ids.begin(), v.ids.end(),
                   [&](ClassId a, ClassId b) { return hist[a] > hist[b]; });
  v.counts.reserve(v.ids.size());
  for (ClassId id : v.ids) v.counts.push_back(hist[id]);
  return v;
}

inline ClassId majority_label(const MaskVote& v, ClassId void_id = kVoid) {
  return v.empty() ? void_id : v.ids[0];
}

inline ClassId majority_label(const BinaryMask& mask, const LabelMap& uda,
                              ClassId void_id = kVoid) {
  return majority_label(vote(mask, uda, void_id), void_id);
}

/// The area-ratio rule: when the top class is large-area, the runner-up is
/// small-area, and runner-up / top exceeds alpha, the runner-up wins.
inline ClassId sgml_label(const MaskVote& v, const ClassRegistry& reg) {
  if (v.empty()) return reg.void_id;
  if (v.ids.size() >= 2 && reg.is_large(v.ids[0]) && reg.is_small(v.ids[1]) &&
      static_cast<double>(v.counts[1]) >
          reg.alpha * static_cast<double>(v.counts[0]))
    return v.ids[1];
  return v.ids[0];
}

inline ClassId sgml_label(const BinaryMask& mask, const LabelMap& uda,
                          const ClassRegistry& reg) {
  return sgml_label(vote(mask, uda, reg.void_id), reg);
}

struct SgmlOptions {
  bool road_assumption = true;
};

namespace detail {

inline void check_paint_inputs(const MaskSet& masks, const LabelMap& uda) {
  if (!masks.empty()) require_same_size(masks.size(), uda.size(), "paint");
}

inline void paint(LabelMap& out, const BinaryMask& m, ClassId id) {
  auto px = out.data();
  for (const auto& s : m.spans())
    std::fill(px.begin() + s.begin, px.begin() + s.end, id);
}

}  // namespace detail

/// SGML pseudo-label: masks are painted largest first so smaller masks
/// overwrite larger ones. Pixels under no mask, and masks over pure void,
/// stay void.
inline LabelMap paint_sgml(const MaskSet& masks, const LabelMap& uda,
                           const ClassRegistry& reg, SgmlOptions opts = {}) {
  detail::check_paint_inputs(masks, uda);
  LabelMap out(uda.size(), reg.void_id);
  const auto order = area_order(masks);
  for (std::size_t rank = 1; rank <= order.size(); ++rank) {
    const BinaryMask& m = masks[order[rank - 1]];
    const MaskVote v = vote(m, uda, reg.void_id);
    if (v.empty()) continue;
    ClassId id = sgml_label(v, reg);
    if (opts.road_assumption && rank <= static_cast<std::size_t>(reg.road_region.top_k) &&
        id == reg.sidewalk_id) {
      const Point c = m.centroid();
      if (reg.road_region.contains(c.x, c.y, uda.width(), uda.height()))
        id = reg.road_id;
    }
    detail::paint(out, m, id);
  }
  return out;
}

/// Majority-voting baseline with the same paint order and no road rule.
inline LabelMap paint_majority(const MaskSet& masks, const LabelMap& uda,
                               const ClassRegistry& reg) {
  detail::check_paint_inputs(masks, uda);
  LabelMap out(uda.size(), reg.void_id);
  for (std::size_t i : area_order(masks)) {
    const ClassId id = majority_label(masks[i], uda, reg.void_id);
    if (id != reg.void_id) detail::paint(out, masks[i], id);
  }
  return out;
}

}  // namespace maskrefine
