#pragma once

// Fusion of the dense pseudo-label (uda) with the mask-painted label (sam).
//
//   fuse1  sam where labeled, uda elsewhere
//   fuse2  uda, overridden by sam wherever sam is a small-area class
//   fuse3  fuse1, then pixels where uda says class i, fuse1 says a class j
//          with (i, j) similar, and confidence > beta revert to i

#include <cstddef>
#include <string>

#include "maskrefine/error.hpp"
#include "maskrefine/raster.hpp"
#include "maskrefine/registry.hpp"

namespace maskrefine {

inline void require_dense(const LabelMap& lm, ClassId void_id, const char* what) {
  for (std::size_t i = 0; i < lm.pixels(); ++i)
    if (lm[i] == void_id)
      throw ValueError(std::string(what) + " contains void at pixel (" +
                       std::to_string(i % lm.width()) + ", " +
                       std::to_string(i / lm.width()) + ")");
}

inline LabelMap fuse1(const LabelMap& sam, const LabelMap& uda,
                      ClassId void_id = kVoid) {
  require_same_size(sam.size(), uda.size(), "fuse1");
  require_dense(uda, void_id, "fuse1: uda pseudo-label");
  LabelMap out = sam;
  for (std::size_t i = 0; i < out.pixels(); ++i)
    if (out[i] == void_id) out[i] = uda[i];
  return out;
}

inline LabelMap fuse2(const LabelMap& uda, const LabelMap& sam,
                      const ClassRegistry& reg) {
  require_same_size(sam.size(), uda.size(), "fuse2");
  LabelMap out = uda;
  for (std::size_t i = 0; i < out.pixels(); ++i)
    if (reg.is_small(sam[i])) out[i] = sam[i];
  return out;
}

/// `fused1` is the fuse1 output. Each pixel is claimed by at most one class
/// (its uda label), so the result does not depend on class iteration order.
inline LabelMap fuse3(const LabelMap& fused1, const LabelMap& uda,
                      const ConfidenceMap& conf, const ClassRegistry& reg) {
  require_same_size(fused1.size(), uda.size(), "fuse3");
  require_same_size(conf.size(), uda.size(), "fuse3 confidence");
  const double beta = reg.beta;
  LabelMap out = fused1;
  for (std::size_t i = 0; i < out.pixels(); ++i) {
    const ClassId ci = uda[i];
    if (ci != reg.void_id && reg.similarity.contains(ci, fused1[i]) &&
        conf[i] > beta)
      out[i] = ci;
  }
  return out;
}

}  // namespace maskrefine
