#pragma once

// Per-class area statistics over source ground truth, used to pick the
// small-area and large-area class sets, plus a pixel-share rule for rare
// classes in target pseudo-labels.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "maskrefine/error.hpp"
#include "maskrefine/raster.hpp"
#include "maskrefine/registry.hpp"

namespace maskrefine {

struct ClassArea {
  std::uint64_t total_pixels = 0;
  std::uint64_t images_present = 0;

  /// Region-level mean: total pixels over images containing the class.
  std::optional<double> mean_area() const {
    if (images_present == 0) return std::nullopt;
    return static_cast<double>(total_pixels) / static_cast<double>(images_present);
  }
  friend bool operator==(const ClassArea&, const ClassArea&) = default;
};

struct ClassAreaStats {
  std::map<ClassId, ClassArea> per_class;  // every registry class has an entry
  std::uint64_t images = 0;
  std::uint64_t void_pixels = 0;

  bool present(ClassId id) const {
    auto it = per_class.find(id);
    return it != per_class.end() && it->second.images_present > 0;
  }

  /// Field-wise sum; used to combine partial results from parallel workers.
  ClassAreaStats& merge(const ClassAreaStats& other) {
    images += other.images;
    void_pixels += other.void_pixels;
    for (const auto& [id, a] : other.per_class) {
      auto& dst = per_class[id];
      dst.total_pixels += a.total_pixels;
      dst.images_present += a.images_present;
    }
    return *this;
  }
  friend bool operator==(const ClassAreaStats&, const ClassAreaStats&) = default;
};

inline ClassAreaStats empty_stats(const ClassRegistry& reg) {
  ClassAreaStats s;
  for (const auto& c : reg.classes) s.per_class[c.id] = {};
  return s;
}

inline ClassAreaStats accumulate_stats(std::span<const LabelMap> labels,
                                       const ClassRegistry& reg) {
  ClassAreaStats stats = empty_stats(reg);
  for (std::size_t n = 0; n < labels.size(); ++n) {
    std::array<std::uint64_t, 256> hist{};
    for (ClassId v : labels[n].data()) ++hist[v];
    for (int v = 0; v < 256; ++v) {
      if (hist[v] == 0 || v == reg.void_id) continue;
      if (!reg.is_class(static_cast<ClassId>(v)))
        throw ValueError("image " + std::to_string(n) +
                         ": label value " + std::to_string(v) +
                         " is not a registry class");
    }
    for (auto& [id, a] : stats.per_class) {
      if (hist[id] == 0) continue;
      a.total_pixels += hist[id];
      a.images_present += 1;
    }
    stats.void_pixels += hist[reg.void_id];
    ++stats.images;
  }
  return stats;
}

struct ClassSplit {
  std::set<ClassId> small;
  std::set<ClassId> large;
};

/// `small_count` classes with the smallest mean area and `large_count` with
/// the largest, drawn from present classes only. Ties go to the lower id.
inline ClassSplit suggest_class_split(const ClassAreaStats& stats,
                                      std::size_t small_count,
                                      std::size_t large_count) {
  std::vector<std::pair<double, ClassId>> present;
  for (const auto& [id, a] : stats.per_class)
    if (auto m = a.mean_area()) present.push_back({*m, id});
  if (small_count + large_count > present.size())
    throw ValueError("requested " + std::to_string(small_count) + " small + " +
                     std::to_string(large_count) + " large classes but only " +
                     std::to_string(present.size()) + " classes are present");

  std::sort(present.begin(), present.end());
  ClassSplit split;
  for (std::size_t k = 0; k < small_count; ++k) split.small.insert(present[k].second);

  std::vector<std::pair<double, ClassId>> rest(present.begin() + small_count,
                                               present.end());
  std::sort(rest.begin(), rest.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (std::size_t k = 0; k < large_count; ++k) split.large.insert(rest[k].second);
  return split;
}

inline constexpr double kDefaultRareThreshold = 0.005;

/// Classes whose share of all non-void pixels across `uda_labels` is positive
/// but below `fraction_threshold`. A suggestion only; the registry's small
/// set stays authoritative.
inline std::set<ClassId> rare_class_candidates(std::span<const LabelMap> uda_labels,
                                               const ClassRegistry& reg,
                                               double fraction_threshold = kDefaultRareThreshold) {
  if (uda_labels.empty()) throw ValueError("no pseudo-labels to scan");
  if (!(fraction_threshold > 0.0 && fraction_threshold < 1.0))
    throw ValueError("fraction_threshold must lie in (0, 1)");
  std::array<std::uint64_t, 256> hist{};
  for (const auto& lm : uda_labels)
    for (ClassId v : lm.data()) ++hist[v];
  std::uint64_t total = 0;
  for (const auto& c : reg.classes) total += hist[c.id];
  std::set<ClassId> out;
  if (total == 0) return out;
  for (const auto& c : reg.classes) {
    if (hist[c.id] == 0) continue;
    const double share = static_cast<double>(hist[c.id]) / static_cast<double>(total);
    if (share < fraction_threshold) out.insert(c.id);
  }
  return out;
}

}  // namespace maskrefine
