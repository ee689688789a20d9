#pragma once

// Raster value types: label maps, run-length binary masks, confidence maps
// and RGB images. All are plain values; I/O lives in io.hpp.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "maskrefine/error.hpp"
#include "maskrefine/registry.hpp"

namespace maskrefine {

struct Size {
  int width = 0;
  int height = 0;
  std::size_t pixels() const noexcept {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  friend bool operator==(const Size&, const Size&) = default;
};

inline std::string to_string(Size s) {
  return std::to_string(s.width) + "x" + std::to_string(s.height);
}

inline void require_same_size(Size a, Size b, const char* what) {
  if (a != b)
    throw DimensionError(std::string(what) + ": size " + to_string(a) +
                         " does not match " + to_string(b));
}

inline void require_valid_size(Size s) {
  if (s.width <= 0 || s.height <= 0)
    throw DimensionError("raster dimensions must be positive, got " +
                         to_string(s));
  if (s.pixels() > (std::size_t{1} << 31))
    throw DimensionError("raster too large: " + to_string(s));
}

/// Row-major grid of one value per pixel.
template <typename T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;
  Grid(Size size, T fill) : size_(size), data_(size.pixels(), fill) {}
  Grid(Size size, std::vector<T> data) : size_(size), data_(std::move(data)) {
    if (data_.size() != size_.pixels())
      throw DimensionError("pixel buffer length " +
                           std::to_string(data_.size()) + " != " +
                           to_string(size_));
  }

  Size size() const noexcept { return size_; }
  int width() const noexcept { return size_.width; }
  int height() const noexcept { return size_.height; }
  std::size_t pixels() const noexcept { return data_.size(); }

  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }
  T& at(int x, int y) { return data_[index(x, y)]; }
  const T& at(int x, int y) const { return data_[index(x, y)]; }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * size_.width + x;
  }
  Size size_;
  std::vector<T> data_;
};

/// Class id per pixel; 255 is void.
using LabelMap = Grid<ClassId>;

/// Per-pixel confidence in [0, 1].
using ConfidenceMap = Grid<double>;

using ImageRaster = Grid<Rgb>;

/// Throws ValueError if any pixel is neither void nor a registry class.
inline void validate_labels(const LabelMap& lm, const ClassRegistry& reg,
                            const std::string& what = "label map") {
  for (std::size_t i = 0; i < lm.pixels(); ++i) {
    const ClassId v = lm[i];
    if (v != reg.void_id && !reg.is_class(v))
      throw ValueError(what + ": pixel (" + std::to_string(i % lm.width()) +
                       ", " + std::to_string(i / lm.width()) +
                       ") has unknown class id " + std::to_string(v));
  }
}

inline void validate_confidence(const ConfidenceMap& conf) {
  for (double v : conf.data())
    if (!(v >= 0.0 && v <= 1.0))
      throw ValueError("confidence value outside [0, 1]");
}

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Binary instance mask held as row-major run lengths alternating
/// zero-runs and one-runs, starting with a (possibly empty) zero-run. The runs
/// sum to width * height. Area and centroid are computed once on construction.
class BinaryMask {
 public:
  /// A set-pixel interval [begin, end) in row-major pixel indices.
  struct Span {
    std::uint32_t begin;
    std::uint32_t end;
  };

  BinaryMask() = default;

  static BinaryMask from_rle(Size size, std::span<const std::uint32_t> runs) {
    require_valid_size(size);
    BinaryMask m;
    m.size_ = size;
    std::uint64_t pos = 0;
    const std::uint64_t total = size.pixels();
    for (std::size_t k = 0; k < runs.size(); ++k) {
      const std::uint64_t end = pos + runs[k];
      if (end > total)
        throw ValueError("RLE runs sum past " + std::to_string(total) +
                         " pixels (" + to_string(size) + ")");
      if ((k % 2 == 1) && runs[k] > 0) m.spans_.push_back(
          {static_cast<std::uint32_t>(pos), static_cast<std::uint32_t>(end)});
      pos = end;
    }
    if (pos != total)
      throw ValueError("RLE runs sum to " + std::to_string(pos) +
                       ", expected " + std::to_string(total));
    m.coalesce();
    m.finish();
    return m;
  }

  /// `bits` is row-major, nonzero = set.
  template <typename T>
  static BinaryMask from_bitmap(Size size, std::span<const T> bits) {
    require_valid_size(size);
    if (bits.size() != size.pixels())
      throw DimensionError("bitmap length does not match " + to_string(size));
    BinaryMask m;
    m.size_ = size;
    const auto n = static_cast<std::uint32_t>(bits.size());
    std::uint32_t i = 0;
    while (i < n) {
      while (i < n && !bits[i]) ++i;
      if (i == n) break;
      const std::uint32_t b = i;
      while (i < n && bits[i]) ++i;
      m.spans_.push_back({b, i});
    }
    m.finish();
    return m;
  }

  static BinaryMask from_spans(Size size, std::vector<Span> spans) {
    require_valid_size(size);
    BinaryMask m;
    m.size_ = size;
    std::uint32_t prev = 0;
    for (const auto& s : spans) {
      if (s.begin < prev || s.end < s.begin || s.end > size.pixels())
        throw ValueError("spans must be sorted, disjoint and in range");
      prev = s.end;
    }
    m.spans_ = std::move(spans);
    std::erase_if(m.spans_, [](const Span& s) { return s.begin == s.end; });
    m.coalesce();
    m.finish();
    return m;
  }

  Size size() const noexcept { return size_; }
  int width() const noexcept { return size_.width; }
  int height() const noexcept { return size_.height; }
  std::uint64_t area() const noexcept { return area_; }
  bool empty() const noexcept { return area_ == 0; }

  /// Mean set-pixel coordinate. Throws for an empty mask.
  Point centroid() const {
    if (area_ == 0) throw ValueError("centroid of an empty mask is undefined");
    return centroid_;
  }

  std::span<const Span> spans() const noexcept { return spans_; }

  /// Alternating zero/one run lengths starting with a zero-run.
  std::vector<std::uint32_t> rle() const {
    std::vector<std::uint32_t> runs;
    runs.reserve(spans_.size() * 2 + 1);
    std::uint32_t pos = 0;
    for (const auto& s : spans_) {
      runs.push_back(s.begin - pos);
      runs.push_back(s.end - s.begin);
      pos = s.end;
    }
    const auto total = static_cast<std::uint32_t>(size_.pixels());
    if (pos < total || runs.empty()) runs.push_back(total - pos);
    return runs;
  }

  std::vector<std::uint8_t> to_bitmap() const {
    std::vector<std::uint8_t> bits(size_.pixels(), 0);
    for (const auto& s : spans_)
      std::fill(bits.begin() + s.begin, bits.begin() + s.end, 1);
    return bits;
  }

  bool test(int x, int y) const noexcept {
    const auto i = static_cast<std::uint32_t>(y * size_.width + x);
    auto it = std::upper_bound(
        spans_.begin(), spans_.end(), i,
        [](std::uint32_t v, const Span& s) { return v < s.begin; });
    return it != spans_.begin() && i < std::prev(it)->end;
  }

  friend bool operator==(const BinaryMask& a, const BinaryMask& b) {
    return a.size_ == b.size_ && a.area_ == b.area_ &&
           std::equal(a.spans_.begin(), a.spans_.end(), b.spans_.begin(),
                      b.spans_.end(), [](const Span& l, const Span& r) {
                        return l.begin == r.begin && l.end == r.end;
                      });
  }

 private:
  void coalesce() {
    std::vector<Span> out;
    out.reserve(spans_.size());
    for (const auto& s : spans_) {
      if (!out.empty() && out.back().end == s.begin)
        out.back().end = s.end;
      else
        out.push_back(s);
    }
    spans_ = std::move(out);
  }

  // Sums of x and y over each span, split at row boundaries.
  void finish() {
    area_ = 0;
    long double sx = 0, sy = 0;
    const std::uint64_t w = size_.width;
    for (const auto& s : spans_) {
      std::uint64_t p = s.begin;
      while (p < s.end) {
        const std::uint64_t row = p / w;
        const std::uint64_t row_end = std::min<std::uint64_t>(s.end, (row + 1) * w);
        const std::uint64_t x0 = p - row * w;
        const std::uint64_t x1 = row_end - row * w;  // exclusive
        const std::uint64_t n = x1 - x0;
        area_ += n;
        sx += static_cast<long double>((x0 + x1 - 1) * n) / 2;
        sy += static_cast<long double>(row) * n;
        p = row_end;
      }
    }
    if (area_ > 0)
      centroid_ = {static_cast<double>(sx / area_),
                   static_cast<double>(sy / area_)};
  }

  Size size_;
  std::vector<Span> spans_;
  std::uint64_t area_ = 0;
  Point centroid_;
};

/// Ordered instance masks of a common size. Masks may overlap.
class MaskSet {
 public:
  MaskSet() = default;
  MaskSet(Size size, std::vector<BinaryMask> masks) : size_(size) {
    for (auto& m : masks) push_back(std::move(m));
  }

  void push_back(BinaryMask m) {
    if (masks_.empty() && size_ == Size{}) size_ = m.size();
    require_same_size(m.size(), size_, "mask set");
    masks_.push_back(std::move(m));
  }

  Size size() const noexcept { return size_; }
  std::size_t count() const noexcept { return masks_.size(); }
  bool empty() const noexcept { return masks_.empty(); }
  const BinaryMask& operator[](std::size_t i) const { return masks_[i]; }
  auto begin() const noexcept { return masks_.begin(); }
  auto end() const noexcept { return masks_.end(); }

 private:
  Size size_;
  std::vector<BinaryMask> masks_;
};

/// Indices of `ms` ordered by descending area, ties by ascending input index.
inline std::vector<std::size_t> area_order(const MaskSet& ms) {
  std::vector<std::size_t> order(ms.count());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ms[a].area() > ms[b].area();
  });
  return order;
}

inline MaskSet sort_by_area(const MaskSet& ms) {
  MaskSet out;
  for (std::size_t i : area_order(ms)) out.push_back(ms[i]);
  if (ms.empty()) return ms;
  return out;
}

}  // namespace maskrefine
