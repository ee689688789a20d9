#pragma once

// File formats:
//   label map    8-bit single-channel PNG, pixel = class id, 255 = void
//   confidence   16-bit single-channel PNG, value v -> v / 65535
//   image        8-bit RGB PNG
//   masks        directory of single-channel PNGs (pixel > 0 is set), or a
//                JSON file {"width", "height", "masks": [{"rle": [...], "id"}]}

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "maskrefine/error.hpp"
#include "maskrefine/png.hpp"
#include "maskrefine/raster.hpp"

namespace maskrefine {

inline LabelMap load_label_png(const std::string& path) {
  auto img = png::read(path);
  if (img.channels != 1)
    throw IoError(path + ": label map must be single-channel, got " +
                  std::to_string(img.channels) + " channels");
  if (img.file_depth != 8)
    throw IoError(path + ": label map must be 8-bit, got " +
                  std::to_string(img.file_depth) + "-bit");
  return LabelMap(img.size, std::move(img.narrow));
}

inline void save_label_png(const LabelMap& lm, const std::string& path) {
  png::write(path, lm.size(), 1, 8, lm.data().data());
}

inline ConfidenceMap load_confidence(const std::string& path) {
  auto img = png::read(path);
  if (img.channels != 1 || img.palette)
    throw IoError(path + ": confidence map must be single-channel grayscale");
  if (img.file_depth != 16)
    throw IoError(path + ": confidence map must be 16-bit, got " +
                  std::to_string(img.file_depth) + "-bit");
  std::vector<double> values(img.wide.size());
  std::transform(img.wide.begin(), img.wide.end(), values.begin(),
                 [](std::uint16_t v) { return v / 65535.0; });
  return ConfidenceMap(img.size, std::move(values));
}

/// Quantizes to the nearest 1/65535 step.
inline void save_confidence(const ConfidenceMap& conf, const std::string& path) {
  std::vector<std::uint16_t> q(conf.pixels());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double v = std::clamp(conf[i], 0.0, 1.0);
    q[i] = static_cast<std::uint16_t>(std::lround(v * 65535.0));
  }
  png::write(path, conf.size(), 1, 16, q.data());
}

inline ImageRaster load_image_png(const std::string& path) {
  auto img = png::read(path);
  if (img.bit_depth != 8 || img.palette || (img.channels != 3 && img.channels != 4 &&
                                             img.channels != 1))
    throw IoError(path + ": expected an 8-bit gray, RGB or RGBA image");
  std::vector<Rgb> px(img.size.pixels());
  const int c = img.channels;
  for (std::size_t i = 0; i < px.size(); ++i) {
    const auto* s = &img.narrow[i * c];
    px[i] = c == 1 ? Rgb{s[0], s[0], s[0]} : Rgb{s[0], s[1], s[2]};
  }
  return ImageRaster(img.size, std::move(px));
}

inline void save_image_png(const ImageRaster& im, const std::string& path) {
  static_assert(sizeof(Rgb) == 3);
  png::write(path, im.size(), 3, 8, im.data().data());
}

inline BinaryMask load_mask_png(const std::string& path) {
  auto img = png::read(path);
  if (img.channels != 1)
    throw IoError(path + ": mask must be single-channel");
  if (img.bit_depth == 16) {
    std::vector<std::uint8_t> bits(img.wide.size());
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = img.wide[i] != 0;
    return BinaryMask::from_bitmap<std::uint8_t>(img.size, bits);
  }
  return BinaryMask::from_bitmap<std::uint8_t>(img.size, img.narrow);
}

inline void save_mask_png(const BinaryMask& m, const std::string& path) {
  auto bits = m.to_bitmap();
  for (auto& b : bits) b = b ? 255 : 0;
  png::write(path, m.size(), 1, 8, bits.data());
}

namespace detail {

inline void reject_empty(const MaskSet& ms, std::size_t index,
                         const std::string& where) {
  if (ms[index].empty())
    throw ValueError(where + ": mask " + std::to_string(index) +
                     " is empty (area 0)");
}

}  // namespace detail

inline MaskSet masks_from_json(const nlohmann::json& j,
                               const std::string& where = "masks") {
  try {
    const Size size{j.at("width").get<int>(), j.at("height").get<int>()};
    require_valid_size(size);
    MaskSet ms(size, {});
    const auto& arr = j.at("masks");
    if (!arr.is_array()) throw IoError(where + ": `masks` must be an array");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const auto& runs_json = arr[k].at("rle");
      std::vector<std::uint32_t> runs;
      runs.reserve(runs_json.size());
      for (const auto& r : runs_json) {
        if (!r.is_number_integer() || r.get<long long>() < 0 ||
            r.get<long long>() > 0xFFFFFFFFLL)
          throw ValueError(where + ": mask " + std::to_string(k) +
                           ": runs must be non-negative integers");
        runs.push_back(r.get<std::uint32_t>());
      }
      try {
        ms.push_back(BinaryMask::from_rle(size, runs));
      } catch (const ValueError& e) {
        throw ValueError(where + ": mask " + std::to_string(k) + ": " + e.what());
      }
      detail::reject_empty(ms, k, where);
    }
    return ms;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(where + ": malformed mask JSON: " + e.what());
  }
}

inline nlohmann::json masks_to_json(const MaskSet& ms,
                                    const std::vector<std::string>& ids = {}) {
  nlohmann::json j;
  j["width"] = ms.size().width;
  j["height"] = ms.size().height;
  j["masks"] = nlohmann::json::array();
  for (std::size_t k = 0; k < ms.count(); ++k) {
    nlohmann::json m;
    m["rle"] = ms[k].rle();
    if (k < ids.size()) m["id"] = ids[k];
    j["masks"].push_back(std::move(m));
  }
  return j;
}

inline void save_masks_json(const MaskSet& ms, const std::string& path,
                            const std::vector<std::string>& ids = {}) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << masks_to_json(ms, ids).dump() << '\n';
  if (!out) throw IoError("write failed for " + path);
}

/// Loads either a mask JSON file or a directory of `*.png` masks (sorted by
/// file name). Input order is preserved; empty masks are rejected.
inline MaskSet load_masks(const std::string& path) {
  namespace fs = std::filesystem;
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(path))
      if (e.is_regular_file() && e.path().extension() == ".png")
        files.push_back(e.path());
    std::sort(files.begin(), files.end());
    MaskSet ms;
    for (std::size_t k = 0; k < files.size(); ++k) {
      auto m = load_mask_png(files[k].string());
      if (k > 0 && m.size() != ms.size())
        throw DimensionError(path + ": mask " + std::to_string(k) + " (" +
                             files[k].filename().string() + ") is " +
                             to_string(m.size()) + ", expected " +
                             to_string(ms.size()));
      ms.push_back(std::move(m));
      detail::reject_empty(ms, k, path);
    }
    return ms;
  }
  std::ifstream in(path);
  if (!in) throw IoError("cannot open masks " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(path + ": " + e.what());
  }
  return masks_from_json(j, path);
}

}  // namespace maskrefine
