#pragma once

// Class catalog and per-dataset configuration consumed by labeling and fusion.

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "maskrefine/error.hpp"

namespace maskrefine {

using ClassId = std::uint8_t;

inline constexpr ClassId kVoid = 255;

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct ClassInfo {
  ClassId id = 0;
  std::string name;
  Rgb color;
  friend bool operator==(const ClassInfo&, const ClassInfo&) = default;
};

/// Directed 0/1 matrix over class ids. `contains(i, j)` means pixels that the
/// dense prediction calls `i` may have been absorbed into a mask labeled `j`.
/// (i, j) does not imply (j, i).
class SimilarityMatrix {
 public:
  SimilarityMatrix() { bits_.fill(0); }

  void insert(ClassId i, ClassId j) {
    bits_[index(i, j)] = 1;
    pairs_.insert({i, j});
  }
  bool contains(ClassId i, ClassId j) const noexcept {
    return bits_[index(i, j)] != 0;
  }
  const std::set<std::pair<ClassId, ClassId>>& pairs() const noexcept {
    return pairs_;
  }
  std::size_t size() const noexcept { return pairs_.size(); }

  friend bool operator==(const SimilarityMatrix& a, const SimilarityMatrix& b) {
    return a.pairs_ == b.pairs_;
  }

 private:
  static constexpr std::size_t index(ClassId i, ClassId j) noexcept {
    return static_cast<std::size_t>(i) * 256 + j;
  }
  std::array<std::uint8_t, 256 * 256> bits_;
  std::set<std::pair<ClassId, ClassId>> pairs_;
};

/// Image-relative box that a large "sidewalk" mask's centroid must fall in
/// to be relabeled as road. Bounds are inclusive fractions of width/height.
struct RoadRegion {
  double x_lo = 0.25;
  double x_hi = 0.75;
  double y_lo = 0.5;
  double y_hi = 1.0;
  int top_k = 3;

  bool contains(double cx, double cy, int width, int height) const noexcept {
    return cx >= x_lo * width && cx <= x_hi * width && cy >= y_lo * height &&
           cy <= y_hi * height;
  }
  friend bool operator==(const RoadRegion&, const RoadRegion&) = default;
};

inline RoadRegion default_road_region() { return RoadRegion{}; }

class ClassRegistry {
 public:
  std::vector<ClassInfo> classes;
  ClassId void_id = kVoid;
  std::set<ClassId> small_classes;
  std::set<ClassId> large_classes;
  SimilarityMatrix similarity;
  ClassId road_id = 0;
  ClassId sidewalk_id = 1;
  double alpha = 0.2;
  double beta = 0.99;
  RoadRegion road_region;

  /// Throws ConfigError naming the first violated invariant. Rebuilds the
  /// id lookup tables; call after mutating fields directly.
  void validate();

  bool is_class(ClassId id) const noexcept { return slot_[id] >= 0; }
  bool is_small(ClassId id) const noexcept { return small_[id]; }
  bool is_large(ClassId id) const noexcept { return large_[id]; }
  /// Position of `id` in `classes`, or -1.
  int slot(ClassId id) const noexcept { return slot_[id]; }
  std::size_t num_classes() const noexcept { return classes.size(); }
  const ClassInfo& info(ClassId id) const { return classes.at(slot_[id]); }
  std::optional<ClassId> find(std::string_view name) const {
    for (const auto& c : classes)
      if (c.name == name) return c.id;
    return std::nullopt;
  }

  friend bool operator==(const ClassRegistry& a, const ClassRegistry& b) {
    return a.classes == b.classes && a.void_id == b.void_id &&
           a.small_classes == b.small_classes &&
           a.large_classes == b.large_classes && a.similarity == b.similarity &&
           a.road_id == b.road_id && a.sidewalk_id == b.sidewalk_id &&
           a.alpha == b.alpha && a.beta == b.beta &&
           a.road_region == b.road_region;
  }

 private:
  std::array<int, 256> slot_ = filled_slots();
  std::array<bool, 256> small_{};
  std::array<bool, 256> large_{};

  static std::array<int, 256> filled_slots() {
    std::array<int, 256> s;
    s.fill(-1);
    return s;
  }
};

inline void ClassRegistry::validate() {
  slot_ = filled_slots();
  small_.fill(false);
  large_.fill(false);

  if (void_id != kVoid)
    throw ConfigError("void_id", "must be 255, got " + std::to_string(void_id));
  if (classes.empty()) throw ConfigError("classes", "must not be empty");
  for (std::size_t k = 0; k < classes.size(); ++k) {
    const ClassId id = classes[k].id;
    const std::string path = "classes[" + std::to_string(k) + "].id";
    if (id == void_id) throw ConfigError(path, "collides with void_id");
    if (slot_[id] >= 0)
      throw ConfigError(path, "duplicate class id " + std::to_string(id));
    slot_[id] = static_cast<int>(k);
  }
  auto check_set = [&](const std::set<ClassId>& ids, const char* field) {
    for (ClassId id : ids)
      if (slot_[id] < 0)
        throw ConfigError(field, "unknown class id " + std::to_string(id));
  };
  check_set(small_classes, "small_classes");
  check_set(large_classes, "large_classes");
  for (ClassId id : small_classes)
    if (large_classes.count(id))
      throw ConfigError("large_classes", "class id " + std::to_string(id) +
                                             " is also in small_classes");
  if (small_classes.size() + large_classes.size() > classes.size())
    throw ConfigError("small_classes", "|C_s| + |C_l| exceeds class count");
  std::size_t k = 0;
  for (const auto& [i, j] : similarity.pairs()) {
    const std::string path = "similarity[" + std::to_string(k++) + "]";
    if (slot_[i] < 0)
      throw ConfigError(path, "unknown class id " + std::to_string(i));
    if (slot_[j] < 0)
      throw ConfigError(path, "unknown class id " + std::to_string(j));
  }
  if (slot_[road_id] < 0) throw ConfigError("road_id", "unknown class id");
  if (slot_[sidewalk_id] < 0)
    throw ConfigError("sidewalk_id", "unknown class id");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw ConfigError("alpha", "must lie in [0, 1]");
  if (!(beta >= 0.0 && beta <= 1.0))
    throw ConfigError("beta", "must lie in [0, 1]");
  const auto& r = road_region;
  if (!(r.x_lo >= 0.0 && r.x_lo < r.x_hi && r.x_hi <= 1.0))
    throw ConfigError("road_region.x_lo", "need 0 <= x_lo < x_hi <= 1");
  if (!(r.y_lo >= 0.0 && r.y_lo < r.y_hi && r.y_hi <= 1.0))
    throw ConfigError("road_region.y_lo", "need 0 <= y_lo < y_hi <= 1");
  if (r.top_k < 1) throw ConfigError("road_region.top_k", "must be >= 1");

  for (ClassId id : small_classes) small_[id] = true;
  for (ClassId id : large_classes) large_[id] = true;
}

namespace detail {

template <typename T>
T json_get(const nlohmann::json& j, const std::string& key,
           const std::string& path) {
  if (!j.is_object() || !j.contains(key))
    throw ConfigError(path + key, "missing");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + key, e.what());
  }
}

inline ClassId json_class_id(const nlohmann::json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 0 ||
      v.get<long long>() > 255)
    throw ConfigError(path, "expected an integer class id in [0, 255]");
  return static_cast<ClassId>(v.get<int>());
}

}  // namespace detail

inline ClassRegistry registry_from_json(const nlohmann::json& j) {
  using detail::json_class_id;
  using detail::json_get;
  ClassRegistry reg;
  if (!j.is_object()) throw ConfigError("$", "top level must be an object");

  if (!j.contains("classes") || !j["classes"].is_array())
    throw ConfigError("classes", "missing or not an array");
  for (std::size_t k = 0; k < j["classes"].size(); ++k) {
    const auto& c = j["classes"][k];
    const std::string path = "classes[" + std::to_string(k) + "].";
    if (!c.is_object()) throw ConfigError(path, "expected an object");
    ClassInfo info;
    if (!c.contains("id")) throw ConfigError(path + "id", "missing");
    info.id = json_class_id(c["id"], path + "id");
    info.name = json_get<std::string>(c, "name", path);
    const auto color = json_get<std::vector<int>>(c, "color", path);
    if (color.size() != 3)
      throw ConfigError(path + "color", "expected [r, g, b]");
    for (int v : color)
      if (v < 0 || v > 255)
        throw ConfigError(path + "color", "component outside [0, 255]");
    info.color = {static_cast<std::uint8_t>(color[0]),
                  static_cast<std::uint8_t>(color[1]),
                  static_cast<std::uint8_t>(color[2])};
    reg.classes.push_back(std::move(info));
  }

  if (j.contains("void_id")) {
    const auto& v = j["void_id"];
    if (!v.is_number_integer() || v.get<long long>() != kVoid)
      throw ConfigError("void_id", "must be 255");
  }
  auto read_set = [&](const char* key) {
    std::set<ClassId> out;
    if (!j.contains(key) || !j[key].is_array())
      throw ConfigError(key, "missing or not an array");
    for (std::size_t k = 0; k < j[key].size(); ++k) {
      const std::string path = std::string(key) + "[" + std::to_string(k) + "]";
      if (!out.insert(json_class_id(j[key][k], path)).second)
        throw ConfigError(path, "listed twice");
    }
    return out;
  };
  reg.small_classes = read_set("small_classes");
  reg.large_classes = read_set("large_classes");

  if (!j.contains("similarity") || !j["similarity"].is_array())
    throw ConfigError("similarity", "missing or not an array");
  for (std::size_t k = 0; k < j["similarity"].size(); ++k) {
    const auto& p = j["similarity"][k];
    const std::string path = "similarity[" + std::to_string(k) + "]";
    if (!p.is_array() || p.size() != 2)
      throw ConfigError(path, "expected a pair [class_i, class_j]");
    reg.similarity.insert(json_class_id(p[0], path + "[0]"),
                          json_class_id(p[1], path + "[1]"));
  }

  if (!j.contains("road_id")) throw ConfigError("road_id", "missing");
  reg.road_id = json_class_id(j["road_id"], "road_id");
  if (!j.contains("sidewalk_id")) throw ConfigError("sidewalk_id", "missing");
  reg.sidewalk_id = json_class_id(j["sidewalk_id"], "sidewalk_id");
  reg.alpha = json_get<double>(j, "alpha", "");
  reg.beta = json_get<double>(j, "beta", "");

  if (j.contains("road_region")) {
    const auto& r = j["road_region"];
    reg.road_region.x_lo = json_get<double>(r, "x_lo", "road_region.");
    reg.road_region.x_hi = json_get<double>(r, "x_hi", "road_region.");
    reg.road_region.y_lo = json_get<double>(r, "y_lo", "road_region.");
    reg.road_region.y_hi = json_get<double>(r, "y_hi", "road_region.");
    reg.road_region.top_k = json_get<int>(r, "top_k", "road_region.");
  }

  reg.validate();
  return reg;
}

inline nlohmann::json registry_to_json(const ClassRegistry& reg) {
  nlohmann::json j;
  j["classes"] = nlohmann::json::array();
  for (const auto& c : reg.classes)
    j["classes"].push_back(
        {{"id", c.id}, {"name", c.name}, {"color", {c.color.r, c.color.g, c.color.b}}});
  j["void_id"] = reg.void_id;
  j["small_classes"] = reg.small_classes;
  j["large_classes"] = reg.large_classes;
  j["similarity"] = nlohmann::json::array();
  for (const auto& [a, b] : reg.similarity.pairs())
    j["similarity"].push_back({a, b});
  j["road_id"] = reg.road_id;
  j["sidewalk_id"] = reg.sidewalk_id;
  j["alpha"] = reg.alpha;
  j["beta"] = reg.beta;
  const auto& r = reg.road_region;
  j["road_region"] = {{"x_lo", r.x_lo}, {"x_hi", r.x_hi}, {"y_lo", r.y_lo},
                      {"y_hi", r.y_hi}, {"top_k", r.top_k}};
  return j;
}

inline ClassRegistry load_registry(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("$", std::string("parse failure in ") + path + ": " +
                               e.what());
  }
  return registry_from_json(j);
}

inline void save_registry(const ClassRegistry& reg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config " + path);
  out << registry_to_json(reg).dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path);
}

/// The 19-class Cityscapes train-id catalog with the small/large split,
/// similar-class pairs and α/β used for DAFormer-grade pseudo-labels.
inline ClassRegistry cityscapes_registry() {
  ClassRegistry reg;
  reg.classes = {
      {0, "road", {128, 64, 128}},       {1, "sidewalk", {244, 35, 232}},
      {2, "building", {70, 70, 70}},     {3, "wall", {102, 102, 156}},
      {4, "fence", {190, 153, 153}},     {5, "pole", {153, 153, 153}},
      {6, "traffic light", {250, 170, 30}}, {7, "traffic sign", {220, 220, 0}},
      {8, "vegetation", {107, 142, 35}}, {9, "terrain", {152, 251, 152}},
      {10, "sky", {70, 130, 180}},       {11, "person", {220, 20, 60}},
      {12, "rider", {255, 0, 0}},        {13, "car", {0, 0, 142}},
      {14, "truck", {0, 0, 70}},         {15, "bus", {0, 60, 100}},
      {16, "train", {0, 80, 100}},       {17, "motorcycle", {0, 0, 230}},
      {18, "bicycle", {119, 11, 32}},
  };
  enum : ClassId {
    road = 0, sidewalk, building, wall, fence, pole, light, sign, vegetation,
    terrain, bicycle = 18
  };
  reg.small_classes = {wall, fence, sign, light, pole, bicycle};
  reg.large_classes = {building, vegetation, sidewalk, road};
  for (auto [i, j] : std::initializer_list<std::pair<ClassId, ClassId>>{
           {road, sidewalk},
           {fence, building}, {pole, building}, {light, building}, {sign, building},
           {fence, vegetation}, {light, vegetation}, {sign, vegetation},
           {terrain, vegetation},
           {light, pole}, {sign, pole}})
    reg.similarity.insert(i, j);
  reg.road_id = road;
  reg.sidewalk_id = sidewalk;
  reg.alpha = 0.2;
  reg.beta = 0.99;
  reg.road_region = default_road_region();
  reg.validate();
  return reg;
}

}  // namespace maskrefine
