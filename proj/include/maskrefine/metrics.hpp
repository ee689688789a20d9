#pragma once

// Confusion matrix, per-class IoU and mIoU.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "maskrefine/error.hpp"
#include "maskrefine/raster.hpp"
#include "maskrefine/registry.hpp"

namespace maskrefine {

/// Rows: ground-truth class slot. Columns: predicted class slot, with one
/// extra trailing column for void or unknown predictions. Void ground truth
/// is not counted.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(const ClassRegistry& reg) {
    for (const auto& c : reg.classes) ids_.push_back(c.id);
    counts_.assign(ids_.size() * cols(), 0);
  }

  std::size_t num_classes() const noexcept { return ids_.size(); }
  std::size_t cols() const noexcept { return ids_.size() + 1; }
  std::size_t void_col() const noexcept { return ids_.size(); }
  const std::vector<ClassId>& ids() const noexcept { return ids_; }

  std::uint64_t& at(std::size_t gt, std::size_t pred) {
    return counts_[gt * cols() + pred];
  }
  std::uint64_t at(std::size_t gt, std::size_t pred) const {
    return counts_[gt * cols() + pred];
  }

  std::uint64_t total() const noexcept {
    std::uint64_t t = 0;
    for (auto c : counts_) t += c;
    return t;
  }
  std::uint64_t tp(std::size_t c) const { return at(c, c); }
  std::uint64_t fn(std::size_t c) const {
    std::uint64_t s = 0;
    for (std::size_t p = 0; p < cols(); ++p)
      if (p != c) s += at(c, p);
    return s;
  }
  std::uint64_t fp(std::size_t c) const {
    std::uint64_t s = 0;
    for (std::size_t g = 0; g < num_classes(); ++g)
      if (g != c) s += at(g, c);
    return s;
  }

  ConfusionMatrix& merge(const ConfusionMatrix& other) {
    if (other.ids_ != ids_) throw ValueError("confusion matrices use different class sets");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    return *this;
  }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::vector<ClassId> ids_;
  std::vector<std::uint64_t> counts_;
};

inline void accumulate_confusion(ConfusionMatrix& cm, const LabelMap& pred,
                                 const LabelMap& gt, const ClassRegistry& reg) {
  require_same_size(pred.size(), gt.size(), "confusion");
  for (std::size_t i = 0; i < gt.pixels(); ++i) {
    const int g = reg.slot(gt[i]);
    if (g < 0) continue;
    const int p = reg.slot(pred[i]);
    cm.at(g, p < 0 ? cm.void_col() : static_cast<std::size_t>(p)) += 1;
  }
}

inline ConfusionMatrix confusion(const LabelMap& pred, const LabelMap& gt,
                                 const ClassRegistry& reg) {
  ConfusionMatrix cm(reg);
  accumulate_confusion(cm, pred, gt, reg);
  return cm;
}

/// IoU per class id; nullopt when TP + FP + FN = 0 (class absent).
using ClassIou = std::map<ClassId, std::optional<double>>;

inline ClassIou iou(const ConfusionMatrix& cm) {
  ClassIou out;
  for (std::size_t c = 0; c < cm.num_classes(); ++c) {
    const std::uint64_t tp = cm.tp(c);
    const std::uint64_t denom = tp + cm.fp(c) + cm.fn(c);
    out[cm.ids()[c]] = denom == 0 ? std::nullopt
                                  : std::optional<double>(static_cast<double>(tp) /
                                                          static_cast<double>(denom));
  }
  return out;
}

/// Unweighted mean over classes with a defined IoU; nullopt if none.
inline std::optional<double> miou(const ClassIou& per_class) {
  double sum = 0;
  std::size_t n = 0;
  for (const auto& [id, v] : per_class)
    if (v) {
      sum += *v;
      ++n;
    }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

inline std::optional<double> miou(const ConfusionMatrix& cm) { return miou(iou(cm)); }

struct CompareRow {
  ClassId id = 0;
  std::optional<double> a, b;
  std::optional<double> delta;  // b - a
  bool a_best = false;
  bool b_best = false;
};

/// Side-by-side per-class IoU of two methods; `*_best` flags mark the winner
/// (both set on a tie).
inline std::vector<CompareRow> compare_report(const ClassIou& a, const ClassIou& b) {
  if (a.size() != b.size())
    throw ValueError("compare_report: class sets differ");
  std::vector<CompareRow> rows;
  auto ib = b.begin();
  for (auto ia = a.begin(); ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first) throw ValueError("compare_report: class sets differ");
    CompareRow r{ia->first, ia->second, ib->second, std::nullopt, false, false};
    if (r.a && r.b) {
      r.delta = *r.b - *r.a;
      r.a_best = *r.a >= *r.b;
      r.b_best = *r.b >= *r.a;
    } else {
      r.a_best = r.a.has_value();
      r.b_best = r.b.has_value();
    }
    rows.push_back(r);
  }
  return rows;
}

inline nlohmann::json metrics_to_json(const ConfusionMatrix& cm,
                                      const ClassRegistry& reg) {
  nlohmann::json j;
  j["classes"] = nlohmann::json::array();
  for (ClassId id : cm.ids()) j["classes"].push_back(reg.info(id).name);
  j["matrix"] = nlohmann::json::array();
  for (std::size_t g = 0; g < cm.num_classes(); ++g) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t p = 0; p < cm.cols(); ++p) row.push_back(cm.at(g, p));
    j["matrix"].push_back(std::move(row));
  }
  j["matrix_void_column"] = true;
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [id, v] : iou(cm))
    per[reg.info(id).name] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  j["iou"] = per;
  const auto m = miou(cm);
  j["miou"] = m ? nlohmann::json(*m) : nlohmann::json(nullptr);
  j["pixels"] = cm.total();
  return j;
}

}  // namespace maskrefine
