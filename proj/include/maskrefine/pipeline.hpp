#pragma once

// Batch driver: uda label + masks (+ confidence) -> painted mask label ->
// fused pseudo-label, over aligned directories, on a worker pool. Also the
// per-stage timing harness behind `bench`.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "maskrefine/error.hpp"
#include "maskrefine/fusion.hpp"
#include "maskrefine/io.hpp"
#include "maskrefine/labeling.hpp"
#include "maskrefine/raster.hpp"
#include "maskrefine/registry.hpp"

namespace maskrefine {

enum class LabelMethod { kSgml, kVote };

/// Pure per-image refinement. `conf` is required for strategy 3.
inline LabelMap refine(const ClassRegistry& reg, const LabelMap& uda,
                       const MaskSet& masks, const ConfidenceMap* conf,
                       int strategy, LabelMethod method = LabelMethod::kSgml) {
  const LabelMap sam = method == LabelMethod::kSgml ? paint_sgml(masks, uda, reg)
                                                    : paint_majority(masks, uda, reg);
  switch (strategy) {
    case 1: return fuse1(sam, uda, reg.void_id);
    case 2: return fuse2(uda, sam, reg);
    case 3:
      if (!conf) throw ValueError("strategy 3 needs a confidence map");
      return fuse3(fuse1(sam, uda, reg.void_id), uda, *conf, reg);
    default: throw ValueError("strategy must be 1, 2 or 3");
  }
}

inline unsigned default_jobs() {
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs `fn(i)` for i in [0, n) on `jobs` threads.
inline void parallel_for(std::size_t n, unsigned jobs,
                         const std::function<void(std::size_t)>& fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
    });
}

struct PipelineOptions {
  std::string uda_dir;
  std::string masks_dir;
  std::optional<std::string> conf_dir;
  std::string out_dir;
  int strategy = 1;
  LabelMethod method = LabelMethod::kSgml;
  unsigned jobs = default_jobs();
};

struct ImageRecord {
  std::string stem;
  bool ok = false;
  std::string error;
  std::size_t masks = 0;
  std::size_t sam_labeled_pixels = 0;
  std::size_t changed_pixels = 0;  // output vs. uda
  double load_ms = 0, label_ms = 0, fuse_ms = 0, save_ms = 0;
};

struct PipelineSummary {
  int strategy = 1;
  std::vector<ImageRecord> images;  // sorted by stem

  std::size_t processed() const {
    return std::count_if(images.begin(), images.end(), [](auto& r) { return r.ok; });
  }
  std::vector<const ImageRecord*> skipped() const {
    std::vector<const ImageRecord*> out;
    for (const auto& r : images)
      if (!r.ok) out.push_back(&r);
    return out;
  }
  /// 0 = everything processed, 2 = some stems skipped.
  int exit_code() const { return processed() == images.size() ? 0 : 2; }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["strategy"] = strategy;
    j["processed"] = processed();
    j["skipped"] = nlohmann::json::array();
    j["images"] = nlohmann::json::array();
    for (const auto& r : images) {
      if (!r.ok) {
        j["skipped"].push_back({{"stem", r.stem}, {"reason", r.error}});
        continue;
      }
      j["images"].push_back({{"stem", r.stem},
                             {"masks", r.masks},
                             {"sam_labeled_pixels", r.sam_labeled_pixels},
                             {"changed_pixels", r.changed_pixels},
                             {"time_ms",
                              {{"load", r.load_ms},
                               {"label", r.label_ms},
                               {"fuse", r.fuse_ms},
                               {"save", r.save_ms}}}});
    }
    return j;
  }
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

/// `masks_dir/stem.json`, else `masks_dir/stem/`.
inline std::optional<std::filesystem::path> find_masks(const std::filesystem::path& dir,
                                                       const std::string& stem) {
  namespace fs = std::filesystem;
  if (auto p = dir / (stem + ".json"); fs::is_regular_file(p)) return p;
  if (auto p = dir / stem; fs::is_directory(p)) return p;
  return std::nullopt;
}

inline std::vector<std::string> png_stems(const std::string& dir) {
  namespace fs = std::filesystem;
  std::vector<std::string> stems;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".png")
      stems.push_back(e.path().stem().string());
  std::sort(stems.begin(), stems.end());
  return stems;
}

}  // namespace detail

inline PipelineSummary run_pipeline(const ClassRegistry& reg,
                                    const PipelineOptions& opt) {
  namespace fs = std::filesystem;
  if (opt.strategy < 1 || opt.strategy > 3)
    throw ValueError("strategy must be 1, 2 or 3");
  if (opt.strategy == 3 && !opt.conf_dir)
    throw ValueError("strategy 3 requires a confidence directory");
  for (const std::string* d : {&opt.uda_dir, &opt.masks_dir})
    if (!fs::is_directory(*d)) throw IoError("not a directory: " + *d);
  if (opt.conf_dir && !fs::is_directory(*opt.conf_dir))
    throw IoError("not a directory: " + *opt.conf_dir);
  fs::create_directories(opt.out_dir);

  PipelineSummary summary;
  summary.strategy = opt.strategy;
  for (auto& stem : detail::png_stems(opt.uda_dir))
    summary.images.push_back({.stem = std::move(stem)});

  parallel_for(summary.images.size(), opt.jobs, [&](std::size_t i) {
    ImageRecord& rec = summary.images[i];
    const fs::path masks_dir(opt.masks_dir);
    auto masks_path = detail::find_masks(masks_dir, rec.stem);
    if (!masks_path) {
      rec.error = "missing masks (" + rec.stem + ".json or " + rec.stem + "/)";
      return;
    }
    std::optional<fs::path> conf_path;
    if (opt.strategy == 3) {
      conf_path = fs::path(*opt.conf_dir) / (rec.stem + ".png");
      if (!fs::is_regular_file(*conf_path)) {
        rec.error = "missing confidence map " + conf_path->filename().string();
        return;
      }
    }
    try {
      auto t0 = detail::Clock::now();
      const LabelMap uda =
          load_label_png((fs::path(opt.uda_dir) / (rec.stem + ".png")).string());
      validate_labels(uda, reg, rec.stem + " uda");
      const MaskSet masks = load_masks(masks_path->string());
      std::optional<ConfidenceMap> conf;
      if (conf_path) conf = load_confidence(conf_path->string());
      rec.load_ms = detail::ms_since(t0);
      rec.masks = masks.count();

      t0 = detail::Clock::now();
      const LabelMap sam = opt.method == LabelMethod::kSgml
                               ? paint_sgml(masks, uda, reg)
                               : paint_majority(masks, uda, reg);
      rec.label_ms = detail::ms_since(t0);
      rec.sam_labeled_pixels = static_cast<std::size_t>(
          std::count_if(sam.data().begin(), sam.data().end(),
                        [&](ClassId v) { return v != reg.void_id; }));

      t0 = detail::Clock::now();
      LabelMap out;
      switch (opt.strategy) {
        case 1: out = fuse1(sam, uda, reg.void_id); break;
        case 2: out = fuse2(uda, sam, reg); break;
        default: out = fuse3(fuse1(sam, uda, reg.void_id), uda, *conf, reg); break;
      }
      rec.fuse_ms = detail::ms_since(t0);
      for (std::size_t p = 0; p < out.pixels(); ++p)
        rec.changed_pixels += out[p] != uda[p];

      t0 = detail::Clock::now();
      save_label_png(out, (fs::path(opt.out_dir) / (rec.stem + ".png")).string());
      rec.save_ms = detail::ms_since(t0);
      rec.ok = true;
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
  });
  return summary;
}

struct BenchSample {
  std::string stem;
  LabelMap uda;
  MaskSet masks;
  std::optional<ConfidenceMap> conf;  // uniform 1.0 when absent
};

struct StageTiming {
  std::string stage;
  double mean_ms = 0, min_ms = 0, max_ms = 0;
};

struct BenchReport {
  std::size_t images = 0;
  int repeats = 0;
  std::vector<StageTiming> stages;  // sgml, fusion1, fusion2, fusion3
  struct Point {
    std::string stem;
    std::size_t masks;
    double sgml_ms;
  };
  std::vector<Point> curve;
  std::optional<double> mask_time_correlation;  // Pearson r over `curve`

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["images"] = images;
    j["repeats"] = repeats;
    j["stages"] = nlohmann::json::array();
    for (const auto& s : stages)
      j["stages"].push_back({{"stage", s.stage}, {"mean_ms", s.mean_ms},
                             {"min_ms", s.min_ms}, {"max_ms", s.max_ms}});
    j["masks_vs_time"] = nlohmann::json::array();
    for (const auto& p : curve)
      j["masks_vs_time"].push_back({{"stem", p.stem}, {"masks", p.masks}, {"sgml_ms", p.sgml_ms}});
    j["pearson_r"] = mask_time_correlation ? nlohmann::json(*mask_time_correlation)
                                           : nlohmann::json(nullptr);
    return j;
  }
};

inline std::optional<double> pearson(const std::vector<double>& x,
                                     const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return std::nullopt;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
  mx /= n, my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

/// Single-threaded per-stage wall time. Fusion 3 is timed end to end from the
/// painted label (fuse1 followed by the confidence pass).
inline BenchReport bench(const ClassRegistry& reg, const std::vector<BenchSample>& samples,
                         int repeats) {
  if (repeats < 1) throw ValueError("repeats must be >= 1");
  if (samples.empty()) throw ValueError("bench: empty sample set");
  using detail::Clock;
  using detail::ms_since;

  std::vector<std::vector<double>> t(4);
  BenchReport rep;
  rep.images = samples.size();
  rep.repeats = repeats;
  volatile ClassId sink = 0;
  auto keep = [&](const LabelMap& m) { sink = m[0]; };
  for (const auto& s : samples) {
    const ConfidenceMap ones(s.uda.size(), 1.0);
    const ConfidenceMap& conf = s.conf ? *s.conf : ones;
    double sgml_sum = 0;
    for (int r = 0; r < repeats; ++r) {
      auto t0 = Clock::now();
      const LabelMap sam = paint_sgml(s.masks, s.uda, reg);
      const double sgml = ms_since(t0);
      t[0].push_back(sgml);
      sgml_sum += sgml;

      t0 = Clock::now();
      keep(fuse1(sam, s.uda, reg.void_id));
      t[1].push_back(ms_since(t0));

      t0 = Clock::now();
      keep(fuse2(s.uda, sam, reg));
      t[2].push_back(ms_since(t0));

      t0 = Clock::now();
      keep(fuse3(fuse1(sam, s.uda, reg.void_id), s.uda, conf, reg));
      t[3].push_back(ms_since(t0));
    }
    rep.curve.push_back({s.stem, s.masks.count(), sgml_sum / repeats});
  }
  static const char* names[] = {"sgml", "fusion1", "fusion2", "fusion3"};
  for (int k = 0; k < 4; ++k) {
    const auto& v = t[k];
    double sum = 0;
    for (double x : v) sum += x;
    rep.stages.push_back({names[k], sum / v.size(), *std::min_element(v.begin(), v.end()),
                          *std::max_element(v.begin(), v.end())});
  }
  std::vector<double> xs, ys;
  for (const auto& p : rep.curve) xs.push_back(p.masks), ys.push_back(p.sgml_ms);
  rep.mask_time_correlation = pearson(xs, ys);
  return rep;
}

}  // namespace maskrefine
