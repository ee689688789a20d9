// maskrefine: command-line front end for mask labeling, fusion, mixing,
// evaluation and rendering of segmentation pseudo-labels.
//
// Exit codes: 0 success, 1 fatal (usage, config or I/O), 2 partial batch.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "maskrefine/maskrefine.hpp"
#include "maskrefine/synthetic.hpp"

namespace fs = std::filesystem;
using namespace maskrefine;

namespace {

struct Globals {
  std::string config;
  unsigned jobs = default_jobs();
  bool quiet = false;
};

ClassRegistry registry_for(const Globals& g) {
  return g.config.empty() ? cityscapes_registry() : load_registry(g.config);
}

void write_json(const nlohmann::json& j, const std::string& path) {
  if (auto parent = fs::path(path).parent_path(); !parent.empty())
    fs::create_directories(parent);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path);
}

std::vector<LabelMap> load_label_dir(const std::string& dir,
                                     std::vector<std::string>* stems = nullptr) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".png") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<LabelMap> out;
  for (const auto& f : files) {
    out.push_back(load_label_png(f.string()));
    if (stems) stems->push_back(f.stem().string());
  }
  return out;
}

std::string fmt_opt(const std::optional<double>& v, int prec = 4) {
  if (!v) return "-";
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << *v;
  return os.str();
}

// ---------------------------------------------------------------------------

struct StatsArgs {
  std::string labels_dir;
  std::optional<std::size_t> small_count, large_count;
  std::string uda_dir;
  double rare_threshold = kDefaultRareThreshold;
  std::string out;
};

int run_stats(const Globals& g, const StatsArgs& a) {
  const ClassRegistry reg = registry_for(g);
  const auto labels = load_label_dir(a.labels_dir);
  const ClassAreaStats stats = accumulate_stats(labels, reg);

  nlohmann::json j;
  j["images"] = stats.images;
  j["void_pixels"] = stats.void_pixels;
  j["classes"] = nlohmann::json::array();
  for (const auto& c : reg.classes) {
    const auto& s = stats.per_class.at(c.id);
    const auto mean = s.mean_area();
    j["classes"].push_back({{"id", c.id},
                            {"name", c.name},
                            {"total_pixels", s.total_pixels},
                            {"images_present", s.images_present},
                            {"mean_area", mean ? nlohmann::json(*mean) : nlohmann::json(nullptr)}});
  }
  std::optional<ClassSplit> split;
  if (a.small_count || a.large_count) {
    split = suggest_class_split(stats, a.small_count.value_or(0), a.large_count.value_or(0));
    j["suggested_split"] = {{"small_classes", split->small}, {"large_classes", split->large}};
  }
  std::optional<std::set<ClassId>> rare;
  if (!a.uda_dir.empty()) {
    const auto uda = load_label_dir(a.uda_dir);
    rare = rare_class_candidates(uda, reg, a.rare_threshold);
    j["rare_candidates"] = *rare;
    j["rare_threshold"] = a.rare_threshold;
  }
  if (!a.out.empty()) write_json(j, a.out);

  if (!g.quiet) {
    std::cout << std::left << std::setw(4) << "id" << std::setw(16) << "class"
              << std::right << std::setw(14) << "total_px" << std::setw(9) << "images"
              << std::setw(14) << "mean_area" << '\n';
    for (const auto& c : reg.classes) {
      const auto& s = stats.per_class.at(c.id);
      std::cout << std::left << std::setw(4) << int(c.id) << std::setw(16) << c.name
                << std::right << std::setw(14) << s.total_pixels << std::setw(9)
                << s.images_present << std::setw(14)
                << (s.mean_area() ? fmt_opt(s.mean_area(), 1) : "absent") << '\n';
    }
    auto names = [&](const std::set<ClassId>& ids) {
      std::string out;
      for (ClassId id : ids) out += (out.empty() ? "" : ", ") + reg.info(id).name;
      return "{" + out + "}";
    };
    if (split)
      std::cout << "suggested C_s " << names(split->small) << "\nsuggested C_l "
                << names(split->large) << '\n';
    if (rare) std::cout << "rare candidates " << names(*rare) << '\n';
  }
  return 0;
}

struct LabelArgs {
  std::string method = "sgml";
  std::string uda, masks, out;
};

int run_label(const Globals& g, const LabelArgs& a) {
  const ClassRegistry reg = registry_for(g);
  const LabelMap uda = load_label_png(a.uda);
  validate_labels(uda, reg, a.uda);
  const MaskSet masks = load_masks(a.masks);
  const LabelMap sam =
      a.method == "vote" ? paint_majority(masks, uda, reg) : paint_sgml(masks, uda, reg);
  save_label_png(sam, a.out);
  if (!g.quiet)
    std::cout << "labeled " << masks.count() << " masks (" << a.method << ") -> " << a.out
              << '\n';
  return 0;
}

struct FuseArgs {
  int strategy = 1;
  std::string uda, sam, conf, out;
};

int run_fuse(const Globals& g, const FuseArgs& a) {
  const ClassRegistry reg = registry_for(g);
  if (a.strategy == 3 && a.conf.empty())
    throw ValueError("--strategy 3 requires --conf");
  const LabelMap uda = load_label_png(a.uda);
  const LabelMap sam = load_label_png(a.sam);
  validate_labels(uda, reg, a.uda);
  validate_labels(sam, reg, a.sam);
  LabelMap out;
  switch (a.strategy) {
    case 1: out = fuse1(sam, uda, reg.void_id); break;
    case 2: out = fuse2(uda, sam, reg); break;
    default: {
      const ConfidenceMap conf = load_confidence(a.conf);
      out = fuse3(fuse1(sam, uda, reg.void_id), uda, conf, reg);
    }
  }
  save_label_png(out, a.out);
  if (!g.quiet) std::cout << "fusion strategy " << a.strategy << " -> " << a.out << '\n';
  return 0;
}

struct MixArgs {
  std::string src_img, src_lbl, tgt_img, tgt_lbl, out_img, out_lbl;
  std::uint64_t seed = 0;
};

int run_mix(const Globals& g, const MixArgs& a) {
  const ClassRegistry reg = registry_for(g);
  const LabelMap y_s = load_label_png(a.src_lbl);
  const LabelMap y_t = load_label_png(a.tgt_lbl);
  const MixMask m = classmix_select(y_s, a.seed, reg.void_id);
  const MixedPair mixed =
      classmix_apply(m, load_image_png(a.src_img), load_image_png(a.tgt_img), y_s, y_t);
  save_image_png(mixed.image, a.out_img);
  save_label_png(mixed.labels, a.out_lbl);
  if (!g.quiet) {
    std::cout << "selected classes:";
    for (ClassId c : m.selected_classes)
      std::cout << ' ' << (reg.is_class(c) ? reg.info(c).name : std::to_string(c));
    std::cout << '\n';
  }
  return 0;
}

struct EvalArgs {
  std::string pred_dir, gt_dir, baseline_dir, out;
};

ConfusionMatrix eval_dir(const ClassRegistry& reg, const std::string& pred_dir,
                         const std::string& gt_dir, unsigned jobs) {
  std::vector<std::string> stems;
  for (const auto& e : fs::directory_iterator(gt_dir))
    if (e.is_regular_file() && e.path().extension() == ".png")
      stems.push_back(e.path().stem().string());
  std::sort(stems.begin(), stems.end());
  for (const auto& s : stems)
    if (!fs::is_regular_file(fs::path(pred_dir) / (s + ".png")))
      throw IoError("prediction missing for " + s + " in " + pred_dir);
  std::vector<ConfusionMatrix> parts(stems.size(), ConfusionMatrix(reg));
  parallel_for(stems.size(), jobs, [&](std::size_t i) {
    const LabelMap gt = load_label_png((fs::path(gt_dir) / (stems[i] + ".png")).string());
    const LabelMap pred = load_label_png((fs::path(pred_dir) / (stems[i] + ".png")).string());
    accumulate_confusion(parts[i], pred, gt, reg);
  });
  ConfusionMatrix total(reg);
  for (const auto& p : parts) total.merge(p);
  return total;
}

int run_eval(const Globals& g, const EvalArgs& a) {
  const ClassRegistry reg = registry_for(g);
  const ConfusionMatrix cm = eval_dir(reg, a.pred_dir, a.gt_dir, g.jobs);
  nlohmann::json j = metrics_to_json(cm, reg);
  const ClassIou per = iou(cm);

  std::optional<std::vector<CompareRow>> cmp;
  if (!a.baseline_dir.empty()) {
    const ClassIou base = iou(eval_dir(reg, a.baseline_dir, a.gt_dir, g.jobs));
    cmp = compare_report(base, per);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : *cmp)
      rows.push_back({{"class", reg.info(r.id).name},
                      {"baseline", r.a ? nlohmann::json(*r.a) : nlohmann::json(nullptr)},
                      {"pred", r.b ? nlohmann::json(*r.b) : nlohmann::json(nullptr)},
                      {"delta", r.delta ? nlohmann::json(*r.delta) : nlohmann::json(nullptr)},
                      {"baseline_best", r.a_best},
                      {"pred_best", r.b_best}});
    j["comparison"] = rows;
  }
  if (!a.out.empty()) write_json(j, a.out);

  if (!g.quiet) {
    for (const auto& c : reg.classes) {
      std::cout << std::left << std::setw(16) << c.name << std::right << std::setw(9)
                << fmt_opt(per.at(c.id));
      if (cmp)
        for (const auto& r : *cmp)
          if (r.id == c.id)
            std::cout << std::setw(9) << fmt_opt(r.a) << std::setw(10) << fmt_opt(r.delta)
                      << (r.b_best && !r.a_best ? "  *" : "");
      std::cout << '\n';
    }
    std::cout << std::left << std::setw(16) << "mIoU" << std::right << std::setw(9)
              << fmt_opt(miou(per)) << '\n';
  }
  return 0;
}

struct RenderArgs {
  std::string label, masks, out, alpha_over;
  double alpha = 0.5;
};

int run_render(const Globals& g, const RenderArgs& a) {
  if (a.label.empty() == a.masks.empty())
    throw ValueError("render needs exactly one of --label or --masks");
  ImageRaster img;
  if (!a.label.empty()) {
    img = render_label(load_label_png(a.label), registry_for(g));
  } else {
    img = render_masks(load_masks(a.masks));
  }
  if (!a.alpha_over.empty()) img = blend(img, load_image_png(a.alpha_over), a.alpha);
  save_image_png(img, a.out);
  if (!g.quiet) std::cout << "rendered -> " << a.out << '\n';
  return 0;
}

struct PipelineArgs {
  std::string uda_dir, masks_dir, conf_dir, out_dir, summary;
  int strategy = 1;
  std::string method = "sgml";
};

int run_pipeline_cmd(const Globals& g, const PipelineArgs& a) {
  const ClassRegistry reg = registry_for(g);
  PipelineOptions opt;
  opt.uda_dir = a.uda_dir;
  opt.masks_dir = a.masks_dir;
  if (!a.conf_dir.empty()) opt.conf_dir = a.conf_dir;
  opt.out_dir = a.out_dir;
  opt.strategy = a.strategy;
  opt.method = a.method == "vote" ? LabelMethod::kVote : LabelMethod::kSgml;
  opt.jobs = g.jobs;
  const PipelineSummary s = run_pipeline(reg, opt);
  const std::string summary_path =
      a.summary.empty() ? (fs::path(a.out_dir) / "summary.json").string() : a.summary;
  write_json(s.to_json(), summary_path);
  if (!g.quiet) {
    std::cout << "processed " << s.processed() << " / " << s.images.size() << " images\n";
    for (const auto* r : s.skipped())
      std::cerr << "skipped " << r->stem << ": " << r->error << '\n';
  }
  return s.exit_code();
}

struct BenchArgs {
  std::string uda_dir, masks_dir, conf_dir, out;
  int repeats = 3;
  std::size_t synthetic = 0;
  int width = 1024, height = 512;
};

int run_bench(const Globals& g, const BenchArgs& a) {
  const ClassRegistry reg = registry_for(g);
  std::vector<BenchSample> samples;
  if (a.synthetic > 0) {
    // Mask counts spread from 20 to ~200 to expose the count/time relation.
    for (std::size_t k = 0; k < a.synthetic; ++k) {
      const std::size_t n = 20 + (a.synthetic > 1 ? k * 180 / (a.synthetic - 1) : 80);
      auto scene = synthetic::make_scene({a.width, a.height}, n, 1000 + k);
      samples.push_back({"synthetic_" + std::to_string(k), std::move(scene.uda),
                         std::move(scene.masks), std::move(scene.conf)});
    }
  } else {
    if (a.uda_dir.empty() || a.masks_dir.empty())
      throw ValueError("bench needs --uda-dir and --masks-dir, or --synthetic N");
    std::vector<std::string> stems;
    auto uda = load_label_dir(a.uda_dir, &stems);
    for (std::size_t k = 0; k < stems.size(); ++k) {
      auto mp = detail::find_masks(a.masks_dir, stems[k]);
      if (!mp) throw IoError("masks missing for " + stems[k]);
      BenchSample s{stems[k], std::move(uda[k]), load_masks(mp->string()), std::nullopt};
      if (!a.conf_dir.empty()) s.conf = load_confidence((fs::path(a.conf_dir) / (stems[k] + ".png")).string());
      samples.push_back(std::move(s));
    }
  }
  const BenchReport rep = bench(reg, samples, a.repeats);
  if (!a.out.empty()) write_json(rep.to_json(), a.out);
  if (!g.quiet) {
    std::cout << std::left << std::setw(10) << "stage" << std::right << std::setw(12)
              << "mean_ms" << std::setw(12) << "min_ms" << std::setw(12) << "max_ms" << '\n';
    for (const auto& s : rep.stages)
      std::cout << std::left << std::setw(10) << s.stage << std::right << std::fixed
                << std::setprecision(3) << std::setw(12) << s.mean_ms << std::setw(12)
                << s.min_ms << std::setw(12) << s.max_ms << '\n';
    std::cout << "images " << rep.images << ", repeats " << rep.repeats
              << ", masks-vs-sgml-time pearson r " << fmt_opt(rep.mask_time_correlation, 3)
              << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-label refinement with instance masks"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "Class registry JSON (default: built-in Cityscapes-19)");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--quiet", g.quiet, "Suppress console output");

  StatsArgs stats;
  auto* c_stats = app.add_subcommand("stats", "Per-class area statistics of label maps");
  c_stats->add_option("--labels", stats.labels_dir, "Directory of source ground-truth PNGs")
      ->required()->check(CLI::ExistingDirectory);
  c_stats->add_option("--small", stats.small_count, "Number of small-area classes to suggest");
  c_stats->add_option("--large", stats.large_count, "Number of large-area classes to suggest");
  c_stats->add_option("--uda-dir", stats.uda_dir, "Target pseudo-labels for rare-class candidates")
      ->check(CLI::ExistingDirectory);
  c_stats->add_option("--rare-threshold", stats.rare_threshold, "Pixel-share cutoff")
      ->check(CLI::Range(0.0, 1.0));
  c_stats->add_option("--out", stats.out, "JSON output path");

  LabelArgs label;
  auto* c_label = app.add_subcommand("label", "Assign classes to masks and paint them");
  c_label->add_option("--method", label.method)->check(CLI::IsMember({"sgml", "vote"}));
  c_label->add_option("--uda", label.uda)->required()->check(CLI::ExistingFile);
  c_label->add_option("--masks", label.masks)->required()->check(CLI::ExistingPath);
  c_label->add_option("--out", label.out)->required();

  FuseArgs fuse;
  auto* c_fuse = app.add_subcommand("fuse", "Fuse painted mask labels with a dense pseudo-label");
  c_fuse->add_option("--strategy", fuse.strategy)->check(CLI::IsMember({1, 2, 3}));
  c_fuse->add_option("--uda", fuse.uda)->required()->check(CLI::ExistingFile);
  c_fuse->add_option("--sam", fuse.sam)->required()->check(CLI::ExistingFile);
  c_fuse->add_option("--conf", fuse.conf, "16-bit confidence PNG (strategy 3)")
      ->check(CLI::ExistingFile);
  c_fuse->add_option("--out", fuse.out)->required();

  MixArgs mix;
  auto* c_mix = app.add_subcommand("mix", "Class-level mixing of a source and target pair");
  c_mix->add_option("--src-img", mix.src_img)->required()->check(CLI::ExistingFile);
  c_mix->add_option("--src-lbl", mix.src_lbl)->required()->check(CLI::ExistingFile);
  c_mix->add_option("--tgt-img", mix.tgt_img)->required()->check(CLI::ExistingFile);
  c_mix->add_option("--tgt-lbl", mix.tgt_lbl)->required()->check(CLI::ExistingFile);
  c_mix->add_option("--seed", mix.seed);
  c_mix->add_option("--out-img", mix.out_img)->required();
  c_mix->add_option("--out-lbl", mix.out_lbl)->required();

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "Per-class IoU and mIoU against ground truth");
  c_eval->add_option("--pred-dir", ev.pred_dir)->required()->check(CLI::ExistingDirectory);
  c_eval->add_option("--gt-dir", ev.gt_dir)->required()->check(CLI::ExistingDirectory);
  c_eval->add_option("--baseline-dir", ev.baseline_dir, "Second prediction set to compare against")
      ->check(CLI::ExistingDirectory);
  c_eval->add_option("--out", ev.out, "JSON report path");

  RenderArgs rd;
  auto* c_render = app.add_subcommand("render", "Colorize a label map or a mask set");
  c_render->add_option("--label", rd.label)->check(CLI::ExistingFile);
  c_render->add_option("--masks", rd.masks)->check(CLI::ExistingPath);
  c_render->add_option("--out", rd.out)->required();
  c_render->add_option("--alpha-over", rd.alpha_over, "Image to blend the rendering over")
      ->check(CLI::ExistingFile);
  c_render->add_option("--alpha", rd.alpha, "Blend weight of the rendering")
      ->check(CLI::Range(0.0, 1.0));

  PipelineArgs pl;
  auto* c_pipe = app.add_subcommand("pipeline", "Label and fuse every image in a directory");
  c_pipe->add_option("--uda-dir", pl.uda_dir)->required();
  c_pipe->add_option("--masks-dir", pl.masks_dir)->required();
  c_pipe->add_option("--conf-dir", pl.conf_dir);
  c_pipe->add_option("--out-dir", pl.out_dir)->required();
  c_pipe->add_option("--strategy", pl.strategy)->check(CLI::IsMember({1, 2, 3}));
  c_pipe->add_option("--method", pl.method)->check(CLI::IsMember({"sgml", "vote"}));
  c_pipe->add_option("--summary", pl.summary, "Summary JSON path (default OUT_DIR/summary.json)");

  BenchArgs bn;
  auto* c_bench = app.add_subcommand("bench", "Per-stage run times");
  c_bench->add_option("--uda-dir", bn.uda_dir)->check(CLI::ExistingDirectory);
  c_bench->add_option("--masks-dir", bn.masks_dir)->check(CLI::ExistingDirectory);
  c_bench->add_option("--conf-dir", bn.conf_dir)->check(CLI::ExistingDirectory);
  c_bench->add_option("--repeats", bn.repeats)->check(CLI::PositiveNumber);
  c_bench->add_option("--synthetic", bn.synthetic, "Generate N synthetic scenes instead of reading files");
  c_bench->add_option("--width", bn.width)->check(CLI::PositiveNumber);
  c_bench->add_option("--height", bn.height)->check(CLI::PositiveNumber);
  c_bench->add_option("--out", bn.out, "JSON report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*c_stats) return run_stats(g, stats);
    if (*c_label) return run_label(g, label);
    if (*c_fuse) return run_fuse(g, fuse);
    if (*c_mix) return run_mix(g, mix);
    if (*c_eval) return run_eval(g, ev);
    if (*c_render) return run_render(g, rd);
    if (*c_pipe) return run_pipeline_cmd(g, pl);
    if (*c_bench) return run_bench(g, bn);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
