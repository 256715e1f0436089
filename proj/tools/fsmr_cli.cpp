// fsmr: command-line front end.
//
//   fsmr resample --rotate 30 in.png out.png
//   fsmr compare --synthetic --zoom 1.5 --report json
//   fsmr split data/ manifest.csv --test-fraction 0.1 --seed 7
//   fsmr augment manifest.csv out/ --method fsmr --seed 7
//   fsmr stats manifest.csv
//   fsmr bench in.png --reps 5
//
// Exit codes: 0 ok, 1 I/O failure, 2 invalid arguments, 3 numerical failure.

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "fsmr/config.hpp"
#include "fsmr/evaluation.hpp"
#include "fsmr/image_io.hpp"
#include "fsmr/pipeline.hpp"
#include "fsmr/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

enum ExitCode { kOk = 0, kIoFailure = 1, kBadArguments = 2, kNumericalFailure = 3 };

const std::vector<std::string> kMethodNames{"bilinear", "bicubic", "fsmr"};

struct GlobalOptions {
  unsigned threads = 0;
  std::string fsmr_config;
  std::vector<std::string> fsmr_set;
  std::string report = "text";
};

struct TransformFlags {
  std::optional<double> rotate, zoom;
  std::optional<std::string> resize;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--rotate", rotate, "rotate about the image center, degrees (counter-clockwise)");
    cmd->add_option("--zoom", zoom, "zoom about the image center by this factor");
    cmd->add_option("--resize", resize, "resize to WxH");
  }

  int count() const { return rotate.has_value() + zoom.has_value() + resize.has_value(); }
};

std::pair<int, int> parse_dims(const std::string& text) {
  static const std::regex re(R"((\d{1,6})[xX](\d{1,6}))");
  std::smatch m;
  if (!std::regex_match(text, m, re)) throw fsmr::contract_error("expected WxH, got '" + text + "'");
  const int w = std::stoi(m[1]), h = std::stoi(m[2]);
  if (w < 1 || h < 1) throw fsmr::contract_error("dimensions must be positive: " + text);
  return {w, h};
}

std::pair<double, double> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw fsmr::contract_error("expected lo:hi, got '" + text + "'");
  try {
    std::size_t a = 0, b = 0;
    const double lo = std::stod(text.substr(0, colon), &a);
    const double hi = std::stod(text.substr(colon + 1), &b);
    if (a != colon || b != text.size() - colon - 1) throw std::invalid_argument(text);
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw fsmr::contract_error("expected lo:hi, got '" + text + "'");
  }
}

fsmr::TransformSpec transform_spec(const TransformFlags& f) {
  if (f.count() > 1) throw fsmr::contract_error("exactly one transform (--rotate, --zoom or --resize) may be given");
  fsmr::TransformSpec spec;
  if (f.rotate) {
    if (!std::isfinite(*f.rotate)) throw fsmr::contract_error("--rotate must be finite");
    spec = {fsmr::TransformKind::rotate, *f.rotate};
  } else if (f.zoom) {
    if (!(*f.zoom > 0.0) || !std::isfinite(*f.zoom)) throw fsmr::contract_error("--zoom must be positive");
    spec = {fsmr::TransformKind::zoom, *f.zoom};
  } else if (f.resize) {
    const auto [w, h] = parse_dims(*f.resize);
    spec = {fsmr::TransformKind::resize, 0.0, w, h};
  }
  return spec;
}

std::string describe(const fsmr::TransformSpec& s) {
  std::ostringstream out;
  switch (s.kind) {
    case fsmr::TransformKind::identity: out << "identity"; break;
    case fsmr::TransformKind::rotate: out << "rotate:" << s.value; break;
    case fsmr::TransformKind::zoom: out << "zoom:" << s.value; break;
    case fsmr::TransformKind::resize: out << "resize:" << s.width << 'x' << s.height; break;
  }
  return out.str();
}

fsmr::FsmrParams fsmr_params(const GlobalOptions& g) {
  fsmr::FsmrParams p;
  if (!g.fsmr_config.empty()) p = fsmr::load_fsmr_config(g.fsmr_config, p);
  for (const auto& kv : g.fsmr_set) p = fsmr::apply_fsmr_config(p, kv);
  return p;
}

std::string describe(const fsmr::FsmrParams& p) {
  std::ostringstream out;
  out << "block_size=" << p.block_size << " margin=" << p.margin
      << " max_iterations=" << p.max_iterations << " energy_epsilon=" << p.energy_epsilon
      << " gamma=" << p.gamma << " rho_spatial=" << p.rho_spatial << " rho_freq=" << p.rho_freq;
  return out.str();
}

fsmr::Method method_of(const std::string& name) {
  const auto m = fsmr::parse_method(name);
  if (!m) throw fsmr::contract_error("unknown method '" + name + "'");
  return *m;
}

// PSNR may be infinite; JSON has no representation for that, so it is spelled out.
ordered_json psnr_json(double v) { return std::isinf(v) ? ordered_json("inf") : ordered_json(v); }

std::string format_db(double v) {
  if (std::isinf(v)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

// ---------------------------------------------------------------------------

struct ResampleArgs {
  std::string method = "fsmr";
  TransformFlags transform;
  bool expand = false;
  std::string input, output;
};

int cmd_resample(const ResampleArgs& a, const GlobalOptions& g) {
  if (a.transform.count() != 1)
    throw fsmr::contract_error("exactly one transform (--rotate, --zoom or --resize) is required");
  const fsmr::TransformSpec spec = transform_spec(a.transform);
  const fsmr::Method method = method_of(a.method);
  fsmr::WarpOptions opt;
  opt.fsmr = fsmr_params(g);
  opt.threads = g.threads;
  const fsmr::RasterImage src = fsmr::read_image(a.input);

  fsmr::PlacedTransform t = fsmr::place_transform(spec, src.width(), src.height());
  if (a.expand && spec.kind == fsmr::TransformKind::rotate) {
    const auto c = fsmr::rotation_canvas(spec.value, src.width(), src.height());
    t = {c.transform, c.width, c.height};
  }
  fsmr::ResampleStats stats;
  const auto out = fsmr::warp(src, t.transform, t.width, t.height, method, opt, &stats);
  fsmr::write_image(a.output, out);

  std::cout << "method=" << a.method << " transform=" << describe(spec) << " input=" << src.width()
            << 'x' << src.height() << " output=" << t.width << 'x' << t.height
            << " threads=" << fsmr::resolve_threads(g.threads) << '\n';
  if (method == fsmr::Method::fsmr)
    std::cout << "fsmr " << describe(opt.fsmr) << " blocks=" << stats.blocks
              << " fallback_blocks=" << stats.fallback_blocks << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

struct CompareArgs {
  TransformFlags transform;
  bool synthetic = false;
  int size = 96;
  std::uint64_t seed = 1;
  double crop = 1.0;
  bool luma = false;
  std::string out_dir;
  std::string input;
};

int cmd_compare(const CompareArgs& a, const GlobalOptions& g) {
  const fsmr::TransformSpec spec = transform_spec(a.transform);
  if (!(a.crop > 0.0 && a.crop <= 1.0)) throw fsmr::contract_error("--crop must lie in (0, 1]");
  fsmr::EvaluationOptions opt;
  opt.warp.fsmr = fsmr_params(g);
  opt.warp.threads = g.threads;
  opt.metrics.luma_only = a.luma;
  opt.crop_fraction = a.crop;

  std::string mode;
  fsmr::RasterImage reference;
  std::vector<fsmr::MethodResult> results;
  if (a.synthetic) {
    if (!a.input.empty()) throw fsmr::contract_error("--synthetic takes no input image");
    if (a.size < 16) throw fsmr::contract_error("--size must be at least 16");
    mode = "synthetic";
    const auto c = fsmr::make_synthetic_case(fsmr::BandLimitedPattern::random(a.seed), a.size, spec);
    reference = c.reference;
    results = fsmr::compare_methods(c.source, c.reference, c.transform, opt);
  } else {
    if (a.input.empty()) throw fsmr::contract_error("compare needs an input image or --synthetic");
    mode = "round-trip";
    reference = fsmr::read_image(a.input);
    const auto ref_win = fsmr::evaluation_window(reference, a.crop);
    for (fsmr::Method m : fsmr::kAllMethods) {
      fsmr::MethodResult r;
      r.method = m;
      r.output = fsmr::round_trip(reference, spec, m, opt.warp);
      r.quality = fsmr::quality_report(ref_win, fsmr::evaluation_window(r.output, a.crop), opt.metrics);
      results.push_back(std::move(r));
    }
  }

  if (!a.out_dir.empty()) {
    fsmr::write_image(fs::path(a.out_dir) / "reference.png", reference);
    for (const auto& r : results)
      fsmr::write_image(fs::path(a.out_dir) / (std::string(fsmr::to_string(r.method)) + ".png"), r.output);
  }

  if (g.report == "json") {
    ordered_json j;
    j["mode"] = mode;
    j["transform"] = describe(spec);
    if (a.synthetic) j["seed"] = a.seed;
    j["results"] = ordered_json::array();
    for (const auto& r : results)
      j["results"].push_back(
          {{"method", fsmr::to_string(r.method)}, {"psnr_db", psnr_json(r.quality.psnr_db)}, {"ssim", r.quality.ssim}});
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "mode " << mode << ", transform " << describe(spec) << '\n';
    std::printf("%-10s %12s %10s\n", "method", "psnr_db", "ssim");
    for (const auto& r : results)
      std::printf("%-10s %12s %10.6f\n", std::string(fsmr::to_string(r.method)).c_str(),
                  format_db(r.quality.psnr_db).c_str(), r.quality.ssim);
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct SplitArgs {
  std::string input, output;
  double test_fraction = 0.1;
  double val_fraction = 0.0;
  std::uint64_t seed = 0;
};

std::vector<fsmr::ManifestEntry> load_entries(const std::string& input) {
  if (fs::is_directory(input)) return fsmr::scan_class_tree(input);
  return fsmr::read_manifest_csv(input).entries;
}

int cmd_split(const SplitArgs& a, const GlobalOptions&) {
  auto entries = load_entries(a.input);
  if (entries.empty()) throw fsmr::io_error("no images found in " + a.input);
  for (auto& e : entries) e.split.reset();
  const auto m = fsmr::split_dataset(std::move(entries), a.test_fraction, a.val_fraction, a.seed);
  fsmr::write_manifest_csv(a.output, m);

  std::vector<std::string> order;
  std::map<std::string, std::array<int, 3>> counts;
  for (const auto& e : m.entries) {
    auto [it, fresh] = counts.try_emplace(e.class_label, std::array<int, 3>{0, 0, 0});
    if (fresh) order.push_back(e.class_label);
    ++it->second[static_cast<int>(*e.split)];
  }
  std::printf("%-24s %6s %6s %6s\n", "class", "train", "val", "test");
  for (const auto& c : order)
    std::printf("%-24s %6d %6d %6d\n", c.c_str(), counts[c][0], counts[c][1], counts[c][2]);
  return kOk;
}

// ---------------------------------------------------------------------------

struct AugmentArgs {
  std::string manifest, output;
  std::string method = "fsmr";
  std::optional<std::uint64_t> seed;
  std::string zoom_range = "0.7:1.3";
  std::string resize = "224x224";
  std::string plan;
};

int cmd_augment(const AugmentArgs& a, const GlobalOptions& g) {
  const fsmr::Method method = method_of(a.method);
  const fsmr::FsmrParams params = fsmr_params(g);
  fsmr::AugmentationPlan plan;
  if (!a.plan.empty()) {
    std::ifstream in(a.plan);
    if (!in) throw fsmr::io_error("cannot open plan " + a.plan);
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
      plan = fsmr::plan_from_json(ss.str());
    } catch (const nlohmann::json::exception& e) {
      throw fsmr::io_error("invalid plan " + a.plan + ": " + e.what());
    }
  } else {
    if (a.manifest.empty()) throw fsmr::contract_error("augment needs a manifest or --plan");
    const auto manifest = fsmr::read_manifest_csv(a.manifest);
    const auto [w, h] = parse_dims(a.resize);
    plan = fsmr::build_plan(manifest, a.seed.value_or(manifest.seed), parse_range(a.zoom_range), w, h);
  }
  if (a.output.empty()) throw fsmr::contract_error("augment needs an output root");
  const fs::path root(a.output);
  fsmr::detail::write_text_atomic(root / "plan.json", fsmr::plan_to_json(plan) + "\n");
  const auto out = fsmr::execute_plan(plan, method, params, root, {g.threads, fsmr::log_stderr});
  fsmr::write_output_manifest(root, out);
  std::cout << "method=" << a.method << " seed=" << plan.seed << " sources=" << plan.records.size()
            << " outputs=" << out.records.size() << " errors=" << out.errors.size() << '\n';
  if (!out.errors.empty())
    std::cerr << out.errors.size() << " source(s) failed; see " << (root / "errors.jsonl").string() << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

struct StatsArgs {
  std::string input;
  std::string output;
};

int cmd_stats(const StatsArgs& a, const GlobalOptions&) {
  const auto res = fsmr::class_std_stats(load_entries(a.input));
  const std::string csv = fsmr::format_stats_csv(res.classes);
  if (a.output.empty())
    std::cout << csv;
  else
    fsmr::detail::write_text_atomic(a.output, csv);
  if (!res.errors.empty()) std::cerr << res.errors.size() << " image(s) skipped\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string input;
  TransformFlags transform;
  std::vector<std::string> methods;
  int reps = 3;
};

int cmd_bench(const BenchArgs& a, const GlobalOptions& g) {
  if (a.reps < 1) throw fsmr::contract_error("--reps must be at least 1");
  fsmr::TransformSpec spec = transform_spec(a.transform);
  if (spec.kind == fsmr::TransformKind::identity) spec = {fsmr::TransformKind::rotate, 30.0};
  fsmr::WarpOptions opt;
  opt.fsmr = fsmr_params(g);
  opt.threads = g.threads;
  const auto src = fsmr::read_image(a.input);
  const auto t = fsmr::place_transform(spec, src.width(), src.height());
  const double mp = static_cast<double>(t.width) * t.height / 1e6;

  ordered_json rows = ordered_json::array();
  for (const std::string& name : a.methods.empty() ? kMethodNames : a.methods) {
    const fsmr::Method m = method_of(name);
    std::vector<double> ms;
    for (int r = 0; r < a.reps; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto out = fsmr::warp(src, t.transform, t.width, t.height, m, opt);
      ms.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count() / mp);
    }
    double mean = 0.0;
    for (double v : ms) mean += v;
    mean /= ms.size();
    std::ranges::sort(ms);
    const double median = fsmr::percentile_sorted(ms, 0.5);
    rows.push_back({{"method", name}, {"reps", a.reps}, {"mean_ms_per_mp", mean}, {"median_ms_per_mp", median}});
  }
  if (g.report == "json") {
    std::cout << rows.dump(2) << '\n';
  } else {
    std::cout << "transform " << describe(spec) << ", " << t.width << 'x' << t.height
              << ", threads " << fsmr::resolve_threads(g.threads) << '\n';
    std::printf("%-10s %6s %16s %16s\n", "method", "reps", "mean_ms_per_mp", "median_ms_per_mp");
    for (const auto& r : rows)
      std::printf("%-10s %6d %16.3f %16.3f\n", r["method"].get<std::string>().c_str(), r["reps"].get<int>(),
                  r["mean_ms_per_mp"].get<double>(), r["median_ms_per_mp"].get<double>());
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequency-selective mesh-to-grid resampling and dataset augmentation"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--threads", g.threads, "worker threads (0 = all cores)")->envname("FSMR_THREADS");
  app.add_option("--fsmr-config", g.fsmr_config, "FSMR parameter file (key=value lines or JSON)");
  app.add_option("--fsmr-set", g.fsmr_set, "FSMR parameter override key=value, applied after --fsmr-config");
  app.add_option("--report", g.report, "report format")->check(CLI::IsMember({"text", "json"}));

  ResampleArgs ra;
  auto* resample = app.add_subcommand("resample", "warp one image with one method");
  resample->add_option("--method", ra.method)->check(CLI::IsMember(kMethodNames));
  ra.transform.add_to(resample);
  resample->add_flag("--expand", ra.expand, "rotate onto the bounding-box canvas instead of the source size");
  resample->add_option("input", ra.input)->required();
  resample->add_option("output", ra.output)->required();

  CompareArgs ca;
  auto* compare = app.add_subcommand("compare", "score all three methods on one transform");
  ca.transform.add_to(compare);
  compare->add_flag("--synthetic", ca.synthetic, "band-limited test pattern with analytic ground truth");
  compare->add_option("--size", ca.size, "synthetic pattern size");
  compare->add_option("--seed", ca.seed, "synthetic pattern seed");
  compare->add_option("--crop", ca.crop, "score the centered window of this fraction per side");
  compare->add_flag("--luma", ca.luma, "score BT.601 luma instead of every channel");
  compare->add_option("--out-dir", ca.out_dir, "write reference and per-method images here");
  compare->add_option("input", ca.input, "image for round-trip mode");

  SplitArgs sa;
  auto* split = app.add_subcommand("split", "assign train/val/test per class");
  split->add_option("input", sa.input, "class-per-directory tree or manifest CSV")->required();
  split->add_option("output", sa.output, "manifest CSV to write")->required();
  split->add_option("--test-fraction", sa.test_fraction);
  split->add_option("--val-fraction", sa.val_fraction);
  split->add_option("--seed", sa.seed);

  AugmentArgs aa;
  auto* augment = app.add_subcommand("augment", "build and execute the augmentation plan");
  augment->add_option("manifest", aa.manifest, "split manifest CSV");
  augment->add_option("output", aa.output, "output root");
  augment->add_option("--method", aa.method)->check(CLI::IsMember(kMethodNames));
  augment->add_option("--seed", aa.seed, "plan seed (default: the manifest's split seed)");
  augment->add_option("--zoom-range", aa.zoom_range, "lo:hi");
  augment->add_option("--resize", aa.resize, "output size WxH");
  augment->add_option("--plan", aa.plan, "execute this plan.json instead of building one");

  StatsArgs st;
  auto* stats = app.add_subcommand("stats", "per-class box statistics of image standard deviation");
  stats->add_option("input", st.input, "manifest CSV or class-per-directory tree")->required();
  stats->add_option("-o,--output", st.output, "write the CSV here instead of stdout");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "time each method per megapixel");
  bench->add_option("input", ba.input)->required();
  ba.transform.add_to(bench);
  bench->add_option("--method", ba.methods)->check(CLI::IsMember(kMethodNames));
  bench->add_option("--reps", ba.reps);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadArguments;
  }
  // `augment --plan p.json out/` has a single positional: the output root.
  if (!aa.plan.empty() && aa.output.empty()) std::swap(aa.manifest, aa.output);

  try {
    if (*resample) return cmd_resample(ra, g);
    if (*compare) return cmd_compare(ca, g);
    if (*split) return cmd_split(sa, g);
    if (*augment) return cmd_augment(aa, g);
    if (*stats) return cmd_stats(st, g);
    if (*bench) return cmd_bench(ba, g);
  } catch (const fsmr::contract_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadArguments;
  } catch (const fsmr::numerical_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoFailure;
  }
  return kBadArguments;
}
