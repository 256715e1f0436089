#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fsmr/errors.hpp"
#include "fsmr/geometry.hpp"
#include "fsmr/image_io.hpp"
#include "fsmr/parallel.hpp"
#include "fsmr/raster.hpp"
#include "fsmr/rng.hpp"
#include "fsmr/warp.hpp"

namespace fsmr {

enum class Split { train, val, test };

inline std::string_view to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "?";
}

inline std::optional<Split> parse_split(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "val") return Split::val;
  if (s == "test") return Split::test;
  return std::nullopt;
}

struct ManifestEntry {
  std::string path;
  std::string class_label;
  std::optional<Split> split;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::uint64_t seed = 0;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

using LogFn = std::function<void(const std::string&)>;

inline void log_stderr(const std::string& line) { std::cerr << line << '\n'; }

// ---------------------------------------------------------------------------
// CSV manifest: header `path,class[,split]`. A leading `# seed=<u64>` comment
// carries the split seed.

namespace detail {

inline std::vector<std::string> parse_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        fields.back() += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.emplace_back();
    } else if (ch != '\r') {
      fields.back() += ch;
    }
  }
  if (quoted) throw io_error("unterminated quote in CSV line: " + line);
  return fields;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

}  // namespace detail

inline DatasetManifest parse_manifest_csv(std::istream& in) {
  DatasetManifest m;
  std::string line;
  std::optional<std::vector<std::string>> header;
  int col_path = -1, col_class = -1, col_split = -1;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      constexpr std::string_view key = "# seed=";
      if (line.starts_with(key)) m.seed = std::stoull(line.substr(key.size()));
      continue;
    }
    auto fields = detail::parse_csv_line(line);
    if (!header) {
      header = fields;
      for (int i = 0; i < static_cast<int>(fields.size()); ++i) {
        if (fields[i] == "path") col_path = i;
        else if (fields[i] == "class") col_class = i;
        else if (fields[i] == "split") col_split = i;
      }
      if (col_path < 0 || col_class < 0)
        throw io_error("manifest header must contain path and class columns");
      continue;
    }
    if (static_cast<int>(fields.size()) <= std::max({col_path, col_class, col_split}))
      throw io_error("manifest line " + std::to_string(lineno) + ": missing columns");
    ManifestEntry e{fields[col_path], fields[col_class], std::nullopt};
    if (col_split >= 0 && !fields[col_split].empty()) {
      e.split = parse_split(fields[col_split]);
      if (!e.split)
        throw io_error("manifest line " + std::to_string(lineno) + ": unknown split '" +
                       fields[col_split] + "'");
    }
    m.entries.push_back(std::move(e));
  }
  if (!header) throw io_error("manifest is empty");
  return m;
}

inline DatasetManifest read_manifest_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open manifest " + path.string());
  return parse_manifest_csv(in);
}

inline std::string format_manifest_csv(const DatasetManifest& m) {
  std::ostringstream out;
  out << "# seed=" << m.seed << '\n' << "path,class,split\n";
  for (const auto& e : m.entries)
    out << detail::csv_field(e.path) << ',' << detail::csv_field(e.class_label) << ','
        << (e.split ? to_string(*e.split) : "") << '\n';
  return out.str();
}

namespace detail {

inline void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  const auto dir = path.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  auto tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << text;
    if (!out) throw io_error("cannot write " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

inline bool is_image_file(const std::filesystem::path& p) {
  const std::string ext = lower_extension(p);
  return ext == ".png" || ext == ".ppm" || ext == ".pgm" || ext == ".pnm";
}

}  // namespace detail

inline void write_manifest_csv(const std::filesystem::path& path, const DatasetManifest& m) {
  detail::write_text_atomic(path, format_manifest_csv(m));
}

// Directory-per-class tree: root/<class>/<image>. Classes and files sorted by name.
inline std::vector<ManifestEntry> scan_class_tree(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw io_error("not a directory: " + root.string());
  std::vector<fs::path> classes;
  for (const auto& d : fs::directory_iterator(root))
    if (d.is_directory()) classes.push_back(d.path());
  std::ranges::sort(classes);
  std::vector<ManifestEntry> entries;
  for (const auto& cls : classes) {
    std::vector<fs::path> files;
    for (const auto& f : fs::directory_iterator(cls))
      if (f.is_regular_file() && detail::is_image_file(f.path())) files.push_back(f.path());
    std::ranges::sort(files);
    for (const auto& f : files)
      entries.push_back({f.generic_string(), cls.filename().string(), std::nullopt});
  }
  return entries;
}

// ---------------------------------------------------------------------------
// Splitting

namespace detail {

// Classes in order of first appearance, each with the indices of its entries.
inline std::vector<std::pair<std::string, std::vector<std::size_t>>> group_by_class(
    const std::vector<ManifestEntry>& entries) {
  std::vector<std::pair<std::string, std::vector<std::size_t>>> groups;
  std::map<std::string, std::size_t, std::less<>> where;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto [it, fresh] = where.try_emplace(entries[i].class_label, groups.size());
    if (fresh) groups.emplace_back(entries[i].class_label, std::vector<std::size_t>{});
    groups[it->second].second.push_back(i);
  }
  return groups;
}

}  // namespace detail

// Per class: sort by path, shuffle with a stream keyed on (seed, class),
// then take round(n * test_fraction) test and round(n * val_fraction) val
// entries; the rest is train. The input order is preserved in the result.
inline DatasetManifest split_dataset(std::vector<ManifestEntry> entries, double test_fraction,
                                     double val_fraction, std::uint64_t seed) {
  detail::require(test_fraction >= 0.0 && test_fraction < 1.0 && val_fraction >= 0.0 &&
                      val_fraction < 1.0 && test_fraction + val_fraction < 1.0,
                  "split_dataset: fractions must lie in [0, 1) and sum to less than 1");
  {
    std::set<std::string_view> seen;
    for (const auto& e : entries)
      detail::require(seen.insert(e.path).second, "split_dataset: duplicate path " + e.path);
  }
  for (auto& [label, idx] : detail::group_by_class(entries)) {
    const std::size_t n = idx.size();
    const auto n_test = static_cast<std::size_t>(std::llround(n * test_fraction));
    const auto n_val = static_cast<std::size_t>(std::llround(n * val_fraction));
    if (n_test + n_val >= n)
      throw contract_error("split_dataset: class '" + label + "' has " + std::to_string(n) +
                           " entries, too few for " + std::to_string(n_test) + " test and " +
                           std::to_string(n_val) + " val entries plus one train entry");
    std::ranges::sort(idx, [&](std::size_t a, std::size_t b) { return entries[a].path < entries[b].path; });
    CounterRng rng(seed, "split:" + label);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(idx[i], idx[rng.below(i + 1)]);
    for (std::size_t i = 0; i < n; ++i)
      entries[idx[i]].split = i < n_test ? Split::test : i < n_test + n_val ? Split::val : Split::train;
  }
  return {std::move(entries), seed};
}

// ---------------------------------------------------------------------------
// Augmentation plan

inline constexpr double kMaxRotationDegrees = 45.0;

struct PlanRecord {
  std::string src_path;
  std::string class_label;
  Split split = Split::train;
  std::optional<double> angle_deg;    // train/val only
  std::optional<double> zoom_factor;  // train/val only

  friend bool operator==(const PlanRecord&, const PlanRecord&) = default;
};

struct AugmentationPlan {
  std::vector<PlanRecord> records;
  std::uint64_t seed = 0;
  double zoom_lo = 0.7, zoom_hi = 1.3;
  int target_w = 224, target_h = 224;

  friend bool operator==(const AugmentationPlan&, const AugmentationPlan&) = default;
};

// Per-entry parameters come from a stream keyed on (seed, path): they do not
// depend on entry order or on which interpolation method executes the plan.
inline AugmentationPlan build_plan(const DatasetManifest& manifest, std::uint64_t seed,
                                   std::pair<double, double> zoom_range, int target_w,
                                   int target_h) {
  detail::require(zoom_range.first > 0.0 && zoom_range.first <= zoom_range.second &&
                      std::isfinite(zoom_range.second),
                  "build_plan: zoom range must satisfy 0 < lo <= hi");
  detail::require(target_w >= 1 && target_h >= 1, "build_plan: target dims must be positive");
  AugmentationPlan plan;
  plan.seed = seed;
  plan.zoom_lo = zoom_range.first;
  plan.zoom_hi = zoom_range.second;
  plan.target_w = target_w;
  plan.target_h = target_h;
  for (const auto& e : manifest.entries) {
    detail::require(e.split.has_value(), "build_plan: entry without split: " + e.path);
    PlanRecord r{e.path, e.class_label, *e.split, std::nullopt, std::nullopt};
    if (*e.split != Split::test) {
      CounterRng rng(seed, "augment:" + e.path);
      r.angle_deg = rng.uniform(-kMaxRotationDegrees, kMaxRotationDegrees);
      r.zoom_factor = rng.uniform(zoom_range.first, zoom_range.second);
    }
    plan.records.push_back(std::move(r));
  }
  return plan;
}

namespace detail {

inline nlohmann::ordered_json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

inline std::optional<double> optional_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace detail

inline std::string plan_to_json(const AugmentationPlan& plan) {
  nlohmann::ordered_json j;
  j["seed"] = plan.seed;
  j["zoom_range"] = {plan.zoom_lo, plan.zoom_hi};
  j["target_w"] = plan.target_w;
  j["target_h"] = plan.target_h;
  auto& recs = j["records"] = nlohmann::ordered_json::array();
  for (const auto& r : plan.records) {
    nlohmann::ordered_json o;
    o["src_path"] = r.src_path;
    o["class"] = r.class_label;
    o["split"] = to_string(r.split);
    o["angle_deg"] = detail::optional_json(r.angle_deg);
    o["zoom_factor"] = detail::optional_json(r.zoom_factor);
    recs.push_back(std::move(o));
  }
  return j.dump(2) + "\n";
}

inline AugmentationPlan plan_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  AugmentationPlan plan;
  plan.seed = j.at("seed").get<std::uint64_t>();
  plan.zoom_lo = j.at("zoom_range").at(0).get<double>();
  plan.zoom_hi = j.at("zoom_range").at(1).get<double>();
  plan.target_w = j.at("target_w").get<int>();
  plan.target_h = j.at("target_h").get<int>();
  for (const auto& o : j.at("records")) {
    const auto split = parse_split(o.at("split").get<std::string>());
    if (!split) throw io_error("plan: unknown split");
    plan.records.push_back({o.at("src_path").get<std::string>(), o.at("class").get<std::string>(),
                            *split, detail::optional_from_json(o.at("angle_deg")),
                            detail::optional_from_json(o.at("zoom_factor"))});
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Plan execution

enum class AugmentOp { rotate, zoom, resize };

inline std::string_view to_string(AugmentOp op) {
  switch (op) {
    case AugmentOp::rotate: return "rotate";
    case AugmentOp::zoom: return "zoom";
    case AugmentOp::resize: return "resize";
  }
  return "?";
}

struct OutputRecord {
  std::string out_path;  // relative to the output root
  std::string src_path;
  std::string class_label;
  Split split = Split::train;
  AugmentOp op = AugmentOp::resize;
  std::optional<double> angle_deg;
  std::optional<double> zoom_factor;
  Method method = Method::bilinear;
  int target_w = 0, target_h = 0;

  friend bool operator==(const OutputRecord&, const OutputRecord&) = default;
};

struct EntryError {
  std::string src_path;
  std::string message;
};

struct OutputManifest {
  std::vector<OutputRecord> records;
  std::vector<EntryError> errors;
};

struct ExecuteOptions {
  unsigned threads = 0;
  LogFn log = log_stderr;
};

inline std::string output_record_json(const OutputRecord& r) {
  nlohmann::ordered_json o;
  o["out_path"] = r.out_path;
  o["src_path"] = r.src_path;
  o["class"] = r.class_label;
  o["split"] = to_string(r.split);
  o["op"] = to_string(r.op);
  o["angle_deg"] = detail::optional_json(r.angle_deg);
  o["zoom_factor"] = detail::optional_json(r.zoom_factor);
  o["method"] = to_string(r.method);
  o["target_w"] = r.target_w;
  o["target_h"] = r.target_h;
  return o.dump();
}

inline std::string format_output_manifest(const OutputManifest& m) {
  std::string out;
  for (const auto& r : m.records) out += output_record_json(r) + "\n";
  return out;
}

inline std::vector<OutputRecord> parse_output_manifest(std::istream& in) {
  std::vector<OutputRecord> recs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto o = nlohmann::json::parse(line);
    OutputRecord r;
    r.out_path = o.at("out_path").get<std::string>();
    r.src_path = o.at("src_path").get<std::string>();
    r.class_label = o.at("class").get<std::string>();
    const auto split = parse_split(o.at("split").get<std::string>());
    const auto method = parse_method(o.at("method").get<std::string>());
    const std::string op = o.at("op").get<std::string>();
    if (!split || !method) throw io_error("output manifest: bad split or method");
    if (op == "rotate") r.op = AugmentOp::rotate;
    else if (op == "zoom") r.op = AugmentOp::zoom;
    else if (op == "resize") r.op = AugmentOp::resize;
    else throw io_error("output manifest: bad op " + op);
    r.split = *split;
    r.method = *method;
    r.angle_deg = detail::optional_from_json(o.at("angle_deg"));
    r.zoom_factor = detail::optional_from_json(o.at("zoom_factor"));
    r.target_w = o.at("target_w").get<int>();
    r.target_h = o.at("target_h").get<int>();
    recs.push_back(std::move(r));
  }
  return recs;
}

namespace detail {

inline std::vector<OutputRecord> planned_outputs(const PlanRecord& r, const AugmentationPlan& plan,
                                                 Method method) {
  const std::filesystem::path src(r.src_path);
  const std::string stem = src.stem().string();
  auto make = [&](AugmentOp op) {
    OutputRecord o;
    o.out_path = (std::filesystem::path(std::string(to_string(r.split))) / r.class_label /
                  (stem + "_" + std::string(to_string(op)) + ".png"))
                     .generic_string();
    o.src_path = r.src_path;
    o.class_label = r.class_label;
    o.split = r.split;
    o.op = op;
    if (op == AugmentOp::rotate) o.angle_deg = r.angle_deg;
    if (op == AugmentOp::zoom) o.zoom_factor = r.zoom_factor;
    o.method = method;
    o.target_w = plan.target_w;
    o.target_h = plan.target_h;
    return o;
  };
  if (r.split == Split::test) return {make(AugmentOp::resize)};
  return {make(AugmentOp::rotate), make(AugmentOp::zoom), make(AugmentOp::resize)};
}

inline RasterImage render_output(const RasterImage& src, const OutputRecord& o, Method method,
                                 const WarpOptions& wopt) {
  const int tw = o.target_w, th = o.target_h;
  auto resize = [&](const RasterImage& img) {
    return warp(img, resize_transform(img.width(), img.height(), tw, th), tw, th, method, wopt);
  };
  switch (o.op) {
    case AugmentOp::rotate: {
      const Canvas canvas = rotation_canvas(*o.angle_deg, src.width(), src.height());
      return resize(warp(src, canvas.transform, canvas.width, canvas.height, method, wopt));
    }
    case AugmentOp::zoom: {
      const AffineTransform z =
          zoom_about(*o.zoom_factor, 0.5 * (src.width() - 1), 0.5 * (src.height() - 1));
      return resize(warp(src, z, src.width(), src.height(), method, wopt));
    }
    case AugmentOp::resize: return resize(src);
  }
  throw contract_error("render_output: unknown op");
}

}  // namespace detail

// Emits rotate+resize, zoom+resize and resize outputs for train/val entries
// and a resize output for test entries, every interpolation step using
// `method`. Unreadable sources are skipped and reported in `errors`. Records
// are sorted by (src_path, op) regardless of scheduling.
inline OutputManifest execute_plan(const AugmentationPlan& plan, Method method,
                                   const FsmrParams& fsmr_params,
                                   const std::filesystem::path& output_root,
                                   const ExecuteOptions& opt = {}) {
  fsmr_params.validate();
  std::vector<std::vector<OutputRecord>> planned;
  std::set<std::string> out_paths;
  for (const auto& r : plan.records) {
    planned.push_back(detail::planned_outputs(r, plan, method));
    for (const auto& o : planned.back())
      if (!out_paths.insert(o.out_path).second)
        throw contract_error("execute_plan: output collision at " + o.out_path);
  }

  WarpOptions wopt;
  wopt.fsmr = fsmr_params;
  wopt.threads = 1;
  std::vector<std::optional<std::string>> failures(plan.records.size());
  parallel_for(plan.records.size(), opt.threads, [&](std::size_t i) {
    try {
      const RasterImage src = read_image(plan.records[i].src_path);
      for (const auto& o : planned[i])
        write_image(output_root / o.out_path, detail::render_output(src, o, method, wopt));
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  });

  OutputManifest result;
  std::vector<std::size_t> order(plan.records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) {
    return plan.records[a].src_path < plan.records[b].src_path;
  });
  for (std::size_t i : order) {
    if (failures[i]) {
      if (opt.log) opt.log("skipped " + plan.records[i].src_path + ": " + *failures[i]);
      result.errors.push_back({plan.records[i].src_path, *failures[i]});
      continue;
    }
    for (auto& o : planned[i]) result.records.push_back(std::move(o));
  }
  return result;
}

inline void write_output_manifest(const std::filesystem::path& output_root,
                                  const OutputManifest& m) {
  detail::write_text_atomic(output_root / "manifest.jsonl", format_output_manifest(m));
  std::string errs;
  for (const auto& e : m.errors) {
    nlohmann::ordered_json o;
    o["src_path"] = e.src_path;
    o["error"] = e.message;
    errs += o.dump() + "\n";
  }
  detail::write_text_atomic(output_root / "errors.jsonl", errs);
}

// ---------------------------------------------------------------------------
// Per-class standard deviation statistics

struct ClassBoxStats {
  std::string class_label;
  double min = 0.0, p25 = 0.0, median = 0.0, p75 = 0.0, max = 0.0;
  std::size_t count = 0;
};

// Population standard deviation of the luma plane.
inline double image_std(const RasterImage& img) {
  const RasterImage y = luma(img);
  const auto p = y.plane(0);
  double mean = 0.0;
  for (double v : p) mean += v;
  mean /= static_cast<double>(p.size());
  double var = 0.0;
  for (double v : p) var += (v - mean) * (v - mean);
  return std::sqrt(var / static_cast<double>(p.size()));
}

// Linear interpolation between order statistics, position q * (n - 1).
inline double percentile_sorted(std::span<const double> sorted, double q) {
  detail::require(!sorted.empty(), "percentile_sorted: empty input");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

// Box statistics of (class, value) pairs; classes in order of first appearance.
inline std::vector<ClassBoxStats> class_box_stats(
    const std::vector<std::pair<std::string, double>>& values) {
  std::vector<ClassBoxStats> out;
  std::vector<std::vector<double>> groups;
  std::map<std::string, std::size_t, std::less<>> where;
  for (const auto& [label, v] : values) {
    auto [it, fresh] = where.try_emplace(label, out.size());
    if (fresh) {
      out.push_back({label});
      groups.emplace_back();
    }
    groups[it->second].push_back(v);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto& g = groups[i];
    std::ranges::sort(g);
    out[i].count = g.size();
    out[i].min = g.front();
    out[i].p25 = percentile_sorted(g, 0.25);
    out[i].median = percentile_sorted(g, 0.5);
    out[i].p75 = percentile_sorted(g, 0.75);
    out[i].max = g.back();
  }
  return out;
}

struct StatsResult {
  std::vector<ClassBoxStats> classes;
  std::vector<EntryError> errors;
};

// Reads every entry (relative paths resolved against `base`); unreadable
// images are skipped and logged.
inline StatsResult class_std_stats(const std::vector<ManifestEntry>& entries,
                                   const std::filesystem::path& base = {},
                                   const LogFn& log = log_stderr) {
  std::vector<std::pair<std::string, double>> values;
  StatsResult res;
  for (const auto& e : entries) {
    const std::filesystem::path p(e.path);
    try {
      values.emplace_back(e.class_label, image_std(read_image(p.is_absolute() ? p : base / p)));
    } catch (const std::exception& ex) {
      if (log) log("skipped " + e.path + ": " + ex.what());
      res.errors.push_back({e.path, ex.what()});
    }
  }
  res.classes = class_box_stats(values);
  return res;
}

inline std::string format_stats_csv(const std::vector<ClassBoxStats>& stats) {
  std::ostringstream out;
  out.precision(17);
  out << "class,min,p25,median,p75,max\n";
  for (const auto& s : stats)
    out << detail::csv_field(s.class_label) << ',' << s.min << ',' << s.p25 << ',' << s.median
        << ',' << s.p75 << ',' << s.max << '\n';
  return out.str();
}

}  // namespace fsmr
