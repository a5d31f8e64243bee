#include "bcd/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "bcd/error.hpp"
#include "bcd/eval.hpp"
#include "bcd/io.hpp"

namespace bcd::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kFeatureDepth = 16;

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string shortest(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void require_path(const std::string& value, const char* flag) {
  if (value.empty()) throw ValidationError(std::string("missing required path --") + flag);
}

void ensure_parent(const fs::path& path) {
  const fs::path dir = path.parent_path();
  if (!dir.empty()) fs::create_directories(dir);
}

// One sidecar per distinct output directory, named after its first output.
void write_metadata(const std::string& command, const RunConfig& config,
                    const std::vector<std::string>& outputs, const json& results) {
  const std::string text = metadata_json(command, config, outputs, results);
  std::set<fs::path> done;
  for (const auto& o : outputs) {
    const fs::path p(o);
    if (!done.insert(p.parent_path()).second) continue;
    io::write_file(fs::path(o + ".meta.json"), text);
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

FeatureMap compute_index(const RunConfig& c, const RasterImage& img) {
  return c.method == IndexMethod::kMfbi ? mfbi(img, c.profile) : mbi(img, c.mbi);
}

std::string scales_text(const std::vector<int>& s) {
  std::string text;
  for (std::size_t i = 0; i < s.size(); ++i) text += (i ? "," : "") + std::to_string(s[i]);
  return text;
}

json index_params(const RunConfig& c) {
  if (c.method == IndexMethod::kMfbi) return {{"windows", c.profile.windows()}};
  return {{"directions", c.mbi.directions}, {"scales", c.mbi.scales()}};
}

json mask_results(const MaskResult& r) {
  return {{"otsu_threshold", r.otsu_threshold ? json(*r.otsu_threshold) : json(nullptr)},
          {"ndvi_applied", r.ndvi_applied},
          {"ndwi_applied", r.ndwi_applied},
          {"building_pixels", r.mask.count()},
          {"warnings", r.warnings}};
}

json label_counts(const GridChangeMap& map) {
  json counts = json::object();
  for (ChangeLabel l : label_alphabet(map.method)) counts[std::string(to_string(l))] = 0;
  for (const auto& cell : map.cells) {
    counts[std::string(to_string(cell.label))] =
        counts[std::string(to_string(cell.label))].get<int>() + 1;
  }
  return counts;
}

void print_change_summary(const GridChangeMap& map, std::ostream& out) {
  out << "cells=" << map.cells.size() << "\n";
  const json counts = label_counts(map);
  for (ChangeLabel l : label_alphabet(map.method)) {
    const std::string name(to_string(l));
    out << name << "=" << counts[name].get<int>() << "\n";
  }
}

BuildingMask read_mask_pair(const RunConfig& c, BuildingMask& t2) {
  require_path(c.t1, "t1");
  require_path(c.t2, "t2");
  BuildingMask t1 = io::read_mask(c.t1);
  t2 = io::read_mask(c.t2);
  return t1;
}

void run_change(const RunConfig& c, std::ostream& out, bool baseline) {
  require_path(c.image, "image");
  require_path(c.report, "report");
  c.change.validate();
  BuildingMask t2;
  const BuildingMask t1 = read_mask_pair(c, t2);
  const GridChangeMap map =
      baseline ? change_map_diff_baseline(t1, t2, c.change) : change_map(t1, t2, c.change);
  ensure_parent(c.image);
  ensure_parent(c.report);
  io::write_change_map(map, c.image, c.report);
  write_metadata(baseline ? "change-baseline" : "change", c, {c.image, c.report},
                 {{"cells", map.cells.size()}, {"labels", label_counts(map)}});
  print_change_summary(map, out);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string csv = "T,OA\n";
  for (const auto& r : rows) {
    csv += shortest(r.change_threshold) + "," + fixed(r.overall_accuracy, 2) + "\n";
  }
  return csv;
}

// Ratio truth seen through the baseline's alphabet: SI and SD are changes.
TruthLabels binary_truth(const TruthLabels& truth) {
  TruthLabels out;
  for (const auto& [cell, label] : truth) {
    out[cell] = label == ChangeLabel::kSI || label == ChangeLabel::kSD ? ChangeLabel::kC
                : label == ChangeLabel::kAU                            ? ChangeLabel::kUC
                                                                       : label;
  }
  return out;
}

}  // namespace

std::string metadata_json(const std::string& command, const RunConfig& config,
                          const std::vector<std::string>& outputs, const json& results) {
  const json meta = {{"tool", "bcd"},
                     {"version", kVersion},
                     {"command", command},
                     {"config", to_json(config)},
                     {"outputs", outputs},
                     {"results", results}};
  return meta.dump(2) + "\n";
}

void cmd_index(const RunConfig& c, std::ostream& out, std::ostream&) {
  require_path(c.in, "in");
  require_path(c.out, "out");
  const RasterImage img = io::read_raster(c.in);
  const auto t0 = std::chrono::steady_clock::now();
  const FeatureMap fm = compute_index(c, img);
  const double secs = seconds_since(t0);
  ensure_parent(c.out);
  io::write_gray_image(fm.band(), c.out, kFeatureDepth);
  write_metadata("index", c, {c.out},
                 {{"width", fm.width()},
                  {"height", fm.height()},
                  {"bit_depth", kFeatureDepth},
                  {"index", index_params(c)}});
  out << "compute_seconds=" << fixed(secs, 6) << "\n";
}

void cmd_mask(const RunConfig& c, std::ostream& out, std::ostream& err) {
  require_path(c.in, "in");
  require_path(c.feature, "feature");
  require_path(c.out, "out");
  const RasterImage img = io::read_raster(c.in);
  const FeatureMap fm(io::read_gray_image(c.feature));
  const MaskResult r = building_mask(fm, img, c.mask);
  for (const auto& w : r.warnings) err << "warning: " << w << "\n";
  ensure_parent(c.out);
  io::write_mask(r.mask, c.out);
  write_metadata("mask", c, {c.out}, mask_results(r));
  out << "otsu_threshold=" << (r.otsu_threshold ? shortest(*r.otsu_threshold) : "none") << "\n"
      << "building_pixels=" << r.mask.count() << "\n";
}

void cmd_change(const RunConfig& c, std::ostream& out, std::ostream&) {
  run_change(c, out, false);
}

void cmd_change_baseline(const RunConfig& c, std::ostream& out, std::ostream&) {
  run_change(c, out, true);
}

void cmd_eval(const RunConfig& c, std::ostream& out, std::ostream&) {
  require_path(c.report, "report");
  require_path(c.truth, "truth");
  const GridChangeMap map = io::read_change_report(c.report);
  const ConfusionMatrix m = confusion(map, io::read_truth(c.truth));
  const std::string csv = io::confusion_csv(m);
  const std::string oa = fixed(m.overall_accuracy(), 2);
  if (!c.out.empty()) {
    ensure_parent(c.out);
    io::write_file(c.out, csv);
    write_metadata("eval", c, {c.out}, {{"overall_accuracy", oa}});
  }
  out << csv << "OA=" << oa << "\n";
}

void cmd_bench(const RunConfig& c, std::ostream& out, std::ostream&) {
  if (c.repetitions < 1) throw ValidationError("repetitions must be at least 1");
  c.profile.validate();
  c.mbi.validate();
  const RasterImage scene = synthetic::bench_scene(c.scene);

  std::vector<double> mfbi_times, mbi_times;
  for (int run = 0; run < c.repetitions; ++run) {
    auto t0 = std::chrono::steady_clock::now();
    (void)mfbi(scene, c.profile);
    mfbi_times.push_back(seconds_since(t0));
    t0 = std::chrono::steady_clock::now();
    (void)mbi(scene, c.mbi);
    mbi_times.push_back(seconds_since(t0));
  }

  std::string csv = "method,run,seconds\n";
  for (int r = 0; r < c.repetitions; ++r) {
    csv += "mfbi," + std::to_string(r + 1) + "," + fixed(mfbi_times[r], 6) + "\n";
  }
  for (int r = 0; r < c.repetitions; ++r) {
    csv += "mbi," + std::to_string(r + 1) + "," + fixed(mbi_times[r], 6) + "\n";
  }
  const double med_mfbi = median(mfbi_times);
  const double med_mbi = median(mbi_times);

  const json params = {
      {"scene", {{"width", c.scene.width}, {"height", c.scene.height},
                 {"bands", c.scene.bands}, {"seed", c.scene.seed},
                 {"bit_depth", c.scene.bit_depth}}},
      {"mfbi_windows", c.profile.windows()},
      {"mbi_directions", c.mbi.directions},
      {"mbi_scales", c.mbi.scales()}};
  if (!c.out.empty()) {
    ensure_parent(c.out);
    io::write_file(c.out, csv);
    write_metadata("bench", c, {c.out}, params);
  }
  out << csv;
  out << "mbi_parameterization=directions=" << c.mbi.directions
      << ";scales=" << scales_text(c.mbi.scales()) << "\n";
  out << "mfbi_windows=" << scales_text(c.profile.windows()) << "\n";
  out << "median_mfbi_seconds=" << fixed(med_mfbi, 6) << "\n";
  out << "median_mbi_seconds=" << fixed(med_mbi, 6) << "\n";
  out << "speedup=" << fixed(med_mbi / med_mfbi, 2) << "\n";
}

void cmd_sweep(const RunConfig& c, std::ostream& out, std::ostream&) {
  require_path(c.truth, "truth");
  if (c.t_values.empty()) throw ValidationError("t_values is empty");
  for (double t : c.t_values) {
    if (!(t > 1.0)) throw ValidationError("change threshold T must exceed 1, got " + shortest(t));
  }
  BuildingMask t2;
  const BuildingMask t1 = read_mask_pair(c, t2);
  const std::string csv =
      sweep_csv(t_sweep(t1, t2, io::read_truth(c.truth), c.change, c.t_values));
  if (!c.out.empty()) {
    ensure_parent(c.out);
    io::write_file(c.out, csv);
    write_metadata("sweep", c, {c.out}, {{"rows", c.t_values.size()}});
  }
  out << csv;
}

void cmd_pipeline(const RunConfig& c, std::ostream& out, std::ostream& err) {
  require_path(c.in, "in");
  require_path(c.in2, "in2");
  require_path(c.out_dir, "out-dir");
  c.change.validate();
  const fs::path dir(c.out_dir);
  fs::create_directories(dir);
  std::vector<std::string> outputs;
  json results = json::object();
  auto emit = [&](const std::string& name) {
    outputs.push_back((dir / name).string());
    return dir / name;
  };

  BuildingMask masks[2];
  const std::string* inputs[2] = {&c.in, &c.in2};
  for (int i = 0; i < 2; ++i) {
    const std::string tag = "t" + std::to_string(i + 1);
    const RasterImage img = io::read_raster(*inputs[i]);
    const auto t0 = std::chrono::steady_clock::now();
    const FeatureMap fm = compute_index(c, img);
    const double secs = seconds_since(t0);
    out << tag << "_compute_seconds=" << fixed(secs, 6) << "\n";
    // Masks come from the written map so the chain matches the file-based one.
    const fs::path feature = emit(tag + "_feature.pgm");
    io::write_gray_image(fm.band(), feature, kFeatureDepth);
    const MaskResult r = building_mask(FeatureMap(io::read_gray_image(feature)), img, c.mask);
    for (const auto& w : r.warnings) err << "warning: " << tag << ": " << w << "\n";
    io::write_mask(r.mask, emit(tag + "_mask.pgm"));
    results[tag] = mask_results(r);
    masks[i] = r.mask;
  }

  const TruthLabels truth = c.truth.empty() ? TruthLabels{} : io::read_truth(c.truth);
  auto change_stage = [&](const GridChangeMap& map, const std::string& prefix) {
    io::write_change_map(map, emit(prefix + "change.ppm"), emit(prefix + "report.json"));
    json stage = {{"cells", map.cells.size()}, {"labels", label_counts(map)}};
    out << prefix << "cells=" << map.cells.size() << "\n";
    if (!c.truth.empty()) {
      const ConfusionMatrix m = confusion(
          map, map.method == ChangeMethod::kDifference ? binary_truth(truth) : truth);
      io::write_file(emit(prefix + "confusion.csv"), io::confusion_csv(m));
      const std::string oa = fixed(m.overall_accuracy(), 2);
      stage["overall_accuracy"] = oa;
      out << prefix << "OA=" << oa << "\n";
    }
    results[prefix + "change"] = stage;
  };
  change_stage(change_map(masks[0], masks[1], c.change), "");
  if (c.change.diff_threshold) {
    change_stage(change_map_diff_baseline(masks[0], masks[1], c.change), "baseline_");
  }

  io::write_file(dir / "metadata.json", metadata_json("pipeline", c, outputs, results));
}

namespace {

template <typename T>
struct FlagValue {
  using type = T;
};
template <typename T>
struct FlagValue<std::optional<T>> {
  using type = T;
};
template <>
struct FlagValue<IndexMethod> {
  using type = std::string;
};

using Override = std::function<void(RunConfig&)>;

template <typename V>
void assign_field(RunConfig& c, const std::string& key, const V& v) {
  for_each_field(c, [&](const char* name, FieldGroup, const char*, auto& field) {
    using F = std::decay_t<decltype(field)>;
    if (key != name) return;
    if constexpr (std::is_same_v<F, IndexMethod>) {
      if constexpr (std::is_same_v<V, std::string>) field = parse_index_method(v);
    } else if constexpr (std::is_same_v<typename FlagValue<F>::type, V>) {
      field = v;
    }
  });
}

std::string flag_name(const char* key) {
  std::string s = std::string("--") + key;
  std::replace(s.begin(), s.end(), '_', '-');
  return s;
}

struct Command {
  const char* name;
  const char* help;
  std::vector<FieldGroup> groups;
  std::vector<std::string> paths;
  void (*fn)(const RunConfig&, std::ostream&, std::ostream&);
};

const std::vector<Command>& commands() {
  using G = FieldGroup;
  static const std::vector<Command> list = {
      {"index", "Compute a feature map (MFBI or MBI) from a raster",
       {G::kIndex}, {"in", "out"}, cmd_index},
      {"mask", "Threshold a feature map into a building mask",
       {G::kMask}, {"in", "feature", "out"}, cmd_mask},
      {"change", "Grid-ratio change map (SI / SD / AU) from two masks",
       {G::kChange}, {"t1", "t2", "image", "report"}, cmd_change},
      {"change-baseline", "Grid-difference change map (C / UC) from two masks",
       {G::kChange}, {"t1", "t2", "image", "report"}, cmd_change_baseline},
      {"eval", "Confusion matrix and overall accuracy of a change report",
       {}, {"report", "truth", "out"}, cmd_eval},
      {"bench", "Time MFBI against MBI on a seeded synthetic raster",
       {G::kIndex, G::kBench}, {"out"}, cmd_bench},
      {"sweep", "Overall accuracy for each change threshold T",
       {G::kChange, G::kSweep}, {"t1", "t2", "truth", "out"}, cmd_sweep},
      {"pipeline", "index, mask, change and (with --truth) eval for two rasters",
       {G::kIndex, G::kMask, G::kChange}, {"in", "in2", "truth", "out_dir"}, cmd_pipeline},
  };
  return list;
}

void add_flags(CLI::App* sub, const Command& cmd, std::vector<Override>& overrides) {
  RunConfig defaults;
  for_each_field(defaults, [&](const char* key, FieldGroup group, const char* help,
                               const auto& field) {
    using F = std::decay_t<decltype(field)>;
    using V = typename FlagValue<F>::type;
    const bool wanted =
        group == FieldGroup::kPath
            ? std::find(cmd.paths.begin(), cmd.paths.end(), key) != cmd.paths.end()
            : std::find(cmd.groups.begin(), cmd.groups.end(), group) != cmd.groups.end();
    if (!wanted) return;
    const std::string k = key;
    auto* opt = sub->add_option_function<V>(
        flag_name(key),
        [&overrides, k](const V& v) {
          overrides.push_back([k, v](RunConfig& c) { assign_field(c, k, v); });
        },
        help);
    if constexpr (std::is_same_v<F, IndexMethod>) {
      opt->check(CLI::IsMember({"mfbi", "mbi"}));
    }
    if constexpr (std::is_same_v<V, std::vector<double>>) {
      opt->delimiter(',');
    }
  });
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Building change detection from bitemporal imagery", "bcd"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", kVersion);

  std::string config_path;
  std::vector<Override> overrides;
  std::map<CLI::App*, const Command*> by_app;
  for (const auto& cmd : commands()) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--config", config_path, "JSON run config; flags take precedence");
    add_flags(sub, cmd, overrides);
    by_app[sub] = &cmd;
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    const Command& cmd = *by_app.at(app.get_subcommands().front());
    RunConfig config = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    for (const auto& o : overrides) o(config);
    cmd.fn(config, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace bcd::cli
