#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bcd/changegrid.hpp"
#include "bcd/filters.hpp"
#include "bcd/mbi.hpp"
#include "bcd/spectral.hpp"
#include "bcd/synthetic.hpp"

namespace bcd::cli {

enum class IndexMethod { kMfbi, kMbi };

std::string_view to_string(IndexMethod method);
/// Throws ValidationError on anything but "mfbi" or "mbi".
IndexMethod parse_index_method(std::string_view text);

/// Every knob of a run. Serialized as one flat JSON object whose keys are the
/// long flag names with '-' replaced by '_'. Empty paths serialize as null.
struct RunConfig {
  IndexMethod method = IndexMethod::kMfbi;
  ScaleProfile profile;
  MbiParams mbi;
  MaskParams mask;
  ChangeConfig change;

  synthetic::BenchSceneParams scene;
  int repetitions = 3;

  std::vector<double> t_values{1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5};

  std::string in;
  std::string in2;
  std::string feature;
  std::string t1;
  std::string t2;
  std::string report;
  std::string truth;
  std::string image;
  std::string out;
  std::string out_dir;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

enum class FieldGroup { kIndex, kMask, kChange, kBench, kSweep, kPath };

/// Calls v(key, group, help, field) for every field, in serialization order.
template <typename Config, typename Visitor>
void for_each_field(Config& c, Visitor&& v) {
  using G = FieldGroup;
  v("method", G::kIndex, "feature index: mfbi or mbi", c.method);
  v("initial_window", G::kIndex, "MFBI smallest median window", c.profile.initial_window);
  v("scale_factor", G::kIndex, "MFBI window growth factor", c.profile.scale_factor);
  v("num_scales", G::kIndex, "MFBI number of windows", c.profile.num_scales);
  v("directions", G::kIndex, "MBI line directions (1-4)", c.mbi.directions);
  v("scale_min", G::kIndex, "MBI smallest line length", c.mbi.scale_min);
  v("scale_max", G::kIndex, "MBI largest line length", c.mbi.scale_max);
  v("scale_step", G::kIndex, "MBI line length step", c.mbi.scale_step);
  v("ndvi_threshold", G::kMask, "vegetation cut on NDVI", c.mask.ndvi_threshold);
  v("ndwi_threshold", G::kMask, "water cut on NDWI", c.mask.ndwi_threshold);
  v("histogram_bins", G::kMask, "Otsu histogram bins", c.mask.histogram_bins);
  v("n_segments", G::kChange, "grid segments per axis (N)", c.change.n_segments);
  v("change_threshold", G::kChange, "ratio threshold T (> 1)", c.change.change_threshold);
  v("min_area_floor", G::kChange, "noise floor in pixels (default 0.5% of the cell)",
    c.change.min_area_floor);
  v("diff_threshold", G::kChange, "pixel-count threshold of the difference baseline",
    c.change.diff_threshold);
  v("width", G::kBench, "synthetic raster width", c.scene.width);
  v("height", G::kBench, "synthetic raster height", c.scene.height);
  v("bands", G::kBench, "synthetic raster bands", c.scene.bands);
  v("seed", G::kBench, "synthetic raster seed", c.scene.seed);
  v("scene_bit_depth", G::kBench, "synthetic sensor bit depth", c.scene.bit_depth);
  v("rectangles_per_mpx", G::kBench, "bright rectangles per megapixel",
    c.scene.rectangles_per_mpx);
  v("repetitions", G::kBench, "timed runs per index", c.repetitions);
  v("t_values", G::kSweep, "thresholds to sweep, comma separated", c.t_values);
  v("in", G::kPath, "input raster", c.in);
  v("in2", G::kPath, "second-date input raster", c.in2);
  v("feature", G::kPath, "feature map graymap", c.feature);
  v("t1", G::kPath, "first-date building mask", c.t1);
  v("t2", G::kPath, "second-date building mask", c.t2);
  v("report", G::kPath, "change report (JSON)", c.report);
  v("truth", G::kPath, "truth labels CSV", c.truth);
  v("image", G::kPath, "change image output", c.image);
  v("out", G::kPath, "output file", c.out);
  v("out_dir", G::kPath, "output directory", c.out_dir);
}

nlohmann::json to_json(const RunConfig& config);
/// Overlays the keys present in `j` onto `base`. Unknown keys and ill-typed
/// values throw ValidationError.
RunConfig overlay_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path);
void save_run_config(const RunConfig& config, const std::filesystem::path& path);

}  // namespace bcd::cli
