#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bcd/spectral.hpp"

namespace bcd {

enum class ChangeLabel {
  kSI,  ///< significantly increased
  kSD,  ///< significantly decreased
  kAU,  ///< approximately unchanged
  kC,   ///< changed (difference baseline)
  kUC,  ///< unchanged (difference baseline)
};

std::string_view to_string(ChangeLabel label);
/// Accepts "SR" as an alias of "SD". Throws ValidationError otherwise.
ChangeLabel parse_label(std::string_view text);

enum class ChangeMethod { kRatio, kDifference };

std::string_view to_string(ChangeMethod method);
ChangeMethod parse_method(std::string_view text);
/// {SI, SD, AU} for kRatio, {C, UC} for kDifference.
std::vector<ChangeLabel> label_alphabet(ChangeMethod method);

struct ChangeConfig {
  int n_segments = 14;
  double change_threshold = 2.5;
  /// Absolute noise floor in pixels. Unset: 0.5% of each cell's area.
  std::optional<double> min_area_floor;
  /// Required by the difference baseline only.
  std::optional<std::int64_t> diff_threshold;

  void validate() const;
  double floor_for(std::int64_t cell_area) const;

  friend bool operator==(const ChangeConfig&, const ChangeConfig&) = default;
};

/// Half-open pixel bounds.
struct PixelRect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  std::int64_t area() const {
    return static_cast<std::int64_t>(x1 - x0) * static_cast<std::int64_t>(y1 - y0);
  }
  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

struct GridCell {
  int row = 0;
  int col = 0;
  PixelRect rect;
  std::int64_t a1 = 0;
  std::int64_t a2 = 0;
  ChangeLabel label = ChangeLabel::kAU;

  friend bool operator==(const GridCell&, const GridCell&) = default;
};

struct GridChangeMap {
  int width = 0;
  int height = 0;
  ChangeMethod method = ChangeMethod::kRatio;
  ChangeConfig config;
  /// Row-major, n_segments * n_segments entries.
  std::vector<GridCell> cells;

  int n_segments() const { return config.n_segments; }
  const GridCell& at(int row, int col) const {
    return cells[static_cast<std::size_t>(row) * config.n_segments + col];
  }

  friend bool operator==(const GridChangeMap&, const GridChangeMap&) = default;
};

/// Splits [0, extent) into n contiguous segments; the extent % n remainder
/// pixels go one each to the trailing segments. Returns n + 1 boundaries.
std::vector<int> segment_bounds(int extent, int n);

/// Row-major n x n rects tiling the image. Throws ValidationError when n < 1
/// or n exceeds either extent.
std::vector<PixelRect> partition(int width, int height, int n);

/// Ratio rules with strict inequalities; equality and sub-floor areas are AU.
ChangeLabel classify_cell(std::int64_t a1, std::int64_t a2, const ChangeConfig& cfg,
                          std::int64_t cell_area = 0);

GridChangeMap change_map(const BuildingMask& t1, const BuildingMask& t2,
                         const ChangeConfig& cfg);

/// C when |a2 - a1| > diff_threshold, else UC.
GridChangeMap change_map_diff_baseline(const BuildingMask& t1, const BuildingMask& t2,
                                       const ChangeConfig& cfg);

/// Relabels an existing map under a new config (same partition).
GridChangeMap relabel(const GridChangeMap& map, const ChangeConfig& cfg);

}  // namespace bcd
