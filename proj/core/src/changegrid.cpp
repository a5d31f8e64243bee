#include "bcd/changegrid.hpp"

#include <algorithm>
#include <cmath>

#include "bcd/error.hpp"

namespace bcd {

std::string_view to_string(ChangeLabel label) {
  switch (label) {
    case ChangeLabel::kSI: return "SI";
    case ChangeLabel::kSD: return "SD";
    case ChangeLabel::kAU: return "AU";
    case ChangeLabel::kC: return "C";
    case ChangeLabel::kUC: return "UC";
  }
  return "?";
}

ChangeLabel parse_label(std::string_view text) {
  if (text == "SI") return ChangeLabel::kSI;
  if (text == "SD" || text == "SR") return ChangeLabel::kSD;
  if (text == "AU") return ChangeLabel::kAU;
  if (text == "C") return ChangeLabel::kC;
  if (text == "UC") return ChangeLabel::kUC;
  throw ValidationError("unknown change label \"" + std::string(text) + "\"");
}

std::string_view to_string(ChangeMethod method) {
  return method == ChangeMethod::kRatio ? "ratio" : "difference";
}

ChangeMethod parse_method(std::string_view text) {
  if (text == "ratio") return ChangeMethod::kRatio;
  if (text == "difference") return ChangeMethod::kDifference;
  throw ValidationError("unknown change method \"" + std::string(text) + "\"");
}

std::vector<ChangeLabel> label_alphabet(ChangeMethod method) {
  if (method == ChangeMethod::kRatio) return {ChangeLabel::kSI, ChangeLabel::kSD, ChangeLabel::kAU};
  return {ChangeLabel::kC, ChangeLabel::kUC};
}

void ChangeConfig::validate() const {
  if (n_segments < 1) throw ValidationError("n_segments must be at least 1");
  if (!(change_threshold > 1.0) || !std::isfinite(change_threshold)) {
    throw ValidationError("change threshold T must exceed 1");
  }
  if (min_area_floor && !(*min_area_floor >= 0.0)) {
    throw ValidationError("min_area_floor must be non-negative");
  }
  if (diff_threshold && *diff_threshold < 0) {
    throw ValidationError("diff_threshold must be non-negative");
  }
}

double ChangeConfig::floor_for(std::int64_t cell_area) const {
  return min_area_floor.value_or(0.005 * static_cast<double>(cell_area));
}

std::vector<int> segment_bounds(int extent, int n) {
  if (n < 1) throw ValidationError("n_segments must be at least 1");
  if (n > extent) throw ValidationError("n_segments exceeds image extent");
  const int base = extent / n;
  const int remainder = extent % n;
  std::vector<int> bounds(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 0; i < n; ++i) {
    bounds[i + 1] = bounds[i] + base + (i >= n - remainder ? 1 : 0);
  }
  return bounds;
}

std::vector<PixelRect> partition(int width, int height, int n) {
  const auto xs = segment_bounds(width, n);
  const auto ys = segment_bounds(height, n);
  std::vector<PixelRect> rects;
  rects.reserve(static_cast<std::size_t>(n) * n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) rects.push_back({xs[c], ys[r], xs[c + 1], ys[r + 1]});
  }
  return rects;
}

ChangeLabel classify_cell(std::int64_t a1, std::int64_t a2, const ChangeConfig& cfg,
                          std::int64_t cell_area) {
  const double floor = cfg.floor_for(cell_area);
  const double x1 = static_cast<double>(a1);
  const double x2 = static_cast<double>(a2);
  const bool low1 = x1 <= floor;
  const bool low2 = x2 <= floor;
  if (low1 && low2) return ChangeLabel::kAU;
  if (low1) return ChangeLabel::kSI;
  if (low2) return ChangeLabel::kSD;
  // a2/a1 > T and a2/a1 < 1/T, without dividing.
  const double t = cfg.change_threshold;
  if (x2 > t * x1) return ChangeLabel::kSI;
  if (t * x2 < x1) return ChangeLabel::kSD;
  return ChangeLabel::kAU;
}

namespace {

void check_masks(const BuildingMask& t1, const BuildingMask& t2) {
  if (t1.width() != t2.width() || t1.height() != t2.height()) {
    throw ValidationError("building masks differ in dimensions");
  }
}

std::int64_t count_in(const BuildingMask& mask, const PixelRect& r) {
  std::int64_t n = 0;
  auto bits = mask.bits();
  for (int y = r.y0; y < r.y1; ++y) {
    const std::uint8_t* row = bits.data() + static_cast<std::size_t>(y) * mask.width();
    for (int x = r.x0; x < r.x1; ++x) n += row[x];
  }
  return n;
}

GridChangeMap count_cells(const BuildingMask& t1, const BuildingMask& t2, const ChangeConfig& cfg,
                          ChangeMethod method) {
  cfg.validate();
  check_masks(t1, t2);
  GridChangeMap map;
  map.width = t1.width();
  map.height = t1.height();
  map.method = method;
  map.config = cfg;
  const auto rects = partition(t1.width(), t1.height(), cfg.n_segments);
  map.cells.reserve(rects.size());
  for (std::size_t i = 0; i < rects.size(); ++i) {
    GridCell cell;
    cell.row = static_cast<int>(i) / cfg.n_segments;
    cell.col = static_cast<int>(i) % cfg.n_segments;
    cell.rect = rects[i];
    cell.a1 = count_in(t1, rects[i]);
    cell.a2 = count_in(t2, rects[i]);
    map.cells.push_back(cell);
  }
  return map;
}

ChangeLabel diff_label(const GridCell& cell, std::int64_t threshold) {
  const std::int64_t diff = cell.a2 > cell.a1 ? cell.a2 - cell.a1 : cell.a1 - cell.a2;
  return diff > threshold ? ChangeLabel::kC : ChangeLabel::kUC;
}

}  // namespace

GridChangeMap relabel(const GridChangeMap& map, const ChangeConfig& cfg) {
  cfg.validate();
  if (cfg.n_segments != map.config.n_segments) {
    throw ValidationError("relabel cannot change the grid partition");
  }
  if (map.method == ChangeMethod::kDifference && !cfg.diff_threshold) {
    throw ValidationError("difference baseline requires diff_threshold");
  }
  GridChangeMap out = map;
  out.config = cfg;
  for (GridCell& cell : out.cells) {
    cell.label = map.method == ChangeMethod::kRatio
                     ? classify_cell(cell.a1, cell.a2, cfg, cell.rect.area())
                     : diff_label(cell, *cfg.diff_threshold);
  }
  return out;
}

GridChangeMap change_map(const BuildingMask& t1, const BuildingMask& t2, const ChangeConfig& cfg) {
  return relabel(count_cells(t1, t2, cfg, ChangeMethod::kRatio), cfg);
}

GridChangeMap change_map_diff_baseline(const BuildingMask& t1, const BuildingMask& t2,
                                       const ChangeConfig& cfg) {
  if (!cfg.diff_threshold) throw ValidationError("difference baseline requires diff_threshold");
  return relabel(count_cells(t1, t2, cfg, ChangeMethod::kDifference), cfg);
}

}  // namespace bcd
