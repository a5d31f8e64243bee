#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bcd/raster.hpp"

namespace bcd {

/// Binary building map for one temporal (1 = building).
class BuildingMask {
 public:
  BuildingMask() = default;
  BuildingMask(int width, int height);
  BuildingMask(int width, int height, std::vector<std::uint8_t> bits);

  int width() const { return width_; }
  int height() const { return height_; }
  bool operator()(int x, int y) const {
    return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }
  void set(int x, int y, bool on) {
    bits_[static_cast<std::size_t>(y) * width_ + x] = on ? 1 : 0;
  }
  std::span<const std::uint8_t> bits() const { return bits_; }
  std::int64_t count() const;

  friend bool operator==(const BuildingMask&, const BuildingMask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

struct MaskParams {
  /// Pixels with NDVI above this are vegetation and removed.
  double ndvi_threshold = 0.3;
  /// Pixels with NDWI above this are water and removed.
  double ndwi_threshold = 0.3;
  int histogram_bins = 256;

  void validate() const;

  friend bool operator==(const MaskParams&, const MaskParams&) = default;
};

/// Otsu threshold over a `bins`-bin histogram of [0, 1] values.
///
/// Value v falls in bin min(floor(v * bins), bins - 1). The returned
/// threshold is the bin edge t / bins (1 <= t < bins) that maximizes the
/// between-class variance of bins [0, t) versus [t, bins); the lowest such
/// edge wins ties. Comparisons are exact.
///
/// Throws ValidationError("degenerate histogram") when only one bin is
/// occupied.
double otsu_threshold(const FeatureMap& values, int bins);

/// Same search on a prebuilt histogram; returns the split index t.
int otsu_split(std::span<const std::int64_t> histogram);

/// (NIR - Red) / (NIR + Red); zero denominator maps to 0.
Band ndvi(const RasterImage& img);
/// (Green - NIR) / (Green + NIR); zero denominator maps to 0.
Band ndwi(const RasterImage& img);

struct MaskResult {
  BuildingMask mask;
  /// Unset when the feature map histogram was degenerate.
  std::optional<double> otsu_threshold;
  bool ndvi_applied = false;
  bool ndwi_applied = false;
  std::vector<std::string> warnings;
};

/// (fm >= otsu) AND (ndvi < ndvi_threshold) AND (ndwi < ndwi_threshold).
/// Spectral tests whose bands are missing are skipped with a warning; a
/// degenerate Otsu histogram yields an empty mask with a warning.
MaskResult building_mask(const FeatureMap& fm, const RasterImage& img,
                         const MaskParams& params = {});

/// building_mask with a caller-chosen feature threshold instead of Otsu.
/// The threshold is snapped up to the next histogram bin edge.
MaskResult building_mask_at(const FeatureMap& fm, const RasterImage& img,
                            const MaskParams& params, double threshold);

}  // namespace bcd
