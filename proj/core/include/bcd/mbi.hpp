#pragma once

#include <vector>

#include "bcd/raster.hpp"

namespace bcd {

enum class LineDirection { k0, k45, k90, k135 };

struct MbiParams {
  int directions = 4;
  int scale_min = 3;
  int scale_max = 24;
  int scale_step = 5;

  void validate() const;
  /// scale_min, scale_min + step, ... up to scale_max inclusive.
  std::vector<int> scales() const;
  std::vector<LineDirection> direction_set() const;

  friend bool operator==(const MbiParams&, const MbiParams&) = default;
};

/// Pixel offsets of a linear structuring element of `length` pixels,
/// centered with the same even-length convention as the median windows.
/// Diagonals are Bresenham lines, i.e. unit steps along both axes.
std::vector<std::pair<int, int>> line_offsets(int length, LineDirection direction);

/// Erosion and dilation by a linear element. Pixels outside the image are
/// ignored, which keeps dilate(erode(.)) a true opening (anti-extensive,
/// increasing, idempotent) up to the border.
Band erode_linear(const Band& band, int length, LineDirection direction);
Band dilate_linear(const Band& band, int length, LineDirection direction);
Band open_linear(const Band& band, int length, LineDirection direction);

/// band - open_linear(band). Throws ValidationError when the element does
/// not fit in the image span along its direction.
Band white_top_hat_linear(const Band& band, int length, LineDirection direction);

/// Morphological building index baseline: per scale, the directional mean of
/// white top-hats of the enhanced image; |F_{s+step} - F_s| averaged over all
/// differentials and rescaled to [0, 1].
FeatureMap mbi(const RasterImage& img, const MbiParams& params = {});

}  // namespace bcd
