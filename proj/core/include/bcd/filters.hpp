#pragma once

#include <vector>

#include "bcd/median.hpp"
#include "bcd/raster.hpp"

namespace bcd {

/// Geometric window progression: initial_window * scale_factor^i.
struct ScaleProfile {
  int initial_window = 3;
  int scale_factor = 2;
  int num_scales = 4;

  /// Throws ValidationError on non-positive fields.
  void validate() const;
  std::vector<int> windows() const;
  int largest_window() const;

  friend bool operator==(const ScaleProfile&, const ScaleProfile&) = default;
};

std::vector<Band> filter_profile(const Band& band, const ScaleProfile& profile,
                                 MedianMethod method = MedianMethod::kAuto);

/// D_i = max(0, F_i - F_{i+1}) for successive scales. Bright structures that
/// survive the smaller window and vanish at the larger one respond positively.
std::vector<Band> differential_images(const std::vector<Band>& profile_outputs);

/// Multi-scale filtering building index: mean of the successive-scale
/// differentials of the enhanced image's median profile, rescaled to [0, 1].
FeatureMap mfbi(const RasterImage& img, const ScaleProfile& profile = {},
                MedianMethod method = MedianMethod::kAuto);

}  // namespace bcd
