#pragma once

#include <cstdint>

#include "bcd/raster.hpp"

namespace bcd::synthetic {

struct BenchSceneParams {
  int width = 1024;
  int height = 1024;
  int bands = 4;
  std::uint64_t seed = 42;
  /// Integer levels of the simulated sensor, e.g. 8 -> values in [0, 255].
  int bit_depth = 8;
  /// Bright rectangles per megapixel.
  int rectangles_per_mpx = 400;

  friend bool operator==(const BenchSceneParams&, const BenchSceneParams&) = default;
};

/// Seeded uniform noise plus randomly placed bright rectangles. Bands are
/// named red, green, blue, nir (then band4, band5, ...). Deterministic for a
/// given seed on a given standard library.
RasterImage bench_scene(const BenchSceneParams& params);

}  // namespace bcd::synthetic
