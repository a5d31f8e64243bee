#include "bcd/synthetic.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "bcd/error.hpp"

namespace bcd::synthetic {

RasterImage bench_scene(const BenchSceneParams& p) {
  if (p.width < 1 || p.height < 1 || p.bands < 1) {
    throw ValidationError("bench scene dimensions must be positive");
  }
  if (p.bit_depth < 1 || p.bit_depth > 16) throw ValidationError("bit depth must be in 1..16");

  static const char* kNames[] = {"red", "green", "blue", "nir"};
  std::vector<std::string> names;
  for (int b = 0; b < p.bands; ++b) {
    names.push_back(b < 4 ? kNames[b] : "band" + std::to_string(b));
  }

  const int top = (1 << p.bit_depth) - 1;
  const std::size_t plane = static_cast<std::size_t>(p.width) * p.height;
  std::vector<float> data(plane * p.bands);
  std::mt19937_64 rng(p.seed);
  std::uniform_int_distribution<int> noise(0, top / 2);
  for (float& v : data) v = static_cast<float>(noise(rng));

  const long long count =
      static_cast<long long>(p.rectangles_per_mpx) * static_cast<long long>(plane) / 1000000;
  std::uniform_int_distribution<int> side(4, 20);
  std::uniform_int_distribution<int> bright(top * 3 / 4, top);
  for (long long i = 0; i < count; ++i) {
    const int rw = std::min(side(rng), p.width);
    const int rh = std::min(side(rng), p.height);
    const int x0 = std::uniform_int_distribution<int>(0, p.width - rw)(rng);
    const int y0 = std::uniform_int_distribution<int>(0, p.height - rh)(rng);
    for (int b = 0; b < p.bands; ++b) {
      const float level = static_cast<float>(bright(rng));
      float* base = data.data() + plane * b;
      for (int y = y0; y < y0 + rh; ++y) {
        std::fill(base + static_cast<std::size_t>(y) * p.width + x0,
                  base + static_cast<std::size_t>(y) * p.width + x0 + rw, level);
      }
    }
  }
  return RasterImage(p.width, p.height, std::move(names), std::move(data), p.bit_depth);
}

}  // namespace bcd::synthetic
