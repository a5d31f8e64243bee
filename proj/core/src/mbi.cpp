#include "bcd/mbi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bcd/error.hpp"

namespace bcd {

void MbiParams::validate() const {
  if (directions < 1 || directions > 4) throw ValidationError("MBI directions must be in 1..4");
  if (scale_min < 1) throw ValidationError("MBI scale_min must be positive");
  if (scale_step < 1) throw ValidationError("MBI scale_step must be positive");
  if (scale_min > scale_max) throw ValidationError("MBI scale_min exceeds scale_max");
  if (scale_min + scale_step > scale_max) {
    throw ValidationError("MBI scale range yields fewer than two scales");
  }
}

std::vector<int> MbiParams::scales() const {
  validate();
  std::vector<int> out;
  for (int s = scale_min; s <= scale_max; s += scale_step) out.push_back(s);
  return out;
}

std::vector<LineDirection> MbiParams::direction_set() const {
  validate();
  static constexpr LineDirection kAll[] = {LineDirection::k0, LineDirection::k45,
                                           LineDirection::k90, LineDirection::k135};
  return {std::begin(kAll), std::begin(kAll) + directions};
}

std::vector<std::pair<int, int>> line_offsets(int length, LineDirection direction) {
  if (length < 1) throw ValidationError("structuring element length must be positive");
  std::vector<std::pair<int, int>> out;
  for (int t = -(length - 1) / 2; t <= length / 2; ++t) {
    switch (direction) {
      case LineDirection::k0: out.emplace_back(t, 0); break;
      case LineDirection::k45: out.emplace_back(t, -t); break;
      case LineDirection::k90: out.emplace_back(0, t); break;
      case LineDirection::k135: out.emplace_back(-t, -t); break;
    }
  }
  return out;
}

namespace {

// out(p) = reduce over offsets o with p + o inside the image of in(p + o).
template <typename Reduce>
Band reduce_shifted(const Band& in, const std::vector<std::pair<int, int>>& offsets, float init,
                    Reduce reduce) {
  const int w = in.width();
  const int h = in.height();
  std::vector<float> dst(static_cast<std::size_t>(w) * h, init);
  auto src = in.values();
  for (const auto& [dx, dy] : offsets) {
    const int x0 = std::max(0, -dx);
    const int x1 = std::min(w, w - dx);
    const int y0 = std::max(0, -dy);
    const int y1 = std::min(h, h - dy);
    for (int y = y0; y < y1; ++y) {
      float* d = dst.data() + static_cast<std::size_t>(y) * w;
      const float* s = src.data() + static_cast<std::size_t>(y + dy) * w + dx;
      for (int x = x0; x < x1; ++x) d[x] = reduce(d[x], s[x]);
    }
  }
  return Band(w, h, std::move(dst), Band::Trusted{});
}

void check_fits(const Band& band, int length, LineDirection direction) {
  int span = 0;
  switch (direction) {
    case LineDirection::k0: span = band.width(); break;
    case LineDirection::k90: span = band.height(); break;
    default: span = std::min(band.width(), band.height()); break;
  }
  if (length > span) throw ValidationError("structuring element longer than image span");
}

}  // namespace

Band erode_linear(const Band& band, int length, LineDirection direction) {
  return reduce_shifted(band, line_offsets(length, direction),
                        std::numeric_limits<float>::infinity(),
                        [](float a, float b) { return std::min(a, b); });
}

Band dilate_linear(const Band& band, int length, LineDirection direction) {
  auto offsets = line_offsets(length, direction);
  for (auto& [dx, dy] : offsets) {
    dx = -dx;
    dy = -dy;
  }
  return reduce_shifted(band, offsets, -std::numeric_limits<float>::infinity(),
                        [](float a, float b) { return std::max(a, b); });
}

Band open_linear(const Band& band, int length, LineDirection direction) {
  return dilate_linear(erode_linear(band, length, direction), length, direction);
}

Band white_top_hat_linear(const Band& band, int length, LineDirection direction) {
  check_fits(band, length, direction);
  Band opened = open_linear(band, length, direction);
  auto src = band.values();
  auto dst = opened.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = src[i] - dst[i];
  return opened;
}

FeatureMap mbi(const RasterImage& img, const MbiParams& params) {
  const std::vector<int> scales = params.scales();
  const std::vector<LineDirection> directions = params.direction_set();
  const Band enhanced = enhanced_image(img);
  const std::size_t n = enhanced.size();

  std::vector<std::vector<double>> features;
  features.reserve(scales.size());
  for (int s : scales) {
    std::vector<double> f(n, 0.0);
    for (LineDirection d : directions) {
      const Band th = white_top_hat_linear(enhanced, s, d);
      auto v = th.values();
      for (std::size_t i = 0; i < n; ++i) f[i] += v[i];
    }
    for (double& v : f) v /= static_cast<double>(directions.size());
    features.push_back(std::move(f));
  }

  std::vector<double> sum(n, 0.0);
  for (std::size_t k = 0; k + 1 < features.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i) sum[i] += std::abs(features[k + 1][i] - features[k][i]);
  }
  Band mean(enhanced.width(), enhanced.height(), 0.0f);
  auto dst = mean.values();
  const double k = static_cast<double>(features.size() - 1);
  for (std::size_t i = 0; i < n; ++i) dst[i] = static_cast<float>(sum[i] / k);
  return normalize_01(mean);
}

}  // namespace bcd
