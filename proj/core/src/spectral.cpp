#include "bcd/spectral.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <numeric>

#include "bcd/error.hpp"

namespace bcd {

BuildingMask::BuildingMask(int width, int height) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw ValidationError("mask dimensions must be positive");
  bits_.assign(static_cast<std::size_t>(width) * height, 0);
}

BuildingMask::BuildingMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  if (width <= 0 || height <= 0) throw ValidationError("mask dimensions must be positive");
  if (bits_.size() != static_cast<std::size_t>(width) * height) {
    throw ValidationError("mask data length does not match width*height");
  }
  for (auto& b : bits_) b = b != 0 ? 1 : 0;
}

std::int64_t BuildingMask::count() const {
  return std::accumulate(bits_.begin(), bits_.end(), std::int64_t{0});
}

void MaskParams::validate() const {
  if (!(ndvi_threshold > -1.0 && ndvi_threshold < 1.0)) {
    throw ValidationError("ndvi_threshold must lie in (-1, 1)");
  }
  if (!(ndwi_threshold > -1.0 && ndwi_threshold < 1.0)) {
    throw ValidationError("ndwi_threshold must lie in (-1, 1)");
  }
  if (histogram_bins < 2) throw ValidationError("histogram_bins must be at least 2");
}

namespace {

using Wide = boost::multiprecision::int256_t;

int histogram_bin(float v, int bins) {
  const int b = static_cast<int>(std::floor(static_cast<double>(v) * bins));
  return std::clamp(b, 0, bins - 1);
}

std::vector<std::int64_t> histogram(const FeatureMap& values, int bins) {
  std::vector<std::int64_t> h(static_cast<std::size_t>(bins), 0);
  for (float v : values.values()) ++h[static_cast<std::size_t>(histogram_bin(v, bins))];
  return h;
}

Band normalized_difference(const RasterImage& img, const std::string& plus,
                           const std::string& minus) {
  const Band a = img.band(plus);
  const Band b = img.band(minus);
  Band out(img.width(), img.height(), 0.0f);
  auto pa = a.values();
  auto pb = b.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const double den = static_cast<double>(pa[i]) + pb[i];
    dst[i] = den == 0.0 ? 0.0f : static_cast<float>((static_cast<double>(pa[i]) - pb[i]) / den);
  }
  return out;
}

}  // namespace

int otsu_split(std::span<const std::int64_t> hist) {
  if (hist.size() < 2) throw ValidationError("histogram needs at least two bins");
  Wide total = 0;
  Wide weighted = 0;
  for (std::size_t i = 0; i < hist.size(); ++i) {
    if (hist[i] < 0) throw ValidationError("negative histogram count");
    total += hist[i];
    weighted += Wide(hist[i]) * Wide(i);
  }

  // Between-class variance at split t is proportional to
  // (s0 * N - S * n0)^2 / (n0 * n1); compared by cross-multiplication.
  int best = -1;
  Wide best_num = 0;
  Wide best_den = 1;
  Wide n0 = 0;
  Wide s0 = 0;
  for (std::size_t t = 1; t < hist.size(); ++t) {
    n0 += hist[t - 1];
    s0 += Wide(hist[t - 1]) * Wide(t - 1);
    const Wide n1 = total - n0;
    if (n0 == 0 || n1 == 0) continue;
    const Wide d = s0 * total - weighted * n0;
    const Wide num = d * d;
    const Wide den = n0 * n1;
    if (best < 0 || num * best_den > best_num * den) {
      best = static_cast<int>(t);
      best_num = num;
      best_den = den;
    }
  }
  if (best < 0) throw ValidationError("degenerate histogram");
  return best;
}

double otsu_threshold(const FeatureMap& values, int bins) {
  if (bins < 2) throw ValidationError("histogram_bins must be at least 2");
  const auto h = histogram(values, bins);
  return static_cast<double>(otsu_split(h)) / bins;
}

Band ndvi(const RasterImage& img) { return normalized_difference(img, "nir", "red"); }

Band ndwi(const RasterImage& img) { return normalized_difference(img, "green", "nir"); }

namespace {

MaskResult apply_split(const FeatureMap& fm, const RasterImage& img, const MaskParams& params,
                       int split) {
  MaskResult result;
  result.otsu_threshold = static_cast<double>(split) / params.histogram_bins;

  std::vector<std::uint8_t> bits(fm.values().size(), 0);
  auto v = fm.values();
  for (std::size_t i = 0; i < bits.size(); ++i) {
    bits[i] = histogram_bin(v[i], params.histogram_bins) >= split ? 1 : 0;
  }

  auto suppress = [&](const Band& index, double threshold) {
    auto p = index.values();
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (!(p[i] < threshold)) bits[i] = 0;
    }
  };
  if (img.has_band("nir") && img.has_band("red")) {
    suppress(ndvi(img), params.ndvi_threshold);
    result.ndvi_applied = true;
  } else {
    result.warnings.emplace_back("bands \"nir\"/\"red\" missing; NDVI test skipped");
  }
  if (img.has_band("green") && img.has_band("nir")) {
    suppress(ndwi(img), params.ndwi_threshold);
    result.ndwi_applied = true;
  } else {
    result.warnings.emplace_back("bands \"green\"/\"nir\" missing; NDWI test skipped");
  }

  result.mask = BuildingMask(fm.width(), fm.height(), std::move(bits));
  return result;
}

void check_inputs(const FeatureMap& fm, const RasterImage& img, const MaskParams& params) {
  params.validate();
  if (fm.width() != img.width() || fm.height() != img.height()) {
    throw ValidationError("feature map and raster dimensions differ");
  }
}

}  // namespace

MaskResult building_mask(const FeatureMap& fm, const RasterImage& img, const MaskParams& params) {
  check_inputs(fm, img, params);
  int split = 0;
  try {
    split = otsu_split(histogram(fm, params.histogram_bins));
  } catch (const ValidationError&) {
    MaskResult empty;
    empty.mask = BuildingMask(fm.width(), fm.height());
    empty.warnings.emplace_back("degenerate feature histogram; mask left empty");
    return empty;
  }
  return apply_split(fm, img, params, split);
}

MaskResult building_mask_at(const FeatureMap& fm, const RasterImage& img,
                            const MaskParams& params, double threshold) {
  check_inputs(fm, img, params);
  const int bins = params.histogram_bins;
  const int split = std::clamp(static_cast<int>(std::ceil(threshold * bins - 1e-9)), 0, bins);
  return apply_split(fm, img, params, split);
}

}  // namespace bcd
