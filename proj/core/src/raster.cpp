#include "bcd/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bcd/error.hpp"

namespace bcd {

namespace {

void check_dims(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw ValidationError("raster dimensions must be positive");
  }
}

void check_finite(std::span<const float> values) {
  for (float v : values) {
    if (!std::isfinite(v)) throw ValidationError("non-finite raster value");
  }
}

}  // namespace

Band::Band(int width, int height, float fill) : width_(width), height_(height) {
  check_dims(width, height);
  if (!std::isfinite(fill)) throw ValidationError("non-finite raster value");
  values_.assign(static_cast<std::size_t>(width) * height, fill);
}

Band::Band(int width, int height, std::vector<float> values)
    : width_(width), height_(height), values_(std::move(values)) {
  check_dims(width, height);
  if (values_.size() != static_cast<std::size_t>(width) * height) {
    throw ValidationError("band data length does not match width*height");
  }
  check_finite(values_);
}

Band::Band(int width, int height, std::vector<float> values, Trusted)
    : width_(width), height_(height), values_(std::move(values)) {
  check_dims(width, height);
  if (values_.size() != static_cast<std::size_t>(width) * height) {
    throw ValidationError("band data length does not match width*height");
  }
}

RasterImage::RasterImage(int width, int height, std::vector<std::string> band_names,
                         std::vector<float> data, int bit_depth)
    : width_(width),
      height_(height),
      bit_depth_(bit_depth),
      band_names_(std::move(band_names)),
      data_(std::move(data)) {
  check_dims(width, height);
  if (band_names_.empty()) throw ValidationError("raster needs at least one band");
  if (data_.size() != static_cast<std::size_t>(width) * height * band_names_.size()) {
    throw ValidationError("raster data length does not match width*height*bands");
  }
  check_finite(data_);
}

RasterImage::RasterImage(std::vector<std::string> band_names, const std::vector<Band>& bands,
                         int bit_depth)
    : bit_depth_(bit_depth), band_names_(std::move(band_names)) {
  if (bands.empty() || bands.size() != band_names_.size()) {
    throw ValidationError("band name count mismatch");
  }
  width_ = bands.front().width();
  height_ = bands.front().height();
  check_dims(width_, height_);
  data_.reserve(bands.size() * bands.front().size());
  for (const Band& b : bands) {
    if (!b.same_shape(bands.front())) throw ValidationError("band shape mismatch");
    data_.insert(data_.end(), b.values().begin(), b.values().end());
  }
}

int RasterImage::band_index(const std::string& name) const {
  auto it = std::find(band_names_.begin(), band_names_.end(), name);
  return it == band_names_.end() ? -1 : static_cast<int>(it - band_names_.begin());
}

std::span<const float> RasterImage::plane(int b) const {
  const std::size_t n = static_cast<std::size_t>(width_) * height_;
  return std::span<const float>(data_).subspan(static_cast<std::size_t>(b) * n, n);
}

Band RasterImage::band(int b) const {
  if (b < 0 || b >= bands()) throw ValidationError("band index out of range");
  auto p = plane(b);
  return Band(width_, height_, std::vector<float>(p.begin(), p.end()), Band::Trusted{});
}

Band RasterImage::band(const std::string& name) const {
  const int b = band_index(name);
  if (b < 0) throw ValidationError("missing band \"" + name + "\"");
  return band(b);
}

FeatureMap::FeatureMap(Band band) : band_(std::move(band)) {
  for (float v : band_.values()) {
    if (!(v >= 0.0f && v <= 1.0f)) throw ValidationError("feature value outside [0, 1]");
  }
}

Band enhanced_image(const RasterImage& img) {
  auto first = img.plane(0);
  Band out(img.width(), img.height(), std::vector<float>(first.begin(), first.end()),
           Band::Trusted{});
  auto dst = out.values();
  for (int b = 1; b < img.bands(); ++b) {
    auto src = img.plane(b);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::max(dst[i], src[i]);
  }
  return out;
}

FeatureMap normalize_01(const Band& values) {
  auto src = values.values();
  const auto [lo_it, hi_it] = std::minmax_element(src.begin(), src.end());
  const double lo = *lo_it;
  const double range = static_cast<double>(*hi_it) - lo;
  Band out(values.width(), values.height(), 0.0f);
  if (range > 0.0) {
    auto dst = out.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
      dst[i] = static_cast<float>((static_cast<double>(src[i]) - lo) / range);
    }
  }
  return FeatureMap(std::move(out));
}

}  // namespace bcd
