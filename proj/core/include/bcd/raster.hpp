#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace bcd {

/// Single-band float image, row-major. Values are always finite.
class Band {
 public:
  Band() = default;
  Band(int width, int height, float fill = 0.0f);
  Band(int width, int height, std::vector<float> values);

  /// Skips the finiteness scan; for values derived from an existing Band.
  struct Trusted {};
  Band(int width, int height, std::vector<float> values, Trusted);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return values_.size(); }

  float operator()(int x, int y) const { return values_[index(x, y)]; }
  float& operator()(int x, int y) { return values_[index(x, y)]; }

  std::span<const float> values() const { return values_; }
  std::span<float> values() { return values_; }
  std::span<const float> row(int y) const {
    return std::span<const float>(values_).subspan(index(0, y), width_);
  }

  bool same_shape(const Band& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Band&, const Band&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> values_;
};

/// Multi-band raster, band-planar. Band roles are looked up by name
/// ("red", "green", "blue", "nir", ...).
class RasterImage {
 public:
  RasterImage() = default;
  /// Takes planar data (band 0 first). Throws ValidationError on shape
  /// mismatch or non-finite values.
  RasterImage(int width, int height, std::vector<std::string> band_names,
              std::vector<float> data, int bit_depth = 32);
  RasterImage(std::vector<std::string> band_names, const std::vector<Band>& bands,
              int bit_depth = 32);

  int width() const { return width_; }
  int height() const { return height_; }
  int bands() const { return static_cast<int>(band_names_.size()); }
  /// Bit depth of the source the values were promoted from (8, 16 or 32).
  int bit_depth() const { return bit_depth_; }
  const std::vector<std::string>& band_names() const { return band_names_; }

  /// -1 when absent.
  int band_index(const std::string& name) const;
  bool has_band(const std::string& name) const { return band_index(name) >= 0; }

  std::span<const float> plane(int b) const;
  std::span<const float> data() const { return data_; }
  Band band(int b) const;
  /// Throws ValidationError naming the band when absent.
  Band band(const std::string& name) const;

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int bit_depth_ = 32;
  std::vector<std::string> band_names_;
  std::vector<float> data_;
};

/// Single-band map with every value in [0, 1].
class FeatureMap {
 public:
  FeatureMap() = default;
  /// Throws ValidationError if a value falls outside [0, 1].
  explicit FeatureMap(Band band);

  int width() const { return band_.width(); }
  int height() const { return band_.height(); }
  float operator()(int x, int y) const { return band_(x, y); }
  std::span<const float> values() const { return band_.values(); }
  const Band& band() const { return band_; }

  friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

 private:
  Band band_;
};

/// Per-pixel maximum over all bands.
Band enhanced_image(const RasterImage& img);

/// Global min-max rescale to [0, 1]. A constant input maps to all zeros.
FeatureMap normalize_01(const Band& values);

}  // namespace bcd
