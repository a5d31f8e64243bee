#pragma once

#include <cstdint>
#include <vector>

#include "bcd/raster.hpp"

namespace bcd {

enum class MedianMethod {
  /// Inputs with at most 256 distinct values use byte kernels (a sorting
  /// network for 3x3, a bitwise rank search up to 7x7) and the constant-time
  /// method above that; other inputs use the sliding histogram.
  kAuto,
  /// Sliding histogram (Huang), O(window) per pixel, any input.
  kSlidingHistogram,
  /// Column histograms (Perreault-Hebert), O(1) per pixel. Requires at most
  /// 256 distinct values; falls back to kSlidingHistogram otherwise.
  kConstantTime,
};

/// Median over a window x window neighborhood with edge replication.
///
/// The neighborhood of (x, y) spans [x - (window-1)/2, x + window/2] on each
/// axis. For even windows the lower of the two middle order statistics is
/// taken, so the result is always one of the input values. The result is
/// exact for any finite input: values are replaced by their rank among the
/// distinct input values before filtering and mapped back afterwards.
///
/// Throws ValidationError("window too large") if window exceeds either
/// image dimension, and for window < 1.
Band median_filter(const Band& band, int window,
                   MedianMethod method = MedianMethod::kAuto);

/// A band with every value replaced by its rank among the distinct values.
/// Filtering several windows over one RankedBand compresses the input once.
/// Ranks are stored as bytes when there are at most 256 levels.
class RankedBand {
 public:
  explicit RankedBand(const Band& band);

  int width() const { return width_; }
  int height() const { return height_; }
  /// Sorted distinct input values; levels()[rank] is the original value.
  const std::vector<float>& levels() const { return levels_; }
  bool compact() const { return levels_.size() <= 256; }

  /// Median-filtered ranks, same conventions and errors as median_filter.
  std::vector<std::uint32_t> median_ranks(int window,
                                          MedianMethod method = MedianMethod::kAuto) const;
  /// median_ranks as bytes; throws ValidationError unless compact().
  std::vector<std::uint8_t> median_bytes(int window,
                                         MedianMethod method = MedianMethod::kAuto) const;
  Band median(int window, MedianMethod method = MedianMethod::kAuto) const;

 private:
  template <typename Out>
  std::vector<Out> filter(int window, MedianMethod method) const;

  int width_ = 0;
  int height_ = 0;
  std::vector<float> levels_;
  std::vector<std::uint8_t> bytes_;  // ranks when compact()
  std::vector<std::uint32_t> wide_;  // ranks otherwise
};

}  // namespace bcd
