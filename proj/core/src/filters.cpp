#include "bcd/filters.hpp"

#include <algorithm>
#include <limits>

#include "bcd/error.hpp"

namespace bcd {

void ScaleProfile::validate() const {
  if (initial_window < 1 || scale_factor < 1 || num_scales < 1) {
    throw ValidationError("scale profile fields must be positive");
  }
}

std::vector<int> ScaleProfile::windows() const {
  validate();
  std::vector<int> out;
  long long w = initial_window;
  for (int i = 0; i < num_scales; ++i) {
    if (w > std::numeric_limits<int>::max()) throw ValidationError("window too large");
    out.push_back(static_cast<int>(w));
    w *= scale_factor;
  }
  return out;
}

int ScaleProfile::largest_window() const { return windows().back(); }

std::vector<Band> filter_profile(const Band& band, const ScaleProfile& profile,
                                 MedianMethod method) {
  const std::vector<int> windows = profile.windows();
  if (windows.back() > std::min(band.width(), band.height())) {
    throw ValidationError("window too large");
  }
  std::vector<Band> out;
  out.reserve(windows.size());
  for (int w : windows) out.push_back(median_filter(band, w, method));
  return out;
}

std::vector<Band> differential_images(const std::vector<Band>& profile_outputs) {
  if (profile_outputs.size() < 2) {
    throw ValidationError("differential images need at least two scales");
  }
  for (const Band& b : profile_outputs) {
    if (!b.same_shape(profile_outputs.front())) {
      throw ValidationError("profile outputs differ in dimensions");
    }
  }
  std::vector<Band> out;
  out.reserve(profile_outputs.size() - 1);
  for (std::size_t i = 0; i + 1 < profile_outputs.size(); ++i) {
    auto fine = profile_outputs[i].values();
    auto coarse = profile_outputs[i + 1].values();
    Band d(profile_outputs[i].width(), profile_outputs[i].height(), 0.0f);
    auto dst = d.values();
    for (std::size_t p = 0; p < dst.size(); ++p) dst[p] = std::max(0.0f, fine[p] - coarse[p]);
    out.push_back(std::move(d));
  }
  return out;
}

namespace {

// Mean clipped differential, as differential_images(filter_profile(...)),
// with the filtered scales kept in rank space. `clipped(a, b)` returns
// max(0, levels[a] - levels[b]).
template <typename Rank, typename Clipped>
std::vector<float> mean_differential(const std::vector<std::vector<Rank>>& filtered,
                                     Clipped clipped) {
  const std::size_t n = filtered.front().size();
  const std::size_t scales = filtered.size();
  const double k = static_cast<double>(scales - 1);
  std::vector<const Rank*> src;
  for (const auto& f : filtered) src.push_back(f.data());
  std::vector<float> mean(n);
  for (std::size_t p = 0; p < n; ++p) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < scales; ++i) sum += clipped(src[i][p], src[i + 1][p]);
    mean[p] = static_cast<float>(sum / k);
  }
  return mean;
}

std::vector<float> rank_space_mean(const RankedBand& ranked, const std::vector<int>& windows,
                                   MedianMethod method) {
  const std::vector<float>& levels = ranked.levels();
  if (ranked.compact()) {
    std::vector<std::vector<std::uint8_t>> filtered;
    for (int w : windows) filtered.push_back(ranked.median_bytes(w, method));
    // Every clipped difference of two byte ranks, looked up instead of recomputed.
    std::vector<float> table(256 * 256, 0.0f);
    for (std::size_t a = 0; a < levels.size(); ++a) {
      for (std::size_t b = 0; b < levels.size(); ++b) {
        table[a * 256 + b] = std::max(0.0f, levels[a] - levels[b]);
      }
    }
    return mean_differential(filtered, [&](std::uint8_t a, std::uint8_t b) {
      return table[static_cast<std::size_t>(a) * 256 + b];
    });
  }
  std::vector<std::vector<std::uint32_t>> filtered;
  for (int w : windows) filtered.push_back(ranked.median_ranks(w, method));
  return mean_differential(filtered, [&](std::uint32_t a, std::uint32_t b) {
    return std::max(0.0f, levels[a] - levels[b]);
  });
}

}  // namespace

FeatureMap mfbi(const RasterImage& img, const ScaleProfile& profile, MedianMethod method) {
  const Band enhanced = enhanced_image(img);
  const std::vector<int> windows = profile.windows();
  if (windows.size() < 2) throw ValidationError("differential images need at least two scales");
  if (windows.back() > std::min(enhanced.width(), enhanced.height())) {
    throw ValidationError("window too large");
  }

  const RankedBand ranked(enhanced);
  std::vector<float> mean = rank_space_mean(ranked, windows, method);

  float min_mean = mean.front();
  float max_mean = mean.front();
  for (float v : mean) {
    min_mean = std::min(min_mean, v);
    max_mean = std::max(max_mean, v);
  }
  const double lo = min_mean;
  const double range = static_cast<double>(max_mean) - lo;
  if (range > 0.0) {
    for (float& v : mean) v = static_cast<float>((static_cast<double>(v) - lo) / range);
  } else {
    std::fill(mean.begin(), mean.end(), 0.0f);
  }
  return FeatureMap(Band(enhanced.width(), enhanced.height(), std::move(mean), Band::Trusted{}));
}

}  // namespace bcd
