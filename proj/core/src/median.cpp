#include "bcd/median.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <limits>
#include <type_traits>
#include <vector>

#include "bcd/error.hpp"

#if defined(__SSE2__)
#include <emmintrin.h>
#endif

namespace bcd {

namespace {

struct Geometry {
  int width;
  int height;
  int lo;  // pixels before the center
  int hi;  // pixels after the center
  int window;
  std::int64_t order;  // zero-based order statistic taken as the median
};

inline int clamp_to(int v, int extent) { return v < 0 ? 0 : (v >= extent ? extent - 1 : v); }

// Two-level rank histogram tracking one order statistic incrementally.
class TrackedHistogram {
 public:
  explicit TrackedHistogram(std::size_t levels) {
    shift_ = 0;
    while ((std::size_t{1} << (2 * shift_)) < levels) ++shift_;
    const std::size_t block = std::size_t{1} << shift_;
    fine_.assign(((levels + block - 1) >> shift_) << shift_, 0);
    coarse_.assign((levels + block - 1) >> shift_, 0);
  }

  void add(std::uint32_t v) {
    ++fine_[v];
    ++coarse_[v >> shift_];
    below_ += v < current_ ? 1 : 0;
  }
  void remove(std::uint32_t v) {
    --fine_[v];
    --coarse_[v >> shift_];
    below_ -= v < current_ ? 1 : 0;
  }

  std::uint32_t select(std::int64_t k) {
    const std::uint32_t block = 1u << shift_;
    const std::uint32_t mask = block - 1;
    while (below_ > k) {
      if ((current_ & mask) == 0) {
        const std::uint32_t b = (current_ >> shift_) - 1;
        if (below_ - coarse_[b] > k) {
          below_ -= coarse_[b];
          current_ -= block;
          continue;
        }
      }
      --current_;
      below_ -= fine_[current_];
    }
    while (below_ + fine_[current_] <= k) {
      if ((current_ & mask) == 0) {
        const std::uint32_t b = current_ >> shift_;
        if (below_ + coarse_[b] <= k) {
          below_ += coarse_[b];
          current_ += block;
          continue;
        }
      }
      below_ += fine_[current_];
      ++current_;
    }
    return current_;
  }

 private:
  int shift_ = 0;
  std::vector<std::uint32_t> fine_;
  std::vector<std::uint32_t> coarse_;
  std::uint32_t current_ = 0;
  std::int64_t below_ = 0;  // values with rank < current_
};

// Huang's sliding histogram along a serpentine path: every step swaps one
// window column (or row) of `window` values.
template <typename In, typename Out>
void sliding_histogram(const In* ranks, std::size_t levels, const Geometry& g, Out* out) {
  const int w = g.width;
  const int h = g.height;
  TrackedHistogram hist(levels);
  auto at = [&](int x, int y) {
    return ranks[static_cast<std::size_t>(clamp_to(y, h)) * w + clamp_to(x, w)];
  };

  for (int dy = -g.lo; dy <= g.hi; ++dy) {
    for (int dx = -g.lo; dx <= g.hi; ++dx) hist.add(at(dx, dy));
  }

  std::vector<const In*> rows(g.window);
  for (int y = 0; y < h; ++y) {
    for (int i = 0; i < g.window; ++i) {
      rows[i] = ranks + static_cast<std::size_t>(clamp_to(y - g.lo + i, h)) * w;
    }
    const bool rightward = (y % 2) == 0;
    Out* dst = out + static_cast<std::size_t>(y) * w;
    if (rightward) {
      for (int x = 0;; ++x) {
        dst[x] = static_cast<Out>(hist.select(g.order));
        if (x + 1 == w) break;
        const int leaving = clamp_to(x - g.lo, w);
        const int entering = clamp_to(x + 1 + g.hi, w);
        for (const In* r : rows) {
          hist.remove(r[leaving]);
          hist.add(r[entering]);
        }
      }
    } else {
      for (int x = w - 1;; --x) {
        dst[x] = static_cast<Out>(hist.select(g.order));
        if (x == 0) break;
        const int leaving = clamp_to(x + g.hi, w);
        const int entering = clamp_to(x - 1 - g.lo, w);
        for (const In* r : rows) {
          hist.remove(r[leaving]);
          hist.add(r[entering]);
        }
      }
    }
    if (y + 1 == h) break;
    const int x = rightward ? w - 1 : 0;
    const In* top = rows.front();
    const In* bottom = ranks + static_cast<std::size_t>(clamp_to(y + 1 + g.hi, h)) * w;
    for (int dx = -g.lo; dx <= g.hi; ++dx) {
      const int c = clamp_to(x + dx, w);
      hist.remove(top[c]);
      hist.add(bottom[c]);
    }
  }
}

constexpr int kSegment = 16;
constexpr int kLevels = kSegment * kSegment;
constexpr int kStrip = 128;

// Sixteen 16-bit counters: one coarse histogram or one fine segment.
#if defined(__SSE2__)
struct Counts16 {
  __m128i lo = _mm_setzero_si128();
  __m128i hi = _mm_setzero_si128();

  static Counts16 load(const std::uint16_t* p) {
    return {_mm_loadu_si128(reinterpret_cast<const __m128i*>(p)),
            _mm_loadu_si128(reinterpret_cast<const __m128i*>(p + 8))};
  }
  void store(std::uint16_t* p) const {
    _mm_storeu_si128(reinterpret_cast<__m128i*>(p), lo);
    _mm_storeu_si128(reinterpret_cast<__m128i*>(p + 8), hi);
  }
  void slide(const std::uint16_t* add, const std::uint16_t* sub) {
    const Counts16 a = load(add);
    const Counts16 s = load(sub);
    lo = _mm_sub_epi16(_mm_add_epi16(lo, a.lo), s.lo);
    hi = _mm_sub_epi16(_mm_add_epi16(hi, a.hi), s.hi);
  }
  void add(const std::uint16_t* p) {
    const Counts16 a = load(p);
    lo = _mm_add_epi16(lo, a.lo);
    hi = _mm_add_epi16(hi, a.hi);
  }

  // Index of the bin holding the `k`-th smallest value (zero-based), k below
  // the total; `k` is reduced by the counts of the bins before it.
  int select(std::int64_t& k) const {
    __m128i a = lo;
    a = _mm_add_epi16(a, _mm_slli_si128(a, 2));
    a = _mm_add_epi16(a, _mm_slli_si128(a, 4));
    a = _mm_add_epi16(a, _mm_slli_si128(a, 8));
    __m128i b = hi;
    b = _mm_add_epi16(b, _mm_slli_si128(b, 2));
    b = _mm_add_epi16(b, _mm_slli_si128(b, 4));
    b = _mm_add_epi16(b, _mm_slli_si128(b, 8));
    const __m128i carry = _mm_shufflehi_epi16(a, 0xFF);
    b = _mm_add_epi16(b, _mm_unpackhi_epi64(carry, carry));

    const __m128i limit = _mm_set1_epi16(static_cast<std::int16_t>(k));
    const __m128i zero = _mm_setzero_si128();
    // Prefix sums are nondecreasing, so the lanes at or below the limit form a
    // run starting at lane 0.
    const __m128i below = _mm_packs_epi16(_mm_cmpeq_epi16(_mm_subs_epu16(a, limit), zero),
                                          _mm_cmpeq_epi16(_mm_subs_epu16(b, limit), zero));
    const int j = std::countr_one(static_cast<unsigned>(_mm_movemask_epi8(below)));
    if (j > 0) {
      alignas(16) std::uint16_t prefix[kSegment];
      _mm_store_si128(reinterpret_cast<__m128i*>(prefix), a);
      _mm_store_si128(reinterpret_cast<__m128i*>(prefix + 8), b);
      k -= prefix[j - 1];
    }
    return j;
  }
};
#else
struct Counts16 {
  std::array<std::uint16_t, kSegment> c{};

  static Counts16 load(const std::uint16_t* p) {
    Counts16 r;
    std::copy(p, p + kSegment, r.c.begin());
    return r;
  }
  void store(std::uint16_t* p) const { std::copy(c.begin(), c.end(), p); }
  void slide(const std::uint16_t* add, const std::uint16_t* sub) {
    for (int i = 0; i < kSegment; ++i) c[i] = static_cast<std::uint16_t>(c[i] + add[i] - sub[i]);
  }
  void add(const std::uint16_t* p) {
    for (int i = 0; i < kSegment; ++i) c[i] = static_cast<std::uint16_t>(c[i] + p[i]);
  }
  int select(std::int64_t& k) const {
    int j = 0;
    while (c[j] <= k) k -= c[j++];
    return j;
  }
};
#endif

// Perreault-Hebert: per-column histograms slide down one row at a time, the
// kernel histogram slides right by adding and subtracting whole columns. The
// fine level of the kernel is refreshed lazily, one 16-bin segment at a time.
// The image is swept in vertical strips so the column histograms stay in
// cache. Counts fit 16 bits because the window is at most 255.
template <typename In, typename Out>
void constant_time(const In* ranks, const Geometry& g, Out* out) {
  const int w = g.width;
  const int h = g.height;
  auto row_of = [&](int y) { return ranks + static_cast<std::size_t>(clamp_to(y, h)) * w; };

  std::vector<std::uint16_t> col_coarse;
  std::vector<std::uint16_t> col_fine;
  std::vector<int> source;
  std::array<std::uint16_t, kLevels> fine{};
  std::array<int, kSegment> fresh_at{};
  constexpr int kStale = std::numeric_limits<int>::min();

  for (int x0 = 0; x0 < w; x0 += kStrip) {
    const int x1 = std::min(w, x0 + kStrip);
    // Local column c holds image column clamp(x0 + c - lo); the kernel at
    // strip offset x covers local columns x .. x + window - 1.
    const int columns = x1 - x0 + g.window - 1;
    col_coarse.assign(static_cast<std::size_t>(columns) * kSegment, 0);
    col_fine.assign(static_cast<std::size_t>(columns) * kLevels, 0);
    source.resize(columns);
    for (int c = 0; c < columns; ++c) source[c] = clamp_to(x0 + c - g.lo, w);
    auto coarse_of = [&](int c) { return col_coarse.data() + static_cast<std::size_t>(c) * kSegment; };
    auto fine_of = [&](int c) { return col_fine.data() + static_cast<std::size_t>(c) * kLevels; };

    for (int dy = -g.lo; dy <= g.hi; ++dy) {
      const In* row = row_of(dy);
      for (int c = 0; c < columns; ++c) {
        const unsigned v = row[source[c]];
        ++coarse_of(c)[v / kSegment];
        ++fine_of(c)[v];
      }
    }

    for (int y = 0; y < h; ++y) {
      if (y > 0) {
        const In* leaving = row_of(y - 1 - g.lo);
        const In* entering = row_of(y + g.hi);
        for (int c = 0; c < columns; ++c) {
          const unsigned a = leaving[source[c]];
          const unsigned b = entering[source[c]];
          std::uint16_t* cc = coarse_of(c);
          std::uint16_t* cf = fine_of(c);
          --cc[a / kSegment];
          --cf[a];
          ++cc[b / kSegment];
          ++cf[b];
        }
      }

      Counts16 coarse;
      for (int c = 0; c < g.window; ++c) coarse.add(coarse_of(c));
      fresh_at.fill(kStale);

      Out* dst = out + static_cast<std::size_t>(y) * w + x0;
      for (int x = 0; x < x1 - x0; ++x) {
        if (x > 0) coarse.slide(coarse_of(x + g.window - 1), coarse_of(x - 1));

        std::int64_t k = g.order;
        const int s = coarse.select(k);
        const int offset = s * kSegment;

        std::uint16_t* seg_counts = fine.data() + offset;
        Counts16 seg;
        const int gap = fresh_at[s] == kStale ? g.window : x - fresh_at[s];
        if (2 * gap >= g.window) {
          for (int c = x; c < x + g.window; ++c) seg.add(fine_of(c) + offset);
        } else {
          seg = Counts16::load(seg_counts);
          for (int t = fresh_at[s] + 1; t <= x; ++t) {
            seg.slide(fine_of(t + g.window - 1) + offset, fine_of(t - 1) + offset);
          }
        }
        seg.store(seg_counts);
        fresh_at[s] = x;

        dst[x] = static_cast<Out>(offset + seg.select(k));
      }
    }
  }
}

// Edge-replicated copy of byte ranks with `lo` extra rows and columns before
// and `hi` after, each byte xor-ed with `flip`.
struct PaddedBytes {
  int stride;
  std::vector<std::uint8_t> data;

  PaddedBytes(const std::uint8_t* ranks, int w, int h, int lo, int hi, std::uint8_t flip = 0)
      : stride(w + lo + hi), data(static_cast<std::size_t>(h + lo + hi) * (w + lo + hi)) {
    for (int y = 0; y < h + lo + hi; ++y) {
      const std::uint8_t* src = ranks + static_cast<std::size_t>(clamp_to(y - lo, h)) * w;
      std::uint8_t* dst = data.data() + static_cast<std::size_t>(y) * stride;
      std::fill(dst, dst + lo, static_cast<std::uint8_t>(src[0] ^ flip));
      for (int x = 0; x < w; ++x) dst[lo + x] = static_cast<std::uint8_t>(src[x] ^ flip);
      std::fill(dst + lo + w, dst + stride, static_cast<std::uint8_t>(src[w - 1] ^ flip));
    }
  }
  const std::uint8_t* row(int y) const { return data.data() + static_cast<std::size_t>(y) * stride; }
};

// 3x3 median by a 19-exchange selection network, evaluated a whole row at a
// time so the compiler can vectorize across pixels.
template <typename T, typename Out>
void median3x3_row(const T* r0, const T* r1, const T* r2, int w, Out* dst) {
  for (int x = 0; x < w; ++x) {
    T p0 = r0[x], p1 = r0[x + 1], p2 = r0[x + 2];
    T p3 = r1[x], p4 = r1[x + 1], p5 = r1[x + 2];
    T p6 = r2[x], p7 = r2[x + 1], p8 = r2[x + 2];
    auto sort2 = [](T& a, T& b) {
      const T lo = std::min(a, b);
      b = std::max(a, b);
      a = lo;
    };
    sort2(p1, p2); sort2(p4, p5); sort2(p7, p8);
    sort2(p0, p1); sort2(p3, p4); sort2(p6, p7);
    sort2(p1, p2); sort2(p4, p5); sort2(p7, p8);
    sort2(p0, p3); sort2(p5, p8); sort2(p4, p7);
    sort2(p3, p6); sort2(p1, p4); sort2(p2, p5);
    sort2(p4, p7); sort2(p4, p2); sort2(p6, p4);
    sort2(p4, p2);
    dst[x] = static_cast<Out>(p4);
  }
}

template <typename Out>
void median3x3(const std::uint8_t* ranks, int w, int h, Out* out) {
  const PaddedBytes pad(ranks, w, h, 1, 1);
  for (int y = 0; y < h; ++y) {
    median3x3_row(pad.row(y), pad.row(y + 1), pad.row(y + 2), w,
                  out + static_cast<std::size_t>(y) * w);
  }
}

// Wide ranks stay below 2^31, so signed lanes compare them correctly.
template <typename Out>
void median3x3(const std::uint32_t* ranks, int w, int h, Out* out) {
  std::vector<std::int32_t> pad(3 * static_cast<std::size_t>(w + 2));
  for (int y = 0; y < h; ++y) {
    for (int r = 0; r < 3; ++r) {
      const std::uint32_t* src = ranks + static_cast<std::size_t>(clamp_to(y - 1 + r, h)) * w;
      std::int32_t* dst = pad.data() + static_cast<std::size_t>(r) * (w + 2);
      dst[0] = static_cast<std::int32_t>(src[0]);
      for (int x = 0; x < w; ++x) dst[x + 1] = static_cast<std::int32_t>(src[x]);
      dst[w + 1] = static_cast<std::int32_t>(src[w - 1]);
    }
    const std::int32_t* r0 = pad.data();
    median3x3_row(r0, r0 + (w + 2), r0 + 2 * (w + 2), w, out + static_cast<std::size_t>(y) * w);
  }
}

#if defined(__SSE2__)
constexpr bool kHasBitSearch = true;

// Small windows over byte ranks: the median rank m is built bit by bit, since
// m >= t exactly when at most `order` window values are below t. Sixteen
// pixels are handled per vector. Bytes are stored with the top bit flipped so
// a signed compare orders them; counts stay below 128 for windows up to 11.
template <int W, typename Out>
void bit_search_rows(const PaddedBytes& pad, const Geometry& g, Out* out) {
  const int w = g.width;
  const __m128i order = _mm_set1_epi8(static_cast<char>(g.order));
  const __m128i flip = _mm_set1_epi8(static_cast<char>(0x80));
  for (int y = 0; y < g.height; ++y) {
    const std::uint8_t* rows[W];
    for (int dy = 0; dy < W; ++dy) rows[dy] = pad.row(y + dy);
    for (int x0 = 0; x0 < w; x0 += 16) {
      const int x = std::min(x0, w - 16);  // the last block may overlap
      __m128i m = _mm_setzero_si128();
      for (int bit = 7; bit >= 0; --bit) {
        const __m128i t = _mm_or_si128(m, _mm_set1_epi8(static_cast<char>(1 << bit)));
        const __m128i tf = _mm_xor_si128(t, flip);
        // One partial count per window row keeps the adds independent.
        __m128i partial[W];
        for (int dy = 0; dy < W; ++dy) {
          partial[dy] = _mm_setzero_si128();
          for (int dx = 0; dx < W; ++dx) {
            const __m128i v = _mm_loadu_si128(reinterpret_cast<const __m128i*>(rows[dy] + x + dx));
            partial[dy] = _mm_sub_epi8(partial[dy], _mm_cmpgt_epi8(tf, v));
          }
        }
        __m128i below = partial[0];
        for (int dy = 1; dy < W; ++dy) below = _mm_add_epi8(below, partial[dy]);
        const __m128i reject = _mm_cmpgt_epi8(below, order);
        m = _mm_or_si128(_mm_and_si128(reject, m), _mm_andnot_si128(reject, t));
      }
      Out* dst = out + static_cast<std::size_t>(y) * w + x;
      if constexpr (std::is_same_v<Out, std::uint8_t>) {
        _mm_storeu_si128(reinterpret_cast<__m128i*>(dst), m);
      } else {
        alignas(16) std::uint8_t lanes[16];
        _mm_store_si128(reinterpret_cast<__m128i*>(lanes), m);
        for (int i = 0; i < 16; ++i) dst[i] = lanes[i];
      }
    }
  }
}

template <typename Out>
bool bit_search(const std::uint8_t* ranks, const Geometry& g, Out* out) {
  if (g.width < 16) return false;
  const PaddedBytes pad(ranks, g.width, g.height, g.lo, g.hi, 0x80);
  switch (g.window) {
    case 2: bit_search_rows<2>(pad, g, out); return true;
    case 4: bit_search_rows<4>(pad, g, out); return true;
    case 5: bit_search_rows<5>(pad, g, out); return true;
    case 6: bit_search_rows<6>(pad, g, out); return true;
    case 7: bit_search_rows<7>(pad, g, out); return true;
    default: return false;
  }
}
#else
template <typename Out>
bool bit_search(const std::uint8_t*, const Geometry&, Out*) {
  return false;
}
#endif

template <typename In, typename Out>
void dispatch(const In* ranks, std::size_t levels, const Geometry& g, MedianMethod method,
              Out* out) {
  const bool constant_time_ok = levels <= kLevels && g.window <= 255;
  switch (method) {
    case MedianMethod::kSlidingHistogram:
      sliding_histogram(ranks, levels, g, out);
      return;
    case MedianMethod::kConstantTime:
      if (constant_time_ok) {
        constant_time(ranks, g, out);
      } else {
        sliding_histogram(ranks, levels, g, out);
      }
      return;
    case MedianMethod::kAuto:
      break;
  }
  if (g.window == 3) {
    median3x3(ranks, g.width, g.height, out);
    return;
  }
  if constexpr (std::is_same_v<In, std::uint8_t>) {
    if (bit_search(ranks, g, out)) return;
  }
  if (constant_time_ok) {
    constant_time(ranks, g, out);
    return;
  }
  sliding_histogram(ranks, levels, g, out);
}

}  // namespace

RankedBand::RankedBand(const Band& band) : width_(band.width()), height_(band.height()) {
  auto values = band.values();
  auto assign = [&](auto rank_of) {
    if (compact()) {
      bytes_.resize(values.size());
      for (std::size_t i = 0; i < values.size(); ++i) {
        bytes_[i] = static_cast<std::uint8_t>(rank_of(values[i]));
      }
    } else {
      wide_.resize(values.size());
      for (std::size_t i = 0; i < values.size(); ++i) wide_[i] = rank_of(values[i]);
    }
  };

  const bool small_integers = std::all_of(values.begin(), values.end(), [](float v) {
    return v >= 0.0f && v <= 65535.0f && static_cast<float>(static_cast<int>(v)) == v;
  });
  if (small_integers) {
    std::vector<std::uint32_t> table(65536, 0);
    for (float v : values) table[static_cast<std::size_t>(v)] = 1;
    std::uint32_t next = 0;
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (table[i] != 0) {
        levels_.push_back(static_cast<float>(i));
        table[i] = next++;
      }
    }
    assign([&](float v) { return table[static_cast<std::size_t>(v)]; });
    return;
  }

  levels_.assign(values.begin(), values.end());
  std::sort(levels_.begin(), levels_.end());
  levels_.erase(std::unique(levels_.begin(), levels_.end()), levels_.end());
  if (levels_.size() > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max())) {
    throw ValidationError("too many distinct values");
  }
  assign([&](float v) {
    return static_cast<std::uint32_t>(std::lower_bound(levels_.begin(), levels_.end(), v) -
                                      levels_.begin());
  });
}

template <typename Out>
std::vector<Out> RankedBand::filter(int window, MedianMethod method) const {
  if (window < 1) throw ValidationError("window must be positive");
  if (window > std::min(width_, height_)) throw ValidationError("window too large");

  const std::size_t n = static_cast<std::size_t>(window) * window;
  const Geometry g{width_, height_, (window - 1) / 2, window / 2, window,
                   static_cast<std::int64_t>((n - 1) / 2)};
  std::vector<Out> out(static_cast<std::size_t>(width_) * height_);
  if (compact()) {
    if (window == 1) {
      std::copy(bytes_.begin(), bytes_.end(), out.begin());
    } else {
      dispatch(bytes_.data(), levels_.size(), g, method, out.data());
    }
  } else {
    if (window == 1) {
      std::copy(wide_.begin(), wide_.end(), out.begin());
    } else {
      dispatch(wide_.data(), levels_.size(), g, method, out.data());
    }
  }
  return out;
}

std::vector<std::uint32_t> RankedBand::median_ranks(int window, MedianMethod method) const {
  return filter<std::uint32_t>(window, method);
}

std::vector<std::uint8_t> RankedBand::median_bytes(int window, MedianMethod method) const {
  if (!compact()) throw ValidationError("more than 256 levels do not fit byte ranks");
  return filter<std::uint8_t>(window, method);
}

Band RankedBand::median(int window, MedianMethod method) const {
  std::vector<float> values(static_cast<std::size_t>(width_) * height_);
  auto to_values = [&](const auto& ranks) {
    for (std::size_t i = 0; i < ranks.size(); ++i) values[i] = levels_[ranks[i]];
  };
  if (compact()) {
    to_values(filter<std::uint8_t>(window, method));
  } else {
    to_values(filter<std::uint32_t>(window, method));
  }
  return Band(width_, height_, std::move(values), Band::Trusted{});
}

Band median_filter(const Band& band, int window, MedianMethod method) {
  if (window < 1) throw ValidationError("window must be positive");
  if (window > std::min(band.width(), band.height())) throw ValidationError("window too large");
  return RankedBand(band).median(window, method);
}

}  // namespace bcd
