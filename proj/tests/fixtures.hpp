#pragma once

// Fixtures shared by the CLI tests and the acceptance runner.

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bcd/changegrid.hpp"
#include "bcd/cli.hpp"
#include "bcd/eval.hpp"
#include "bcd/io.hpp"
#include "bcd/raster.hpp"

namespace bcd::testing {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("bcd_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

inline CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliResult r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

/// Value of the first "key=value" line in `text`, or "" when absent.
inline std::string line_value(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
  }
  return "";
}

/// Confusion counts (rows predicted, columns truth) with their OA to two
/// decimals.
struct CountTable {
  const char* name;
  ChangeMethod method;
  int n_segments;
  std::vector<std::vector<std::int64_t>> counts;
  const char* expected_oa;
};

inline const std::vector<CountTable>& reference_tables() {
  using M = ChangeMethod;
  static const std::vector<CountTable> tables = {
      {"set 1 difference", M::kDifference, 12, {{26, 6}, {28, 84}}, "76.39"},
      {"set 1 ratio", M::kRatio, 12, {{22, 2, 2}, {0, 4, 2}, {3, 3, 106}}, "91.67"},
      {"set 2 difference", M::kDifference, 12, {{26, 3}, {25, 90}}, "80.56"},
      {"set 2 ratio", M::kRatio, 12, {{19, 0, 3}, {0, 7, 0}, {8, 4, 103}}, "89.58"},
      {"set 3 difference", M::kDifference, 20, {{41, 21}, {31, 307}}, "87.00"},
      {"set 3 ratio", M::kRatio, 20, {{46, 0, 2}, {0, 11, 3}, {9, 4, 325}}, "95.50"},
  };
  return tables;
}

struct LabeledGrid {
  GridChangeMap map;
  TruthLabels truth;
};

/// An n x n change map plus truth whose (predicted, truth) pairs realize
/// `counts` exactly. Cells are filled in row-major order.
inline LabeledGrid grid_from_counts(ChangeMethod method, int n,
                                    const std::vector<std::vector<std::int64_t>>& counts) {
  ChangeConfig cfg;
  cfg.n_segments = n;
  const BuildingMask empty(2 * n, 2 * n);
  LabeledGrid g;
  if (method == ChangeMethod::kRatio) {
    g.map = change_map(empty, empty, cfg);
  } else {
    cfg.diff_threshold = 0;
    g.map = change_map_diff_baseline(empty, empty, cfg);
  }
  const auto labels = label_alphabet(method);
  std::size_t cell = 0;
  for (std::size_t p = 0; p < counts.size(); ++p) {
    for (std::size_t t = 0; t < counts[p].size(); ++t) {
      for (std::int64_t k = 0; k < counts[p][t]; ++k, ++cell) {
        auto& c = g.map.cells.at(cell);
        c.label = labels[p];
        g.truth[{c.row, c.col}] = labels[t];
      }
    }
  }
  if (cell != g.map.cells.size()) throw std::logic_error("count table does not fill the grid");
  return g;
}

/// Bitemporal 4-band scene with bright square roofs on a noisy background.
/// Roofs sit in a 2 x 2 slot layout strictly inside each grid cell; every
/// cell is planted as empty, stable, increased or decreased.
struct PlantedScene {
  RasterImage t1;
  RasterImage t2;
  TruthLabels truth;
  int n_segments = 0;
  int planted_si = 0;
  int planted_sd = 0;
};

inline PlantedScene planted_scene(std::uint64_t seed, int size = 512, int n = 8) {
  std::mt19937_64 rng(seed);
  const int cell = size / n;
  const int roof = cell * 10 / 64 + 1;
  const int offsets[2] = {cell * 14 / 64, cell * 38 / 64};
  std::vector<std::uint8_t> roofs[2] = {std::vector<std::uint8_t>(std::size_t(size) * size),
                                        std::vector<std::uint8_t>(std::size_t(size) * size)};
  PlantedScene scene;
  scene.n_segments = n;
  std::uniform_int_distribution<int> kind(0, 9);
  auto paint = [&](int date, int row, int col, int slots) {
    for (int s = 0; s < slots; ++s) {
      const int x0 = col * cell + offsets[s % 2];
      const int y0 = row * cell + offsets[s / 2];
      for (int y = y0; y < y0 + roof; ++y) {
        for (int x = x0; x < x0 + roof; ++x) roofs[date][std::size_t(y) * size + x] = 1;
      }
    }
  };
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      const int k = kind(rng);
      ChangeLabel label = ChangeLabel::kAU;
      if (k < 3) {
        // empty in both dates
      } else if (k < 6) {
        const int slots = 1 + k % 2;
        paint(0, row, col, slots);
        paint(1, row, col, slots);
      } else if (k < 8) {
        label = ChangeLabel::kSI;
        paint(0, row, col, k == 6 ? 0 : 1);
        paint(1, row, col, k == 6 ? 2 : 3);
        ++scene.planted_si;
      } else {
        label = ChangeLabel::kSD;
        paint(0, row, col, k == 8 ? 2 : 3);
        paint(1, row, col, k == 8 ? 0 : 1);
        ++scene.planted_sd;
      }
      scene.truth[{row, col}] = label;
    }
  }

  // Roofs are bright and flat in all bands; the background is darker noise
  // with a mild vegetation signature. The second date is re-lit.
  const float roof_level[4] = {190, 185, 175, 160};
  const float ground_level[4] = {55, 65, 50, 80};
  std::uniform_real_distribution<float> noise(-18.0f, 18.0f);
  RasterImage* out[2] = {&scene.t1, &scene.t2};
  for (int date = 0; date < 2; ++date) {
    const float gain = date == 0 ? 1.0f : 1.08f;
    const float bias = date == 0 ? 0.0f : 4.0f;
    std::vector<float> data(std::size_t(4) * size * size);
    for (int b = 0; b < 4; ++b) {
      for (std::size_t i = 0; i < std::size_t(size) * size; ++i) {
        const float base = roofs[date][i] ? roof_level[b] : ground_level[b];
        const float v = std::round(gain * (base + noise(rng)) + bias);
        data[std::size_t(b) * size * size + i] = std::clamp(v, 0.0f, 255.0f);
      }
    }
    *out[date] = RasterImage(size, size, {"red", "green", "blue", "nir"}, std::move(data), 8);
  }
  return scene;
}

}  // namespace bcd::testing
