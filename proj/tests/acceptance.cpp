// Acceptance runner: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria. Pass criterion ids as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "bcd/changegrid.hpp"
#include "bcd/eval.hpp"
#include "bcd/filters.hpp"
#include "bcd/io.hpp"
#include "bcd/median.hpp"
#include "bcd/spectral.hpp"
#include "bcd/synthetic.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace {

using namespace bcd;
using testing::run_cli;
using testing::TempDir;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// 1. Fast median equals the sorted-window oracle.
Outcome median_oracle() {
  std::mt19937_64 rng(1001);
  int rasters = 0, mismatches = 0;
  for (int levels : {256, 65536}) {
    for (int i = 0; i < 100; ++i, ++rasters) {
      const Band band = oracle::random_band(rng, 32, 32, levels);
      for (int w : {3, 6, 12}) {
        if (!(median_filter(band, w) == oracle::median(band, w))) ++mismatches;
      }
    }
  }
  return {mismatches == 0, std::to_string(rasters) + " rasters x 3 windows (8- and 16-bit), " +
                               std::to_string(mismatches) + " mismatches"};
}

// 2. Otsu equals the exhaustive exact maximizer, ties included.
Outcome otsu_oracle() {
  std::mt19937_64 rng(2002);
  int cases = 0, mismatches = 0, tied = 0;
  auto check = [&](const std::vector<std::int64_t>& hist) {
    int occupied = 0;
    for (auto c : hist) occupied += c > 0;
    if (occupied < 2) return;
    ++cases;
    const int expected = oracle::otsu_split(hist);
    if (otsu_split(hist) != expected) ++mismatches;
    // Same histogram through the feature-map entry point.
    std::vector<float> values;
    for (std::size_t b = 0; b < hist.size(); ++b) {
      values.insert(values.end(), hist[b], (static_cast<float>(b) + 0.5f) / 256.0f);
    }
    const FeatureMap fm(Band(static_cast<int>(values.size()), 1, values));
    if (otsu_threshold(fm, 256) != expected / 256.0) ++mismatches;
  };
  std::uniform_int_distribution<int> count(0, 100);
  std::uniform_int_distribution<int> bin(0, 255);
  std::bernoulli_distribution sparse(0.9);
  while (cases < 150) {
    std::vector<std::int64_t> h(256);
    const bool thin = cases % 2 == 0;
    for (auto& c : h) c = thin && sparse(rng) ? 0 : count(rng);
    check(h);
  }
  // Mirror-symmetric histograms put two splits at equal variance.
  while (cases < 250) {
    std::vector<std::int64_t> h(256);
    const int a = bin(rng) % 120, b = 1 + bin(rng) % 60;
    const std::int64_t k = 1 + count(rng);
    h[a] = k;
    h[a + b] = k;
    h[a + 2 * b] = k;
    tied += 1;
    check(h);
  }
  return {mismatches == 0, std::to_string(cases) + " histograms (" + std::to_string(tied) +
                               " with tied maxima), " + std::to_string(mismatches) +
                               " mismatches"};
}

// 3. MFBI(a*img + c) == MFBI(img).
Outcome mfbi_affine() {
  double worst = 0;
  int fixtures = 0;
  for (std::uint64_t seed = 0; seed < 24; ++seed, ++fixtures) {
    synthetic::BenchSceneParams p;
    p.width = 64 + static_cast<int>(seed % 3) * 8;
    p.height = 56;
    p.seed = seed;
    p.rectangles_per_mpx = 2000;
    const RasterImage img = synthetic::bench_scene(p);
    const FeatureMap base = mfbi(img);
    for (float a : {0.5f, 2.0f, 10.0f}) {
      for (float c : {0.0f, 100.0f}) {
        std::vector<float> data(img.data().begin(), img.data().end());
        for (float& v : data) v = a * v + c;
        const RasterImage scaled(img.width(), img.height(), img.band_names(), std::move(data));
        const FeatureMap fm = mfbi(scaled);
        for (std::size_t i = 0; i < fm.values().size(); ++i) {
          worst = std::max(worst, std::abs(double(fm.values()[i]) - base.values()[i]));
        }
      }
    }
  }
  return {worst <= 1e-6, std::to_string(fixtures) + " fixtures x 6 transforms, max |diff| = " +
                             fmt("%.3g", worst)};
}

// 4. Reference confusion tables reproduce their overall accuracies, both from
// the counts and through `bcd eval` on files realizing them.
Outcome reference_oa() {
  TempDir dir("accept_oa");
  std::string detail;
  bool pass = true;
  for (const auto& t : testing::reference_tables()) {
    const ConfusionMatrix m(label_alphabet(t.method), t.counts);
    const std::string oa = fmt("%.2f", m.overall_accuracy());
    const auto g = testing::grid_from_counts(t.method, t.n_segments, t.counts);
    io::write_change_map(g.map, dir / "c.ppm", dir / "c.json");
    io::write_truth(g.truth, dir / "truth.csv");
    const auto r = run_cli({"eval", "--report", dir / "c.json", "--truth", dir / "truth.csv"});
    const std::string cli_oa = testing::line_value(r.out, "OA");
    pass = pass && oa == t.expected_oa && cli_oa == t.expected_oa && r.code == 0;
    detail += (detail.empty() ? "" : " ") + oa;
  }
  return {pass, "OA = " + detail};
}

// 5. `bcd bench` at 1024^2 x 4 bands: median MBI / median MFBI >= 3.
Outcome bench_speedup() {
  const auto r = run_cli({"bench", "--width", "1024", "--height", "1024", "--bands", "4",
                          "--repetitions", "5"});
  if (r.code != 0) return {false, "bench failed: " + r.err};
  const std::string s = testing::line_value(r.out, "speedup");
  const double speedup = std::stod(s);
  return {speedup >= 3.0, "speedup = " + s + " (MFBI " +
                              testing::line_value(r.out, "median_mfbi_seconds") + " s, MBI " +
                              testing::line_value(r.out, "median_mbi_seconds") + " s)"};
}

// 6. Planted bitemporal scenes through `bcd pipeline`.
Outcome end_to_end() {
  TempDir dir("accept_e2e");
  int cells = 0, correct = 0, planted = 0, recovered = 0;
  for (std::uint64_t seed : {11, 12, 13, 14}) {
    const auto scene = testing::planted_scene(seed, 512, 8);
    io::write_raster(scene.t1, dir / "t1.raster");
    io::write_raster(scene.t2, dir / "t2.raster");
    const std::string out = dir / ("run" + std::to_string(seed));
    const auto r = run_cli({"pipeline", "--in", dir / "t1.raster", "--in2", dir / "t2.raster",
                            "--n-segments", "8", "--change-threshold", "2.5", "--out-dir", out});
    if (r.code != 0) return {false, "pipeline failed: " + r.err};
    const GridChangeMap map = io::read_change_report(out + "/report.json");
    for (const auto& c : map.cells) {
      const ChangeLabel truth = scene.truth.at({c.row, c.col});
      ++cells;
      correct += c.label == truth;
      if (truth != ChangeLabel::kAU) {
        ++planted;
        recovered += c.label == truth;
      }
    }
  }
  const double rate = 100.0 * correct / cells;
  return {rate >= 95.0 && recovered == planted,
          fmt("%.2f", rate) + "% of " + std::to_string(cells) + " cells correct, " +
              std::to_string(recovered) + "/" + std::to_string(planted) +
              " planted SI/SD recovered"};
}

// 7. Scaling building density leaves ratio labels alone but flips the
// difference baseline.
Outcome ratio_vs_difference() {
  auto masks = [](int a1, int a2) {
    BuildingMask t1(80, 80), t2(80, 80);
    for (int i = 0; i < a1; ++i) t1.set(i % 40, i / 40, true);
    for (int i = 0; i < a2; ++i) t2.set(i % 40, i / 40, true);
    return std::pair{t1, t2};
  };
  ChangeConfig cfg;
  cfg.n_segments = 2;
  cfg.diff_threshold = 10;
  const auto [s1, s2] = masks(10, 15);
  const auto [d1, d2] = masks(40, 60);
  const ChangeLabel ratio_sparse = change_map(s1, s2, cfg).at(0, 0).label;
  const ChangeLabel ratio_dense = change_map(d1, d2, cfg).at(0, 0).label;
  const ChangeLabel diff_sparse = change_map_diff_baseline(s1, s2, cfg).at(0, 0).label;
  const ChangeLabel diff_dense = change_map_diff_baseline(d1, d2, cfg).at(0, 0).label;
  const bool pass = ratio_sparse == ChangeLabel::kAU && ratio_dense == ChangeLabel::kAU &&
                    diff_sparse == ChangeLabel::kUC && diff_dense == ChangeLabel::kC;
  return {pass, "ratio " + std::string(to_string(ratio_sparse)) + "->" +
                    std::string(to_string(ratio_dense)) + ", difference " +
                    std::string(to_string(diff_sparse)) + "->" +
                    std::string(to_string(diff_dense))};
}

// 8. classify_cell properties over random (a1, a2, T).
Outcome classify_properties() {
  std::mt19937_64 rng(8008);
  std::uniform_int_distribution<std::int64_t> area(1, 1'000'000);
  std::uniform_real_distribution<double> tdist(1.0, 10.0);
  const double exact_t[] = {1.25, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 8.0};
  constexpr int kTrials = 2000;
  int failures[4] = {0, 0, 0, 0};
  auto opposite = [](ChangeLabel l) {
    return l == ChangeLabel::kSI ? ChangeLabel::kSD
           : l == ChangeLabel::kSD ? ChangeLabel::kSI
                                   : l;
  };
  for (int i = 0; i < kTrials; ++i) {
    ChangeConfig cfg;
    cfg.min_area_floor = 0.0;
    double t = tdist(rng);
    while (!(t > 1.0)) t = tdist(rng);
    cfg.change_threshold = t;
    const std::int64_t a1 = area(rng), a2 = area(rng);
    const std::int64_t k = 1 + static_cast<std::int64_t>(rng() % 50);
    const ChangeLabel l = classify_cell(a1, a2, cfg);
    // Scale invariance.
    failures[0] += classify_cell(k * a1, k * a2, cfg) != l;
    // Antisymmetry.
    failures[1] += classify_cell(a2, a1, cfg) != opposite(l);
    // Exact boundary a2 == T * a1 (and the mirror) is AU.
    ChangeConfig edge = cfg;
    edge.change_threshold = exact_t[i % std::size(exact_t)];
    const std::int64_t base = 4 * (1 + static_cast<std::int64_t>(rng() % 100'000));
    const auto scaled = static_cast<std::int64_t>(edge.change_threshold * double(base));
    failures[2] += classify_cell(base, scaled, edge) != ChangeLabel::kAU;
    failures[2] += classify_cell(scaled, base, edge) != ChangeLabel::kAU;
    failures[2] += classify_cell(base, scaled + 1, edge) != ChangeLabel::kSI;
    // a1 == 0: SI once a2 clears the floor, AU at or below it.
    ChangeConfig floored = cfg;
    const double floor = static_cast<double>(rng() % 50);
    floored.min_area_floor = floor;
    const std::int64_t low = static_cast<std::int64_t>(floor);
    failures[3] += classify_cell(0, low + 1 + a2 % 1000, floored) != ChangeLabel::kSI;
    failures[3] += classify_cell(0, low, floored) != ChangeLabel::kAU;
    failures[3] += classify_cell(low + 1 + a1 % 1000, 0, floored) != ChangeLabel::kSD;
  }
  const int total = failures[0] + failures[1] + failures[2] + failures[3];
  return {total == 0, std::to_string(kTrials) + " triples per property; failures scale=" +
                          std::to_string(failures[0]) + " antisym=" +
                          std::to_string(failures[1]) + " boundary=" +
                          std::to_string(failures[2]) + " zero=" + std::to_string(failures[3])};
}

// 9. Partition rects tile exactly; 2800/14 and 4400/20 grids are uniform.
Outcome partition_exact() {
  std::mt19937_64 rng(9009);
  int cases = 0, bad = 0;
  for (; cases < 300; ++cases) {
    const int w = 1 + static_cast<int>(rng() % 300);
    const int h = 1 + static_cast<int>(rng() % 300);
    const int n = 1 + static_cast<int>(rng() % std::min(w, h));
    std::vector<int> cover(std::size_t(w) * h, 0);
    const auto rects = partition(w, h, n);
    bool ok = rects.size() == std::size_t(n) * n;
    int min_side = w + h, max_side = 0;
    for (const auto& r : rects) {
      ok = ok && r.x0 < r.x1 && r.y0 < r.y1;
      min_side = std::min({min_side, r.x1 - r.x0, r.y1 - r.y0});
      max_side = std::max({max_side, r.x1 - r.x0, r.y1 - r.y0});
      for (int y = r.y0; y < r.y1; ++y) {
        for (int x = r.x0; x < r.x1; ++x) ++cover[std::size_t(y) * w + x];
      }
    }
    for (int c : cover) ok = ok && c == 1;
    ok = ok && (w / n == h / n ? max_side - min_side <= 1 : true);
    bad += !ok;
  }
  auto uniform = [](int extent, int n, int side) {
    const auto rects = partition(extent, extent, n);
    for (const auto& r : rects) {
      if (r.x1 - r.x0 != side || r.y1 - r.y0 != side) return false;
    }
    return rects.size() == std::size_t(n) * n;
  };
  const bool even = uniform(2800, 14, 200) && uniform(4400, 20, 220);
  return {bad == 0 && even, std::to_string(cases) + " random partitions, " +
                                 std::to_string(bad) + " bad; 2800/14 -> 200 and 4400/20 -> 220 " +
                                 (even ? "exact" : "WRONG")};
}

// 10. Round trips through every file format.
Outcome io_round_trips() {
  TempDir dir("accept_io");
  std::mt19937_64 rng(10010);
  bool raster_ok = true, report_ok = true;
  double gray_err = 0;
  for (int i = 0; i < 20; ++i) {
    const int w = 1 + static_cast<int>(rng() % 40), h = 1 + static_cast<int>(rng() % 40);
    const int bands = 1 + static_cast<int>(rng() % 5);
    std::vector<float> data(std::size_t(w) * h * bands);
    std::uniform_real_distribution<float> any(-1e6f, 1e6f);
    for (float& v : data) v = any(rng);
    data[0] = std::numeric_limits<float>::denorm_min();
    if (data.size() > 1) data[1] = -0.0f;
    std::vector<std::string> names;
    for (int b = 0; b < bands; ++b) names.push_back("band" + std::to_string(b));
    const RasterImage img(w, h, names, data, 16);
    io::write_raster(img, dir / "r.raster");
    const RasterImage back = io::read_raster(dir / "r.raster");
    raster_ok = raster_ok && back.width() == w && back.bit_depth() == 16 &&
                std::memcmp(back.data().data(), img.data().data(), data.size() * 4) == 0;

    Band g(w, h);
    std::uniform_real_distribution<float> unit(0.0f, 1.0f);
    for (float& v : g.values()) v = unit(rng);
    io::write_gray_image(g, dir / "g.pgm", 16);
    const Band gb = io::read_gray_image(dir / "g.pgm");
    for (std::size_t p = 0; p < g.size(); ++p) {
      gray_err = std::max(gray_err, std::abs(double(gb.values()[p]) - g.values()[p]));
    }

    ChangeConfig cfg;
    cfg.n_segments = 1 + static_cast<int>(rng() % std::min(w, h));
    cfg.change_threshold = 1.0 + unit(rng) * 4.0;
    if (i % 2) cfg.min_area_floor = unit(rng) * 10.0;
    BuildingMask m1(w, h), m2(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        m1.set(x, y, rng() % 3 == 0);
        m2.set(x, y, rng() % 4 == 0);
      }
    }
    GridChangeMap map;
    if (i % 3 == 0) {
      cfg.diff_threshold = static_cast<std::int64_t>(rng() % 20);
      map = change_map_diff_baseline(m1, m2, cfg);
    } else {
      map = change_map(m1, m2, cfg);
    }
    io::write_change_map(map, dir / "c.ppm", dir / "c.json");
    report_ok = report_ok && io::read_change_report(dir / "c.json") == map &&
                io::parse_change_report(io::change_report_json(map)) == map;
  }
  const bool gray_ok = gray_err <= 1.0 / 65535.0;
  return {raster_ok && gray_ok && report_ok,
          std::string("raster ") + (raster_ok ? "bit-exact" : "DIFFERS") + ", 16-bit gray max err " +
              fmt("%.3g", gray_err) + " (limit 1.53e-05), report " +
              (report_ok ? "equal" : "DIFFERS")};
}

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;  // 0: no runtime limit
  std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "median filter equals sorted-window oracle", 10.0, median_oracle},
      {2, "Otsu equals exhaustive maximizer", 5.0, otsu_oracle},
      {3, "MFBI affine invariance", 0.0, mfbi_affine},
      {4, "reference confusion tables give expected OA", 0.0, reference_oa},
      {5, "MFBI at least 3x faster than MBI at 1024^2", 120.0, bench_speedup},
      {6, "end-to-end planted change detection", 0.0, end_to_end},
      {7, "ratio stable where difference flips", 0.0, ratio_vs_difference},
      {8, "classify_cell property suite", 1.0, classify_properties},
      {9, "partition exactness", 0.0, partition_exact},
      {10, "I/O round trips", 0.0, io_round_trips},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = fmt("%.2f s", secs);
    if (c.budget_seconds > 0) {
      timing += fmt(", limit %.0f s", c.budget_seconds);
      if (secs >= c.budget_seconds) {
        o.pass = false;
        o.detail += "; over time budget";
      }
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.title << " -- "
              << o.detail << " [" << timing << "]" << std::endl;
  }
  return failed;
}
