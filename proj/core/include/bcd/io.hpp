#pragma once

#include <filesystem>
#include <string>

#include "bcd/changegrid.hpp"
#include "bcd/eval.hpp"
#include "bcd/raster.hpp"
#include "bcd/spectral.hpp"

namespace bcd::io {

/// Whole-file binary read and truncating write; FormatError on failure.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);

// Flat raster container: one JSON header line terminated by '\n', followed
// by width*height*bands little-endian float32 values, band-planar.
RasterImage read_raster(const std::filesystem::path& path);
void write_raster(const RasterImage& img, const std::filesystem::path& path);

/// Binary portable graymap (P5), maxval up to 65535. Values are scaled to
/// [0, 1] by maxval.
Band read_gray_image(const std::filesystem::path& path);
/// Quantizes clamp(v, 0, 1) to round-half-up levels at 8 or 16 bits.
void write_gray_image(const Band& band, const std::filesystem::path& path,
                      int bit_depth = 8);

BuildingMask read_mask(const std::filesystem::path& path);
/// 8-bit graymap, 0 / 255.
void write_mask(const BuildingMask& mask, const std::filesystem::path& path);

/// Cell colour of the change image: SI red, SD green, AU blue, C white,
/// UC 50% gray.
struct Rgb {
  unsigned char r, g, b;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};
Rgb label_color(ChangeLabel label);

/// Binary portable pixmap (P6) with each cell painted its label colour.
void write_change_image(const GridChangeMap& map, const std::filesystem::path& path);
/// JSON report: config snapshot plus every cell's row, col, rect, a1, a2, label.
std::string change_report_json(const GridChangeMap& map);
GridChangeMap parse_change_report(const std::string& text);
void write_change_map(const GridChangeMap& map, const std::filesystem::path& image_path,
                      const std::filesystem::path& report_path);
GridChangeMap read_change_report(const std::filesystem::path& path);

/// "row,col,label" lines with an optional header row.
TruthLabels read_truth(const std::filesystem::path& path);
TruthLabels parse_truth(const std::string& text);
void write_truth(const TruthLabels& truth, const std::filesystem::path& path);

/// Rows predicted, columns truth, per-row accuracy, then an OA row.
std::string confusion_csv(const ConfusionMatrix& matrix);

}  // namespace bcd::io
