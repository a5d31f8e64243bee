#include "bcd/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "bcd/error.hpp"

namespace bcd::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kRasterFormat = "bcd-raster";
constexpr const char* kReportFormat = "bcd-change-report";

void put_f32le(std::string& out, float v) {
  const auto bits = std::bit_cast<std::uint32_t>(v);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

float get_f32le(const unsigned char* p) {
  const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                             (static_cast<std::uint32_t>(p[1]) << 8) |
                             (static_cast<std::uint32_t>(p[2]) << 16) |
                             (static_cast<std::uint32_t>(p[3]) << 24);
  return std::bit_cast<float>(bits);
}

// Netpbm header: magic, then whitespace/comment separated integers, then a
// single whitespace byte before the payload.
struct PnmHeader {
  int width = 0;
  int height = 0;
  int maxval = 0;
  std::size_t payload_offset = 0;
};

PnmHeader parse_pnm_header(const std::string& bytes, const char* magic, const fs::path& path) {
  if (bytes.size() < 2 || bytes.compare(0, 2, magic) != 0) {
    throw FormatError("not a binary " + std::string(magic[1] == '5' ? "graymap" : "pixmap") +
                      " (bad magic): " + path.string());
  }
  std::size_t pos = 2;
  auto next_int = [&]() -> long long {
    for (;;) {
      while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
      if (pos < bytes.size() && bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    long long v = 0;
    auto [ptr, ec] = std::from_chars(bytes.data() + pos, bytes.data() + bytes.size(), v);
    if (ec != std::errc() || ptr == bytes.data() + pos) {
      throw FormatError("malformed header: " + path.string());
    }
    pos = static_cast<std::size_t>(ptr - bytes.data());
    return v;
  };
  PnmHeader h;
  const long long w = next_int();
  const long long ht = next_int();
  const long long maxval = next_int();
  if (w <= 0 || ht <= 0 || w > (1 << 24) || ht > (1 << 24)) {
    throw FormatError("malformed header (dimensions): " + path.string());
  }
  if (maxval <= 0) throw FormatError("malformed header (maxval): " + path.string());
  if (maxval > 65535) throw FormatError("bit depth above 16 bits: " + path.string());
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw FormatError("malformed header: " + path.string());
  }
  h.width = static_cast<int>(w);
  h.height = static_cast<int>(ht);
  h.maxval = static_cast<int>(maxval);
  h.payload_offset = pos + 1;
  return h;
}

json config_json(const ChangeConfig& cfg) {
  json j;
  j["n_segments"] = cfg.n_segments;
  j["change_threshold"] = cfg.change_threshold;
  j["min_area_floor"] = cfg.min_area_floor ? json(*cfg.min_area_floor) : json(nullptr);
  j["diff_threshold"] = cfg.diff_threshold ? json(*cfg.diff_threshold) : json(nullptr);
  return j;
}

ChangeConfig config_from_json(const json& j) {
  ChangeConfig cfg;
  cfg.n_segments = j.at("n_segments").get<int>();
  cfg.change_threshold = j.at("change_threshold").get<double>();
  if (j.contains("min_area_floor") && !j["min_area_floor"].is_null()) {
    cfg.min_area_floor = j["min_area_floor"].get<double>();
  }
  if (j.contains("diff_threshold") && !j["diff_threshold"].is_null()) {
    cfg.diff_threshold = j["diff_threshold"].get<std::int64_t>();
  }
  return cfg;
}

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

RasterImage read_raster(const fs::path& path) {
  const std::string bytes = read_file(path);
  const auto nl = bytes.find('\n');
  if (nl == std::string::npos) throw FormatError("malformed header: no header line");

  json header;
  try {
    header = json::parse(bytes.substr(0, nl));
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed header: ") + e.what());
  }
  int width = 0, height = 0, bands = 0, bit_depth = 32;
  std::vector<std::string> names;
  try {
    if (header.at("format").get<std::string>() != kRasterFormat) {
      throw FormatError("malformed header: unexpected format tag");
    }
    width = header.at("width").get<int>();
    height = header.at("height").get<int>();
    bands = header.at("bands").get<int>();
    names = header.at("band_names").get<std::vector<std::string>>();
    bit_depth = header.value("bit_depth", 32);
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed header: ") + e.what());
  }
  if (width <= 0 || height <= 0 || bands <= 0) {
    throw FormatError("malformed header: non-positive dimensions");
  }
  if (static_cast<int>(names.size()) != bands) throw FormatError("band name count mismatch");

  const std::size_t count = static_cast<std::size_t>(width) * height * bands;
  const std::size_t payload = bytes.size() - nl - 1;
  if (payload < 4 * count) throw FormatError("truncated payload");
  if (payload > 4 * count) throw FormatError("trailing bytes after payload");

  std::vector<float> data(count);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + nl + 1);
  for (std::size_t i = 0; i < count; ++i) data[i] = get_f32le(p + 4 * i);
  return RasterImage(width, height, std::move(names), std::move(data), bit_depth);
}

void write_raster(const RasterImage& img, const fs::path& path) {
  json header;
  header["format"] = kRasterFormat;
  header["width"] = img.width();
  header["height"] = img.height();
  header["bands"] = img.bands();
  header["band_names"] = img.band_names();
  header["bit_depth"] = img.bit_depth();
  std::string out = header.dump();
  out.push_back('\n');
  out.reserve(out.size() + 4 * img.data().size());
  for (float v : img.data()) put_f32le(out, v);
  write_file(path, out);
}

Band read_gray_image(const fs::path& path) {
  const std::string bytes = read_file(path);
  const PnmHeader h = parse_pnm_header(bytes, "P5", path);
  const std::size_t n = static_cast<std::size_t>(h.width) * h.height;
  const std::size_t sample = h.maxval > 255 ? 2 : 1;
  if (bytes.size() - h.payload_offset < n * sample) throw FormatError("truncated payload");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + h.payload_offset);
  std::vector<float> values(n);
  const double scale = 1.0 / h.maxval;
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned level = sample == 1 ? p[i] : (static_cast<unsigned>(p[2 * i]) << 8) | p[2 * i + 1];
    if (level > static_cast<unsigned>(h.maxval)) throw FormatError("sample exceeds maxval");
    values[i] = static_cast<float>(level * scale);
  }
  return Band(h.width, h.height, std::move(values));
}

void write_gray_image(const Band& band, const fs::path& path, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) throw ValidationError("gray bit depth must be 8 or 16");
  const unsigned maxval = bit_depth == 8 ? 255u : 65535u;
  std::string out = "P5\n" + std::to_string(band.width()) + " " + std::to_string(band.height()) +
                    "\n" + std::to_string(maxval) + "\n";
  for (float v : band.values()) {
    const double c = std::clamp(static_cast<double>(v), 0.0, 1.0);
    const auto level = static_cast<unsigned>(std::floor(c * maxval + 0.5));
    if (bit_depth == 16) out.push_back(static_cast<char>(level >> 8));
    out.push_back(static_cast<char>(level & 0xFF));
  }
  write_file(path, out);
}

BuildingMask read_mask(const fs::path& path) {
  const Band band = read_gray_image(path);
  std::vector<std::uint8_t> bits(band.size());
  auto v = band.values();
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = v[i] >= 0.5f ? 1 : 0;
  return BuildingMask(band.width(), band.height(), std::move(bits));
}

void write_mask(const BuildingMask& mask, const fs::path& path) {
  std::vector<float> v(mask.bits().begin(), mask.bits().end());
  write_gray_image(Band(mask.width(), mask.height(), std::move(v)), path, 8);
}

Rgb label_color(ChangeLabel label) {
  switch (label) {
    case ChangeLabel::kSI: return {255, 0, 0};
    case ChangeLabel::kSD: return {0, 255, 0};
    case ChangeLabel::kAU: return {0, 0, 255};
    case ChangeLabel::kC: return {255, 255, 255};
    case ChangeLabel::kUC: return {128, 128, 128};
  }
  return {0, 0, 0};
}

void write_change_image(const GridChangeMap& map, const fs::path& path) {
  std::vector<Rgb> pixels(static_cast<std::size_t>(map.width) * map.height, Rgb{0, 0, 0});
  for (const GridCell& cell : map.cells) {
    const Rgb c = label_color(cell.label);
    for (int y = cell.rect.y0; y < cell.rect.y1; ++y) {
      for (int x = cell.rect.x0; x < cell.rect.x1; ++x) {
        pixels[static_cast<std::size_t>(y) * map.width + x] = c;
      }
    }
  }
  std::string out =
      "P6\n" + std::to_string(map.width) + " " + std::to_string(map.height) + "\n255\n";
  out.reserve(out.size() + 3 * pixels.size());
  for (const Rgb& p : pixels) {
    out.push_back(static_cast<char>(p.r));
    out.push_back(static_cast<char>(p.g));
    out.push_back(static_cast<char>(p.b));
  }
  write_file(path, out);
}

std::string change_report_json(const GridChangeMap& map) {
  json j;
  j["format"] = kReportFormat;
  j["version"] = 1;
  j["method"] = std::string(to_string(map.method));
  j["width"] = map.width;
  j["height"] = map.height;
  j["config"] = config_json(map.config);
  json cells = json::array();
  for (const GridCell& c : map.cells) {
    cells.push_back({{"row", c.row},
                     {"col", c.col},
                     {"x0", c.rect.x0},
                     {"y0", c.rect.y0},
                     {"x1", c.rect.x1},
                     {"y1", c.rect.y1},
                     {"a1", c.a1},
                     {"a2", c.a2},
                     {"label", std::string(to_string(c.label))}});
  }
  j["cells"] = std::move(cells);
  return j.dump(1) + "\n";
}

GridChangeMap parse_change_report(const std::string& text) {
  GridChangeMap map;
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != kReportFormat) {
      throw FormatError("not a change report");
    }
    map.method = parse_method(j.at("method").get<std::string>());
    map.width = j.at("width").get<int>();
    map.height = j.at("height").get<int>();
    map.config = config_from_json(j.at("config"));
    map.config.validate();
    const auto rects = partition(map.width, map.height, map.config.n_segments);
    const auto& cells = j.at("cells");
    if (cells.size() != rects.size()) throw FormatError("change report cell count mismatch");
    const auto alphabet = label_alphabet(map.method);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const json& c = cells[i];
      GridCell cell;
      cell.row = c.at("row").get<int>();
      cell.col = c.at("col").get<int>();
      cell.rect = {c.at("x0").get<int>(), c.at("y0").get<int>(), c.at("x1").get<int>(),
                   c.at("y1").get<int>()};
      cell.a1 = c.at("a1").get<std::int64_t>();
      cell.a2 = c.at("a2").get<std::int64_t>();
      cell.label = parse_label(c.at("label").get<std::string>());
      if (cell.row != static_cast<int>(i) / map.config.n_segments ||
          cell.col != static_cast<int>(i) % map.config.n_segments || !(cell.rect == rects[i])) {
        throw FormatError("change report cell " + std::to_string(i) + " out of order");
      }
      if (std::find(alphabet.begin(), alphabet.end(), cell.label) == alphabet.end()) {
        throw FormatError("change report label outside the method's alphabet");
      }
      map.cells.push_back(cell);
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed change report: ") + e.what());
  }
  return map;
}

void write_change_map(const GridChangeMap& map, const fs::path& image_path,
                      const fs::path& report_path) {
  write_change_image(map, image_path);
  write_file(report_path, change_report_json(map));
}

GridChangeMap read_change_report(const fs::path& path) {
  return parse_change_report(read_file(path));
}

TruthLabels parse_truth(const std::string& text) {
  TruthLabels truth;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (line_no == 1 && t.rfind("row", 0) == 0) continue;
    std::vector<std::string> fields;
    std::stringstream ss(t);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(trim(f));
    if (fields.size() != 3) {
      throw FormatError("truth line " + std::to_string(line_no) + ": expected row,col,label");
    }
    int row = 0, col = 0;
    auto parse_int = [&](const std::string& s, int& v) {
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || p != s.data() + s.size()) {
        throw FormatError("truth line " + std::to_string(line_no) + ": bad integer \"" + s + "\"");
      }
    };
    parse_int(fields[0], row);
    parse_int(fields[1], col);
    ChangeLabel label;
    try {
      label = parse_label(fields[2]);
    } catch (const ValidationError& e) {
      throw FormatError("truth line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!truth.emplace(std::make_pair(row, col), label).second) {
      throw FormatError("truth line " + std::to_string(line_no) + ": duplicate cell (" +
                        fields[0] + "," + fields[1] + ")");
    }
  }
  return truth;
}

TruthLabels read_truth(const fs::path& path) { return parse_truth(read_file(path)); }

void write_truth(const TruthLabels& truth, const fs::path& path) {
  std::string out = "row,col,label\n";
  for (const auto& [key, label] : truth) {
    out += std::to_string(key.first) + "," + std::to_string(key.second) + "," +
           std::string(to_string(label)) + "\n";
  }
  write_file(path, out);
}

std::string confusion_csv(const ConfusionMatrix& m) {
  std::ostringstream out;
  out << "predicted";
  for (ChangeLabel l : m.labels()) out << ',' << to_string(l);
  out << ",total,accuracy\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << to_string(m.labels()[i]);
    for (std::size_t j = 0; j < m.size(); ++j) out << ',' << m.count(i, j);
    const auto acc = m.row_accuracy(i);
    out << ',' << m.row_total(i) << ',' << (acc ? fixed2(*acc) : "") << '\n';
  }
  out << "total";
  for (std::size_t j = 0; j < m.size(); ++j) out << ',' << m.column_total(j);
  out << ',' << m.total() << ",\n";
  out << "accuracy";
  for (std::size_t j = 0; j < m.size(); ++j) {
    const auto acc = m.column_accuracy(j);
    out << ',' << (acc ? fixed2(*acc) : "");
  }
  out << ",," << fixed2(m.overall_accuracy()) << '\n';
  return out.str();
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("unreadable path: " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("unwritable path: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failed: " + path.string());
}

}  // namespace bcd::io
