#include "io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "error.hpp"

namespace semcut {

namespace fs = std::filesystem;

namespace {

std::uint32_t load_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void store_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

struct SpftHeader {
  std::uint32_t channels, height, width;
  std::uint64_t payload_bytes;
};

SpftHeader parse_spft_header(const std::uint8_t* bytes, std::size_t available) {
  if (available < 4) fail(ErrorCode::truncated, "SPFT: file shorter than its magic");
  if (std::memcmp(bytes, "SPFT", 4) != 0) fail(ErrorCode::bad_magic, "SPFT: bad magic");
  if (available < kSpftHeaderBytes) fail(ErrorCode::truncated, "SPFT: truncated header");
  const std::uint32_t version = load_u32(bytes + 4);
  if (version != kSpftVersion) fail(ErrorCode::bad_version, "SPFT: unsupported version " + std::to_string(version));
  SpftHeader h{load_u32(bytes + 8), load_u32(bytes + 12), load_u32(bytes + 16), 0};
  if (h.channels == 0 || h.height == 0 || h.width == 0) fail(ErrorCode::dimension, "SPFT: zero dimension");
  // channels * height fits in 64 bits; check the rest by division.
  const std::uint64_t plane = static_cast<std::uint64_t>(h.channels) * h.height;
  const auto limit = static_cast<std::uint64_t>(std::numeric_limits<std::ptrdiff_t>::max());
  if (plane > limit / 4u / h.width)
    fail(ErrorCode::dimension_overflow, "SPFT: payload size exceeds addressable memory");
  h.payload_bytes = plane * h.width * 4u;
  return h;
}

FeatureGrid decode_payload(const SpftHeader& h, const std::uint8_t* payload) {
  const std::size_t count = static_cast<std::size_t>(h.payload_bytes / 4);
  std::vector<double> data(count);
  for (std::size_t i = 0; i < count; ++i) data[i] = std::bit_cast<float>(load_u32(payload + 4 * i));
  return FeatureGrid(h.channels, h.height, h.width, std::move(data));
}

std::uint8_t quantize(double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); }

// Netpbm header: magic, width, height, maxval, then a single whitespace byte.
struct NetpbmHeader {
  std::size_t width, height;
  std::size_t offset;
};

NetpbmHeader parse_netpbm(const std::vector<std::uint8_t>& bytes, const char* magic, const std::string& what) {
  if (bytes.size() < 2 || bytes[0] != magic[0] || bytes[1] != magic[1])
    fail(ErrorCode::format, what + ": expected " + std::string(magic, 2) + " header");
  std::size_t pos = 2;
  auto next_number = [&]() -> std::size_t {
    for (;;) {
      while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
      if (pos < bytes.size() && bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) fail(ErrorCode::format, what + ": malformed header");
    std::size_t v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + static_cast<std::size_t>(bytes[pos] - '0');
      if (v > (1u << 30)) fail(ErrorCode::format, what + ": header value too large");
      ++pos;
    }
    return v;
  };
  NetpbmHeader h{};
  h.width = next_number();
  h.height = next_number();
  const std::size_t maxval = next_number();
  if (h.width == 0 || h.height == 0) fail(ErrorCode::format, what + ": zero dimension");
  if (maxval != 255) fail(ErrorCode::format, what + ": maxval must be 255, got " + std::to_string(maxval));
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) fail(ErrorCode::format, what + ": malformed header");
  h.offset = pos + 1;
  return h;
}

std::vector<std::uint8_t> netpbm_header(const char* magic, std::size_t width, std::size_t height) {
  const std::string head = std::string(magic) + "\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  return {head.begin(), head.end()};
}

std::vector<std::uint8_t> read_pgm_payload(const fs::path& path, std::size_t& width, std::size_t& height) {
  const auto bytes = read_file_bytes(path);
  const auto h = parse_netpbm(bytes, "P5", "PGM " + path.string());
  if (bytes.size() - h.offset < h.width * h.height) fail(ErrorCode::truncated, "PGM " + path.string() + ": truncated payload");
  width = h.width;
  height = h.height;
  return {bytes.begin() + static_cast<std::ptrdiff_t>(h.offset),
          bytes.begin() + static_cast<std::ptrdiff_t>(h.offset + h.width * h.height)};
}

void write_pgm(const fs::path& path, std::size_t width, std::size_t height, const std::vector<std::uint8_t>& pixels) {
  auto out = netpbm_header("P5", width, height);
  out.insert(out.end(), pixels.begin(), pixels.end());
  write_file_bytes(path, out);
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

std::vector<std::uint8_t> read_file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

void write_file_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::io, "write failed for " + path.string());
}

std::vector<std::uint8_t> encode_spft(const FeatureGrid& grid) {
  for (std::size_t v : {grid.channels(), grid.height(), grid.width()})
    if (v > std::numeric_limits<std::uint32_t>::max()) fail(ErrorCode::dimension_overflow, "SPFT: dimension exceeds u32");
  std::vector<std::uint8_t> out{'S', 'P', 'F', 'T'};
  out.reserve(kSpftHeaderBytes + 4 * grid.data().size());
  store_u32(out, kSpftVersion);
  store_u32(out, static_cast<std::uint32_t>(grid.channels()));
  store_u32(out, static_cast<std::uint32_t>(grid.height()));
  store_u32(out, static_cast<std::uint32_t>(grid.width()));
  for (double v : grid.data()) {
    const float f = static_cast<float>(v);
    if (!std::isfinite(f)) fail(ErrorCode::non_finite, "SPFT: value overflows float32");
    store_u32(out, std::bit_cast<std::uint32_t>(f));
  }
  return out;
}

FeatureGrid decode_spft(const std::vector<std::uint8_t>& bytes) {
  const auto h = parse_spft_header(bytes.data(), bytes.size());
  const std::uint64_t available = bytes.size() - kSpftHeaderBytes;
  if (available < h.payload_bytes) fail(ErrorCode::truncated, "SPFT: truncated payload");
  if (available > h.payload_bytes) fail(ErrorCode::format, "SPFT: trailing bytes after payload");
  return decode_payload(h, bytes.data() + kSpftHeaderBytes);
}

FeatureGrid read_spft(const fs::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) fail(ErrorCode::io, "cannot open " + path.string());
  const auto file_size = static_cast<std::uint64_t>(in.tellg());
  in.seekg(0);
  std::uint8_t header[kSpftHeaderBytes];
  const auto head_len = static_cast<std::size_t>(std::min<std::uint64_t>(file_size, kSpftHeaderBytes));
  in.read(reinterpret_cast<char*>(header), static_cast<std::streamsize>(head_len));
  const auto h = parse_spft_header(header, head_len);
  const std::uint64_t available = file_size - kSpftHeaderBytes;
  if (available < h.payload_bytes) fail(ErrorCode::truncated, "SPFT " + path.string() + ": truncated payload");
  if (available > h.payload_bytes) fail(ErrorCode::format, "SPFT " + path.string() + ": trailing bytes after payload");
  std::vector<std::uint8_t> payload(static_cast<std::size_t>(h.payload_bytes));
  in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  if (!in) fail(ErrorCode::io, "SPFT " + path.string() + ": read failed");
  return decode_payload(h, payload.data());
}

void write_spft(const FeatureGrid& grid, const fs::path& path) { write_file_bytes(path, encode_spft(grid)); }

void write_mask(const SoftMask& mask, const fs::path& path) {
  std::vector<std::uint8_t> px(mask.size());
  auto v = mask.values();
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = quantize(v[i]);
  write_pgm(path, mask.width(), mask.height(), px);
}

void write_mask(const BinaryMask& mask, const fs::path& path) {
  std::vector<std::uint8_t> px(mask.size());
  auto v = mask.values();
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = v[i] ? 255 : 0;
  write_pgm(path, mask.width(), mask.height(), px);
}

SoftMask read_soft_mask(const fs::path& path) {
  std::size_t w = 0, h = 0;
  const auto px = read_pgm_payload(path, w, h);
  std::vector<double> v(px.size());
  for (std::size_t i = 0; i < px.size(); ++i) v[i] = px[i] / 255.0;
  return SoftMask(h, w, std::move(v));
}

BinaryMask read_binary_mask(const fs::path& path) {
  std::size_t w = 0, h = 0;
  const auto px = read_pgm_payload(path, w, h);
  std::vector<std::uint8_t> v(px.size());
  for (std::size_t i = 0; i < px.size(); ++i) v[i] = px[i] > 127 ? 1 : 0;
  return BinaryMask(h, w, std::move(v));
}

void write_image(const RgbImage& image, const fs::path& path) {
  auto out = netpbm_header("P6", image.width(), image.height());
  const std::size_t plane = image.pixel_count();
  auto d = image.data();
  for (std::size_t i = 0; i < plane; ++i)
    for (std::size_t c = 0; c < 3; ++c) out.push_back(quantize(d[c * plane + i]));
  write_file_bytes(path, out);
}

RgbImage read_image(const fs::path& path) {
  const auto bytes = read_file_bytes(path);
  const auto h = parse_netpbm(bytes, "P6", "PPM " + path.string());
  const std::size_t plane = h.width * h.height;
  if (bytes.size() - h.offset < 3 * plane) fail(ErrorCode::truncated, "PPM " + path.string() + ": truncated payload");
  std::vector<double> data(3 * plane);
  for (std::size_t i = 0; i < plane; ++i)
    for (std::size_t c = 0; c < 3; ++c) data[c * plane + i] = bytes[h.offset + 3 * i + c] / 255.0;
  return RgbImage(h.height, h.width, std::move(data));
}

std::vector<ManifestRecord> read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open manifest " + path.string());
  const fs::path base = path.parent_path();
  std::vector<ManifestRecord> records;
  std::set<std::string> ids;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorCode::format, where + ": invalid JSON (" + e.what() + ")");
    }
    try {
      ManifestRecord r;
      r.id = j.at("id").get<std::string>();
      if (r.id.empty()) fail(ErrorCode::format, where + ": empty id");
      r.features = resolve(base, j.at("features").get<std::string>());
      if (j.contains("image") && !j["image"].is_null()) r.image = resolve(base, j["image"].get<std::string>());
      if (j.contains("gt_mask") && !j["gt_mask"].is_null()) r.gt_mask = resolve(base, j["gt_mask"].get<std::string>());
      if (j.contains("attention") && !j["attention"].is_null())
        r.attention = resolve(base, j["attention"].get<std::string>());
      if (j.contains("boxes") && !j["boxes"].is_null()) {
        for (const auto& b : j["boxes"]) {
          if (!b.is_array() || b.size() != 4) fail(ErrorCode::format, where + ": box must be [x_min,y_min,x_max,y_max]");
          BoundingBox box{b[0].get<std::int64_t>(), b[1].get<std::int64_t>(), b[2].get<std::int64_t>(),
                          b[3].get<std::int64_t>()};
          if (!box.valid() || box.x_min < 0 || box.y_min < 0) fail(ErrorCode::format, where + ": invalid box");
          r.boxes.push_back(box);
        }
      }
      if (!ids.insert(r.id).second) fail(ErrorCode::format, where + ": duplicate id '" + r.id + "'");
      records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::format, where + ": " + e.what());
    }
  }
  return records;
}

std::string manifest_line(const ManifestRecord& record) {
  nlohmann::ordered_json j;
  j["id"] = record.id;
  j["features"] = record.features.generic_string();
  if (record.image) j["image"] = record.image->generic_string();
  if (record.gt_mask) j["gt_mask"] = record.gt_mask->generic_string();
  if (record.attention) j["attention"] = record.attention->generic_string();
  if (!record.boxes.empty()) {
    j["boxes"] = nlohmann::ordered_json::array();
    for (const auto& b : record.boxes) j["boxes"].push_back({b.x_min, b.y_min, b.x_max, b.y_max});
  }
  return j.dump();
}

}  // namespace semcut
