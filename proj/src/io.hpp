#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"

namespace semcut {

// SPFT feature container: "SPFT", u32 version (1), u32 D, H, W, then D*H*W
// little-endian float32 values, channel-major. All integers little-endian.
inline constexpr std::uint32_t kSpftVersion = 1;
inline constexpr std::size_t kSpftHeaderBytes = 20;

FeatureGrid read_spft(const std::filesystem::path& path);
void write_spft(const FeatureGrid& grid, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_spft(const FeatureGrid& grid);
FeatureGrid decode_spft(const std::vector<std::uint8_t>& bytes);

// Binary PGM (P5, maxval 255). Soft values quantize to round(v*255); binary
// masks write {0,255} and load as byte > 127.
void write_mask(const SoftMask& mask, const std::filesystem::path& path);
void write_mask(const BinaryMask& mask, const std::filesystem::path& path);
SoftMask read_soft_mask(const std::filesystem::path& path);
BinaryMask read_binary_mask(const std::filesystem::path& path);

// Binary PPM (P6, maxval 255); values are byte/255.
void write_image(const RgbImage& image, const std::filesystem::path& path);
RgbImage read_image(const std::filesystem::path& path);

struct ManifestRecord {
  std::string id;
  std::filesystem::path features;
  std::optional<std::filesystem::path> image;
  std::optional<std::filesystem::path> gt_mask;
  std::optional<std::filesystem::path> attention;  // single-channel SPFT
  std::vector<BoundingBox> boxes;
};

// One JSON object per line. Relative paths resolve against the manifest's
// directory; ids must be unique. File existence is checked when a record is used.
std::vector<ManifestRecord> read_manifest(const std::filesystem::path& path);
// Serializes with paths as given (no resolution).
std::string manifest_line(const ManifestRecord& record);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace semcut
