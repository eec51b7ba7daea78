#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "hughes/core.hpp"

// Grid files: a 32-byte little-endian header followed by row-major float64.
//
//   offset  size  field
//   0       4     magic "HGKD"
//   4       4     format version (u32)
//   8       4     T, number of rows (u32)
//   12      4     X, number of columns (u32)
//   16      4     payload kind (u32)
//   20      12    reserved, zero

namespace hughes::io {

inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr std::size_t kHeaderSize = 32;

enum class PayloadKind : std::uint32_t { trajectory = 1, input = 2, target = 3, prediction = 4 };

const char* to_string(PayloadKind kind);

struct GridHeader {
  std::uint32_t version = kFormatVersion;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  PayloadKind kind = PayloadKind::trajectory;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);

/// Serialized file image; throws ValidationError on NaN/Inf.
std::vector<std::uint8_t> encode(const Field& grid, PayloadKind kind);

/// Parses a file image; throws FormatError on any inconsistency.
Field decode(std::span<const std::uint8_t> bytes, GridHeader* header = nullptr);

GridHeader decode_header(std::span<const std::uint8_t> bytes);

/// Writes the grid and returns the FNV-1a checksum of the whole file.
std::uint64_t write_grid(const std::filesystem::path& path, const Field& grid, PayloadKind kind);

Field read_grid(const std::filesystem::path& path, GridHeader* header = nullptr);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
std::uint64_t file_checksum(const std::filesystem::path& path);

/// Fixed-width lowercase hex, as stored in manifests.
std::string checksum_hex(std::uint64_t checksum);
std::uint64_t checksum_from_hex(const std::string& hex);

}  // namespace hughes::io
