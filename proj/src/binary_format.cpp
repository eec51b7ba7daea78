#include "hughes/binary_format.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

namespace hughes::io {

namespace {

constexpr std::uint8_t kMagic[4] = {'H', 'G', 'K', 'D'};

void put_u32(std::uint8_t* p, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

void put_f64(std::uint8_t* p, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

double get_f64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

}  // namespace

const char* to_string(PayloadKind kind) {
  switch (kind) {
    case PayloadKind::trajectory: return "trajectory";
    case PayloadKind::input: return "input";
    case PayloadKind::target: return "target";
    case PayloadKind::prediction: return "prediction";
  }
  return "unknown";
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (auto b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::vector<std::uint8_t> encode(const Field& grid, PayloadKind kind) {
  constexpr auto u32_max = std::numeric_limits<std::uint32_t>::max();
  if (grid.rows() > u32_max || grid.cols() > u32_max) {
    throw ValidationError("grid too large for the file format");
  }
  std::vector<std::uint8_t> out(kHeaderSize + 8 * grid.size(), 0);
  std::memcpy(out.data(), kMagic, 4);
  put_u32(out.data() + 4, kFormatVersion);
  put_u32(out.data() + 8, static_cast<std::uint32_t>(grid.rows()));
  put_u32(out.data() + 12, static_cast<std::uint32_t>(grid.cols()));
  put_u32(out.data() + 16, static_cast<std::uint32_t>(kind));
  std::uint8_t* p = out.data() + kHeaderSize;
  for (double v : grid.values()) {
    if (!std::isfinite(v)) throw ValidationError("refusing to write a non-finite value");
    put_f64(p, v);
    p += 8;
  }
  return out;
}

GridHeader decode_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize) throw FormatError("file shorter than the 32-byte header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("bad magic (expected HGKD)");
  GridHeader h;
  h.version = get_u32(bytes.data() + 4);
  if (h.version != kFormatVersion) {
    throw FormatError("unsupported format version " + std::to_string(h.version));
  }
  h.rows = get_u32(bytes.data() + 8);
  h.cols = get_u32(bytes.data() + 12);
  const auto kind = get_u32(bytes.data() + 16);
  if (kind < 1 || kind > 4) throw FormatError("unknown payload kind " + std::to_string(kind));
  h.kind = static_cast<PayloadKind>(kind);
  for (std::size_t i = 20; i < kHeaderSize; ++i) {
    if (bytes[i] != 0) throw FormatError("reserved header bytes are not zero");
  }
  return h;
}

Field decode(std::span<const std::uint8_t> bytes, GridHeader* header) {
  const GridHeader h = decode_header(bytes);
  const std::size_t n = static_cast<std::size_t>(h.rows) * h.cols;
  if (bytes.size() != kHeaderSize + 8 * n) {
    throw FormatError("payload size " + std::to_string(bytes.size() - kHeaderSize) +
                      " does not match " + std::to_string(h.rows) + "x" + std::to_string(h.cols));
  }
  std::vector<double> data(n);
  const std::uint8_t* p = bytes.data() + kHeaderSize;
  for (std::size_t i = 0; i < n; ++i, p += 8) {
    data[i] = get_f64(p);
    if (!std::isfinite(data[i])) throw FormatError("non-finite value in payload");
  }
  if (header) *header = h;
  return Field(h.rows, h.cols, std::move(data));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  std::vector<std::uint8_t> bytes(size);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
  if (!in) throw FormatError("short read on " + path.string());
  return bytes;
}

std::uint64_t write_grid(const std::filesystem::path& path, const Field& grid, PayloadKind kind) {
  const auto bytes = encode(grid, kind);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failed on " + path.string());
  return fnv1a64(bytes);
}

Field read_grid(const std::filesystem::path& path, GridHeader* header) {
  const auto bytes = read_file(path);
  try {
    return decode(bytes, header);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::uint64_t file_checksum(const std::filesystem::path& path) { return fnv1a64(read_file(path)); }

std::string checksum_hex(std::uint64_t checksum) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(checksum));
  return buf;
}

std::uint64_t checksum_from_hex(const std::string& hex) {
  if (hex.size() != 16) throw FormatError("checksum must have 16 hex digits");
  std::uint64_t v = 0;
  for (char c : hex) {
    v <<= 4;
    if (c >= '0' && c <= '9') v |= static_cast<std::uint64_t>(c - '0');
    else if (c >= 'a' && c <= 'f') v |= static_cast<std::uint64_t>(c - 'a' + 10);
    else throw FormatError("bad checksum digit");
  }
  return v;
}

}  // namespace hughes::io
