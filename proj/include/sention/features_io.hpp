#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "sention/core.hpp"

namespace sention {

inline constexpr char kIvaMagic[9] = "SENTIVA1";
inline constexpr char kHogMagic[9] = "SENTHOG1";

namespace detail {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_f64(std::vector<std::uint8_t>& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

struct ByteReader {
  const std::uint8_t* p;
  std::size_t n;
  std::size_t pos = 0;

  void need(std::size_t k) const {
    if (pos + k > n) throw CorruptModel("unexpected end of data");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[pos + i]) << (8 * i);
    pos += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[pos + i]) << (8 * i);
    pos += 8;
    return v;
  }
  double f64() {
    const std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
};

inline std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile(path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

inline void write_all(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write: " + path.string());
}

}  // namespace detail

/// Flat feature record: 8-byte magic, little-endian u32 value count, then the
/// values as little-endian 64-bit floats.
inline void write_feature_record(const std::filesystem::path& path, const char* magic,
                                 const std::vector<double>& values) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(12 + values.size() * 8);
  bytes.insert(bytes.end(), magic, magic + 8);
  detail::put_u32(bytes, static_cast<std::uint32_t>(values.size()));
  for (double v : values) detail::put_f64(bytes, v);
  detail::write_all(path, bytes);
}

inline std::vector<double> read_feature_record(const std::filesystem::path& path, const char* expected_magic) {
  const auto bytes = detail::read_all(path);
  if (bytes.size() < 12) throw CorruptModel("feature record too short: " + path.string());
  if (std::memcmp(bytes.data(), expected_magic, 8) != 0)
    throw CorruptModel("wrong feature record magic in " + path.string());
  detail::ByteReader r{bytes.data(), bytes.size(), 8};
  const std::uint32_t count = r.u32();
  if (bytes.size() != 12 + static_cast<std::size_t>(count) * 8)
    throw CorruptModel("feature record length mismatch: " + path.string());
  std::vector<double> values(count);
  for (std::uint32_t i = 0; i < count; ++i) values[i] = r.f64();
  return values;
}

/// Debug export, one value per line at full precision.
inline void write_feature_csv(const std::filesystem::path& path, const std::vector<double>& values) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  char buf[48];
  for (double v : values) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    out << buf;
  }
}

}  // namespace sention
