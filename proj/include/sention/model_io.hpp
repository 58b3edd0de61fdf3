#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <vector>

#include "sention/features_io.hpp"
#include "sention/oao.hpp"

namespace sention {

inline constexpr char kModelMagic[9] = "SENTMDL1";
inline constexpr std::uint32_t kModelVersion = 1;

/// CRC-32 (IEEE 802.3, reflected, poly 0xEDB88320).
inline std::uint32_t crc32(const std::uint8_t* data, std::size_t n, std::uint32_t seed = 0) {
  static constexpr auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  std::uint32_t crc = ~seed;
  for (std::size_t i = 0; i < n; ++i) crc = table[(crc ^ data[i]) & 0xFF] ^ (crc >> 8);
  return ~crc;
}

namespace detail {

inline void put_standardizer(std::vector<std::uint8_t>& out, const Standardizer& s) {
  put_u32(out, static_cast<std::uint32_t>(s.mean.size()));
  for (double v : s.mean) put_f64(out, v);
  for (double v : s.sigma) put_f64(out, v);
}

inline Standardizer get_standardizer(ByteReader& r) {
  Standardizer s;
  const std::uint32_t d = r.u32();
  s.mean.resize(d);
  s.sigma.resize(d);
  for (auto& v : s.mean) v = r.f64();
  for (auto& v : s.sigma) v = r.f64();
  return s;
}

inline void put_machine(std::vector<std::uint8_t>& out, const BinarySvm& m) {
  put_u32(out, static_cast<std::uint32_t>(m.class_a));
  put_u32(out, static_cast<std::uint32_t>(m.class_b));
  put_u32(out, static_cast<std::uint32_t>(m.kernel));
  put_f64(out, m.gamma);
  put_f64(out, m.bias);
  put_u32(out, m.converged ? 1 : 0);
  put_u32(out, static_cast<std::uint32_t>(m.support_vectors.rows));
  put_u32(out, static_cast<std::uint32_t>(m.support_vectors.cols));
  for (double v : m.dual_coef) put_f64(out, v);
  for (double v : m.support_vectors.data) put_f64(out, v);
}

inline BinarySvm get_machine(ByteReader& r) {
  BinarySvm m;
  m.class_a = static_cast<int>(r.u32());
  m.class_b = static_cast<int>(r.u32());
  m.kernel = static_cast<Kernel>(r.u32());
  m.gamma = r.f64();
  m.bias = r.f64();
  m.converged = r.u32() != 0;
  const std::uint32_t rows = r.u32();
  const std::uint32_t cols = r.u32();
  m.dual_coef.resize(rows);
  for (auto& v : m.dual_coef) v = r.f64();
  m.support_vectors = Matrix<double>(rows, cols);
  for (auto& v : m.support_vectors.data) v = r.f64();
  m.rebuild_linear_w();
  return m;
}

}  // namespace detail

/// Single self-describing container: magic, version, payload (masks, configs,
/// standardizer, machines), CRC32 trailer over everything before it. All
/// numeric fields little-endian, floats as 64-bit IEEE.
inline void save_model(const OaoModel& model, const std::filesystem::path& path) {
  using namespace detail;
  std::vector<std::uint8_t> out;
  out.insert(out.end(), kModelMagic, kModelMagic + 8);
  put_u32(out, kModelVersion);

  put_u32(out, static_cast<std::uint32_t>(model.mode));

  put_u32(out, model.masks.iva_dim);
  put_u32(out, model.masks.hog_dim);
  put_u32(out, static_cast<std::uint32_t>(model.masks.iva.size()));
  for (std::uint32_t v : model.masks.iva) put_u32(out, v);
  put_u32(out, static_cast<std::uint32_t>(model.masks.hog.size()));
  for (std::uint32_t v : model.masks.hog) put_u32(out, v);

  put_u32(out, static_cast<std::uint32_t>(model.hog.orientations));
  put_u32(out, static_cast<std::uint32_t>(model.hog.cell_size));
  put_u32(out, static_cast<std::uint32_t>(model.hog.block_cells));
  put_f64(out, model.hog.clip);
  put_u32(out, static_cast<std::uint32_t>(model.hog.upscale_levels));

  put_u32(out, static_cast<std::uint32_t>(model.alignment.width));
  put_u32(out, static_cast<std::uint32_t>(model.alignment.height));
  put_f64(out, model.alignment.left_eye.x);
  put_f64(out, model.alignment.left_eye.y);
  put_f64(out, model.alignment.right_eye.x);
  put_f64(out, model.alignment.right_eye.y);

  put_u32(out, static_cast<std::uint32_t>(model.svm.kernel));
  put_f64(out, model.svm.gamma);
  put_f64(out, model.svm.c);
  put_f64(out, model.svm.tolerance);
  put_u64(out, model.svm.max_passes);

  put_u32(out, static_cast<std::uint32_t>(model.selection.estimators));
  put_u32(out, static_cast<std::uint32_t>(model.selection.top_k));
  put_u32(out, static_cast<std::uint32_t>(model.selection.threshold_candidates));
  put_u64(out, model.selection.seed);

  put_standardizer(out, model.standardizer);

  put_u32(out, static_cast<std::uint32_t>(model.machines.size()));
  for (const BinarySvm& m : model.machines) put_machine(out, m);

  const std::uint32_t crc = crc32(out.data(), out.size());
  put_u32(out, crc);
  write_all(path, out);
}

inline OaoModel load_model(const std::filesystem::path& path) {
  using namespace detail;
  const auto bytes = read_all(path);
  if (bytes.size() < 16) throw CorruptModel("model file too short");
  if (std::memcmp(bytes.data(), kModelMagic, 8) != 0) throw CorruptModel("bad model magic");

  ByteReader header{bytes.data(), bytes.size(), 8};
  const std::uint32_t version = header.u32();
  if (version != kModelVersion) throw VersionMismatch(version);

  ByteReader trailer{bytes.data(), bytes.size(), bytes.size() - 4};
  const std::uint32_t stored_crc = trailer.u32();
  if (crc32(bytes.data(), bytes.size() - 4) != stored_crc)
    throw CorruptModel("model checksum mismatch");

  ByteReader r{bytes.data(), bytes.size() - 4, 12};
  OaoModel model;
  model.mode = static_cast<FeatureMode>(r.u32());

  model.masks.iva_dim = r.u32();
  model.masks.hog_dim = r.u32();
  model.masks.iva.resize(r.u32());
  for (auto& v : model.masks.iva) v = r.u32();
  model.masks.hog.resize(r.u32());
  for (auto& v : model.masks.hog) v = r.u32();

  model.hog.orientations = static_cast<int>(r.u32());
  model.hog.cell_size = static_cast<int>(r.u32());
  model.hog.block_cells = static_cast<int>(r.u32());
  model.hog.clip = r.f64();
  model.hog.upscale_levels = static_cast<int>(r.u32());

  model.alignment.width = static_cast<int>(r.u32());
  model.alignment.height = static_cast<int>(r.u32());
  model.alignment.left_eye.x = r.f64();
  model.alignment.left_eye.y = r.f64();
  model.alignment.right_eye.x = r.f64();
  model.alignment.right_eye.y = r.f64();

  model.svm.kernel = static_cast<Kernel>(r.u32());
  model.svm.gamma = r.f64();
  model.svm.c = r.f64();
  model.svm.tolerance = r.f64();
  model.svm.max_passes = r.u64();

  model.selection.estimators = static_cast<int>(r.u32());
  model.selection.top_k = static_cast<int>(r.u32());
  model.selection.threshold_candidates = static_cast<int>(r.u32());
  model.selection.seed = r.u64();

  model.standardizer = get_standardizer(r);

  model.machines.resize(r.u32());
  for (auto& m : model.machines) m = get_machine(r);
  return model;
}

}  // namespace sention
