#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <vector>

#include "sention/alignment.hpp"
#include "sention/core.hpp"
#include "sention/image_io.hpp"
#include "sention/manifest.hpp"

namespace sention {

// Synthetic six-expression face generator. Each class is a distinct smooth
// deformation of one 68-landmark template; samples add Gaussian landmark
// jitter (sigma = jitter_fraction of the class's mean deformation magnitude)
// and a random similarity placement, and render as a smooth gradient "face"
// whose blob layout follows the landmarks, so both the geometric and the
// appearance channel carry the class signal.

struct SyntheticConfig {
  int image_size = 256;
  double jitter_fraction = 0.1;
  std::uint64_t seed = 0;
};

namespace detail {

// Template face in a nominal 100x100 box, iBUG-style ordering:
// jaw 0-16, brows 17-26, nose 27-35, eyes 36-47, mouth 48-67.
inline LandmarkSet base_face_template() {
  LandmarkSet lm;
  using std::numbers::pi;
  for (int i = 0; i <= 16; ++i) {  // jaw arc, left ear to right ear through the chin
    const double t = pi + pi * i / 16.0;
    lm[i] = {50.0 + 40.0 * std::cos(t), 50.0 - 45.0 * std::sin(t)};
  }
  for (int i = 0; i < 5; ++i) {  // brows
    const double t = i / 4.0;
    lm[17 + i] = {27.0 + 18.0 * t, 38.0 - 4.0 * std::sin(pi * t)};
    lm[22 + i] = {55.0 + 18.0 * t, 38.0 - 4.0 * std::sin(pi * t)};
  }
  for (int i = 0; i < 4; ++i) lm[27 + i] = {50.0, 44.0 + 5.5 * i};  // nose bridge
  for (int i = 0; i < 5; ++i) lm[31 + i] = {44.0 + 3.0 * i, 66.0 + (i == 2 ? 1.5 : 0.0)};
  const auto eye = [&](int base, double cx) {  // six points around each eye
    const double rx = 7.0, ry = 2.6;
    lm[base + 0] = {cx - rx, 47.0};
    lm[base + 1] = {cx - rx * 0.45, 47.0 - ry};
    lm[base + 2] = {cx + rx * 0.45, 47.0 - ry};
    lm[base + 3] = {cx + rx, 47.0};
    lm[base + 4] = {cx + rx * 0.45, 47.0 + ry};
    lm[base + 5] = {cx - rx * 0.45, 47.0 + ry};
  };
  eye(36, 35.0);
  eye(42, 65.0);
  for (int i = 0; i < 12; ++i) {  // outer lip ellipse
    const double t = 2.0 * pi * i / 12.0;
    lm[48 + i] = {50.0 - 13.0 * std::cos(t), 79.0 + 6.0 * std::sin(t)};
  }
  for (int i = 0; i < 8; ++i) {  // inner lip ellipse
    const double t = 2.0 * pi * i / 8.0;
    lm[60 + i] = {50.0 - 7.5 * std::cos(t), 79.0 + 2.6 * std::sin(t)};
  }
  return lm;
}

// Class-specific smooth displacement fields in template units.
inline LandmarkSet deformed_template(Expression cls) {
  LandmarkSet lm = base_face_template();
  const auto mouth_scale_y = [&](double f) {
    for (int i = 48; i < 68; ++i) lm[i].y = 79.0 + (lm[i].y - 79.0) * f;
  };
  const auto mouth_scale_x = [&](double f) {
    for (int i = 48; i < 68; ++i) lm[i].x = 50.0 + (lm[i].x - 50.0) * f;
  };
  const auto brows_dy = [&](double inner, double outer) {
    for (int i = 0; i < 5; ++i) {
      const double t_l = i / 4.0;  // 0 = outer tip of left brow, 1 = inner
      lm[17 + i].y += outer + (inner - outer) * t_l;
      lm[22 + i].y += inner + (outer - inner) * t_l;
    }
  };
  const auto eyes_open = [&](double f) {
    for (int base : {36, 42}) {
      for (int j : {1, 2}) lm[base + j].y = 47.0 + (lm[base + j].y - 47.0) * f;
      for (int j : {4, 5}) lm[base + j].y = 47.0 + (lm[base + j].y - 47.0) * f;
    }
  };
  switch (cls) {
    case Expression::Anger:
      brows_dy(+4.5, +1.0);
      mouth_scale_y(0.55);
      mouth_scale_x(0.85);
      break;
    case Expression::Disgust:
      brows_dy(+2.5, -0.5);
      for (int i = 31; i < 36; ++i) lm[i].y -= 3.5;  // nose wrinkle
      for (int i = 48; i < 55; ++i) lm[i].y -= 2.5;  // upper lip raised
      break;
    case Expression::Fear:
      brows_dy(-4.0, -3.0);
      eyes_open(1.7);
      mouth_scale_y(1.5);
      mouth_scale_x(0.8);
      break;
    case Expression::Happy:
      lm[48].x -= 4.5; lm[48].y -= 4.0;  // mouth corners out and up
      lm[54].x += 4.5; lm[54].y -= 4.0;
      mouth_scale_x(1.25);
      for (int i : {49, 53}) lm[i].y -= 2.0;
      for (int i : {59, 55}) lm[i].y -= 1.5;
      eyes_open(0.75);
      break;
    case Expression::Sad:
      lm[48].y += 4.0;
      lm[54].y += 4.0;
      brows_dy(-3.0, +1.5);  // inner brow raised
      mouth_scale_x(0.85);
      break;
    case Expression::Surprise:
      brows_dy(-6.0, -5.0);
      eyes_open(2.0);
      mouth_scale_y(2.4);
      mouth_scale_x(0.75);
      break;
  }
  return lm;
}

inline double deformation_magnitude(Expression cls) {
  const LandmarkSet base = base_face_template();
  const LandmarkSet def = deformed_template(cls);
  double sum = 0.0;
  for (std::size_t i = 0; i < kLandmarkCount; ++i)
    sum += std::hypot(def[i].x - base[i].x, def[i].y - base[i].y);
  return sum / kLandmarkCount;
}

}  // namespace detail

/// Smooth "face" rendering: gradient background, bright face disc, dark
/// Gaussian blobs at every landmark. Blob layout tracks the landmarks, so the
/// aligned appearance differs between classes.
inline GrayImage render_face(const LandmarkSet& lm, int size) {
  GrayImage img(size, size);
  // background ramp
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x)
      img.at(x, y) = static_cast<float>(0.30 + 0.15 * (x + y) / (2.0 * size));

  // face disc spanning the jaw extent, smooth edge
  double cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    cx += lm[i].x;
    cy += lm[i].y;
  }
  cx /= kLandmarkCount;
  cy /= kLandmarkCount;
  double radius = 0.0;
  for (std::size_t i = 0; i <= 16; ++i)
    radius = std::max(radius, std::hypot(lm[i].x - cx, lm[i].y - cy));
  radius *= 1.1;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double d = std::hypot(x - cx, y - cy);
      const double t = std::clamp((radius - d) / (0.15 * radius), 0.0, 1.0);
      img.at(x, y) = static_cast<float>(img.at(x, y) * (1.0 - t) + 0.82 * t);
    }
  }

  // dark blobs at landmarks, bounded support
  const double scale = radius / 55.0;  // template jaw radius is ~49
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    const double sigma = (i <= 16 ? 1.6 : 2.4) * scale;
    const double amp = i <= 16 ? 0.12 : 0.38;
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    const int x0 = std::max(0, static_cast<int>(lm[i].x) - r);
    const int x1 = std::min(size - 1, static_cast<int>(lm[i].x) + r);
    const int y0 = std::max(0, static_cast<int>(lm[i].y) - r);
    const int y1 = std::min(size - 1, static_cast<int>(lm[i].y) + r);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double d2 = (x - lm[i].x) * (x - lm[i].x) + (y - lm[i].y) * (y - lm[i].y);
        const double v = img.at(x, y) - amp * std::exp(-d2 / (2.0 * sigma * sigma));
        img.at(x, y) = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }
  return img;
}

struct SyntheticSample {
  LandmarkSet landmarks;
  GrayImage image;
  Expression label = Expression::Anger;
};

/// One jittered, randomly placed sample of the given class.
inline SyntheticSample generate_sample(Expression cls, std::mt19937_64& rng,
                                       const SyntheticConfig& cfg = {}) {
  LandmarkSet lm = detail::deformed_template(cls);
  const double sigma = cfg.jitter_fraction * detail::deformation_magnitude(cls);
  std::normal_distribution<double> jitter(0.0, sigma);
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    lm[i].x += jitter(rng);
    lm[i].y += jitter(rng);
  }

  std::uniform_real_distribution<double> scale_d(1.15, 1.65);
  std::uniform_real_distribution<double> rot_d(-0.22, 0.22);
  std::uniform_real_distribution<double> shift_d(-12.0, 12.0);
  SimilarityTransform t;
  t.scale = scale_d(rng) * cfg.image_size / 256.0;
  t.rotation = rot_d(rng);
  // rotate/scale about the template center, then place near the image center
  const Point2 centered = t.apply({50.0, 55.0});
  t.tx = cfg.image_size / 2.0 - centered.x + shift_d(rng);
  t.ty = cfg.image_size / 2.0 - centered.y + shift_d(rng);

  SyntheticSample s;
  s.label = cls;
  s.landmarks = transform_landmarks(lm, t);
  s.image = render_face(s.landmarks, cfg.image_size);
  return s;
}

/// Writes a full synthetic dataset (PGM images, landmark CSVs, manifest.csv)
/// and returns the manifest path. Samples rotate through the six classes.
inline std::filesystem::path write_synthetic_dataset(const std::filesystem::path& dir,
                                                     int samples_per_class,
                                                     const SyntheticConfig& cfg = {}) {
  std::filesystem::create_directories(dir);
  std::mt19937_64 rng(cfg.seed);
  const std::filesystem::path manifest_path = dir / "manifest.csv";
  std::ofstream manifest(manifest_path);
  if (!manifest) throw IoError("cannot write " + manifest_path.string());
  manifest << "image,landmarks,label\n";
  char name[64];
  int counter = 0;
  for (int s = 0; s < samples_per_class; ++s) {
    for (std::size_t c = 0; c < kClassCount; ++c, ++counter) {
      const SyntheticSample sample = generate_sample(static_cast<Expression>(c), rng, cfg);
      std::snprintf(name, sizeof name, "%04d", counter);
      const std::filesystem::path img = dir / (std::string(name) + ".pgm");
      const std::filesystem::path lmk = dir / (std::string(name) + ".csv");
      save_pgm(sample.image, img);
      save_landmarks(sample.landmarks, lmk);
      manifest << img.string() << "," << lmk.string() << "," << to_string(sample.label) << "\n";
    }
  }
  return manifest_path;
}

}  // namespace sention
