#pragma once

#include <cmath>
#include <utility>

#include "sention/core.hpp"
#include "sention/geometry.hpp"

namespace sention {

/// p -> scale * R(rotation) * p + (tx, ty)
struct SimilarityTransform {
  double scale = 1.0;
  double rotation = 0.0;
  double tx = 0.0;
  double ty = 0.0;

  Point2 apply(const Point2& p) const {
    const double c = std::cos(rotation), s = std::sin(rotation);
    return {scale * (c * p.x - s * p.y) + tx, scale * (s * p.x + c * p.y) + ty};
  }

  SimilarityTransform inverse() const {
    const double inv_s = 1.0 / scale;
    const double c = std::cos(-rotation), s = std::sin(-rotation);
    // q -> R(-phi) * (q - t) / scale
    return {inv_s, -rotation, -inv_s * (c * tx - s * ty), -inv_s * (s * tx + c * ty)};
  }
};

struct AlignmentConfig {
  int width = 192;
  int height = 192;
  Point2 left_eye{57.6, 67.2};    // 30% of width, 35% of height
  Point2 right_eye{134.4, 67.2};  // 70% of width, 35% of height
};

struct AlignedFace {
  GrayImage image;
  SimilarityTransform transform;
};

/// Eye centers as midpoints of the outer/inner eye-corner landmarks
/// (36,39 left; 42,45 right — zero-based).
inline std::pair<Point2, Point2> eye_centers(const LandmarkSet& lm) {
  const Point2 left{(lm[36].x + lm[39].x) / 2.0, (lm[36].y + lm[39].y) / 2.0};
  const Point2 right{(lm[42].x + lm[45].x) / 2.0, (lm[42].y + lm[45].y) / 2.0};
  if (std::hypot(right.x - left.x, right.y - left.y) < 1e-9) throw DegenerateEyes();
  return {left, right};
}

/// Closed-form two-point similarity: maps src_left -> dst_left and
/// src_right -> dst_right exactly.
inline SimilarityTransform similarity_from_pairs(const Point2& src_left, const Point2& src_right,
                                                 const Point2& dst_left, const Point2& dst_right) {
  const Vec2 src = displacement(src_left, src_right);
  const Vec2 dst = displacement(dst_left, dst_right);
  const double src_len = norm(src);
  if (src_len < 1e-12 || norm(dst) < 1e-12) throw DegenerateEyes();

  SimilarityTransform t;
  t.scale = norm(dst) / src_len;
  t.rotation = std::atan2(dst.dy, dst.dx) - std::atan2(src.dy, src.dx);
  const double c = std::cos(t.rotation), s = std::sin(t.rotation);
  t.tx = dst_left.x - t.scale * (c * src_left.x - s * src_left.y);
  t.ty = dst_left.y - t.scale * (s * src_left.x + c * src_left.y);
  return t;
}

inline LandmarkSet transform_landmarks(const LandmarkSet& lm, const SimilarityTransform& t) {
  LandmarkSet out;
  for (std::size_t i = 0; i < kLandmarkCount; ++i) out[i] = t.apply(lm[i]);
  return out;
}

namespace detail {
// Bilinear sample with zero fill for taps outside the image.
inline double sample_bilinear(const GrayImage& img, double x, double y) {
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0, fy = y - y0;
  double acc = 0.0;
  for (int dy = 0; dy <= 1; ++dy) {
    const int yy = y0 + dy;
    if (yy < 0 || yy >= img.height) continue;
    const double wy = dy ? fy : 1.0 - fy;
    for (int dx = 0; dx <= 1; ++dx) {
      const int xx = x0 + dx;
      if (xx < 0 || xx >= img.width) continue;
      const double wx = dx ? fx : 1.0 - fx;
      acc += wy * wx * img.at(xx, yy);
    }
  }
  return acc;
}
}  // namespace detail

/// Warps the face into the canonical frame: the similarity taking the
/// detected eye centers onto config's canonical eye points, inverse-mapped
/// with bilinear sampling and zero border fill.
inline AlignedFace align_face(const GrayImage& img, const LandmarkSet& lm,
                              const AlignmentConfig& config = {}) {
  const auto [src_left, src_right] = eye_centers(lm);
  const SimilarityTransform fwd =
      similarity_from_pairs(src_left, src_right, config.left_eye, config.right_eye);
  const SimilarityTransform inv = fwd.inverse();

  AlignedFace out;
  out.transform = fwd;
  out.image = GrayImage(config.width, config.height);
  for (int v = 0; v < config.height; ++v) {
    for (int u = 0; u < config.width; ++u) {
      const Point2 src = inv.apply({static_cast<double>(u), static_cast<double>(v)});
      out.image.at(u, v) = static_cast<float>(detail::sample_bilinear(img, src.x, src.y));
    }
  }
  return out;
}

}  // namespace sention
