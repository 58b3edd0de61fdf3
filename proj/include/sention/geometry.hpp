#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "sention/core.hpp"

namespace sention {

inline constexpr std::size_t kTripleCount = 50116;        // C(68,3)
inline constexpr std::size_t kIvaDimension = 150348;      // 3 * C(68,3)
inline constexpr std::size_t kPairCount = 2278;           // C(68,2)
inline constexpr double kDegeneracyTol = 1e-9;
inline constexpr double kCoincidentTol = 1e-12;

struct Vec2 {
  double dx = 0.0;
  double dy = 0.0;
};

inline Vec2 displacement(const Point2& from, const Point2& to) { return {to.x - from.x, to.y - from.y}; }
inline double dot(const Vec2& a, const Vec2& b) { return a.dx * b.dx + a.dy * b.dy; }
inline double cross(const Vec2& a, const Vec2& b) { return a.dx * b.dy - a.dy * b.dx; }
inline double norm(const Vec2& a) { return std::hypot(a.dx, a.dy); }

/// True iff a, b, c are collinear up to a scale-free tolerance:
/// |cross(b-a, c-a)| <= tol * max(|b-a| * |c-a|, eps). The normalization by
/// the side-length product makes the predicate invariant under uniform
/// scaling of the points.
inline bool is_degenerate(const Point2& a, const Point2& b, const Point2& c, double tol = kDegeneracyTol) {
  const Vec2 ab = displacement(a, b);
  const Vec2 ac = displacement(a, c);
  const double denom = std::max(norm(ab) * norm(ac), std::numeric_limits<double>::min());
  return std::abs(cross(ab, ac)) <= tol * denom;
}

/// Triple-level gate used by iva_features: collinear within tolerance, or any
/// two of the three points coincident. Such triples contribute zero in all
/// three angle slots.
inline bool degenerate_triple(const Point2& a, const Point2& b, const Point2& c) {
  const Vec2 ab = displacement(a, b);
  const Vec2 ac = displacement(a, c);
  const Vec2 bc = displacement(b, c);
  if (norm(ab) < kCoincidentTol || norm(ac) < kCoincidentTol || norm(bc) < kCoincidentTol) return true;
  return is_degenerate(a, b, c);
}

/// Interior angle at `vertex` between the rays toward b and c, in [0, pi].
/// Evaluated as atan2(|cross|, dot), which keeps full precision where
/// acos(dot/(|v||w|)) loses digits near collinear configurations; the two
/// forms are the same real-valued function. Returns 0 for coincident points
/// (either ray shorter than 1e-12) or collinear triples.
inline double angle_at_vertex(const Point2& vertex, const Point2& b, const Point2& c) {
  const Vec2 v = displacement(vertex, b);
  const Vec2 w = displacement(vertex, c);
  if (norm(v) < kCoincidentTol || norm(w) < kCoincidentTol) return 0.0;
  if (is_degenerate(vertex, b, c)) return 0.0;
  return std::atan2(std::abs(cross(v, w)), dot(v, w));
}

namespace detail {
inline constexpr std::size_t choose2(std::size_t m) { return m * (m - 1) / 2; }
inline constexpr std::size_t choose3(std::size_t m) { return m < 3 ? 0 : m * (m - 1) * (m - 2) / 6; }
}  // namespace detail

/// Position of the strictly increasing triple (a,b,c) in lexicographic order
/// over all C(68,3) triples.
inline std::size_t triple_rank(std::size_t a, std::size_t b, std::size_t c) {
  using detail::choose2;
  using detail::choose3;
  constexpr std::size_t n = kLandmarkCount;
  if (c >= n) throw IndexOutOfRange("landmark index out of range");
  if (!(a < b && b < c)) throw NotStrictlyIncreasing("triple indices must satisfy a < b < c");
  return (choose3(n) - choose3(n - a)) + (choose2(n - 1 - a) - choose2(n - b)) + (c - b - 1);
}

/// Feature slot of the angle at `vertex` inside the canonical IVA layout:
/// 3 * rank(a,b,c) + {0,1,2} for vertex == a|b|c.
inline std::size_t triple_index(std::size_t a, std::size_t b, std::size_t c, std::size_t vertex) {
  const std::size_t rank = triple_rank(a, b, c);
  std::size_t offset;
  if (vertex == a)
    offset = 0;
  else if (vertex == b)
    offset = 1;
  else if (vertex == c)
    offset = 2;
  else
    throw IndexOutOfRange("vertex must be one of the triple indices");
  return 3 * rank + offset;
}

using IvaFeatureVector = std::vector<double>;

/// All 150348 inter-vector angles of a landmark set, canonical layout.
/// Degenerate triples (collinear or containing coincident points) are zero in
/// all three slots; every other triple carries its three interior angles.
inline IvaFeatureVector iva_features(const LandmarkSet& lm) {
  IvaFeatureVector out(kIvaDimension, 0.0);

  // Pairwise displacement cache: vectors and norms for every ordered pair.
  constexpr std::size_t n = kLandmarkCount;
  std::array<double, n * n> dx{}, dy{}, len{};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double ddx = lm[j].x - lm[i].x;
      const double ddy = lm[j].y - lm[i].y;
      dx[i * n + j] = ddx;
      dy[i * n + j] = ddy;
      const double l = std::hypot(ddx, ddy);
      len[i * n + j] = l;
      len[j * n + i] = l;
    }
  }

  std::size_t slot = 0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double abx = dx[a * n + b], aby = dy[a * n + b];
      const double lab = len[a * n + b];
      for (std::size_t c = b + 1; c < n; ++c, slot += 3) {
        const double acx = dx[a * n + c], acy = dy[a * n + c];
        const double bcx = dx[b * n + c], bcy = dy[b * n + c];
        const double lac = len[a * n + c];
        const double lbc = len[b * n + c];

        if (lab < kCoincidentTol || lac < kCoincidentTol || lbc < kCoincidentTol) continue;
        const double area2 = std::abs(abx * acy - aby * acx);
        if (area2 <= kDegeneracyTol * std::max(lab * lac, std::numeric_limits<double>::min())) continue;

        // Angles at a, b, c from the shared pair cache; cross magnitude is the
        // same doubled triangle area at every vertex.
        out[slot + 0] = std::atan2(area2, abx * acx + aby * acy);
        out[slot + 1] = std::atan2(area2, (-abx) * bcx + (-aby) * bcy);
        out[slot + 2] = std::atan2(area2, acx * bcx + acy * bcy);
      }
    }
  }
  return out;
}

/// Ablation baseline: the C(68,2) = 2278 pairwise landmark distances in
/// lexicographic pair order.
inline std::vector<double> vector_length_features(const LandmarkSet& lm) {
  std::vector<double> out;
  out.reserve(kPairCount);
  for (std::size_t i = 0; i < kLandmarkCount; ++i)
    for (std::size_t j = i + 1; j < kLandmarkCount; ++j)
      out.push_back(std::hypot(lm[j].x - lm[i].x, lm[j].y - lm[i].y));
  return out;
}

}  // namespace sention
