#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "sention/core.hpp"

namespace sention {

/// Felzenszwalb-style configuration: contrast-insensitive orientations over
/// [0, pi), square cells, 2x2-cell blocks with L2-Hys normalization.
struct HogConfig {
  int orientations = 9;
  int cell_size = 8;
  int block_cells = 2;       // cells per block side
  double clip = 0.2;         // L2-Hys truncation
  int upscale_levels = 1;    // Gaussian pyramid octaves applied before extraction

  void validate() const {
    if (orientations < 1) throw Error("orientations must be >= 1");
    if (cell_size < 1) throw Error("cell_size must be >= 1");
    if (block_cells < 1) throw Error("block_cells must be >= 1");
    if (!(clip > 0.0 && clip <= 1.0)) throw Error("clip must be in (0, 1]");
    if (upscale_levels < 0) throw Error("upscale_levels must be >= 0");
  }
};

using HogFeatureVector = std::vector<double>;

/// Descriptor length for an image of the given size (post-upscale size).
inline std::size_t hog_dimension(int width, int height, const HogConfig& cfg) {
  const int cells_x = width / cfg.cell_size;
  const int cells_y = height / cfg.cell_size;
  const int bx = cells_x - cfg.block_cells + 1;
  const int by = cells_y - cfg.block_cells + 1;
  if (bx < 1 || by < 1) return 0;
  return static_cast<std::size_t>(bx) * by * cfg.block_cells * cfg.block_cells * cfg.orientations;
}

namespace detail {
// reflect-101 indexing: ...2 1 | 0 1 2 ... n-1 | n-2 n-3...
inline int reflect101(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

// One pyramid octave along a single dimension: insert zeros at odd
// coordinates of the doubled signal, then convolve with (1,4,6,4,1)/16
// scaled x2 so the kernel has unit DC gain over the zero-inserted grid.
// Reflection is applied on the doubled grid.
inline void upscale_line(const double* src, std::size_t n, std::size_t stride, double* dst,
                         std::size_t dst_stride) {
  static constexpr double kTaps[5] = {1.0 / 8.0, 4.0 / 8.0, 6.0 / 8.0, 4.0 / 8.0, 1.0 / 8.0};
  const int up_n = static_cast<int>(2 * n);
  for (int o = 0; o < up_n; ++o) {
    double acc = 0.0;
    for (int k = -2; k <= 2; ++k) {
      const int p = reflect101(o + k, up_n);
      if (p % 2 != 0) continue;  // odd positions hold injected zeros
      acc += kTaps[k + 2] * src[static_cast<std::size_t>(p / 2) * stride];
    }
    dst[static_cast<std::size_t>(o) * dst_stride] = acc;
  }
}
}  // namespace detail

/// Gaussian-pyramid upscaling: each level doubles both dimensions using the
/// separable 5-tap binomial kernel on the zero-injected grid, reflect-padded.
/// levels == 0 returns the input unchanged.
inline GrayImage pyramid_upscale(const GrayImage& img, int levels) {
  if (levels < 0) throw Error("levels must be >= 0");
  GrayImage cur = img;
  for (int level = 0; level < levels; ++level) {
    const int w = cur.width, h = cur.height;
    // horizontal pass into w*2 x h, then vertical into w*2 x h*2
    std::vector<double> src(cur.pixels.begin(), cur.pixels.end());
    std::vector<double> mid(static_cast<std::size_t>(2 * w) * h);
    for (int y = 0; y < h; ++y)
      detail::upscale_line(src.data() + static_cast<std::size_t>(y) * w, w, 1,
                           mid.data() + static_cast<std::size_t>(y) * 2 * w, 1);
    std::vector<double> out(static_cast<std::size_t>(2 * w) * 2 * h);
    for (int x = 0; x < 2 * w; ++x)
      detail::upscale_line(mid.data() + x, h, static_cast<std::size_t>(2 * w), out.data() + x,
                           static_cast<std::size_t>(2 * w));
    GrayImage next(2 * w, 2 * h);
    for (std::size_t i = 0; i < out.size(); ++i) next.pixels[i] = static_cast<float>(out[i]);
    cur = std::move(next);
  }
  return cur;
}

/// HOG descriptor of a luminance image.
///
/// Pipeline: centered [-1,0,1] gradients with replicated borders; unsigned
/// orientation folded into [0, pi); per-pixel soft vote into the two adjacent
/// orientation bins (bin edges at i*pi/orientations, magnitude split linearly
/// between the bin under the angle and its upper neighbor, wrapping), hard
/// cell assignment; blocks of block_cells^2 cells normalized with L2-Hys
/// (divide by sqrt(|b|^2 + eps^2), clip at config.clip, renormalize by the
/// clipped norm + eps, eps = 1e-5); blocks flattened row-major.
inline HogFeatureVector hog_features(const GrayImage& img, const HogConfig& cfg = {}) {
  cfg.validate();
  const int w = img.width, h = img.height;
  if (w < 2 * cfg.cell_size || h < 2 * cfg.cell_size) throw ImageTooSmall("image smaller than two cells");

  const int cells_x = w / cfg.cell_size;
  const int cells_y = h / cfg.cell_size;
  const int nbins = cfg.orientations;
  const double bin_width = std::numbers::pi / nbins;

  std::vector<double> hist(static_cast<std::size_t>(cells_x) * cells_y * nbins, 0.0);

  const int vote_w = cells_x * cfg.cell_size;  // pixels beyond the cell grid are ignored
  const int vote_h = cells_y * cfg.cell_size;
  for (int y = 0; y < vote_h; ++y) {
    const int ym = y > 0 ? y - 1 : 0;
    const int yp = y < h - 1 ? y + 1 : h - 1;
    for (int x = 0; x < vote_w; ++x) {
      const int xm = x > 0 ? x - 1 : 0;
      const int xp = x < w - 1 ? x + 1 : w - 1;
      const double gx = static_cast<double>(img.at(xp, y)) - img.at(xm, y);
      const double gy = static_cast<double>(img.at(x, yp)) - img.at(x, ym);
      const double mag = std::sqrt(gx * gx + gy * gy);
      if (mag == 0.0) continue;

      double theta = std::atan2(gy, gx);
      if (theta < 0.0) theta += std::numbers::pi;
      if (theta >= std::numbers::pi) theta = 0.0;

      const double t = theta / bin_width;
      int b0 = static_cast<int>(t);
      if (b0 >= nbins) b0 = nbins - 1;
      const double frac = t - b0;
      const int b1 = (b0 + 1) % nbins;

      double* cell = hist.data() +
                     (static_cast<std::size_t>(y / cfg.cell_size) * cells_x + (x / cfg.cell_size)) * nbins;
      cell[b0] += mag * (1.0 - frac);
      cell[b1] += mag * frac;
    }
  }

  const int bc = cfg.block_cells;
  const int blocks_x = cells_x - bc + 1;
  const int blocks_y = cells_y - bc + 1;
  if (blocks_x < 1 || blocks_y < 1) throw ImageTooSmall("image smaller than one block");

  constexpr double kEps = 1e-5;
  const std::size_t block_len = static_cast<std::size_t>(bc) * bc * nbins;
  HogFeatureVector out;
  out.reserve(static_cast<std::size_t>(blocks_x) * blocks_y * block_len);
  std::vector<double> block(block_len);

  for (int by = 0; by < blocks_y; ++by) {
    for (int bx = 0; bx < blocks_x; ++bx) {
      std::size_t k = 0;
      double sq = 0.0;
      for (int cy = 0; cy < bc; ++cy) {
        for (int cx = 0; cx < bc; ++cx) {
          const double* cell =
              hist.data() + (static_cast<std::size_t>(by + cy) * cells_x + (bx + cx)) * nbins;
          for (int o = 0; o < nbins; ++o, ++k) {
            block[k] = cell[o];
            sq += cell[o] * cell[o];
          }
        }
      }
      const double inv = 1.0 / std::sqrt(sq + kEps * kEps);
      double clipped_sq = 0.0;
      for (double& v : block) {
        v = std::min(v * inv, cfg.clip);
        clipped_sq += v * v;
      }
      const double renorm = 1.0 / (std::sqrt(clipped_sq) + kEps);
      for (double v : block) out.push_back(v * renorm);
    }
  }
  return out;
}

}  // namespace sention
