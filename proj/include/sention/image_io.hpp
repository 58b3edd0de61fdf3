#pragma once

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <csetjmp>
#include <jpeglib.h>
#include <png.h>

#include "sention/core.hpp"

namespace sention {

namespace detail {

inline constexpr double kLumaR = 0.299, kLumaG = 0.587, kLumaB = 0.114;  // ITU-R BT.601

inline GrayImage from_rgb8(const std::vector<unsigned char>& rgb, int w, int h, int channels) {
  GrayImage img(w, h);
  for (std::size_t i = 0; i < static_cast<std::size_t>(w) * h; ++i) {
    double y;
    if (channels == 1) {
      y = rgb[i];
    } else {
      const unsigned char* px = rgb.data() + i * channels;
      y = kLumaR * px[0] + kLumaG * px[1] + kLumaB * px[2];
    }
    img.pixels[i] = static_cast<float>(y / 255.0);
  }
  return img;
}

// --- PGM (P2/P5) ------------------------------------------------------------

inline int pgm_next_int(std::istream& in) {
  // skips whitespace and '#' comment lines
  while (true) {
    int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int v;
  if (!(in >> v)) throw DecodeError("malformed PGM header");
  return v;
}

inline GrayImage load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile(path.string());
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  const bool binary = (m1 == '5');
  if (m0 != 'P' || (m1 != '5' && m1 != '2')) throw DecodeError("not a PGM file");
  const int w = pgm_next_int(in);
  const int h = pgm_next_int(in);
  const int maxval = pgm_next_int(in);
  if (w < 1 || h < 1 || maxval < 1 || maxval > 65535) throw DecodeError("bad PGM dimensions");
  GrayImage img(w, h);
  const std::size_t n = static_cast<std::size_t>(w) * h;
  if (binary) {
    in.get();  // single whitespace after maxval
    if (maxval < 256) {
      std::vector<unsigned char> buf(n);
      in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n));
      if (static_cast<std::size_t>(in.gcount()) != n) throw DecodeError("truncated PGM");
      for (std::size_t i = 0; i < n; ++i)
        img.pixels[i] = std::min(static_cast<float>(buf[i] / double(maxval)), 1.0f);
    } else {
      std::vector<unsigned char> buf(n * 2);
      in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n * 2));
      if (static_cast<std::size_t>(in.gcount()) != n * 2) throw DecodeError("truncated PGM");
      for (std::size_t i = 0; i < n; ++i) {
        const int v = buf[2 * i] << 8 | buf[2 * i + 1];  // big-endian per format
        img.pixels[i] = std::min(static_cast<float>(v / double(maxval)), 1.0f);
      }
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      int v;
      if (!(in >> v)) throw DecodeError("truncated PGM");
      img.pixels[i] = std::clamp(static_cast<float>(v / double(maxval)), 0.0f, 1.0f);
    }
  }
  return img;
}

// --- PNG ---------------------------------------------------------------------

struct PngReadCtx {
  std::FILE* fp = nullptr;
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReadCtx() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    if (fp) std::fclose(fp);
  }
};

inline GrayImage load_png(const std::filesystem::path& path) {
  PngReadCtx ctx;
  ctx.fp = std::fopen(path.string().c_str(), "rb");
  if (!ctx.fp) throw MissingFile(path.string());
  ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!ctx.png) throw DecodeError("libpng init failed");
  ctx.info = png_create_info_struct(ctx.png);
  if (!ctx.info) throw DecodeError("libpng init failed");
  if (setjmp(png_jmpbuf(ctx.png))) throw DecodeError("corrupt PNG: " + path.string());

  png_init_io(ctx.png, ctx.fp);
  png_read_info(ctx.png, ctx.info);
  png_set_strip_16(ctx.png);
  png_set_palette_to_rgb(ctx.png);
  png_set_expand_gray_1_2_4_to_8(ctx.png);
  png_set_strip_alpha(ctx.png);
  png_read_update_info(ctx.png, ctx.info);

  const int w = static_cast<int>(png_get_image_width(ctx.png, ctx.info));
  const int h = static_cast<int>(png_get_image_height(ctx.png, ctx.info));
  const int channels = png_get_channels(ctx.png, ctx.info);
  if (channels != 1 && channels != 3) throw DecodeError("unexpected PNG channel count");

  std::vector<unsigned char> data(static_cast<std::size_t>(w) * h * channels);
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y) rows[y] = data.data() + static_cast<std::size_t>(y) * w * channels;
  png_read_image(ctx.png, rows.data());
  png_read_end(ctx.png, nullptr);
  return from_rgb8(data, w, h, channels);
}

// --- JPEG ---------------------------------------------------------------------

struct JpegErrorMgr {
  jpeg_error_mgr pub;
  std::jmp_buf jmp;
};

inline void jpeg_error_exit(j_common_ptr cinfo) {
  auto* mgr = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
  longjmp(mgr->jmp, 1);
}

inline GrayImage load_jpeg(const std::filesystem::path& path) {
  std::FILE* fp = std::fopen(path.string().c_str(), "rb");
  if (!fp) throw MissingFile(path.string());
  jpeg_decompress_struct cinfo;
  JpegErrorMgr jerr;
  cinfo.err = jpeg_std_error(&jerr.pub);
  jerr.pub.error_exit = jpeg_error_exit;
  if (setjmp(jerr.jmp)) {
    jpeg_destroy_decompress(&cinfo);
    std::fclose(fp);
    throw DecodeError("corrupt JPEG: " + path.string());
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, fp);
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  const int w = static_cast<int>(cinfo.output_width);
  const int h = static_cast<int>(cinfo.output_height);
  std::vector<unsigned char> data(static_cast<std::size_t>(w) * h * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    unsigned char* row = data.data() + static_cast<std::size_t>(cinfo.output_scanline) * w * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  std::fclose(fp);
  return from_rgb8(data, w, h, 3);
}

}  // namespace detail

/// Decodes a PNG, JPEG, or PGM file (dispatch on magic bytes) to luminance in
/// [0,1] using BT.601 weights for color inputs.
inline GrayImage load_image(const std::filesystem::path& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw MissingFile(path.string());
  unsigned char magic[8] = {};
  probe.read(reinterpret_cast<char*>(magic), 8);
  probe.close();

  static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  if (std::memcmp(magic, png_sig, 8) == 0) return detail::load_png(path);
  if (magic[0] == 0xFF && magic[1] == 0xD8) return detail::load_jpeg(path);
  if (magic[0] == 'P' && (magic[1] == '5' || magic[1] == '2')) return detail::load_pgm(path);
  throw UnsupportedFormat("unrecognized image format: " + path.string());
}

/// 8-bit binary PGM writer, used for aligned-face dumps and synthetic data.
inline void save_pgm(const GrayImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  std::vector<unsigned char> buf(img.pixels.size());
  for (std::size_t i = 0; i < buf.size(); ++i) {
    const float v = img.pixels[i];
    const int q = static_cast<int>(std::lround(std::min(std::max(v, 0.0f), 1.0f) * 255.0f));
    buf[i] = static_cast<unsigned char>(q);
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("short write: " + path.string());
}

}  // namespace sention
