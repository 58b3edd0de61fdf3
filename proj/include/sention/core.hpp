#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sention {

inline constexpr std::size_t kLandmarkCount = 68;
inline constexpr std::size_t kClassCount = 6;

// ---------------------------------------------------------------------------
// Errors. One exception type per failure mode named in the operation
// contracts; all derive from Error so callers can catch the family.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissingFile : Error {
  explicit MissingFile(const std::string& path) : Error("missing file: " + path) {}
};

struct ParseError : Error {
  std::size_t line;
  ParseError(const std::string& what, std::size_t line_number)
      : Error("parse error at line " + std::to_string(line_number) + ": " + what), line(line_number) {}
};

struct UnknownLabel : Error {
  std::string label;
  explicit UnknownLabel(const std::string& text) : Error("unknown label: '" + text + "'"), label(text) {}
};

struct WrongCount : Error {
  std::size_t count;
  explicit WrongCount(std::size_t n)
      : Error("expected exactly 68 landmarks, got " + std::to_string(n)), count(n) {}
};

struct NonFiniteCoordinate : Error {
  explicit NonFiniteCoordinate(std::size_t line_number)
      : Error("non-finite coordinate at line " + std::to_string(line_number)) {}
};

struct DecodeError : Error {
  using Error::Error;
};

struct UnsupportedFormat : Error {
  using Error::Error;
};

struct DetectorFailed : Error {
  int exit_code;
  std::string stderr_excerpt;
  DetectorFailed(int code, const std::string& err)
      : Error("landmark detector failed (exit " + std::to_string(code) + "): " + err),
        exit_code(code),
        stderr_excerpt(err) {}
};

struct DegenerateEyes : Error {
  DegenerateEyes() : Error("eye centers coincide") {}
};

struct ImageTooSmall : Error {
  using Error::Error;
};

struct IndexOutOfRange : Error {
  using Error::Error;
};

struct NotStrictlyIncreasing : Error {
  using Error::Error;
};

struct SingleClassInput : Error {
  SingleClassInput() : Error("training data contains a single class") {}
};

struct MissingClass : Error {
  int class_index;
  MissingClass(int cls, const std::string& name)
      : Error("class missing from dataset: " + name), class_index(cls) {}
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct TooFewSamples : Error {
  using Error::Error;
};

struct VersionMismatch : Error {
  std::uint32_t found;
  explicit VersionMismatch(std::uint32_t v)
      : Error("unsupported model version " + std::to_string(v)), found(v) {}
};

struct CorruptModel : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

struct EmptyMatrix : Error {
  EmptyMatrix() : Error("confusion matrix has no entries") {}
};

// ---------------------------------------------------------------------------
// Expression labels, canonical encoding 0..5.
// ---------------------------------------------------------------------------

enum class Expression : int {
  Anger = 0,
  Disgust = 1,
  Fear = 2,
  Happy = 3,
  Sad = 4,
  Surprise = 5,
};

inline const std::array<std::string, kClassCount>& expression_names() {
  static const std::array<std::string, kClassCount> names = {"Anger",  "Disgust", "Fear",
                                                             "Happy",  "Sad",     "Surprise"};
  return names;
}

inline const std::string& to_string(Expression e) { return expression_names()[static_cast<int>(e)]; }

namespace detail {
inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::string to_lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}
}  // namespace detail

/// Parses a label, trimming whitespace and ignoring case. Throws UnknownLabel.
inline Expression parse_expression(const std::string& text) {
  const std::string needle = detail::to_lower(detail::trim(text));
  for (std::size_t i = 0; i < kClassCount; ++i) {
    if (needle == detail::to_lower(expression_names()[i])) return static_cast<Expression>(i);
  }
  throw UnknownLabel(text);
}

// ---------------------------------------------------------------------------
// Basic geometry / image value types.
// ---------------------------------------------------------------------------

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline bool finite(const Point2& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// 68 ordered 2D landmarks in image space, standard annotation order
/// (zero-based: eye corners at 36, 39, 42, 45).
struct LandmarkSet {
  std::array<Point2, kLandmarkCount> points{};

  Point2& operator[](std::size_t i) { return points[i]; }
  const Point2& operator[](std::size_t i) const { return points[i]; }
};

/// Row-major luminance image, pixels in [0, 1].
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<float> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, float fill = 0.0f)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  float at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  float& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

// ---------------------------------------------------------------------------
// Minimal dense row-major matrix used for sample x feature data.
// ---------------------------------------------------------------------------

template <typename T>
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, T fill = T{}) : rows(r), cols(c), data(r * c, fill) {}

  T* row(std::size_t r) { return data.data() + r * cols; }
  const T* row(std::size_t r) const { return data.data() + r * cols; }
  T& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  const T& at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

}  // namespace sention
