#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sention/core.hpp"

namespace sention {

struct ManifestEntry {
  std::string image_path;
  std::string landmarks_path;
  Expression label = Expression::Anger;
  std::string subject;  // optional 4th column, empty when absent
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
};

namespace detail {
inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

inline double parse_double(const std::string& s, std::size_t line_no) {
  const std::string t = trim(s);
  if (t.empty()) throw ParseError("empty numeric field", line_no);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) throw ParseError("bad number '" + t + "'", line_no);
  return v;
}
}  // namespace detail

/// Loads a dataset manifest: UTF-8 CSV with header `image,landmarks,label`
/// (optional trailing `subject` column), `#`-prefixed comment lines ignored,
/// row order preserved.
inline DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile(path.string());

  DatasetManifest manifest;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  bool has_subject = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = detail::trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    auto fields = detail::split_csv(line);
    if (!header_seen) {
      if (fields.size() < 3 || detail::trim(detail::to_lower(fields[0])) != "image" ||
          detail::trim(detail::to_lower(fields[1])) != "landmarks" ||
          detail::trim(detail::to_lower(fields[2])) != "label")
        throw ParseError("expected header 'image,landmarks,label'", line_no);
      has_subject = fields.size() >= 4 && detail::trim(detail::to_lower(fields[3])) == "subject";
      header_seen = true;
      continue;
    }
    if (fields.size() < 3) throw ParseError("expected at least 3 fields", line_no);
    ManifestEntry e;
    e.image_path = detail::trim(fields[0]);
    e.landmarks_path = detail::trim(fields[1]);
    if (e.image_path.empty() || e.landmarks_path.empty()) throw ParseError("empty path", line_no);
    e.label = parse_expression(fields[2]);
    if (has_subject && fields.size() >= 4) e.subject = detail::trim(fields[3]);
    manifest.entries.push_back(std::move(e));
  }
  if (!header_seen) throw ParseError("missing header", line_no == 0 ? 1 : line_no);
  return manifest;
}

/// Loads a 68-line headerless `x,y` CSV into a LandmarkSet.
inline LandmarkSet load_landmarks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile(path.string());

  std::vector<Point2> pts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_csv(line);
    if (fields.size() != 2) throw ParseError("expected 'x,y'", line_no);
    Point2 p{detail::parse_double(fields[0], line_no), detail::parse_double(fields[1], line_no)};
    if (!finite(p)) throw NonFiniteCoordinate(line_no);
    pts.push_back(p);
  }
  if (pts.size() != kLandmarkCount) throw WrongCount(pts.size());
  LandmarkSet lm;
  std::copy(pts.begin(), pts.end(), lm.points.begin());
  return lm;
}

/// Writes landmarks with 17 significant digits, so reloading round-trips
/// every coordinate exactly.
inline void save_landmarks(const LandmarkSet& lm, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  char buf[96];
  for (const Point2& p : lm.points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.x, p.y);
    out << buf;
  }
  if (!out) throw IoError("short write: " + path.string());
}

}  // namespace sention
