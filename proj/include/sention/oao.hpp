#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "sention/alignment.hpp"
#include "sention/core.hpp"
#include "sention/hog.hpp"
#include "sention/parallel.hpp"
#include "sention/selection.hpp"
#include "sention/standardize.hpp"
#include "sention/svm.hpp"

namespace sention {

enum class FeatureMode : std::uint32_t { Iva = 0, Hog = 1, Hybrid = 2, VectorLengths = 3 };

inline const char* to_string(FeatureMode m) {
  switch (m) {
    case FeatureMode::Iva: return "iva";
    case FeatureMode::Hog: return "hog";
    case FeatureMode::Hybrid: return "hybrid";
    case FeatureMode::VectorLengths: return "vector_lengths";
  }
  return "?";
}

inline FeatureMode parse_feature_mode(const std::string& s) {
  if (s == "iva") return FeatureMode::Iva;
  if (s == "hog") return FeatureMode::Hog;
  if (s == "hybrid") return FeatureMode::Hybrid;
  if (s == "vector_lengths") return FeatureMode::VectorLengths;
  throw Error("unknown feature mode: " + s);
}

inline constexpr std::size_t kPairwiseMachines = kClassCount * (kClassCount - 1) / 2;  // C(6,2)

struct PredictResult {
  Expression label = Expression::Anger;
  std::array<int, kClassCount> votes{};
};

/// The deployable artifact: 15 pairwise machines over standardized,
/// mask-reduced features, plus everything needed to reproduce the features.
struct OaoModel {
  FeatureMode mode = FeatureMode::Hybrid;
  SelectedFeatures masks;
  Standardizer standardizer;
  HogConfig hog;
  AlignmentConfig alignment;
  SvmParams svm;
  SelectionConfig selection;
  std::vector<BinarySvm> machines;  // pairs (a,b), a < b, lexicographic
};

/// Trains the C(6,2) pairwise machines on already mask-reduced features.
/// The standardizer is fitted on the full reduced training matrix; each
/// machine sees only its two classes. Returns {standardizer, machines}.
inline std::pair<Standardizer, std::vector<BinarySvm>> train_oao(const Matrix<double>& reduced,
                                                                 std::span<const int> labels,
                                                                 const SvmParams& params) {
  if (reduced.rows != labels.size()) throw DimensionMismatch("rows/labels disagree");
  for (std::size_t c = 0; c < kClassCount; ++c) {
    bool present = false;
    for (int l : labels) present |= (l == static_cast<int>(c));
    if (!present) throw MissingClass(static_cast<int>(c), expression_names()[c]);
  }

  Standardizer std_ = fit_standardizer(reduced);
  Matrix<double> z = reduced;
  std_.transform_rows(z);

  struct Pair {
    int a, b;
  };
  std::vector<Pair> pairs;
  for (int a = 0; a < static_cast<int>(kClassCount); ++a)
    for (int b = a + 1; b < static_cast<int>(kClassCount); ++b) pairs.push_back({a, b});

  std::vector<BinarySvm> machines(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t p) {
    const auto [a, b] = pairs[p];
    std::vector<std::size_t> rows;
    std::vector<int> y;
    for (std::size_t i = 0; i < z.rows; ++i) {
      if (labels[i] == a || labels[i] == b) {
        rows.push_back(i);
        y.push_back(labels[i] == a ? +1 : -1);
      }
    }
    Matrix<double> sub(rows.size(), z.cols);
    for (std::size_t r = 0; r < rows.size(); ++r)
      std::copy(z.row(rows[r]), z.row(rows[r]) + z.cols, sub.row(r));
    machines[p] = train_binary_svm(sub, y, params);
    machines[p].class_a = a;
    machines[p].class_b = b;
  });
  return {std::move(std_), std::move(machines)};
}

/// Majority vote over the 15 machines on a reduced (masked, unstandardized)
/// feature vector. Ties break toward the class with the largest summed
/// |decision value| over its machines, then the lowest class index.
inline PredictResult predict(const OaoModel& model, std::span<const double> reduced_features) {
  if (reduced_features.size() != model.masks.reduced_dim())
    throw DimensionMismatch("feature vector does not match the model's reduced dimension");

  const std::vector<double> z = model.standardizer.transform(reduced_features);

  PredictResult res;
  std::array<double, kClassCount> magnitude{};
  for (const BinarySvm& m : model.machines) {
    const double f = m.decision(z);
    const int winner = f > 0.0 ? m.class_a : m.class_b;
    res.votes[winner] += 1;
    magnitude[m.class_a] += std::abs(f);
    magnitude[m.class_b] += std::abs(f);
  }

  int best = 0;
  for (int c = 1; c < static_cast<int>(kClassCount); ++c) {
    if (res.votes[c] > res.votes[best] ||
        (res.votes[c] == res.votes[best] && magnitude[c] > magnitude[best]))
      best = c;
  }
  res.label = static_cast<Expression>(best);
  return res;
}

// ---------------------------------------------------------------------------
// Feature extraction for each mode.
// ---------------------------------------------------------------------------

struct ModeDims {
  std::uint32_t iva = 0;
  std::uint32_t hog = 0;
  std::size_t total() const { return static_cast<std::size_t>(iva) + hog; }
};

inline ModeDims feature_dims(FeatureMode mode, const HogConfig& hog, const AlignmentConfig& align) {
  const int up = 1 << hog.upscale_levels;
  const std::uint32_t hog_dim =
      static_cast<std::uint32_t>(hog_dimension(align.width * up, align.height * up, hog));
  switch (mode) {
    case FeatureMode::Iva: return {kIvaDimension, 0};
    case FeatureMode::Hog: return {0, hog_dim};
    case FeatureMode::Hybrid: return {kIvaDimension, hog_dim};
    case FeatureMode::VectorLengths: return {kPairCount, 0};
  }
  return {};
}

inline bool mode_needs_image(FeatureMode mode) {
  return mode == FeatureMode::Hog || mode == FeatureMode::Hybrid;
}

/// Appearance pipeline: align, pyramid-upscale, HOG.
inline HogFeatureVector extract_hog(const GrayImage& image, const LandmarkSet& lm,
                                    const HogConfig& hog, const AlignmentConfig& align) {
  const AlignedFace face = align_face(image, lm, align);
  const GrayImage scaled = pyramid_upscale(face.image, hog.upscale_levels);
  return hog_features(scaled, hog);
}

/// Full feature vector for a sample in the given mode ([iva | hog] layout).
/// `image` may be null for modes that ignore appearance.
inline std::vector<double> extract_features(FeatureMode mode, const GrayImage* image,
                                            const LandmarkSet& lm, const HogConfig& hog,
                                            const AlignmentConfig& align) {
  switch (mode) {
    case FeatureMode::Iva: return iva_features(lm);
    case FeatureMode::VectorLengths: return vector_length_features(lm);
    case FeatureMode::Hog:
      if (!image) throw Error("appearance mode requires an image");
      return extract_hog(*image, lm, hog, align);
    case FeatureMode::Hybrid: {
      if (!image) throw Error("appearance mode requires an image");
      std::vector<double> out = iva_features(lm);
      const HogFeatureVector h = extract_hog(*image, lm, hog, align);
      out.insert(out.end(), h.begin(), h.end());
      return out;
    }
  }
  throw Error("bad feature mode");
}

}  // namespace sention
