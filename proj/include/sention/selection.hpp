#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sention/boosting.hpp"
#include "sention/core.hpp"

namespace sention {

/// Per-modality index masks produced by boosting, with the source dimensions
/// they index into. Indices are strictly increasing.
struct SelectedFeatures {
  std::vector<std::uint32_t> iva;
  std::vector<std::uint32_t> hog;
  std::uint32_t iva_dim = 0;
  std::uint32_t hog_dim = 0;

  std::size_t reduced_dim() const { return iva.size() + hog.size(); }
};

/// AdaBoost feature selection over the concatenated [iva | hog] columns:
/// one SAMME.R run per class against the rest, features ranked by accumulated
/// impurity decrease, top-k kept per sub-problem (k capped at the nonzero
/// scores), final mask = union over the six sub-problems split back into the
/// two index spaces.
inline SelectedFeatures select_features_oaa(const Matrix<float>& x, std::span<const int> labels,
                                            const SelectionConfig& config, std::uint32_t iva_dim,
                                            std::uint32_t hog_dim,
                                            std::span<const std::size_t> rows = {}) {
  if (static_cast<std::size_t>(iva_dim) + hog_dim != x.cols)
    throw DimensionMismatch("iva_dim + hog_dim must equal the feature count");

  std::vector<std::size_t> all_rows;
  if (rows.empty()) {
    all_rows = detail::identity_rows(x.rows);
    rows = all_rows;
  }
  if (labels.size() != rows.size()) throw DimensionMismatch("labels/rows disagree");

  for (std::size_t c = 0; c < kClassCount; ++c) {
    if (std::find(labels.begin(), labels.end(), static_cast<int>(c)) == labels.end())
      throw MissingClass(static_cast<int>(c), expression_names()[c]);
  }

  const detail::BinnedColumns cols(x, rows, config.threshold_candidates);

  std::vector<bool> chosen(x.cols, false);
  std::vector<int> y(rows.size());
  for (std::size_t c = 0; c < kClassCount; ++c) {
    for (std::size_t i = 0; i < rows.size(); ++i) y[i] = labels[i] == static_cast<int>(c) ? +1 : -1;
    const BoostedEnsemble ens = detail::run_boosting(cols, x, rows, y, config);

    std::vector<std::pair<double, std::size_t>> ranked;  // (-score, index) for stable ordering
    for (std::size_t f = 0; f < x.cols; ++f)
      if (ens.feature_score[f] > 0.0) ranked.emplace_back(-ens.feature_score[f], f);
    std::sort(ranked.begin(), ranked.end());

    const std::size_t k = std::min<std::size_t>(config.effective_top_k(), ranked.size());
    for (std::size_t i = 0; i < k; ++i) chosen[ranked[i].second] = true;
  }

  SelectedFeatures sel;
  sel.iva_dim = iva_dim;
  sel.hog_dim = hog_dim;
  for (std::size_t f = 0; f < x.cols; ++f) {
    if (!chosen[f]) continue;
    if (f < iva_dim)
      sel.iva.push_back(static_cast<std::uint32_t>(f));
    else
      sel.hog.push_back(static_cast<std::uint32_t>(f - iva_dim));
  }
  return sel;
}

/// Gathers the masked entries of a full [iva | hog] vector, IVA block first.
template <typename T>
std::vector<T> apply_mask(std::span<const T> full, const SelectedFeatures& mask) {
  if (full.size() != static_cast<std::size_t>(mask.iva_dim) + mask.hog_dim)
    throw DimensionMismatch("feature vector length does not match the mask dimensions");
  std::vector<T> out;
  out.reserve(mask.reduced_dim());
  for (std::uint32_t i : mask.iva) {
    if (i >= mask.iva_dim) throw DimensionMismatch("iva mask index out of range");
    out.push_back(full[i]);
  }
  for (std::uint32_t i : mask.hog) {
    if (i >= mask.hog_dim) throw DimensionMismatch("hog mask index out of range");
    out.push_back(full[static_cast<std::size_t>(mask.iva_dim) + i]);
  }
  return out;
}

template <typename T>
std::vector<T> apply_mask(const std::vector<T>& full, const SelectedFeatures& mask) {
  return apply_mask(std::span<const T>(full), mask);
}

/// Row-wise mask application producing a double matrix for the SVM stage.
inline Matrix<double> apply_mask_rows(const Matrix<float>& x, std::span<const std::size_t> rows,
                                      const SelectedFeatures& mask) {
  if (x.cols != static_cast<std::size_t>(mask.iva_dim) + mask.hog_dim)
    throw DimensionMismatch("matrix width does not match the mask dimensions");
  Matrix<double> out(rows.size(), mask.reduced_dim());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const float* src = x.row(rows[r]);
    double* dst = out.row(r);
    std::size_t k = 0;
    for (std::uint32_t i : mask.iva) dst[k++] = src[i];
    for (std::uint32_t i : mask.hog) dst[k++] = src[static_cast<std::size_t>(mask.iva_dim) + i];
  }
  return out;
}

inline nlohmann::ordered_json masks_to_json(const SelectedFeatures& sel, const SelectionConfig& config) {
  nlohmann::ordered_json j;
  j["iva"] = sel.iva;
  j["hog"] = sel.hog;
  j["config"] = {{"estimators", config.estimators},
                 {"top_k", config.effective_top_k()},
                 {"threshold_candidates", config.threshold_candidates},
                 {"iva_dim", sel.iva_dim},
                 {"hog_dim", sel.hog_dim}};
  j["seed"] = config.seed;
  return j;
}

inline SelectedFeatures masks_from_json(const nlohmann::json& j) {
  SelectedFeatures sel;
  sel.iva = j.at("iva").get<std::vector<std::uint32_t>>();
  sel.hog = j.at("hog").get<std::vector<std::uint32_t>>();
  sel.iva_dim = j.at("config").at("iva_dim").get<std::uint32_t>();
  sel.hog_dim = j.at("config").at("hog_dim").get<std::uint32_t>();
  return sel;
}

}  // namespace sention
