#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sention/core.hpp"
#include "sention/image_io.hpp"
#include "sention/manifest.hpp"
#include "sention/model_io.hpp"
#include "sention/oao.hpp"
#include "sention/parallel.hpp"

namespace sention {

// ---------------------------------------------------------------------------
// Stratified k-fold assignment.
// ---------------------------------------------------------------------------

struct FoldAssignment {
  std::vector<int> fold;  // per-sample fold index in [0, k)
  int k = 0;
  std::uint64_t seed = 0;
};

/// Stratified fold assignment: within each class the (seeded mt19937_64)
/// shuffled samples are dealt round-robin, with a rotating start so overall
/// fold sizes stay balanced. Per-class counts across folds differ by at most
/// one.
inline FoldAssignment stratified_kfold(std::span<const int> labels, int k, std::uint64_t seed) {
  if (k < 2) throw Error("fold count must be >= 2");
  if (static_cast<std::size_t>(k) > labels.size()) throw TooFewSamples("more folds than samples");

  FoldAssignment fa;
  fa.fold.assign(labels.size(), 0);
  fa.k = k;
  fa.seed = seed;

  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

  std::mt19937_64 rng(seed);
  std::size_t rotation = 0;
  for (auto& [cls, idx] : by_class) {
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t i = 0; i < idx.size(); ++i)
      fa.fold[idx[i]] = static_cast<int>((i + rotation) % k);
    rotation += idx.size();
  }
  return fa;
}

/// Subject-disjoint folds: whole subjects are dealt to folds largest-first,
/// each landing on the currently smallest fold. Samples without a subject tag
/// are treated as singleton subjects.
inline FoldAssignment kfold_by_subject(std::span<const std::string> subjects, int k,
                                       std::uint64_t seed) {
  if (k < 2) throw Error("fold count must be >= 2");
  if (static_cast<std::size_t>(k) > subjects.size()) throw TooFewSamples("more folds than samples");

  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    const std::string key = subjects[i].empty() ? "\x01singleton:" + std::to_string(i) : subjects[i];
    groups[key].push_back(i);
  }
  std::vector<std::vector<std::size_t>> order;
  order.reserve(groups.size());
  for (auto& [key, idx] : groups) order.push_back(idx);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });

  FoldAssignment fa;
  fa.fold.assign(subjects.size(), 0);
  fa.k = k;
  fa.seed = seed;
  std::vector<std::size_t> load(k, 0);
  for (const auto& grp : order) {
    const int dst = static_cast<int>(std::min_element(load.begin(), load.end()) - load.begin());
    for (std::size_t i : grp) fa.fold[i] = dst;
    load[dst] += grp.size();
  }
  return fa;
}

// ---------------------------------------------------------------------------
// Confusion matrix and metrics.
// ---------------------------------------------------------------------------

struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kClassCount>, kClassCount> counts{};  // [true][predicted]

  void add(Expression truth, Expression predicted) {
    counts[static_cast<int>(truth)][static_cast<int>(predicted)] += 1;
  }
  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (const auto& row : counts)
      for (std::uint64_t v : row) t += v;
    return t;
  }
};

struct MetricsReport {
  double accuracy = 0.0;
  std::array<double, kClassCount> precision{};
  std::array<double, kClassCount> recall{};
  std::array<double, kClassCount> f1{};
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::vector<double> fold_accuracy;
  double fps = 0.0;  // extract+predict throughput, excluded from report files by default
  std::uint64_t samples = 0;
};

/// Standard per-class precision/recall/F1 with zero-division guarded to 0,
/// macro averages unweighted.
inline MetricsReport metrics(const ConfusionMatrix& cm) {
  const std::uint64_t total = cm.total();
  if (total == 0) throw EmptyMatrix();

  MetricsReport r;
  r.samples = total;
  std::uint64_t diag = 0;
  for (std::size_t c = 0; c < kClassCount; ++c) {
    std::uint64_t col = 0, row = 0;
    for (std::size_t t = 0; t < kClassCount; ++t) {
      col += cm.counts[t][c];
      row += cm.counts[c][t];
    }
    const std::uint64_t tp = cm.counts[c][c];
    diag += tp;
    r.precision[c] = col ? static_cast<double>(tp) / col : 0.0;
    r.recall[c] = row ? static_cast<double>(tp) / row : 0.0;
    r.f1[c] = (r.precision[c] + r.recall[c]) > 0.0
                  ? 2.0 * r.precision[c] * r.recall[c] / (r.precision[c] + r.recall[c])
                  : 0.0;
    r.macro_precision += r.precision[c];
    r.macro_recall += r.recall[c];
    r.macro_f1 += r.f1[c];
  }
  r.accuracy = static_cast<double>(diag) / total;
  r.macro_precision /= kClassCount;
  r.macro_recall /= kClassCount;
  r.macro_f1 /= kClassCount;
  return r;
}

// ---------------------------------------------------------------------------
// Cross-validation.
// ---------------------------------------------------------------------------

struct CvConfig {
  FeatureMode mode = FeatureMode::Hybrid;
  SelectionConfig selection;
  SvmParams svm;
  HogConfig hog;
  AlignmentConfig alignment;
  int folds = 10;
  std::uint64_t seed = 0;
  bool group_by_subject = false;
};

/// Everything fitted inside one training fold.
struct FoldModel {
  SelectedFeatures masks;
  Standardizer standardizer;
  std::vector<BinarySvm> machines;
};

/// Fits selection + standardizer + OAO machines on the given training rows
/// only; never reads any other row of `features`.
inline FoldModel fit_fold(const Matrix<float>& features, std::span<const int> labels,
                          std::span<const std::size_t> train_rows, const CvConfig& cfg,
                          const ModeDims& dims) {
  std::vector<int> train_labels;
  train_labels.reserve(train_rows.size());
  for (std::size_t r : train_rows) train_labels.push_back(labels[r]);

  FoldModel fm;
  fm.masks = select_features_oaa(features, train_labels, cfg.selection, dims.iva, dims.hog, train_rows);
  const Matrix<double> reduced = apply_mask_rows(features, train_rows, fm.masks);
  auto [standardizer, machines] = train_oao(reduced, train_labels, cfg.svm);
  fm.standardizer = std::move(standardizer);
  fm.machines = std::move(machines);
  return fm;
}

inline PredictResult predict_with_fold(const FoldModel& fm, std::span<const double> reduced) {
  OaoModel shim;  // prediction only touches masks/standardizer/machines
  shim.masks = fm.masks;
  shim.standardizer = fm.standardizer;
  shim.machines = fm.machines;
  return predict(shim, reduced);
}

struct CvResult {
  MetricsReport report;
  ConfusionMatrix confusion;
};

struct LoadedDataset {
  std::vector<LandmarkSet> landmarks;
  std::vector<GrayImage> images;  // empty unless the mode needs appearance
  std::vector<int> labels;
  std::vector<std::string> subjects;
};

inline LoadedDataset load_dataset(const DatasetManifest& manifest, bool need_images) {
  LoadedDataset ds;
  const std::size_t n = manifest.entries.size();
  ds.landmarks.resize(n);
  ds.labels.resize(n);
  ds.subjects.resize(n);
  if (need_images) ds.images.resize(n);
  parallel_for(n, [&](std::size_t i) {
    const ManifestEntry& e = manifest.entries[i];
    ds.landmarks[i] = load_landmarks(e.landmarks_path);
    if (need_images) ds.images[i] = load_image(e.image_path);
  });
  for (std::size_t i = 0; i < n; ++i) {
    ds.labels[i] = static_cast<int>(manifest.entries[i].label);
    ds.subjects[i] = manifest.entries[i].subject;
  }
  return ds;
}

/// Extracts the full feature matrix for one mode (float32 storage; the
/// masked SVM path is converted back to double downstream).
inline Matrix<float> extract_feature_matrix(const LoadedDataset& ds, FeatureMode mode,
                                            const HogConfig& hog, const AlignmentConfig& align,
                                            const ModeDims& dims) {
  Matrix<float> x(ds.landmarks.size(), dims.total());
  parallel_for(ds.landmarks.size(), [&](std::size_t i) {
    const GrayImage* img = ds.images.empty() ? nullptr : &ds.images[i];
    const std::vector<double> f = extract_features(mode, img, ds.landmarks[i], hog, align);
    float* dst = x.row(i);
    for (std::size_t j = 0; j < f.size(); ++j) dst[j] = static_cast<float>(f[j]);
  });
  return x;
}

/// Full k-fold cross-validation: per fold, selection + standardizer + OAO are
/// fitted on the training split only and evaluated on the held-out split;
/// the confusion matrix aggregates over all folds.
inline CvResult run_cv(const DatasetManifest& manifest, const CvConfig& cfg) {
  if (cfg.folds < 2) throw Error("fold count must be >= 2");
  const auto t_extract_start = std::chrono::steady_clock::now();

  const LoadedDataset ds = load_dataset(manifest, mode_needs_image(cfg.mode));
  const ModeDims dims = feature_dims(cfg.mode, cfg.hog, cfg.alignment);
  const Matrix<float> features = extract_feature_matrix(ds, cfg.mode, cfg.hog, cfg.alignment, dims);
  const double extract_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_extract_start).count();

  const FoldAssignment fa = cfg.group_by_subject
                                ? kfold_by_subject(ds.subjects, cfg.folds, cfg.seed)
                                : stratified_kfold(ds.labels, cfg.folds, cfg.seed);

  CvResult res;
  double predict_sec = 0.0;
  for (int fold = 0; fold < cfg.folds; ++fold) {
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < ds.labels.size(); ++i)
      (fa.fold[i] == fold ? test_rows : train_rows).push_back(i);
    if (test_rows.empty()) continue;

    CvConfig fold_cfg = cfg;
    fold_cfg.selection.seed = cfg.seed * 1000 + static_cast<std::uint64_t>(fold);
    const FoldModel fm = fit_fold(features, ds.labels, train_rows, fold_cfg, dims);

    const auto t_pred = std::chrono::steady_clock::now();
    std::uint64_t fold_correct = 0;
    for (std::size_t r : test_rows) {
      const std::vector<float> masked =
          apply_mask(std::span<const float>(features.row(r), features.cols), fm.masks);
      const std::vector<double> reduced(masked.begin(), masked.end());
      const PredictResult p = predict_with_fold(fm, reduced);
      res.confusion.add(static_cast<Expression>(ds.labels[r]), p.label);
      if (static_cast<int>(p.label) == ds.labels[r]) ++fold_correct;
    }
    predict_sec += std::chrono::duration<double>(std::chrono::steady_clock::now() - t_pred).count();
    res.report.fold_accuracy.push_back(static_cast<double>(fold_correct) / test_rows.size());
  }

  const MetricsReport m = metrics(res.confusion);
  const auto fold_acc = std::move(res.report.fold_accuracy);
  res.report = m;
  res.report.fold_accuracy = fold_acc;
  const double wall = extract_sec + predict_sec;
  res.report.fps = wall > 0.0 ? static_cast<double>(res.report.samples) / wall : 0.0;
  return res;
}

// ---------------------------------------------------------------------------
// Report emission.
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json report_to_json(const MetricsReport& r, const ConfusionMatrix& cm,
                                             bool include_timing = false) {
  nlohmann::ordered_json j;
  j["schema"] = "sention-report/1";
  j["samples"] = r.samples;
  j["accuracy"] = r.accuracy;
  nlohmann::ordered_json per_class;
  for (std::size_t c = 0; c < kClassCount; ++c) {
    per_class[expression_names()[c]] = {
        {"precision", r.precision[c]}, {"recall", r.recall[c]}, {"f1", r.f1[c]}};
  }
  j["per_class"] = per_class;
  j["macro"] = {{"precision", r.macro_precision}, {"recall", r.macro_recall}, {"f1", r.macro_f1}};
  j["fold_accuracy"] = r.fold_accuracy;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : cm.counts) rows.push_back(row);
  j["confusion"] = rows;
  if (include_timing) j["fps"] = r.fps;
  return j;
}

inline void emit_report_json(const MetricsReport& r, const ConfusionMatrix& cm,
                             const std::filesystem::path& path, bool include_timing = false) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << report_to_json(r, cm, include_timing).dump(2) << "\n";
  if (!out) throw IoError("short write: " + path.string());
}

inline void emit_confusion_csv(const ConfusionMatrix& cm, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "true\\predicted";
  for (std::size_t c = 0; c < kClassCount; ++c) out << "," << expression_names()[c];
  out << "\n";
  for (std::size_t t = 0; t < kClassCount; ++t) {
    out << expression_names()[t];
    for (std::size_t c = 0; c < kClassCount; ++c) out << "," << cm.counts[t][c];
    out << "\n";
  }
}

/// Row-normalized heatmap with numeric annotations; plain hand-written SVG.
inline void emit_confusion_svg(const ConfusionMatrix& cm, const std::filesystem::path& path) {
  constexpr int cell = 64, margin = 96;
  const int size = margin + cell * static_cast<int>(kClassCount) + 16;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
      << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  char buf[256];
  for (std::size_t t = 0; t < kClassCount; ++t) {
    std::uint64_t row_total = 0;
    for (std::uint64_t v : cm.counts[t]) row_total += v;
    for (std::size_t c = 0; c < kClassCount; ++c) {
      const double frac = row_total ? static_cast<double>(cm.counts[t][c]) / row_total : 0.0;
      const int blue = 255 - static_cast<int>(frac * 180.0);
      const int other = 255 - static_cast<int>(frac * 235.0);
      const int x = margin + static_cast<int>(c) * cell;
      const int y = margin + static_cast<int>(t) * cell;
      std::snprintf(buf, sizeof buf,
                    "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"rgb(%d,%d,%d)\" "
                    "stroke=\"gray\"/>\n",
                    x, y, cell, cell, other, other, blue);
      out << buf;
      std::snprintf(buf, sizeof buf,
                    "<text x=\"%d\" y=\"%d\" font-size=\"14\" text-anchor=\"middle\" "
                    "fill=\"%s\">%llu</text>\n",
                    x + cell / 2, y + cell / 2 + 5, frac > 0.55 ? "white" : "black",
                    static_cast<unsigned long long>(cm.counts[t][c]));
      out << buf;
    }
  }
  for (std::size_t c = 0; c < kClassCount; ++c) {
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%d\" font-size=\"13\" text-anchor=\"middle\">%s</text>\n",
                  margin + static_cast<int>(c) * cell + cell / 2, margin - 10,
                  expression_names()[c].c_str());
    out << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%d\" font-size=\"13\" text-anchor=\"end\">%s</text>\n",
                  margin - 8, margin + static_cast<int>(c) * cell + cell / 2 + 4,
                  expression_names()[c].c_str());
    out << buf;
  }
  out << "</svg>\n";
}

}  // namespace sention
