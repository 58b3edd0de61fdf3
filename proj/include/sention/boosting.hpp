#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "sention/core.hpp"
#include "sention/parallel.hpp"

namespace sention {

inline constexpr double kLeafSmoothing = 1e-6;  // Laplace alpha on leaf probabilities

struct SelectionConfig {
  int estimators = 100;           // T
  int top_k = 0;                  // 0 = estimators
  int threshold_candidates = 256;
  std::uint64_t seed = 0;

  int effective_top_k() const { return top_k > 0 ? top_k : estimators; }
};

/// Depth-1 tree: split on one feature at one threshold, Laplace-smoothed
/// weighted class frequencies on each side.
struct Stump {
  std::size_t feature = 0;
  double threshold = 0.0;
  double left_prob_neg = 0.5, left_prob_pos = 0.5;    // x[feature] <= threshold
  double right_prob_neg = 0.5, right_prob_pos = 0.5;  // x[feature] >  threshold
  double impurity_decrease = 0.0;                     // weighted, at training time

  // SAMME.R half-log-odds response.
  double h_left() const { return 0.5 * (std::log(left_prob_pos) - std::log(left_prob_neg)); }
  double h_right() const { return 0.5 * (std::log(right_prob_pos) - std::log(right_prob_neg)); }

  template <typename T>
  double response(const T* x) const {
    return x[feature] <= threshold ? h_left() : h_right();
  }
  template <typename T>
  int hard_class(const T* x) const {
    const bool left = x[feature] <= threshold;
    const double pos = left ? left_prob_pos : right_prob_pos;
    const double neg = left ? left_prob_neg : right_prob_neg;
    return pos > neg ? +1 : -1;
  }
};

struct BoostedEnsemble {
  std::vector<Stump> stumps;
  std::vector<double> feature_score;  // accumulated weighted impurity decrease per feature

  template <typename T>
  double decision_value(const T* x) const {
    double sum = 0.0;
    for (const Stump& s : stumps) sum += s.response(x);
    return sum;
  }
  template <typename T>
  int predict(const T* x) const {
    return decision_value(x) > 0.0 ? +1 : -1;
  }
};

/// Observer invoked after each boosting round with the renormalized weights.
using RoundObserver = std::function<void(int round, const Stump&, std::span<const double> weights)>;

namespace detail {

// Quantile-binned view of a feature matrix for fast repeated stump searches.
// Each feature's samples are bucketed by distinct value when the distinct
// count fits the candidate cap, else by cap-quantile cuts; boosting rounds
// then scan uint8 bin ids against weight histograms. Bins depend only on the
// data, so one binning serves every sub-problem and round.
struct BinnedColumns {
  std::size_t n_samples = 0;
  std::size_t n_features = 0;
  int max_bins = 0;
  std::vector<std::uint8_t> bin;      // feature-major: bin[f * n_samples + i]
  std::vector<std::uint16_t> n_bins;  // used bins per feature

  BinnedColumns(const Matrix<float>& x, std::span<const std::size_t> rows, int candidates_cap) {
    n_samples = rows.size();
    n_features = x.cols;
    max_bins = std::clamp(candidates_cap, 1, 255) + 1;
    bin.resize(n_features * n_samples);
    n_bins.resize(n_features);

    parallel_chunks(n_features, [&](std::size_t, std::size_t fb, std::size_t fe) {
      std::vector<float> vals(n_samples);
      std::vector<float> edges;
      for (std::size_t f = fb; f < fe; ++f) {
        for (std::size_t i = 0; i < n_samples; ++i) vals[i] = x.at(rows[i], f);
        std::vector<float> sorted = vals;
        std::sort(sorted.begin(), sorted.end());

        std::size_t distinct = 1;
        for (std::size_t i = 1; i < sorted.size(); ++i)
          if (sorted[i] != sorted[i - 1]) ++distinct;

        edges.clear();  // upper-inclusive bin boundaries
        if (distinct <= static_cast<std::size_t>(max_bins)) {
          for (std::size_t i = 1; i < sorted.size(); ++i)
            if (sorted[i] != sorted[i - 1]) edges.push_back(sorted[i - 1]);
        } else {
          for (int b = 1; b < max_bins; ++b) {
            const float v = sorted[sorted.size() * b / max_bins];
            if (edges.empty() || v > edges.back()) edges.push_back(v);
          }
          if (!edges.empty() && edges.back() >= sorted.back()) edges.pop_back();
        }
        n_bins[f] = static_cast<std::uint16_t>(edges.size() + 1);
        std::uint8_t* dst = bin.data() + f * n_samples;
        for (std::size_t i = 0; i < n_samples; ++i) {
          const auto it = std::lower_bound(edges.begin(), edges.end(), vals[i]);
          dst[i] = static_cast<std::uint8_t>(it - edges.begin());
        }
      }
    });
  }

  // Midpoint threshold for "bin <= split_bin" on feature f, recovered from
  // the raw values rather than stored per bin.
  double threshold_for(const Matrix<float>& x, std::span<const std::size_t> rows, std::size_t f,
                       int split_bin) const {
    const std::uint8_t* b = bin.data() + f * n_samples;
    float lo_max = -std::numeric_limits<float>::infinity();
    float hi_min = std::numeric_limits<float>::infinity();
    for (std::size_t i = 0; i < n_samples; ++i) {
      const float v = x.at(rows[i], f);
      if (b[i] <= split_bin)
        lo_max = std::max(lo_max, v);
      else
        hi_min = std::min(hi_min, v);
    }
    return (static_cast<double>(lo_max) + static_cast<double>(hi_min)) / 2.0;
  }
};

struct SplitChoice {
  double score = std::numeric_limits<double>::infinity();  // weighted Gini after split
  std::size_t feature = 0;
  int split_bin = -1;
  double left_pos = 0, left_neg = 0, right_pos = 0, right_neg = 0;
};

// Best stump over the binned data for the given weights. Deterministic for
// any thread count: chunks cover disjoint ascending feature ranges and the
// merge is a strict lexicographic (score, feature) minimum; within a feature
// the scan keeps the first (lowest-threshold) optimum.
inline SplitChoice best_split(const BinnedColumns& cols, std::span<const double> w,
                              std::span<const double> w_pos, double total_pos, double total_neg) {
  const std::size_t n = cols.n_samples;
  const int nt = std::max(1, effective_threads());
  std::vector<SplitChoice> per_chunk(nt);

  parallel_chunks(cols.n_features, [&](std::size_t chunk, std::size_t fb, std::size_t fe) {
    SplitChoice best;
    std::vector<double> hw(cols.max_bins), hp(cols.max_bins);
    for (std::size_t f = fb; f < fe; ++f) {
      const int nb = cols.n_bins[f];
      if (nb < 2) continue;
      std::fill(hw.begin(), hw.begin() + nb, 0.0);
      std::fill(hp.begin(), hp.begin() + nb, 0.0);
      const std::uint8_t* b = cols.bin.data() + f * n;
      for (std::size_t i = 0; i < n; ++i) {
        hw[b[i]] += w[i];
        hp[b[i]] += w_pos[i];
      }
      double lw = 0.0, lp = 0.0;
      for (int s = 0; s + 1 < nb; ++s) {
        lw += hw[s];
        lp += hp[s];
        const double ln = lw - lp;
        const double rp = total_pos - lp;
        const double rn = total_neg - ln;
        const double rw = rp + rn;
        if (lw <= 0.0 || rw <= 0.0) continue;
        // weighted Gini: sum over both sides of m - (m_pos^2 + m_neg^2)/m
        const double score = (lw - (lp * lp + ln * ln) / lw) + (rw - (rp * rp + rn * rn) / rw);
        if (score < best.score) best = {score, f, s, lp, ln, rp, rn};
      }
    }
    per_chunk[chunk] = best;
  });

  SplitChoice best;
  for (const auto& c : per_chunk) {
    if (c.split_bin < 0) continue;
    if (best.split_bin < 0 || c.score < best.score ||
        (c.score == best.score && c.feature < best.feature))
      best = c;
  }
  return best;
}

inline Stump stump_from_split(const BinnedColumns& cols, const Matrix<float>& x,
                              std::span<const std::size_t> rows, const SplitChoice& split,
                              double parent_gini) {
  Stump s;
  s.feature = split.feature;
  s.threshold = cols.threshold_for(x, rows, split.feature, split.split_bin);
  const double a = kLeafSmoothing;
  const double lw = split.left_pos + split.left_neg;
  const double rw = split.right_pos + split.right_neg;
  s.left_prob_pos = (split.left_pos + a) / (lw + 2 * a);
  s.left_prob_neg = (split.left_neg + a) / (lw + 2 * a);
  s.right_prob_pos = (split.right_pos + a) / (rw + 2 * a);
  s.right_prob_neg = (split.right_neg + a) / (rw + 2 * a);
  s.impurity_decrease = std::max(0.0, parent_gini - split.score);
  return s;
}

// SAMME.R over pre-binned data; y has one entry per binned row.
inline BoostedEnsemble run_boosting(const BinnedColumns& cols, const Matrix<float>& x,
                                    std::span<const std::size_t> rows, std::span<const int> y,
                                    const SelectionConfig& config, const RoundObserver& on_round = {}) {
  bool has_pos = false, has_neg = false;
  for (int v : y) (v > 0 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) throw SingleClassInput();

  BoostedEnsemble ensemble;
  ensemble.feature_score.assign(x.cols, 0.0);

  const std::size_t n = rows.size();
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<double> w_pos(n);

  for (int round = 0; round < config.estimators; ++round) {
    double total_pos = 0.0, total_neg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w_pos[i] = y[i] > 0 ? w[i] : 0.0;
      total_pos += w_pos[i];
      total_neg += y[i] > 0 ? 0.0 : w[i];
    }
    const double total = total_pos + total_neg;
    const double parent = total - (total_pos * total_pos + total_neg * total_neg) / total;

    const auto split = best_split(cols, w, w_pos, total_pos, total_neg);
    if (split.split_bin < 0) break;  // every feature constant
    const Stump stump = stump_from_split(cols, x, rows, split, parent);

    ensemble.stumps.push_back(stump);
    ensemble.feature_score[stump.feature] += stump.impurity_decrease;

    // responses via bin comparison (identical to value <= threshold)
    const std::uint8_t* b = cols.bin.data() + stump.feature * n;
    const double h_l = stump.h_left(), h_r = stump.h_right();
    const int left_class = stump.left_prob_pos > stump.left_prob_neg ? +1 : -1;
    const int right_class = stump.right_prob_pos > stump.right_prob_neg ? +1 : -1;

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool left = b[i] <= split.split_bin;
      if ((left ? left_class : right_class) != y[i]) err += w[i];
    }

    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double h = b[i] <= split.split_bin ? h_l : h_r;
      w[i] *= std::exp(-y[i] * h);
      sum += w[i];
    }
    for (std::size_t i = 0; i < n; ++i) w[i] /= sum;

    if (on_round) on_round(round, stump, std::span<const double>(w));
    if (err < 1e-10) break;
  }
  return ensemble;
}

inline std::vector<std::size_t> identity_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  return rows;
}

}  // namespace detail

/// Fits the Gini-optimal decision stump for weighted binary labels (+-1).
/// Ties break toward the lowest feature index, then the lowest threshold.
inline Stump train_stump(const Matrix<float>& x, std::span<const int> y, std::span<const double> w,
                         int threshold_candidates = 256) {
  if (x.rows != y.size() || x.rows != w.size()) throw DimensionMismatch("rows/labels/weights disagree");
  bool has_pos = false, has_neg = false;
  for (int v : y) (v > 0 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) throw SingleClassInput();

  const auto rows = detail::identity_rows(x.rows);
  detail::BinnedColumns cols(x, rows, threshold_candidates);

  std::vector<double> w_pos(x.rows);
  double total_pos = 0.0, total_neg = 0.0, total = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    w_pos[i] = y[i] > 0 ? w[i] : 0.0;
    total_pos += w_pos[i];
    total_neg += y[i] > 0 ? 0.0 : w[i];
    total += w[i];
  }
  const double parent = total - (total_pos * total_pos + total_neg * total_neg) / total;

  const auto split = detail::best_split(cols, w, w_pos, total_pos, total_neg);
  if (split.split_bin < 0) {
    Stump s;  // every feature constant: all samples fall on the right side
    s.threshold = -std::numeric_limits<double>::infinity();
    const double a = kLeafSmoothing;
    s.right_prob_pos = (total_pos + a) / (total + 2 * a);
    s.right_prob_neg = (total_neg + a) / (total + 2 * a);
    return s;
  }
  return detail::stump_from_split(cols, x, rows, split, parent);
}

/// Binary SAMME.R: each round fits a stump on the current weights, adds its
/// half-log-odds response h = (log p_pos - log p_neg)/2, and reweights
/// w_i *= exp(-y_i h(x_i)) with renormalization. Stops early when a stump's
/// weighted training error drops below 1e-10. Per-feature scores accumulate
/// each stump's weighted impurity decrease at its round.
inline BoostedEnsemble boost_samme_r(const Matrix<float>& x, std::span<const int> y,
                                     const SelectionConfig& config, const RoundObserver& on_round = {}) {
  if (x.rows != y.size()) throw DimensionMismatch("rows/labels disagree");
  const auto rows = detail::identity_rows(x.rows);
  detail::BinnedColumns cols(x, rows, config.threshold_candidates);
  return detail::run_boosting(cols, x, rows, y, config, on_round);
}

}  // namespace sention
