#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "sention/core.hpp"

namespace sention {

enum class Kernel : std::uint32_t { Linear = 0, Rbf = 1 };

struct SvmParams {
  Kernel kernel = Kernel::Linear;
  double gamma = 0.0;  // 0 = 1/dim, used by rbf only
  double c = 1.0;
  double tolerance = 1e-3;
  std::size_t max_passes = 200000;  // pair-update cap

  double effective_gamma(std::size_t dim) const {
    return gamma > 0.0 ? gamma : 1.0 / static_cast<double>(std::max<std::size_t>(dim, 1));
  }
};

namespace detail {
inline double kernel_eval(Kernel k, double gamma, std::span<const double> a, std::span<const double> b) {
  if (k == Kernel::Linear) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}
}  // namespace detail

/// Soft-margin binary SVM in dual form. Stores the support vectors with their
/// signed dual coefficients alpha_i * y_i; linear machines also carry the
/// explicit weight vector for O(dim) decisions.
struct BinarySvm {
  int class_a = 0;  // the +1 side
  int class_b = 1;  // the -1 side
  Kernel kernel = Kernel::Linear;
  double gamma = 0.0;
  double bias = 0.0;
  bool converged = true;
  Matrix<double> support_vectors;   // one row per SV
  std::vector<double> dual_coef;    // alpha_i * y_i per SV
  std::vector<double> linear_w;     // populated for linear kernels

  std::size_t dim() const { return support_vectors.cols; }

  double decision(std::span<const double> x) const {
    if (x.size() != dim()) throw DimensionMismatch("svm decision dimension mismatch");
    if (kernel == Kernel::Linear && !linear_w.empty()) {
      double s = bias;
      for (std::size_t i = 0; i < x.size(); ++i) s += linear_w[i] * x[i];
      return s;
    }
    return decision_kernel_form(x);
  }

  /// Reference path: f(x) = sum_i alpha_i y_i K(sv_i, x) + b.
  double decision_kernel_form(std::span<const double> x) const {
    if (x.size() != dim()) throw DimensionMismatch("svm decision dimension mismatch");
    double s = bias;
    for (std::size_t i = 0; i < support_vectors.rows; ++i)
      s += dual_coef[i] *
           detail::kernel_eval(kernel, gamma, std::span(support_vectors.row(i), dim()), x);
    return s;
  }

  void rebuild_linear_w() {
    if (kernel != Kernel::Linear) return;
    linear_w.assign(dim(), 0.0);
    for (std::size_t i = 0; i < support_vectors.rows; ++i) {
      const double* sv = support_vectors.row(i);
      for (std::size_t j = 0; j < dim(); ++j) linear_w[j] += dual_coef[i] * sv[j];
    }
  }
};

/// SMO with maximal-violating-pair working-set selection on the C-SVM dual.
/// Stops when the KKT gap m - M falls below params.tolerance, which bounds
/// every KKT violation by tolerance/2 with bias b = (m + M)/2. Deterministic:
/// ties in the pair selection go to the lowest index. If max_passes is
/// exhausted the best-so-far machine is returned with converged = false.
inline BinarySvm train_binary_svm(const Matrix<double>& x, std::span<const int> y,
                                  const SvmParams& params) {
  const std::size_t n = x.rows;
  if (n != y.size()) throw DimensionMismatch("rows/labels disagree");
  bool has_pos = false, has_neg = false;
  for (int v : y) (v > 0 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) throw SingleClassInput();

  const double c_penalty = params.c;
  const double gamma = params.effective_gamma(x.cols);

  // full Gram matrix; pair problems here are small
  Matrix<double> k(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = detail::kernel_eval(params.kernel, gamma, std::span(x.row(i), x.cols),
                                           std::span(x.row(j), x.cols));
      k.at(i, j) = v;
      k.at(j, i) = v;
    }
  }

  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // gradient of the dual objective
  bool converged = false;
  double m_up = 0.0, m_low = 0.0;

  for (std::size_t pass = 0; pass < params.max_passes; ++pass) {
    // i from I_up maximizing -y*grad, j from I_low minimizing it
    std::size_t i_up = n, j_low = n;
    m_up = -std::numeric_limits<double>::infinity();
    m_low = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double v = -y[i] * grad[i];
      const bool in_up = (y[i] > 0 && alpha[i] < c_penalty) || (y[i] < 0 && alpha[i] > 0);
      const bool in_low = (y[i] < 0 && alpha[i] < c_penalty) || (y[i] > 0 && alpha[i] > 0);
      if (in_up && v > m_up) {
        m_up = v;
        i_up = i;
      }
      if (in_low && v < m_low) {
        m_low = v;
        j_low = i;
      }
    }
    if (i_up == n || j_low == n || m_up - m_low <= params.tolerance) {
      converged = true;
      break;
    }

    const std::size_t i = i_up, j = j_low;
    const double eta = std::max(k.at(i, i) + k.at(j, j) - 2.0 * k.at(i, j), 1e-12);
    double delta = (m_up - m_low) / eta;

    // box the step: alpha_i moves by +y_i*delta, alpha_j by -y_j*delta
    delta = std::min(delta, y[i] > 0 ? c_penalty - alpha[i] : alpha[i]);
    delta = std::min(delta, y[j] > 0 ? alpha[j] : c_penalty - alpha[j]);
    if (delta <= 0.0) break;  // numerically stuck at the box boundary

    alpha[i] += y[i] * delta;
    alpha[j] -= y[j] * delta;
    const double di = y[i] * delta, dj = -y[j] * delta;
    for (std::size_t t = 0; t < n; ++t) grad[t] += y[t] * (k.at(t, i) * y[i] * di + k.at(t, j) * y[j] * dj);
  }

  BinarySvm svm;
  svm.kernel = params.kernel;
  svm.gamma = gamma;
  svm.converged = converged;
  // b = (m_up + m_low)/2: for free SVs b = -y_i G_i, which lies in [m_low, m_up]
  const bool up_ok = std::isfinite(m_up), low_ok = std::isfinite(m_low);
  if (up_ok && low_ok)
    svm.bias = (m_up + m_low) / 2.0;
  else if (up_ok)
    svm.bias = m_up;
  else if (low_ok)
    svm.bias = m_low;
  else
    svm.bias = 0.0;

  std::size_t n_sv = 0;
  for (double a : alpha)
    if (a > 0.0) ++n_sv;
  svm.support_vectors = Matrix<double>(n_sv, x.cols);
  svm.dual_coef.reserve(n_sv);
  std::size_t r = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i] <= 0.0) continue;
    std::copy(x.row(i), x.row(i) + x.cols, svm.support_vectors.row(r));
    svm.dual_coef.push_back(alpha[i] * y[i]);
    ++r;
  }
  svm.rebuild_linear_w();
  return svm;
}

}  // namespace sention
