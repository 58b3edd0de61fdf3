#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "sention/core.hpp"

namespace sention {

/// Per-feature affine standardization fitted on training data only.
/// Sigma is the population standard deviation, floored at 1e-12 so constant
/// columns transform to zero.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> sigma;

  static constexpr double kSigmaFloor = 1e-12;

  std::size_t dim() const { return mean.size(); }

  void transform_inplace(std::span<double> x) const {
    if (x.size() != mean.size()) throw DimensionMismatch("standardizer dimension mismatch");
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = (x[j] - mean[j]) / sigma[j];
  }

  std::vector<double> transform(std::span<const double> x) const {
    std::vector<double> out(x.begin(), x.end());
    transform_inplace(out);
    return out;
  }

  void transform_rows(Matrix<double>& x) const {
    for (std::size_t r = 0; r < x.rows; ++r) transform_inplace(std::span<double>(x.row(r), x.cols));
  }
};

inline Standardizer fit_standardizer(const Matrix<double>& x) {
  if (x.rows < 2) throw TooFewSamples("standardizer needs at least 2 samples");
  Standardizer s;
  s.mean.assign(x.cols, 0.0);
  s.sigma.assign(x.cols, 0.0);
  for (std::size_t r = 0; r < x.rows; ++r) {
    const double* row = x.row(r);
    for (std::size_t j = 0; j < x.cols; ++j) s.mean[j] += row[j];
  }
  for (std::size_t j = 0; j < x.cols; ++j) s.mean[j] /= static_cast<double>(x.rows);
  for (std::size_t r = 0; r < x.rows; ++r) {
    const double* row = x.row(r);
    for (std::size_t j = 0; j < x.cols; ++j) {
      const double d = row[j] - s.mean[j];
      s.sigma[j] += d * d;
    }
  }
  for (std::size_t j = 0; j < x.cols; ++j)
    s.sigma[j] = std::max(std::sqrt(s.sigma[j] / static_cast<double>(x.rows)), Standardizer::kSigmaFloor);
  return s;
}

}  // namespace sention
