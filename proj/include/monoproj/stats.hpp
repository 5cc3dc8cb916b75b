#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <vector>

#include "monoproj/errors.hpp"

namespace monoproj {

template <typename Scalar>
Scalar expit(Scalar x) {
  // Evaluate from the side that avoids overflow.
  if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-x));
  const Scalar e = std::exp(x);
  return e / (Scalar(1) + e);
}

template <typename Scalar>
Scalar logit(Scalar p) {
  if (!(p > Scalar(0) && p < Scalar(1)))
    throw InputError("logit: argument must lie strictly in (0,1)");
  return std::log(p / (Scalar(1) - p));
}

template <typename Scalar>
Scalar normal_cdf(Scalar x) {
  return Scalar(0.5) * std::erfc(-x * Scalar(0.70710678118654752440));
}

inline double sample_sd(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const Eigen::Index n = v.size();
  if (n < 2) throw InputError("sample_sd: need at least 2 observations");
  const double m = v.mean();
  return std::sqrt((v.array() - m).square().sum() / static_cast<double>(n - 1));
}

// Linear-interpolation quantile of an unsorted sample (the common "type 7"
// definition). p in [0,1].
inline double quantile(std::vector<double> v, double p) {
  if (v.empty()) throw InputError("quantile: empty sample");
  std::sort(v.begin(), v.end());
  if (p <= 0.0) return v.front();
  if (p >= 1.0) return v.back();
  const double h = p * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

// Upper empirical quantile by order statistic: the ceil(level * n)-th
// smallest value. Used for critical values of sup-statistics.
inline double order_statistic_quantile(std::vector<double> v, double level) {
  if (v.empty()) throw InputError("order_statistic_quantile: empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  std::size_t k = static_cast<std::size_t>(
      std::ceil(level * static_cast<double>(n)));
  if (k < 1) k = 1;
  if (k > n) k = n;
  return v[k - 1];
}

}  // namespace monoproj
