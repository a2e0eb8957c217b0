#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "grouprec/common.hpp"
#include "grouprec/distribution.hpp"

namespace grouprec {

enum class Metric { Euclidean, Manhattan, Chebyshev, Correlation, MeanAbsolute, MeanSquared };

inline constexpr std::array<Metric, 6> kAllMetrics = {Metric::Euclidean,   Metric::Manhattan,
                                                      Metric::Chebyshev,   Metric::Correlation,
                                                      Metric::MeanAbsolute, Metric::MeanSquared};

/// Column labels used in reports.
constexpr std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::Euclidean: return "EucDist";
    case Metric::Manhattan: return "ManDist";
    case Metric::Chebyshev: return "CheDist";
    case Metric::Correlation: return "CorDist";
    case Metric::MeanAbsolute: return "MAEDist";
    case Metric::MeanSquared: return "MSEDist";
  }
  return "";
}

/// Pearson correlation clamped to [-1, 1]; empty when either side has zero
/// variance or fewer than two entries.
template <typename DerivedA, typename DerivedB>
std::optional<double> pearson(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size()) throw InputError("pearson: length mismatch");
  if (a.size() < 2) return std::nullopt;
  const Eigen::ArrayXd x = a.template cast<double>().reshaped().array() - a.template cast<double>().mean();
  const Eigen::ArrayXd y = b.template cast<double>().reshaped().array() - b.template cast<double>().mean();
  const double sxx = (x * x).sum();
  const double syy = (y * y).sum();
  if (!(sxx > 0) || !(syy > 0)) return std::nullopt;
  return std::clamp((x * y).sum() / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Distance between two equal-length vectors.
///
/// CorDist is 1 - Pearson(p, q); when either vector is constant it is 0 for
/// identical inputs and 1 otherwise.
template <typename DerivedA, typename DerivedB>
double distance(Metric metric, const Eigen::MatrixBase<DerivedA>& p, const Eigen::MatrixBase<DerivedB>& q) {
  if (p.size() != q.size()) throw InputError("distance: length mismatch");
  if (p.size() == 0) throw InputError("distance: empty input");
  const Eigen::ArrayXd diff = (p.template cast<double>() - q.template cast<double>()).array();
  const auto n = static_cast<double>(diff.size());
  switch (metric) {
    case Metric::Euclidean: return std::sqrt(diff.square().sum());
    case Metric::Manhattan: return diff.abs().sum();
    case Metric::Chebyshev: return diff.abs().maxCoeff();
    case Metric::MeanAbsolute: return diff.abs().sum() / n;
    case Metric::MeanSquared: return diff.square().sum() / n;
    case Metric::Correlation: {
      const auto r = pearson(p, q);
      if (!r) return (diff == 0.0).all() ? 0.0 : 1.0;
      return 1.0 - *r;
    }
  }
  return 0.0;
}

inline double distance(Metric metric, const TopicDistribution& p, const TopicDistribution& q) {
  return distance(metric, p.ratios(), q.ratios());
}

}  // namespace grouprec
