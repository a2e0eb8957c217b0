#pragma once

#include <utility>

#include <Eigen/Dense>

#include "grouprec/common.hpp"

namespace grouprec {

/// Non-negative topic ratios A_1..A_D summing to one.
class TopicDistribution {
 public:
  TopicDistribution() = default;
  explicit TopicDistribution(Eigen::VectorXd ratios) : ratios_(std::move(ratios)) {}

  /// Uniform 1/D over D topics.
  static TopicDistribution uniform(int num_topics) {
    return TopicDistribution(Eigen::VectorXd::Constant(num_topics, 1.0 / num_topics));
  }

  /// Normalizes non-negative counts; all-zero counts give the uniform
  /// distribution.
  static TopicDistribution from_counts(const Eigen::VectorXd& counts) {
    const double total = counts.sum();
    if (!(total > 0)) return uniform(static_cast<int>(counts.size()));
    return TopicDistribution(counts / total);
  }

  int size() const { return static_cast<int>(ratios_.size()); }
  double operator[](int k) const { return ratios_(k); }
  const Eigen::VectorXd& ratios() const { return ratios_; }

 private:
  Eigen::VectorXd ratios_;
};

}  // namespace grouprec
