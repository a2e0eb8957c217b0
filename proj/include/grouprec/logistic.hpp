#pragma once

#include <cmath>

namespace grouprec {

/// 1 / (1 + exp(-z)) without overflow for any finite z.
template <typename Scalar>
Scalar logistic(Scalar z) {
  using std::exp;
  if (z >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-z));
  const Scalar e = exp(z);
  return e / (Scalar(1) + e);
}

/// P(B(i,j) = 1 | g_j = d) = logistic(pi(i,d) * I(i,d) + S(i,d)).
template <typename Scalar>
Scalar selection_probability(Scalar contribution, Scalar interest, Scalar social) {
  return logistic(contribution * interest + social);
}

/// P(B(i,j) = 0 | g_j = d), the complement of `selection_probability`.
template <typename Scalar>
Scalar rejection_probability(Scalar contribution, Scalar interest, Scalar social) {
  return Scalar(1) - selection_probability(contribution, interest, social);
}

}  // namespace grouprec
