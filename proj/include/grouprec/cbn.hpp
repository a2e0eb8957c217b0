#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "grouprec/common.hpp"
#include "grouprec/dataset.hpp"
#include "grouprec/logistic.hpp"

namespace grouprec {

struct CbnHyperparams {
  double interest_mean = 45.0;      // mu1
  double interest_variance = 70.0;  // sigma1^2
  double social_mean = 12.0;        // mu2
  double social_variance = 30.0;    // sigma2^2
  double learning_rate = 0.01;
  double convergence_threshold = 0.001;
  int max_epochs = 200;
  double negative_ratio = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(interest_variance > 0) || !(social_variance > 0))
      throw InputError("prior variances must be positive");
    if (!(learning_rate >= 0)) throw InputError("learning_rate must be non-negative");
    if (!(convergence_threshold > 0)) throw InputError("convergence_threshold must be positive");
    if (max_epochs < 1) throw InputError("max_epochs must be at least 1");
    if (!(negative_ratio >= 0)) throw InputError("negative_ratio must be non-negative");
  }
};

/// Per-user, per-topic latent state of the collaborative Bayesian network.
template <typename Scalar>
struct CbnModel {
  Matrix<Scalar> interest;      // I(i,d)
  Matrix<Scalar> social;        // S(i,d)
  Matrix<Scalar> contribution;  // pi(i,d), row-stochastic

  Index num_users() const { return interest.rows(); }
  int num_topics() const { return static_cast<int>(interest.cols()); }

  template <typename Other>
  CbnModel<Other> cast() const {
    return {interest.template cast<Other>(), social.template cast<Other>(), contribution.template cast<Other>()};
  }
};

struct TrainingExample {
  Index user = 0;
  Index item = 0;
  int topic = 0;
  int label = 0;  // B(i,j)
};

struct TrainReport {
  int epochs_run = 0;
  double final_objective = 0.0;
  /// Entry 0 is the objective at initialization; entry k follows epoch k.
  std::vector<double> objective_trace;
  bool converged = false;
};

/// pi(i,d) = m_i^(d) / m_i over the given interactions; users without
/// interactions get the uniform row 1/D.
inline Matrix<double> compute_contribution_rates(const InteractionDataset& ds) {
  const Index users = ds.num_users();
  const int topics = ds.num_topics();
  Matrix<double> counts = Matrix<double>::Zero(users, topics);
  for (const auto& [u, j] : ds.interactions()) counts(u, ds.topic_of(j)) += 1.0;
  for (Index u = 0; u < users; ++u) {
    const double total = counts.row(u).sum();
    if (total > 0)
      counts.row(u) /= total;
    else
      counts.row(u).setConstant(1.0 / topics);
  }
  return counts;
}

constexpr double kProbabilityClamp = 1e-12;

/// Per-example negative log posterior J_{j,i}: cross-entropy of the logistic
/// selection model plus the two Gaussian prior penalties (constants dropped).
/// p is clamped to [eps, 1 - eps] with eps = max(1e-12, machine epsilon).
template <typename Scalar>
Scalar example_loss(Scalar label, Scalar contribution, Scalar interest, Scalar social,
                    const CbnHyperparams& hp) {
  using std::log;
  const Scalar eps = std::max(Scalar(kProbabilityClamp), std::numeric_limits<Scalar>::epsilon());
  Scalar p = selection_probability(contribution, interest, social);
  p = std::clamp(p, eps, Scalar(1) - eps);
  const Scalar di = interest - Scalar(hp.interest_mean);
  const Scalar ds = social - Scalar(hp.social_mean);
  return -(label * log(p) + (Scalar(1) - label) * log(Scalar(1) - p)) +
         di * di / (Scalar(2) * Scalar(hp.interest_variance)) + ds * ds / (Scalar(2) * Scalar(hp.social_variance));
}

template <typename Scalar>
Scalar example_loss(const TrainingExample& ex, const CbnModel<Scalar>& model, const CbnHyperparams& hp) {
  return example_loss(Scalar(ex.label), model.contribution(ex.user, ex.topic), model.interest(ex.user, ex.topic),
                      model.social(ex.user, ex.topic), hp);
}

template <typename Scalar>
struct ExampleGradient {
  Scalar interest;
  Scalar social;
};

/// Analytic gradient of `example_loss` with respect to I(i,d) and S(i,d).
template <typename Scalar>
ExampleGradient<Scalar> example_gradients(Scalar label, Scalar contribution, Scalar interest, Scalar social,
                                          const CbnHyperparams& hp) {
  const Scalar residual = label - selection_probability(contribution, interest, social);
  return {-residual * contribution + (interest - Scalar(hp.interest_mean)) / Scalar(hp.interest_variance),
          -residual + (social - Scalar(hp.social_mean)) / Scalar(hp.social_variance)};
}

template <typename Scalar>
ExampleGradient<Scalar> example_gradients(const TrainingExample& ex, const CbnModel<Scalar>& model,
                                          const CbnHyperparams& hp) {
  return example_gradients(Scalar(ex.label), model.contribution(ex.user, ex.topic),
                           model.interest(ex.user, ex.topic), model.social(ex.user, ex.topic), hp);
}

/// For each user, ceil(ratio * positives) distinct non-interacted items drawn
/// uniformly (capped at the number available), labelled 0.
std::vector<TrainingExample> sample_negatives(const InteractionDataset& train, double ratio, std::uint64_t seed);

std::vector<TrainingExample> positive_examples(const InteractionDataset& train);

template <typename Scalar>
double mean_loss(const std::vector<TrainingExample>& examples, const CbnModel<Scalar>& model,
                 const CbnHyperparams& hp) {
  if (examples.empty()) return 0.0;
  long double total = 0;
  for (const auto& ex : examples) total += static_cast<long double>(example_loss(ex, model, hp));
  return static_cast<double>(total / static_cast<long double>(examples.size()));
}

template <typename Scalar>
struct TrainResult {
  CbnModel<Scalar> model;
  TrainReport report;
};

/// Per-example SGD on the negative log posterior.
///
/// I and S start at the prior means; pi is computed once from `train` and held
/// fixed. Each epoch draws fresh negatives, shuffles them with the positives
/// and takes one step per example. Training stops when the epoch-mean
/// objective changes by less than `convergence_threshold` or after
/// `max_epochs`.
template <typename Scalar = double>
TrainResult<Scalar> train(const InteractionDataset& train_set, const CbnHyperparams& hp) {
  hp.validate();
  if (train_set.num_users() == 0 || train_set.interactions().empty())
    throw InputError("training set has no interactions");

  const Index users = train_set.num_users();
  const int topics = train_set.num_topics();
  CbnModel<Scalar> model{Matrix<Scalar>::Constant(users, topics, Scalar(hp.interest_mean)),
                         Matrix<Scalar>::Constant(users, topics, Scalar(hp.social_mean)),
                         compute_contribution_rates(train_set).template cast<Scalar>()};

  const auto positives = positive_examples(train_set);
  Rng shuffle_rng = make_rng(hp.seed, 0x5348554646ULL);
  const Scalar lr(hp.learning_rate);

  TrainReport report;
  double previous = 0.0;
  for (int epoch = 1; epoch <= hp.max_epochs; ++epoch) {
    std::vector<TrainingExample> examples = positives;
    auto negatives = sample_negatives(train_set, hp.negative_ratio, hp.seed + static_cast<std::uint64_t>(epoch));
    examples.insert(examples.end(), negatives.begin(), negatives.end());
    shuffle(examples.begin(), examples.end(), shuffle_rng);

    if (epoch == 1) {
      previous = mean_loss(examples, model, hp);
      report.objective_trace.push_back(previous);
    }

    for (const auto& ex : examples) {
      const auto g = example_gradients(ex, model, hp);
      model.interest(ex.user, ex.topic) -= lr * g.interest;
      model.social(ex.user, ex.topic) -= lr * g.social;
    }

    const double current = mean_loss(examples, model, hp);
    if (!std::isfinite(current))
      throw NumericalError("training diverged: non-finite objective at epoch " + std::to_string(epoch));
    report.objective_trace.push_back(current);
    report.epochs_run = epoch;
    report.final_objective = current;
    if (std::abs(current - previous) < hp.convergence_threshold) {
      report.converged = true;
      break;
    }
    previous = current;
  }
  return {std::move(model), std::move(report)};
}

}  // namespace grouprec
