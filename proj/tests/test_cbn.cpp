#include <doctest.h>

#include <cmath>
#include <set>

#include "grouprec/cbn.hpp"
#include "grouprec/metrics.hpp"
#include "support.hpp"

using namespace grouprec;
using testing::small_dataset;

namespace {

// Reference logistic in long double, evaluated the textbook way.
long double reference_logistic(long double z) { return 1.0L / (1.0L + std::exp(-z)); }

CbnHyperparams unit_priors() {
  CbnHyperparams hp;
  hp.interest_mean = 0;
  hp.interest_variance = 1;
  hp.social_mean = 0;
  hp.social_variance = 1;
  return hp;
}

}  // namespace

TEST_CASE("contribution rates follow topic shares") {
  // User 0: topics (0, 0, 1, 2); user 1 has no interactions.
  const auto ds = small_dataset(2, {0, 0, 1, 2}, 3, {{0, 0}, {0, 1}, {0, 2}, {0, 3}});
  const auto pi = compute_contribution_rates(ds);
  CHECK(pi(0, 0) == 0.5);
  CHECK(pi(0, 1) == 0.25);
  CHECK(pi(0, 2) == 0.25);
  for (int d = 0; d < 3; ++d) CHECK(pi(1, d) == doctest::Approx(1.0 / 3));

  const auto four = small_dataset(1, {0, 1, 2, 3}, 4, {});
  for (int d = 0; d < 4; ++d) CHECK(compute_contribution_rates(four)(0, d) == 0.25);
}

TEST_CASE("contribution rows are stochastic on generated data") {
  const auto ds = generate_synthetic({.num_users = 100, .seed = 6}).dataset;
  const auto pi = compute_contribution_rates(ds);
  for (Index u = 0; u < pi.rows(); ++u) {
    CHECK(std::abs(pi.row(u).sum() - 1.0) < 1e-9);
    CHECK(pi.row(u).minCoeff() >= 0.0);
    CHECK(pi.row(u).maxCoeff() <= 1.0);
  }
}

TEST_CASE("selection probability values") {
  CHECK(selection_probability(0.3, 0.0, 0.0) == 0.5);
  CHECK(selection_probability(0.5, 2.0, -1.0) == 0.5);
  CHECK(selection_probability(1.0, 45.0, 12.0) >= 1.0 - 1e-20);
  CHECK(selection_probability(1.0, 45.0, 12.0) <= 1.0);
}

TEST_CASE("logistic agrees with a long double reference and never overflows") {
  Rng rng = make_rng(17);
  for (int k = 0; k < 20000; ++k) {
    const double z = (uniform_unit(rng) * 2 - 1) * 1e3;
    const double p = logistic(z);
    CHECK(std::isfinite(p));
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    const long double ref = reference_logistic(z);
    if (ref > 1e-300L) CHECK(std::abs(p - ref) <= 1e-15L * ref + 1e-300L);
  }
  CHECK(logistic(-1e308) == 0.0);
  CHECK(logistic(1e308) == 1.0);
}

TEST_CASE("example loss at the prior means is the cross-entropy of a coin") {
  CbnHyperparams hp;
  hp.social_mean = -0.2 * hp.interest_mean;  // logit 0.2 * mu1 + mu2 = 0
  for (double y : {0.0, 1.0})
    CHECK(example_loss(y, 0.2, hp.interest_mean, hp.social_mean, hp) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("example loss with a saturated positive is the interest prior term") {
  CbnHyperparams hp;
  hp.social_mean = 60;
  const double sigma1 = std::sqrt(hp.interest_variance);
  const double loss = example_loss(1.0, 1.0, hp.interest_mean + sigma1, hp.social_mean, hp);
  CHECK(loss == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("example loss clamps probabilities before the log") {
  const auto hp = unit_priors();
  const double loss = example_loss(0.0, 1.0, 0.0, 1e3, hp);
  CHECK(std::isfinite(loss));
  CHECK(loss == doctest::Approx(-std::log(1e-12) + 1e6 / 2).epsilon(1e-9));
}

TEST_CASE("gradients at the prior means") {
  CbnHyperparams hp;
  hp.interest_mean = 3;
  hp.social_mean = -3;
  const auto g1 = example_gradients(1.0, 1.0, hp.interest_mean, hp.social_mean, hp);
  CHECK(g1.interest == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(g1.social == doctest::Approx(-0.5).epsilon(1e-12));
  hp.social_mean = 0;
  const auto g0 = example_gradients(0.0, 0.0, hp.interest_mean, hp.social_mean, hp);
  CHECK(g0.interest == 0.0);
  CHECK(g0.social == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("gradients match central differences on random states") {
  Rng rng = make_rng(23);
  int checked = 0;
  for (int k = 0; k < 300; ++k) {
    CbnHyperparams hp;
    hp.interest_mean = (uniform_unit(rng) - 0.5) * 20;
    hp.interest_variance = 0.5 + uniform_unit(rng) * 50;
    hp.social_mean = (uniform_unit(rng) - 0.5) * 10;
    hp.social_variance = 0.5 + uniform_unit(rng) * 20;
    const long double y = uniform_below(rng, 2);
    const long double pi = uniform_unit(rng);
    const long double I = hp.interest_mean + standard_normal(rng) * 3;
    const long double S = hp.social_mean + standard_normal(rng) * 3;
    const auto g = example_gradients<long double>(y, pi, I, S, hp);
    const long double h = 1e-5L;
    const long double dI = (example_loss<long double>(y, pi, I + h, S, hp) - example_loss<long double>(y, pi, I - h, S, hp)) / (2 * h);
    const long double dS = (example_loss<long double>(y, pi, I, S + h, hp) - example_loss<long double>(y, pi, I, S - h, hp)) / (2 * h);
    auto rel = [](long double a, long double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8L}); };
    CHECK(rel(g.interest, dI) < 1e-4L);
    CHECK(rel(g.social, dS) < 1e-4L);
    ++checked;
  }
  CHECK(checked == 300);
}

TEST_CASE("negative sampling respects the positive set and the ratio") {
  // User 0: 10 positives out of 110 items; user 1 interacted with everything.
  std::vector<int> topics(110, 0);
  std::vector<UserItem> inter;
  for (Index j = 0; j < 10; ++j) inter.emplace_back(0, j * 11);
  for (Index j = 0; j < 110; ++j) inter.emplace_back(1, j);
  const auto ds = small_dataset(2, topics, 1, inter);

  const auto neg = sample_negatives(ds, 1.0, 4);
  std::set<Index> user0;
  for (const auto& ex : neg) {
    CHECK(ex.user == 0);
    CHECK(ex.label == 0);
    CHECK(ex.item % 11 != 0);
    user0.insert(ex.item);
  }
  CHECK(neg.size() == 10);
  CHECK(user0.size() == 10);

  CHECK(sample_negatives(ds, 0.0, 4).empty());
  CHECK(sample_negatives(ds, 0.25, 4).size() == 3);  // ceil(2.5)
  CHECK(sample_negatives(ds, 50.0, 4).size() == 100);  // capped

  const auto again = sample_negatives(ds, 1.0, 4);
  for (std::size_t k = 0; k < neg.size(); ++k) CHECK(again[k].item == neg[k].item);
}

TEST_CASE("a huge threshold stops after one epoch") {
  const auto ds = generate_synthetic({.num_users = 30, .seed = 1}).dataset;
  CbnHyperparams hp;
  hp.convergence_threshold = 1e9;
  const auto result = train(ds, hp);
  CHECK(result.report.epochs_run == 1);
  CHECK(result.report.converged);
  CHECK(result.report.objective_trace.size() == 2);
}

TEST_CASE("zero learning rate leaves the initialization untouched") {
  const auto ds = generate_synthetic({.num_users = 30, .seed = 1}).dataset;
  CbnHyperparams hp;
  hp.learning_rate = 0;
  hp.max_epochs = 3;
  const auto result = train(ds, hp);
  CHECK((result.model.interest.array() == hp.interest_mean).all());
  CHECK((result.model.social.array() == hp.social_mean).all());
}

TEST_CASE("tight priors pin the parameters to their means") {
  const auto ds = generate_synthetic({.num_users = 40, .seed = 2}).dataset;
  CbnHyperparams hp;
  hp.interest_variance = 1e-3;
  hp.social_variance = 1e-3;
  hp.learning_rate = 1e-3;
  hp.max_epochs = 20;
  const auto result = train(ds, hp);
  CHECK((result.model.interest.array() - hp.interest_mean).abs().maxCoeff() < 1e-3);
  CHECK((result.model.social.array() - hp.social_mean).abs().maxCoeff() < 1e-3);
}

TEST_CASE("training reports a finite, mostly decreasing objective") {
  const SyntheticSpec spec{.seed = 3};
  const auto data = generate_synthetic(spec);
  CbnHyperparams hp;
  hp.interest_mean = spec.interest_mean;
  hp.interest_variance = spec.interest_variance;
  hp.social_mean = spec.social_mean;
  hp.social_variance = spec.social_variance;
  hp.convergence_threshold = 1e-9;
  hp.max_epochs = 60;
  hp.seed = 3;
  const auto result = train(data.dataset, hp);
  const auto& trace = result.report.objective_trace;
  REQUIRE(trace.size() == 61);
  int non_increasing = 0;
  for (std::size_t k = 1; k < trace.size(); ++k) {
    CHECK(std::isfinite(trace[k]));
    non_increasing += trace[k] <= trace[k - 1];
  }
  CHECK(non_increasing >= static_cast<int>(0.9 * (trace.size() - 1)));
  CHECK(result.model.interest.allFinite());
  CHECK(result.model.social.allFinite());
}

TEST_CASE("training is deterministic per seed") {
  const auto ds = generate_synthetic({.num_users = 50, .seed = 4}).dataset;
  CbnHyperparams hp;
  hp.seed = 99;
  hp.max_epochs = 5;
  const auto a = train(ds, hp);
  const auto b = train(ds, hp);
  CHECK(a.model.interest == b.model.interest);
  CHECK(a.model.social == b.model.social);
  CHECK(a.report.objective_trace == b.report.objective_trace);
}

TEST_CASE("training recovers the generating interest") {
  const SyntheticSpec spec{.seed = 5};
  const auto data = generate_synthetic(spec);
  CbnHyperparams hp;
  hp.interest_mean = spec.interest_mean;
  hp.interest_variance = spec.interest_variance;
  hp.social_mean = spec.social_mean;
  hp.social_variance = spec.social_variance;
  hp.seed = spec.seed;
  const auto result = train(data.dataset, hp);
  std::vector<double> fit, truth;
  for (Index u = 0; u < result.model.num_users(); ++u)
    for (int d = 0; d < result.model.num_topics(); ++d)
      if (result.model.contribution(u, d) > 0 && data.dataset.interaction_counts()[static_cast<std::size_t>(u)] > 0) {
        fit.push_back(result.model.interest(u, d));
        truth.push_back(data.true_interest(u, d));
      }
  const auto r = pearson(Eigen::Map<Eigen::VectorXd>(fit.data(), static_cast<Index>(fit.size())),
                         Eigen::Map<Eigen::VectorXd>(truth.data(), static_cast<Index>(truth.size())));
  REQUIRE(r.has_value());
  CHECK(*r >= 0.6);
}

TEST_CASE("divergent training raises a numerical error naming the epoch") {
  const auto ds = generate_synthetic({.num_users = 20, .seed = 1}).dataset;
  CbnHyperparams hp;
  hp.interest_variance = 1e-6;
  hp.convergence_threshold = 1e-12;
  try {
    train(ds, hp);
    FAIL("expected divergence");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("epoch") != std::string::npos);
  }
}

TEST_CASE("hyperparameter validation") {
  CbnHyperparams hp;
  hp.interest_variance = 0;
  CHECK_THROWS_AS(hp.validate(), InputError);
  hp = {};
  hp.learning_rate = -1;
  CHECK_THROWS_AS(hp.validate(), InputError);
  hp = {};
  hp.max_epochs = 0;
  CHECK_THROWS_AS(hp.validate(), InputError);
  const auto empty = small_dataset(1, {0}, 1, {});
  CHECK_THROWS_AS(train(empty, CbnHyperparams{}), InputError);
}

TEST_CASE("float and double training agree closely") {
  const auto ds = generate_synthetic({.num_users = 20, .seed = 8}).dataset;
  CbnHyperparams hp;
  hp.max_epochs = 3;
  const auto d = train<double>(ds, hp);
  const auto f = train<float>(ds, hp);
  CHECK((d.model.interest - f.model.interest.cast<double>()).cwiseAbs().maxCoeff() < 1e-2);
}
