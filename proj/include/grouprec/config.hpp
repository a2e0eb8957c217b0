#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "grouprec/cbn.hpp"
#include "grouprec/dataset.hpp"
#include "grouprec/game.hpp"

namespace grouprec {

/// Every tunable of an end-to-end run. JSON keys are the field names below;
/// CLI flags are the same names in kebab-case.
struct RunConfig {
  std::string interactions;
  std::string social;
  std::string topics;
  int num_topics = 6;
  Index min_interactions = 5;

  double mu1 = 45.0;
  double sigma1_sq = 70.0;
  double mu2 = 12.0;
  double sigma2_sq = 30.0;
  double learning_rate = 0.01;
  double convergence_threshold = 0.001;
  int max_epochs = 200;
  double negative_ratio = 1.0;

  double train_fraction = 0.7;
  Index group_size = 5;
  Index num_groups = 100;
  double min_density = 0.25;

  double eta1 = 0.6;
  double eta2 = 0.4;
  double n = 2.0;
  int max_rounds = 100;

  std::optional<std::uint64_t> seed;
  std::string output_dir = "out";

  CbnHyperparams hyperparams() const;
  GameConfig game() const;
  void validate() const;
};

/// Named parameter sets: "lastfm" (D=6, priors 45/70, 12/30) and
/// "delicious" (D=10, priors 45/75, 10/25). Other fields keep their defaults.
RunConfig preset(const std::string& name);

nlohmann::json to_json(const RunConfig& cfg);
/// Overlays the keys present in `j` onto `base`; unknown keys are rejected.
RunConfig merge_config(RunConfig base, const nlohmann::json& j);

}  // namespace grouprec
