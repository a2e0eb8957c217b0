#include "grouprec/config.hpp"

namespace grouprec {

CbnHyperparams RunConfig::hyperparams() const {
  CbnHyperparams hp;
  hp.interest_mean = mu1;
  hp.interest_variance = sigma1_sq;
  hp.social_mean = mu2;
  hp.social_variance = sigma2_sq;
  hp.learning_rate = learning_rate;
  hp.convergence_threshold = convergence_threshold;
  hp.max_epochs = max_epochs;
  hp.negative_ratio = negative_ratio;
  hp.seed = seed.value_or(0);
  return hp;
}

GameConfig RunConfig::game() const { return {eta1, eta2, n, max_rounds, seed.value_or(0)}; }

void RunConfig::validate() const {
  hyperparams().validate();
  game().validate();
  if (num_topics < 1) throw InputError("num_topics must be positive");
  if (min_interactions < 1) throw InputError("min_interactions must be at least 1");
  if (!(train_fraction > 0 && train_fraction < 1)) throw InputError("train_fraction must lie in (0, 1)");
  if (group_size < 2) throw InputError("group_size must be at least 2");
  if (num_groups < 1) throw InputError("num_groups must be positive");
  if (!(min_density >= 0 && min_density <= 1)) throw InputError("min_density must lie in [0, 1]");
}

RunConfig preset(const std::string& name) {
  RunConfig cfg;
  if (name == "lastfm") {
    cfg.num_topics = 6;
    cfg.mu1 = 45;
    cfg.sigma1_sq = 70;
    cfg.mu2 = 12;
    cfg.sigma2_sq = 30;
  } else if (name == "delicious") {
    cfg.num_topics = 10;
    cfg.mu1 = 45;
    cfg.sigma1_sq = 75;
    cfg.mu2 = 10;
    cfg.sigma2_sq = 25;
  } else {
    throw InputError("unknown preset '" + name + "' (expected lastfm or delicious)");
  }
  return cfg;
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j = {{"interactions", c.interactions},
                      {"social", c.social},
                      {"topics", c.topics},
                      {"num_topics", c.num_topics},
                      {"min_interactions", c.min_interactions},
                      {"mu1", c.mu1},
                      {"sigma1_sq", c.sigma1_sq},
                      {"mu2", c.mu2},
                      {"sigma2_sq", c.sigma2_sq},
                      {"learning_rate", c.learning_rate},
                      {"convergence_threshold", c.convergence_threshold},
                      {"max_epochs", c.max_epochs},
                      {"negative_ratio", c.negative_ratio},
                      {"train_fraction", c.train_fraction},
                      {"group_size", c.group_size},
                      {"num_groups", c.num_groups},
                      {"min_density", c.min_density},
                      {"eta1", c.eta1},
                      {"eta2", c.eta2},
                      {"n", c.n},
                      {"max_rounds", c.max_rounds},
                      {"output_dir", c.output_dir}};
  j["seed"] = c.seed ? nlohmann::json(*c.seed) : nlohmann::json(nullptr);
  return j;
}

RunConfig merge_config(RunConfig c, const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "interactions") c.interactions = v.get<std::string>();
      else if (key == "social") c.social = v.get<std::string>();
      else if (key == "topics") c.topics = v.get<std::string>();
      else if (key == "num_topics") c.num_topics = v.get<int>();
      else if (key == "min_interactions") c.min_interactions = v.get<Index>();
      else if (key == "mu1") c.mu1 = v.get<double>();
      else if (key == "sigma1_sq") c.sigma1_sq = v.get<double>();
      else if (key == "mu2") c.mu2 = v.get<double>();
      else if (key == "sigma2_sq") c.sigma2_sq = v.get<double>();
      else if (key == "learning_rate") c.learning_rate = v.get<double>();
      else if (key == "convergence_threshold") c.convergence_threshold = v.get<double>();
      else if (key == "max_epochs") c.max_epochs = v.get<int>();
      else if (key == "negative_ratio") c.negative_ratio = v.get<double>();
      else if (key == "train_fraction") c.train_fraction = v.get<double>();
      else if (key == "group_size") c.group_size = v.get<Index>();
      else if (key == "num_groups") c.num_groups = v.get<Index>();
      else if (key == "min_density") c.min_density = v.get<double>();
      else if (key == "eta1") c.eta1 = v.get<double>();
      else if (key == "eta2") c.eta2 = v.get<double>();
      else if (key == "n") c.n = v.get<double>();
      else if (key == "max_rounds") c.max_rounds = v.get<int>();
      else if (key == "output_dir") c.output_dir = v.get<std::string>();
      else if (key == "preset") continue;  // resolved by the caller
      else if (key == "seed") c.seed = v.is_null() ? std::nullopt : std::optional<std::uint64_t>(v.get<std::uint64_t>());
      else throw InputError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  return c;
}

}  // namespace grouprec
