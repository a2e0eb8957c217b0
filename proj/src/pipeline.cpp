#include "grouprec/pipeline.hpp"

#include <cmath>
#include <map>

#include "grouprec/io.hpp"
#include "grouprec/metrics.hpp"

namespace grouprec {

namespace {

template <typename F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const InputError& e) {
    throw StageError(name, e, true);
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e, false);
  }
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace

InteractionDataset load_configured_dataset(const RunConfig& cfg, IngestStats* stats) {
  return stage("ingest", [&] {
    auto ds = load_hetrec({cfg.interactions, cfg.social, cfg.topics}, cfg.num_topics, stats);
    return filter_inactive(ds, cfg.min_interactions);
  });
}

PipelineResult run_pipeline(const InteractionDataset& ds, const RunConfig& cfg, const std::vector<Method>& extra) {
  stage("config", [&] {
    cfg.validate();
    if (!cfg.seed) throw InputError("a seed is required");
    return 0;
  });
  const auto seed = *cfg.seed;
  PipelineResult r;
  r.split = stage("split", [&] { return split(ds, cfg.train_fraction, seed); });
  r.sampling = stage("groups", [&] { return build_groups(ds, cfg.group_size, cfg.num_groups, cfg.min_density, seed); });
  r.trained = stage("train", [&] { return train<double>(r.split.train, cfg.hyperparams()); });
  r.normalized = normalize(r.trained.model);

  const auto game = cfg.game();
  const int topics = ds.num_topics();
  r.equilibria = stage("equilibrium", [&] {
    std::vector<Equilibrium<double>> out;
    for (const auto& g : r.sampling.groups) out.push_back(find_equilibrium(g, r.normalized, game));
    return out;
  });

  auto by_group = std::make_shared<std::map<Index, TopicDistribution>>();
  for (const auto& eq : r.equilibria) (*by_group)[eq.group_id] = recommend(eq, topics);
  const auto& train_set = r.split.train;
  std::vector<Method> methods{
      {kGameMethod, [by_group](const Group& g) { return by_group->at(g.id); }},
      {"Frequency", [&train_set](const Group& g) { return frequency_baseline(g, train_set); }},
      {"FreGroup", [&train_set](const Group& g) { return fregroup_baseline(g, train_set); }},
  };
  methods.insert(methods.end(), extra.begin(), extra.end());
  r.report = stage("evaluate", [&] { return run_experiment(r.split.test, r.sampling.groups, methods, to_json(cfg)); });
  return r;
}

void write_run_outputs(const PipelineResult& r, const RunConfig& cfg, const std::filesystem::path& dir) {
  stage("write", [&] {
    std::filesystem::create_directories(dir);
    write_text(dir / "config.json", dump(to_json(cfg)));
    write_text(dir / "model.json", dump(model_to_json(r.trained.model, cfg.hyperparams())));
    write_text(dir / "training.json", dump(train_report_to_json(r.trained.report)));
    nlohmann::json eqs = nlohmann::json::array();
    for (std::size_t g = 0; g < r.equilibria.size(); ++g)
      eqs.push_back(equilibrium_to_json(r.equilibria[g], r.sampling.groups[g], r.report.num_topics));
    write_text(dir / "equilibria.json",
               dump({{"groups_requested", cfg.num_groups},
                     {"groups_found", r.sampling.groups.size()},
                     {"sampling_attempts", r.sampling.attempts},
                     {"shortfall", r.sampling.shortfall},
                     {"equilibria", eqs}}));
    auto report = report_json(r.report);
    report.erase("config");  // echoed once, in config.json
    write_text(dir / "report.json", dump(report));
    write_text(dir / "report.csv", report_csv(r.report));
    write_text(dir / "curves.csv", curves_csv(r.report));
    return 0;
  });
}

SynthTrial synthetic_recovery(const SyntheticData& data, const SyntheticSpec& spec, const RunConfig& cfg) {
  auto hp = cfg.hyperparams();
  hp.interest_mean = spec.interest_mean;
  hp.interest_variance = spec.interest_variance;
  hp.social_mean = spec.social_mean;
  hp.social_variance = spec.social_variance;
  hp.seed = spec.seed;

  SynthTrial t;
  t.seed = spec.seed;
  const auto pi = compute_contribution_rates(data.dataset);
  const auto counts = data.dataset.interaction_counts();
  std::vector<std::pair<Index, Index>> cells;
  Eigen::VectorXd truth(pi.size());
  for (Index u = 0; u < pi.rows(); ++u) {
    if (counts[static_cast<std::size_t>(u)] == 0) continue;
    for (Index d = 0; d < pi.cols(); ++d)
      if (pi(u, d) > 0) {
        truth[static_cast<Index>(cells.size())] = data.true_interest(u, d);
        cells.emplace_back(u, d);
      }
  }
  const auto n = static_cast<Index>(cells.size());
  t.recovery_cells = n;
  truth.conservativeResize(n);
  if (n < 2) {
    t.note = "fewer than two interacted cells";
    return t;
  }
  const double spread = std::sqrt((truth.array() - truth.mean()).square().sum() / static_cast<double>(n - 1));
  if (spread < kMinInterestSpread) {
    t.note = "true interest is near-constant";
    return t;
  }

  std::optional<TrainResult<double>> trained;
  try {
    trained = train<double>(data.dataset, hp);
  } catch (const NumericalError& e) {
    t.note = std::string("training failed: ") + e.what();
    return t;
  }
  Eigen::VectorXd fitted(n);
  for (Index k = 0; k < n; ++k) {
    const auto [u, d] = cells[static_cast<std::size_t>(k)];
    fitted[k] = trained->model.interest(u, d);
  }
  t.recovery = pearson(fitted, truth);
  if (!t.recovery) t.note = "trained interest has no variance";
  return t;
}

SynthTrial run_synthetic_trial(const SyntheticSpec& spec, const RunConfig& cfg) {
  const auto data = generate_synthetic(spec);
  auto trial = synthetic_recovery(data, spec, cfg);

  RunConfig run = cfg;
  run.seed = spec.seed;
  run.num_topics = spec.num_topics;
  run.mu1 = spec.interest_mean;
  run.sigma1_sq = spec.interest_variance;
  run.mu2 = spec.social_mean;
  run.sigma2_sq = spec.social_variance;
  std::optional<PipelineResult> ran;
  try {
    const auto active = stage("filter", [&] { return filter_inactive(data.dataset, run.min_interactions); });
    ran = run_pipeline(active, run);
  } catch (const StageError& e) {
    if (!trial.note.empty()) trial.note += "; ";
    trial.note += std::string("comparison failed in ") + e.what();
    return trial;
  }
  const auto& result = *ran;
  trial.compared = true;
  trial.groups = result.report.evaluated_groups;
  trial.game_euclidean = result.report.mean_of(kGameMethod)[0];
  trial.frequency_euclidean = result.report.mean_of("Frequency")[0];
  trial.fregroup_euclidean = result.report.mean_of("FreGroup")[0];
  trial.game_wins = trial.game_euclidean < trial.frequency_euclidean;
  return trial;
}

SynthReport run_synthetic_oracle(const SyntheticSpec& spec, const RunConfig& cfg, int num_seeds) {
  if (num_seeds < 1) throw InputError("num_seeds must be positive");
  SynthReport report;
  report.spec = spec;
  double recovery_sum = 0;
  int recovery_count = 0;
  for (int k = 0; k < num_seeds; ++k) {
    SyntheticSpec s = spec;
    s.seed = spec.seed + static_cast<std::uint64_t>(k);
    auto trial = run_synthetic_trial(s, cfg);
    report.wins += trial.game_wins;
    if (trial.recovery) {
      recovery_sum += *trial.recovery;
      ++recovery_count;
    }
    report.trials.push_back(trial);
  }
  report.win_rate = static_cast<double>(report.wins) / num_seeds;
  if (recovery_count > 0) report.mean_recovery = recovery_sum / recovery_count;
  return report;
}

nlohmann::json to_json(const SynthReport& r) {
  nlohmann::json spec = {{"num_users", r.spec.num_users},
                         {"num_items", r.spec.num_items},
                         {"num_topics", r.spec.num_topics},
                         {"mu1", r.spec.interest_mean},
                         {"sigma1_sq", r.spec.interest_variance},
                         {"mu2", r.spec.social_mean},
                         {"sigma2_sq", r.spec.social_variance},
                         {"interactions_per_user", r.spec.interactions_per_user},
                         {"edge_probability", r.spec.edge_probability},
                         {"seed", r.spec.seed}};
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& t : r.trials) {
    trials.push_back({{"seed", t.seed},
                      {"recovery_correlation", t.recovery ? nlohmann::json(*t.recovery) : nlohmann::json(nullptr)},
                      {"recovery_defined", t.recovery.has_value()},
                      {"recovery_cells", t.recovery_cells},
                      {"note", t.note},
                      {"compared", t.compared},
                      {"evaluated_groups", t.groups},
                      {"EucDist", {{kGameMethod, t.game_euclidean},
                                   {"Frequency", t.frequency_euclidean},
                                   {"FreGroup", t.fregroup_euclidean}}},
                      {"game_beats_frequency", t.game_wins}});
  }
  return {{"spec", spec},
          {"num_seeds", r.trials.size()},
          {"wins", r.wins},
          {"win_rate", r.win_rate},
          {"mean_recovery_correlation", r.mean_recovery ? nlohmann::json(*r.mean_recovery) : nlohmann::json(nullptr)},
          {"trials", trials}};
}

SyntheticSpec strong_interest_spec() {
  SyntheticSpec s;
  s.num_users = 400;
  s.num_items = 200;
  s.num_topics = 5;
  s.interest_mean = 0.0;
  s.interest_variance = 900.0;
  s.social_mean = -6.0;
  s.social_variance = 0.25;
  s.interactions_per_user = 20;
  s.edge_probability = 0.5;
  return s;
}

RunConfig strong_interest_config(RunConfig base) {
  base.convergence_threshold = 1e-6;
  return base;
}

}  // namespace grouprec
