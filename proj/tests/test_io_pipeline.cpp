#include <doctest.h>

#include <cmath>
#include <set>

#include "grouprec/io.hpp"
#include "grouprec/pipeline.hpp"
#include "support.hpp"

using namespace grouprec;
using testing::read_file;
using testing::TempDir;

namespace {

RunConfig synthetic_run_config(std::uint64_t seed) {
  RunConfig cfg;
  cfg.num_topics = 5;
  cfg.mu1 = 0;
  cfg.sigma1_sq = 400;
  cfg.mu2 = -4;
  cfg.sigma2_sq = 0.25;
  cfg.num_groups = 20;
  cfg.max_epochs = 20;
  cfg.seed = seed;
  return cfg;
}

InteractionDataset synthetic_active(std::uint64_t seed) {
  return filter_inactive(generate_synthetic({.num_users = 120, .seed = seed}).dataset, 5);
}

}  // namespace

TEST_CASE("model JSON round-trips exactly") {
  Rng rng = make_rng(1);
  CbnModel<double> model{Matrix<double>(7, 3), Matrix<double>(7, 3), Matrix<double>(7, 3)};
  for (Index k = 0; k < 21; ++k) {
    model.interest.data()[k] = standard_normal(rng) * 1e3;
    model.social.data()[k] = standard_normal(rng) * 1e-7;
    model.contribution.data()[k] = uniform_unit(rng);
  }
  CbnHyperparams hp;
  hp.seed = 0xFFFFFFFFFFFFFFFFULL;
  hp.interest_mean = 0.1;
  const auto text = model_to_json(model, hp).dump();
  CbnHyperparams back_hp;
  const auto back = model_from_json(nlohmann::json::parse(text), &back_hp);
  CHECK((back.interest - model.interest).cwiseAbs().maxCoeff() <= 1e-15 * model.interest.cwiseAbs().maxCoeff());
  CHECK(back.interest == model.interest);
  CHECK(back.social == model.social);
  CHECK(back.contribution == model.contribution);
  CHECK(back_hp.seed == hp.seed);
  CHECK(back_hp.interest_mean == 0.1);

  auto broken = nlohmann::json::parse(text);
  broken["interest"].erase(0);
  CHECK_THROWS_AS(model_from_json(broken), InputError);
  CHECK_THROWS_AS(model_from_json(nlohmann::json::object()), InputError);
}

TEST_CASE("equilibrium JSON carries the game outcome") {
  Equilibrium<double> eq;
  eq.group_id = 3;
  eq.strategies = {1, 1, 0};
  eq.utilities = {0.1, 0.2, 0.3};
  eq.converged = true;
  eq.rounds_used = 2;
  const Group g{.id = 3, .members = {4, 8, 9}, .internal_edges = 2};
  const auto j = equilibrium_to_json(eq, g, 2);
  CHECK(j["group_id"] == 3);
  CHECK(j["members"] == nlohmann::json({4, 8, 9}));
  CHECK(j["ratios"][1].get<double>() == doctest::Approx(2.0 / 3));
  CHECK(j["social_density"].get<double>() == doctest::Approx(2.0 / 3));
  CHECK(j["converged"] == true);
  CHECK(j["rounds_used"] == 2);
}

TEST_CASE("config merge, presets and validation") {
  const auto lastfm = preset("lastfm");
  CHECK(lastfm.num_topics == 6);
  CHECK(lastfm.mu1 == 45);
  CHECK(lastfm.sigma1_sq == 70);
  CHECK(lastfm.mu2 == 12);
  CHECK(lastfm.sigma2_sq == 30);
  const auto delicious = preset("delicious");
  CHECK(delicious.num_topics == 10);
  CHECK(delicious.sigma1_sq == 75);
  CHECK(delicious.mu2 == 10);
  CHECK(delicious.sigma2_sq == 25);
  for (const auto& p : {lastfm, delicious}) {
    CHECK(p.learning_rate == 0.01);
    CHECK(p.convergence_threshold == 0.001);
    CHECK(p.train_fraction == 0.7);
    CHECK(p.eta1 == 0.6);
    CHECK(p.eta2 == 0.4);
    CHECK(p.min_density == 0.25);
  }
  CHECK_THROWS_AS(preset("movielens"), InputError);

  const auto merged = merge_config(RunConfig{}, {{"eta1", 0.3}, {"seed", 9}, {"preset", "lastfm"}});
  CHECK(merged.eta1 == 0.3);
  CHECK(merged.seed == 9u);
  CHECK_THROWS_AS(merge_config(RunConfig{}, {{"etta1", 0.3}}), InputError);
  CHECK_THROWS_AS(merge_config(RunConfig{}, {{"eta1", "high"}}), InputError);

  const auto echoed = merge_config(RunConfig{}, to_json(lastfm));
  CHECK(to_json(echoed) == to_json(lastfm));

  RunConfig bad;
  bad.train_fraction = 1;
  CHECK_THROWS_AS(bad.validate(), InputError);
  bad = {};
  bad.group_size = 1;
  CHECK_THROWS_AS(bad.validate(), InputError);
}

TEST_CASE("shipped config files match the presets") {
  for (const char* name : {"lastfm", "delicious"}) {
    const auto path = std::filesystem::path(GROUPREC_SOURCE_DIR) / "configs" / (std::string(name) + ".json");
    CHECK(to_json(merge_config(RunConfig{}, read_json(path))) == to_json(preset(name)));
  }
}

TEST_CASE("pipeline evaluates the game against both baselines") {
  const auto ds = synthetic_active(3);
  const auto cfg = synthetic_run_config(3);
  const auto r = run_pipeline(ds, cfg);
  CHECK(r.report.methods == std::vector<std::string>{kGameMethod, "Frequency", "FreGroup"});
  CHECK(r.equilibria.size() == r.sampling.groups.size());
  CHECK(r.report.evaluated_groups > 0);
  for (const auto& row : r.report.means)
    for (double v : row) {
      CHECK(std::isfinite(v));
      CHECK(v >= 0.0);
    }
  for (const auto& eq : r.equilibria)
    if (eq.converged) {
      const auto players = gather_players(r.sampling.groups[static_cast<std::size_t>(eq.group_id)], r.normalized);
      CHECK(is_nash_equilibrium<double>(eq.strategies, players, cfg.game()));
    }
}

TEST_CASE("pipeline stage errors name the stage") {
  const auto ds = synthetic_active(4);
  auto cfg = synthetic_run_config(4);
  cfg.group_size = ds.num_users() + 1;
  try {
    run_pipeline(ds, cfg);
    FAIL("expected a stage error");
  } catch (const StageError& e) {
    CHECK(e.stage() == "groups");
    CHECK(e.input_error());
  }
  cfg = synthetic_run_config(4);
  cfg.seed.reset();
  CHECK_THROWS_AS(run_pipeline(ds, cfg), StageError);
}

TEST_CASE("a single topic forces every method to the same answer") {
  auto data = generate_synthetic({.num_users = 60, .num_topics = 1, .seed = 5}).dataset;
  data = filter_inactive(data, 5);
  auto cfg = synthetic_run_config(5);
  cfg.num_topics = 1;
  const auto r = run_pipeline(data, cfg);
  for (const auto& row : r.report.means)
    for (double v : row) CHECK(v == 0.0);
  for (const auto& g : r.report.groups)
    for (const auto& p : g.predictions) CHECK(p[0] == 1.0);
}

TEST_CASE("run outputs are written once and reproducibly") {
  const auto ds = synthetic_active(6);
  const auto cfg = synthetic_run_config(6);
  TempDir a("run_a"), b("run_b");
  write_run_outputs(run_pipeline(ds, cfg), cfg, a.path());
  write_run_outputs(run_pipeline(ds, cfg), cfg, b.path());
  std::set<std::string> names;
  for (const auto& entry : std::filesystem::directory_iterator(a.path())) names.insert(entry.path().filename().string());
  CHECK(names == std::set<std::string>{"config.json", "curves.csv", "equilibria.json", "model.json", "report.csv",
                                       "report.json", "training.json"});
  for (const auto& name : names) CHECK(read_file(a / name) == read_file(b / name));

  const auto echoed = read_json(a / "config.json");
  CHECK(echoed == to_json(cfg));
  CHECK_FALSE(read_json(a / "report.json").contains("config"));
  const auto model = model_from_json(read_json(a / "model.json"));
  CHECK(model.num_users() == ds.num_users());
}

TEST_CASE("synthetic oracle report schema") {
  SyntheticSpec spec;
  spec.num_users = 80;
  spec.seed = 10;
  RunConfig cfg;
  cfg.num_groups = 10;
  cfg.max_epochs = 10;
  const auto one = run_synthetic_oracle(spec, cfg, 1);
  CHECK(one.trials.size() == 1);
  const auto three = run_synthetic_oracle(spec, cfg, 3);
  CHECK(three.trials.size() == 3);
  CHECK(three.win_rate == doctest::Approx(static_cast<double>(three.wins) / 3));
  CHECK(three.trials[2].seed == 12);
  const auto j = to_json(three);
  for (const char* key : {"wins", "win_rate", "mean_recovery_correlation", "trials", "spec"}) CHECK(j.contains(key));
  CHECK(j["trials"][0].contains("recovery_correlation"));
  CHECK(j["trials"][0]["recovery_defined"] == true);
  CHECK_THROWS_AS(run_synthetic_oracle(spec, cfg, 0), InputError);
}

TEST_CASE("near-constant true interest leaves recovery undefined") {
  SyntheticSpec spec;
  spec.interest_variance = 1e-6;
  spec.seed = 1;
  const auto report = run_synthetic_oracle(spec, RunConfig{}, 1);
  CHECK_FALSE(report.trials[0].recovery.has_value());
  CHECK(report.trials[0].note.find("near-constant") != std::string::npos);
  CHECK_FALSE(report.mean_recovery.has_value());
  CHECK(to_json(report)["trials"][0]["recovery_correlation"].is_null());
}
