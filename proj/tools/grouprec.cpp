// Command-line front end: ingest, run, synth, export-model.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "grouprec/config.hpp"
#include "grouprec/io.hpp"
#include "grouprec/pipeline.hpp"

namespace {

using namespace grouprec;

constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;

/// Flag overrides for RunConfig; unset flags leave the config untouched.
struct RunFlags {
  std::string config_file;
  std::string preset_name;
  std::optional<std::string> interactions, social, topics, output_dir;
  std::optional<int> num_topics, max_epochs, max_rounds;
  std::optional<Index> min_interactions, group_size, num_groups;
  std::optional<double> mu1, sigma1_sq, mu2, sigma2_sq, learning_rate, convergence_threshold, negative_ratio,
      train_fraction, min_density, eta1, eta2, n;
  std::optional<std::uint64_t> seed;

  void add_to(CLI::App* app, bool with_dataset) {
    app->add_option("--config", config_file, "JSON config file (keys are the snake_case flag names)")
        ->check(CLI::ExistingFile);
    app->add_option("--preset", preset_name, "Parameter preset: lastfm or delicious");
    if (with_dataset) {
      app->add_option("--interactions", interactions, "user<TAB>item<TAB>weight file");
      app->add_option("--social", social, "user<TAB>user file");
      app->add_option("--topics", topics, "item<TAB>topic_index file");
      app->add_option("--num-topics", num_topics, "Number of topics D");
      app->add_option("--min-interactions", min_interactions, "Drop users with fewer interactions");
    }
    app->add_option("--mu1", mu1, "Prior mean of inherent interest");
    app->add_option("--sigma1-sq", sigma1_sq, "Prior variance of inherent interest");
    app->add_option("--mu2", mu2, "Prior mean of social influence");
    app->add_option("--sigma2-sq", sigma2_sq, "Prior variance of social influence");
    app->add_option("--learning-rate", learning_rate, "SGD step size");
    app->add_option("--convergence-threshold", convergence_threshold, "Stop when the epoch objective moves less");
    app->add_option("--max-epochs", max_epochs, "Epoch budget");
    app->add_option("--negative-ratio", negative_ratio, "Negatives sampled per positive");
    app->add_option("--train-fraction", train_fraction, "Per-user training proportion");
    app->add_option("--group-size", group_size, "Members per group");
    app->add_option("--num-groups", num_groups, "Groups to sample");
    app->add_option("--min-density", min_density, "Minimum social density of a group");
    app->add_option("--eta1", eta1, "Cost trade-off weight");
    app->add_option("--eta2", eta2, "Utility trade-off weight");
    app->add_option("--n", n, "Cost exponent");
    app->add_option("--max-rounds", max_rounds, "Best-response round budget");
    app->add_option("--seed", seed, "Random seed (required)");
    app->add_option("--output-dir,--out", output_dir, "Output directory");
  }

  RunConfig resolve(RunConfig base = {}) const {
    nlohmann::json file;
    if (!config_file.empty()) file = read_json(config_file);
    std::string name = preset_name;
    if (name.empty() && file.is_object() && file.contains("preset")) name = file["preset"].get<std::string>();
    RunConfig c = name.empty() ? base : preset_over(base, name);
    if (!file.is_null()) c = merge_config(c, file);
    auto set = [](auto& field, const auto& flag) {
      if (flag) field = *flag;
    };
    set(c.interactions, interactions);
    set(c.social, social);
    set(c.topics, topics);
    set(c.output_dir, output_dir);
    set(c.num_topics, num_topics);
    set(c.max_epochs, max_epochs);
    set(c.max_rounds, max_rounds);
    set(c.min_interactions, min_interactions);
    set(c.group_size, group_size);
    set(c.num_groups, num_groups);
    set(c.mu1, mu1);
    set(c.sigma1_sq, sigma1_sq);
    set(c.mu2, mu2);
    set(c.sigma2_sq, sigma2_sq);
    set(c.learning_rate, learning_rate);
    set(c.convergence_threshold, convergence_threshold);
    set(c.negative_ratio, negative_ratio);
    set(c.train_fraction, train_fraction);
    set(c.min_density, min_density);
    set(c.eta1, eta1);
    set(c.eta2, eta2);
    set(c.n, n);
    if (seed) c.seed = *seed;
    return c;
  }

 private:
  // A preset replaces the dataset-specific fields of `base` only.
  static RunConfig preset_over(const RunConfig& base, const std::string& name) {
    RunConfig p = preset(name);
    RunConfig c = base;
    c.num_topics = p.num_topics;
    c.mu1 = p.mu1;
    c.sigma1_sq = p.sigma1_sq;
    c.mu2 = p.mu2;
    c.sigma2_sq = p.sigma2_sq;
    return c;
  }
};

void require_seed(const RunConfig& cfg) {
  if (!cfg.seed) throw InputError("--seed is required (flag or config key 'seed')");
}

void require_dataset(const RunConfig& cfg) {
  if (cfg.interactions.empty() || cfg.social.empty() || cfg.topics.empty())
    throw InputError("--interactions, --social and --topics are required");
}

int cmd_ingest(const std::string& interactions, const std::string& social, const std::string& topics,
               const std::string& tags, int num_topics, Index min_interactions, const std::string& out_dir) {
  const std::filesystem::path out(out_dir);
  std::filesystem::path topic_path = topics;
  if (!tags.empty()) {
    if (num_topics < 1) throw InputError("--tags needs --num-topics");
    auto assigned = assign_topics_from_tags(tags, num_topics);
    std::filesystem::create_directories(out);
    topic_path = out / "assigned_topics.tsv";
    write_topic_file(topic_path, assigned);
  }
  if (topic_path.empty()) throw InputError("one of --topics or --tags is required");

  IngestStats stats;
  const auto raw = load_hetrec({interactions, social, topic_path}, num_topics, &stats);
  const auto ds = filter_inactive(raw, min_interactions);
  write_canonical(ds, out);
  write_text(out / "id_map.json", id_mapping_json(ds).dump(2) + "\n");
  const nlohmann::json summary = {{"users", ds.num_users()},
                                  {"items", ds.num_items()},
                                  {"interactions", ds.interactions().size()},
                                  {"social_edges", ds.social_edges().size()},
                                  {"num_topics", ds.num_topics()},
                                  {"users_before_filter", raw.num_users()},
                                  {"nonpositive_weight_rows", stats.nonpositive_weight_rows},
                                  {"duplicate_interactions", stats.duplicate_interactions},
                                  {"items_without_topic", stats.items_without_topic},
                                  {"interactions_without_topic", stats.interactions_without_topic},
                                  {"unknown_topic_items", stats.unknown_topic_items},
                                  {"social_edges_dropped", stats.social_edges_dropped}};
  write_text(out / "summary.json", summary.dump(2) + "\n");
  std::cout << "users=" << ds.num_users() << " items=" << ds.num_items() << " interactions=" << ds.interactions().size()
            << " edges=" << ds.social_edges().size() << " topics=" << ds.num_topics()
            << " dropped_untopiced_interactions=" << stats.interactions_without_topic << '\n';
  return 0;
}

int cmd_run(const RunFlags& flags, const std::vector<std::string>& external) {
  const RunConfig cfg = flags.resolve();
  require_seed(cfg);
  require_dataset(cfg);
  cfg.validate();
  const auto ds = load_configured_dataset(cfg);
  std::vector<Method> extra;
  for (const auto& spec : external) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) throw InputError("--external expects NAME=PATH, got '" + spec + "'");
    extra.push_back(load_external_predictions(spec.substr(0, eq), spec.substr(eq + 1), ds.num_topics()));
  }
  const auto result = run_pipeline(ds, cfg, extra);
  write_run_outputs(result, cfg, cfg.output_dir);
  if (result.sampling.shortfall > 0)
    std::cerr << "warning: sampled " << result.sampling.groups.size() << " of " << cfg.num_groups
              << " groups before the attempt budget ran out\n";
  std::cout << report_csv(result.report);
  return 0;
}

int cmd_export_model(const RunFlags& flags, const std::string& out_path) {
  const RunConfig cfg = flags.resolve();
  require_seed(cfg);
  require_dataset(cfg);
  cfg.validate();
  const auto ds = load_configured_dataset(cfg);
  const auto parts = split(ds, cfg.train_fraction, *cfg.seed);
  const auto trained = train<double>(parts.train, cfg.hyperparams());
  auto doc = model_to_json(trained.model, cfg.hyperparams());
  doc["training"] = train_report_to_json(trained.report);
  doc["ids"] = id_mapping_json(ds);
  write_text(out_path, doc.dump(2) + "\n");
  std::cout << "epochs=" << trained.report.epochs_run << " objective=" << trained.report.final_objective
            << " converged=" << (trained.report.converged ? "true" : "false") << '\n';
  return 0;
}

struct SynthFlags {
  std::string scenario = "recovery";
  int num_seeds = 1;
  std::optional<Index> num_users, num_items, interactions_per_user;
  std::optional<int> num_topics;
  std::optional<double> edge_probability;

  void add_to(CLI::App* app) {
    app->add_option("--scenario", scenario, "recovery (default) or strong")
        ->check(CLI::IsMember({"recovery", "strong"}));
    app->add_option("--num-seeds", num_seeds, "Number of seeded trials")->check(CLI::PositiveNumber);
    app->add_option("--num-users", num_users, "Synthetic users");
    app->add_option("--num-items", num_items, "Synthetic items");
    app->add_option("--num-topics", num_topics, "Synthetic topics D");
    app->add_option("--interactions-per-user", interactions_per_user, "Interaction target per user");
    app->add_option("--edge-probability", edge_probability, "Friendship probability");
  }
};

int cmd_synth(const RunFlags& run_flags, const SynthFlags& sf) {
  SyntheticSpec spec = sf.scenario == "strong" ? strong_interest_spec() : SyntheticSpec{};
  RunConfig base = sf.scenario == "strong" ? strong_interest_config() : RunConfig{};
  // Prior flags describe the generating distribution; training reuses them.
  base.mu1 = spec.interest_mean;
  base.sigma1_sq = spec.interest_variance;
  base.mu2 = spec.social_mean;
  base.sigma2_sq = spec.social_variance;
  const RunConfig cfg = run_flags.resolve(base);
  require_seed(cfg);
  spec.interest_mean = cfg.mu1;
  spec.interest_variance = cfg.sigma1_sq;
  spec.social_mean = cfg.mu2;
  spec.social_variance = cfg.sigma2_sq;
  spec.seed = *cfg.seed;
  if (sf.num_users) spec.num_users = *sf.num_users;
  if (sf.num_items) spec.num_items = *sf.num_items;
  if (sf.num_topics) spec.num_topics = *sf.num_topics;
  if (sf.interactions_per_user) spec.interactions_per_user = *sf.interactions_per_user;
  if (sf.edge_probability) spec.edge_probability = *sf.edge_probability;
  spec.validate();
  cfg.validate();

  const auto report = run_synthetic_oracle(spec, cfg, sf.num_seeds);
  auto doc = to_json(report);
  doc["scenario"] = sf.scenario;
  doc["config"] = to_json(cfg);
  const std::filesystem::path out(cfg.output_dir);
  write_text(out / "synth_report.json", doc.dump(2) + "\n");
  std::cout << "seeds=" << report.trials.size() << " wins=" << report.wins << " win_rate=" << report.win_rate
            << " mean_recovery=";
  if (report.mean_recovery)
    std::cout << *report.mean_recovery;
  else
    std::cout << "undefined";
  std::cout << '\n';
  return 0;
}

template <typename F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const StageError& e) {
    std::cerr << "error in stage " << e.what() << '\n';
    return e.input_error() ? kExitInput : kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Game-theoretic group recommendation from implicit feedback"};
  app.require_subcommand(1);

  auto* ingest = app.add_subcommand("ingest", "Load, binarize and filter a dataset into canonical TSV files");
  std::string in_interactions, in_social, in_topics, in_tags, in_out = "dataset";
  int in_topics_count = 0;
  Index in_min = 5;
  ingest->add_option("--interactions", in_interactions, "user<TAB>item<TAB>weight file")->required();
  ingest->add_option("--social", in_social, "user<TAB>user file")->required();
  auto* topics_opt = ingest->add_option("--topics", in_topics, "item<TAB>topic_index file");
  ingest->add_option("--tags", in_tags, "user<TAB>item<TAB>tag file for the fallback topic assignment")
      ->excludes(topics_opt);
  ingest->add_option("--num-topics", in_topics_count, "Number of topics D (inferred from --topics if omitted)");
  ingest->add_option("--min-interactions", in_min, "Drop users with fewer interactions");
  ingest->add_option("--out", in_out, "Output directory");

  RunFlags run_flags;
  std::vector<std::string> external;
  auto* run = app.add_subcommand("run", "Split, group, train, solve the games and evaluate");
  run_flags.add_to(run, true);
  run->add_option("--external", external, "Extra method as NAME=predictions.json (repeatable)");

  RunFlags synth_run_flags;
  SynthFlags synth_flags;
  auto* synth = app.add_subcommand("synth", "Synthetic ground-truth oracle: recovery and ordering");
  synth_run_flags.add_to(synth, false);
  synth_flags.add_to(synth);

  RunFlags export_flags;
  std::string export_out = "model.json";
  auto* exp = app.add_subcommand("export-model", "Train on the training split and write the model JSON");
  export_flags.add_to(exp, true);
  exp->add_option("--model-out", export_out, "Model JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  if (*ingest)
    return guarded([&] {
      return cmd_ingest(in_interactions, in_social, in_topics, in_tags, in_topics_count, in_min, in_out);
    });
  if (*run) return guarded([&] { return cmd_run(run_flags, external); });
  if (*synth) return guarded([&] { return cmd_synth(synth_run_flags, synth_flags); });
  if (*exp) return guarded([&] { return cmd_export_model(export_flags, export_out); });
  return kExitInput;
}
