#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "grouprec/cbn.hpp"
#include "grouprec/config.hpp"
#include "grouprec/dataset.hpp"
#include "grouprec/eval.hpp"
#include "grouprec/game.hpp"

namespace grouprec {

inline constexpr const char* kGameMethod = "Game";

/// Identifies which stage of a run failed.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::exception& cause, bool input_error)
      : std::runtime_error(stage + ": " + cause.what()), stage_(std::move(stage)), input_error_(input_error) {}
  const std::string& stage() const { return stage_; }
  bool input_error() const { return input_error_; }

 private:
  std::string stage_;
  bool input_error_;
};

struct PipelineResult {
  SplitDataset split;
  GroupSampling sampling;
  TrainResult<double> trained;
  NormalizedModel<double> normalized;
  std::vector<Equilibrium<double>> equilibria;  // one per group, same order
  EvalReport report;
};

/// split -> groups -> train -> per-group equilibrium -> evaluation of the
/// game recommender against Frequency, FreGroup and any `extra` methods.
PipelineResult run_pipeline(const InteractionDataset& ds, const RunConfig& cfg, const std::vector<Method>& extra = {});

/// Writes config.json, model.json, training.json, equilibria.json,
/// report.csv, report.json and curves.csv into `dir`.
void write_run_outputs(const PipelineResult& result, const RunConfig& cfg, const std::filesystem::path& dir);

/// Loads the configured files and applies the inactive-user filter.
InteractionDataset load_configured_dataset(const RunConfig& cfg, IngestStats* stats = nullptr);

struct SynthTrial {
  std::uint64_t seed = 0;
  /// Pearson(trained I, true I) over user-topic cells with interactions; empty
  /// when the true interest is near-constant, either side has no variance, or
  /// training failed. `note` says which.
  std::optional<double> recovery;
  std::string note;
  Index recovery_cells = 0;
  Index groups = 0;
  double game_euclidean = 0;
  double frequency_euclidean = 0;
  double fregroup_euclidean = 0;
  bool compared = false;  // false when the comparison run failed
  bool game_wins = false;
};

struct SynthReport {
  SyntheticSpec spec;
  std::vector<SynthTrial> trials;
  Index wins = 0;
  double win_rate = 0;
  std::optional<double> mean_recovery;
};

/// Parameter recovery on the full synthetic data. Training uses the
/// generating priors from `spec`, with optimizer settings from `cfg`.
/// Below this sample standard deviation the true interest counts as constant.
inline constexpr double kMinInterestSpread = 1e-2;

SynthTrial synthetic_recovery(const SyntheticData& data, const SyntheticSpec& spec, const RunConfig& cfg);

/// One oracle trial: recovery, then the game-vs-Frequency comparison on a
/// split of the same data.
SynthTrial run_synthetic_trial(const SyntheticSpec& spec, const RunConfig& cfg);

/// Runs `num_seeds` trials with seeds spec.seed, spec.seed + 1, ...
SynthReport run_synthetic_oracle(const SyntheticSpec& spec, const RunConfig& cfg, int num_seeds);

nlohmann::json to_json(const SynthReport& report);

/// Well-separated interests: each user locks onto one topic after its first
/// selection and rarely strays. Used for the ordering comparison.
SyntheticSpec strong_interest_spec();

/// Training settings for `strong_interest_spec`: the objective threshold is
/// tightened so SGD runs to the epoch budget.
RunConfig strong_interest_config(RunConfig base = {});

}  // namespace grouprec
