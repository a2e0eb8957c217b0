#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "grouprec/dataset.hpp"
#include "grouprec/distribution.hpp"
#include "grouprec/metrics.hpp"

namespace grouprec {

struct GroundTruth {
  TopicDistribution distribution;
  bool excluded = false;  // group had no test interactions
};

/// Pooled topic histogram of the members' test interactions.
GroundTruth ground_truth_distribution(const Group& group, const InteractionDataset& test);

/// Mean of the members' individual topic-frequency distributions.
TopicDistribution frequency_baseline(const Group& group, const InteractionDataset& train);

/// Topic frequencies of the members' pooled interactions.
TopicDistribution fregroup_baseline(const Group& group, const InteractionDataset& train);

/// A recommendation method under evaluation.
struct Method {
  std::string name;
  std::function<TopicDistribution(const Group&)> predict;
};

/// Reads {"<group id>": [ratios...], ...} and wraps it as a method. Groups
/// missing from the file raise InputError when predicted.
Method load_external_predictions(const std::string& name, const std::filesystem::path& path, int num_topics);

using MetricValues = std::array<double, kAllMetrics.size()>;

struct GroupEvaluation {
  Index group_id = 0;
  bool excluded = false;
  TopicDistribution truth;
  std::vector<TopicDistribution> predictions;  // per method
  std::vector<MetricValues> distances;         // per method
};

struct EvalReport {
  std::vector<std::string> methods;
  std::vector<MetricValues> means;  // per method, averaged over non-excluded groups
  std::vector<GroupEvaluation> groups;
  Index evaluated_groups = 0;
  int num_topics = 0;
  nlohmann::json config;

  const MetricValues& mean_of(const std::string& method) const;
};

EvalReport run_experiment(const InteractionDataset& test, const std::vector<Group>& groups,
                          const std::vector<Method>& methods, const nlohmann::json& config = {});

/// Rows are methods, columns the six metrics.
std::string report_csv(const EvalReport& report);
nlohmann::json report_json(const EvalReport& report);
/// Mean per-topic real vs predicted ratios over evaluated groups, columns
/// topic_index, real, predicted, method.
std::string curves_csv(const EvalReport& report);

}  // namespace grouprec
