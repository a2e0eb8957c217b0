#include "grouprec/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

namespace grouprec {

namespace {

Eigen::VectorXd topic_counts(const std::vector<Index>& items, const InteractionDataset& ds) {
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(ds.num_topics());
  for (Index j : items) counts(ds.topic_of(j)) += 1.0;
  return counts;
}

std::vector<std::vector<Index>> member_items(const Group& group, const InteractionDataset& ds) {
  const auto by_user = ds.items_by_user();
  std::vector<std::vector<Index>> out;
  for (Index u : group.members) {
    if (u < 0 || u >= ds.num_users()) throw InputError("group member outside the dataset");
    out.push_back(by_user[static_cast<std::size_t>(u)]);
  }
  return out;
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

GroundTruth ground_truth_distribution(const Group& group, const InteractionDataset& test) {
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(test.num_topics());
  for (const auto& items : member_items(group, test)) counts += topic_counts(items, test);
  if (counts.sum() == 0) return {TopicDistribution::uniform(test.num_topics()), true};
  return {TopicDistribution::from_counts(counts), false};
}

TopicDistribution frequency_baseline(const Group& group, const InteractionDataset& train) {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(train.num_topics());
  const auto items = member_items(group, train);
  for (const auto& member : items) mean += TopicDistribution::from_counts(topic_counts(member, train)).ratios();
  return TopicDistribution::from_counts(mean);
}

TopicDistribution fregroup_baseline(const Group& group, const InteractionDataset& train) {
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(train.num_topics());
  for (const auto& member : member_items(group, train)) counts += topic_counts(member, train);
  return TopicDistribution::from_counts(counts);
}

Method load_external_predictions(const std::string& name, const std::filesystem::path& path, int num_topics) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw InputError(path.string() + ": expected an object of group id -> ratios");

  auto table = std::make_shared<std::map<Index, TopicDistribution>>();
  for (const auto& [key, value] : doc.items()) {
    Index id = 0;
    try {
      std::size_t used = 0;
      id = std::stoll(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw InputError(path.string() + ": group id '" + key + "' is not an integer");
    }
    if (!value.is_array() || static_cast<int>(value.size()) != num_topics)
      throw InputError(path.string() + ": group " + key + " needs " + std::to_string(num_topics) + " ratios");
    Eigen::VectorXd ratios(num_topics);
    for (int k = 0; k < num_topics; ++k) {
      ratios(k) = value[static_cast<std::size_t>(k)].get<double>();
      if (!(ratios(k) >= 0)) throw InputError(path.string() + ": group " + key + " has a negative ratio");
    }
    (*table)[id] = TopicDistribution::from_counts(ratios);
  }
  return {name, [table, name](const Group& g) {
            const auto it = table->find(g.id);
            if (it == table->end())
              throw InputError("external method " + name + " has no prediction for group " + std::to_string(g.id));
            return it->second;
          }};
}

const MetricValues& EvalReport::mean_of(const std::string& method) const {
  const auto it = std::find(methods.begin(), methods.end(), method);
  if (it == methods.end()) throw InputError("no method named " + method);
  return means[static_cast<std::size_t>(it - methods.begin())];
}

EvalReport run_experiment(const InteractionDataset& test, const std::vector<Group>& groups,
                          const std::vector<Method>& methods, const nlohmann::json& config) {
  if (methods.empty()) throw InputError("no methods to evaluate");
  EvalReport report;
  report.num_topics = test.num_topics();
  report.config = config;
  for (const auto& m : methods) report.methods.push_back(m.name);
  report.means.assign(methods.size(), MetricValues{});

  for (const auto& group : groups) {
    GroupEvaluation ge;
    ge.group_id = group.id;
    auto truth = ground_truth_distribution(group, test);
    ge.truth = truth.distribution;
    ge.excluded = truth.excluded;
    for (const auto& m : methods) {
      auto prediction = m.predict(group);
      if (prediction.size() != test.num_topics())
        throw InputError("method " + m.name + " predicted the wrong number of topics");
      MetricValues values{};
      for (std::size_t k = 0; k < kAllMetrics.size(); ++k) values[k] = distance(kAllMetrics[k], prediction, ge.truth);
      ge.predictions.push_back(std::move(prediction));
      ge.distances.push_back(values);
    }
    if (!ge.excluded) {
      ++report.evaluated_groups;
      for (std::size_t m = 0; m < methods.size(); ++m)
        for (std::size_t k = 0; k < kAllMetrics.size(); ++k) report.means[m][k] += ge.distances[m][k];
    }
    report.groups.push_back(std::move(ge));
  }
  if (report.evaluated_groups == 0) throw InputError("no group has test interactions to evaluate against");
  for (auto& row : report.means)
    for (auto& v : row) v /= static_cast<double>(report.evaluated_groups);
  return report;
}

std::string report_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "method";
  for (Metric m : kAllMetrics) out << ',' << metric_name(m);
  out << '\n';
  for (std::size_t i = 0; i < report.methods.size(); ++i) {
    out << report.methods[i];
    for (double v : report.means[i]) out << ',' << format_value(v);
    out << '\n';
  }
  return out.str();
}

nlohmann::json report_json(const EvalReport& report) {
  nlohmann::json doc;
  doc["config"] = report.config;
  doc["num_topics"] = report.num_topics;
  doc["evaluated_groups"] = report.evaluated_groups;
  doc["total_groups"] = report.groups.size();
  auto& means = doc["means"] = nlohmann::json::object();
  for (std::size_t i = 0; i < report.methods.size(); ++i) {
    auto& row = means[report.methods[i]];
    for (std::size_t k = 0; k < kAllMetrics.size(); ++k) row[std::string(metric_name(kAllMetrics[k]))] = report.means[i][k];
  }
  auto& groups = doc["groups"] = nlohmann::json::array();
  for (const auto& g : report.groups) {
    nlohmann::json entry;
    entry["group_id"] = g.group_id;
    entry["excluded"] = g.excluded;
    entry["truth"] = std::vector<double>(g.truth.ratios().begin(), g.truth.ratios().end());
    for (std::size_t i = 0; i < report.methods.size(); ++i) {
      auto& m = entry["methods"][report.methods[i]];
      const auto& r = g.predictions[i].ratios();
      m["predicted"] = std::vector<double>(r.begin(), r.end());
      for (std::size_t k = 0; k < kAllMetrics.size(); ++k)
        m["distances"][std::string(metric_name(kAllMetrics[k]))] = g.distances[i][k];
    }
    groups.push_back(std::move(entry));
  }
  return doc;
}

std::string curves_csv(const EvalReport& report) {
  const int topics = report.num_topics;
  Eigen::VectorXd real = Eigen::VectorXd::Zero(topics);
  std::vector<Eigen::VectorXd> predicted(report.methods.size(), Eigen::VectorXd::Zero(topics));
  for (const auto& g : report.groups) {
    if (g.excluded) continue;
    real += g.truth.ratios();
    for (std::size_t i = 0; i < predicted.size(); ++i) predicted[i] += g.predictions[i].ratios();
  }
  const double n = static_cast<double>(std::max<Index>(1, report.evaluated_groups));
  std::ostringstream out;
  out << "topic_index,real,predicted,method\n";
  for (std::size_t i = 0; i < report.methods.size(); ++i)
    for (int k = 0; k < topics; ++k)
      out << k << ',' << format_value(real(k) / n) << ',' << format_value(predicted[i](k) / n) << ','
          << report.methods[i] << '\n';
  return out.str();
}

}  // namespace grouprec
