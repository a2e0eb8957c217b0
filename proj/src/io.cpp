#include "grouprec/io.hpp"

#include <fstream>

namespace grouprec {

namespace {

std::vector<double> flatten(const Matrix<double>& m) { return {m.data(), m.data() + m.size()}; }

Matrix<double> unflatten(const nlohmann::json& values, Index rows, Index cols, const char* name) {
  if (!values.is_array() || static_cast<Index>(values.size()) != rows * cols)
    throw InputError(std::string("model JSON: '") + name + "' has the wrong size");
  Matrix<double> m(rows, cols);
  for (Index k = 0; k < rows * cols; ++k) m.data()[k] = values[static_cast<std::size_t>(k)].get<double>();
  return m;
}

}  // namespace

nlohmann::json to_json(const CbnHyperparams& hp) {
  return {{"mu1", hp.interest_mean},
          {"sigma1_sq", hp.interest_variance},
          {"mu2", hp.social_mean},
          {"sigma2_sq", hp.social_variance},
          {"learning_rate", hp.learning_rate},
          {"convergence_threshold", hp.convergence_threshold},
          {"max_epochs", hp.max_epochs},
          {"negative_ratio", hp.negative_ratio},
          {"seed", hp.seed}};
}

CbnHyperparams hyperparams_from_json(const nlohmann::json& j) {
  CbnHyperparams hp;
  hp.interest_mean = j.at("mu1").get<double>();
  hp.interest_variance = j.at("sigma1_sq").get<double>();
  hp.social_mean = j.at("mu2").get<double>();
  hp.social_variance = j.at("sigma2_sq").get<double>();
  hp.learning_rate = j.at("learning_rate").get<double>();
  hp.convergence_threshold = j.at("convergence_threshold").get<double>();
  hp.max_epochs = j.at("max_epochs").get<int>();
  hp.negative_ratio = j.at("negative_ratio").get<double>();
  hp.seed = j.at("seed").get<std::uint64_t>();
  return hp;
}

nlohmann::json model_to_json(const CbnModel<double>& model, const CbnHyperparams& hp) {
  return {{"num_users", model.num_users()},
          {"num_topics", model.num_topics()},
          {"hyperparameters", to_json(hp)},
          {"interest", flatten(model.interest)},
          {"social", flatten(model.social)},
          {"contribution", flatten(model.contribution)}};
}

CbnModel<double> model_from_json(const nlohmann::json& j, CbnHyperparams* hp) {
  try {
    const auto users = j.at("num_users").get<Index>();
    const auto topics = j.at("num_topics").get<Index>();
    if (users < 0 || topics < 1) throw InputError("model JSON: invalid dimensions");
    if (hp) *hp = hyperparams_from_json(j.at("hyperparameters"));
    return {unflatten(j.at("interest"), users, topics, "interest"), unflatten(j.at("social"), users, topics, "social"),
            unflatten(j.at("contribution"), users, topics, "contribution")};
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("model JSON: ") + e.what());
  }
}

nlohmann::json train_report_to_json(const TrainReport& report) {
  return {{"epochs_run", report.epochs_run},
          {"final_objective", report.final_objective},
          {"converged", report.converged},
          {"objective_trace", report.objective_trace}};
}

nlohmann::json equilibrium_to_json(const Equilibrium<double>& eq, const Group& group, int num_topics) {
  const auto ratios = recommend(eq, num_topics).ratios();
  return {{"group_id", eq.group_id},
          {"members", group.members},
          {"social_density", group.social_density()},
          {"strategies", eq.strategies},
          {"utilities", eq.utilities},
          {"ratios", std::vector<double>(ratios.begin(), ratios.end())},
          {"converged", eq.converged},
          {"rounds_used", eq.rounds_used}};
}

nlohmann::json id_mapping_json(const InteractionDataset& ds) {
  return {{"users", ds.user_ids()}, {"items", ds.item_ids()}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

}  // namespace grouprec
