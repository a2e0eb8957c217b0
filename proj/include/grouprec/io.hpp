#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "grouprec/cbn.hpp"
#include "grouprec/dataset.hpp"
#include "grouprec/game.hpp"

namespace grouprec {

nlohmann::json to_json(const CbnHyperparams& hp);
CbnHyperparams hyperparams_from_json(const nlohmann::json& j);

/// Dimensions, hyperparameters and the row-major I, S and pi matrices.
/// Doubles are written with round-trip precision.
nlohmann::json model_to_json(const CbnModel<double>& model, const CbnHyperparams& hp);
CbnModel<double> model_from_json(const nlohmann::json& j, CbnHyperparams* hp = nullptr);

nlohmann::json train_report_to_json(const TrainReport& report);

nlohmann::json equilibrium_to_json(const Equilibrium<double>& eq, const Group& group, int num_topics);

/// Dense index -> original id for users and items.
nlohmann::json id_mapping_json(const InteractionDataset& ds);

/// Writes `text` exactly (binary mode, no newline translation).
void write_text(const std::filesystem::path& path, const std::string& text);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace grouprec
