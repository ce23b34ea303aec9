#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "jointsub/model.hpp"

namespace jointsub {

/// Whitespace-delimited text, one matrix row per line, 17 significant digits.
void write_matrix_text(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_text(const std::filesystem::path& path);

/// Field names: M, R, T, K, snr_db, kappa (number or list), true_angles,
/// n_burn, n_keep, n_imap, inner_sweeps, seed. Missing fields keep their
/// defaults; wrongly typed ones throw std::invalid_argument naming the field.
ScenarioConfig scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const ScenarioConfig& c);

/// Writes X_k (and H_true when present) as X<k>.txt / H<k>.txt next to a JSON
/// descriptor. Paths inside the descriptor are relative to its directory.
void write_dataset(const std::filesystem::path& descriptor, const DataSet& data);
DataSet read_dataset(const std::filesystem::path& descriptor);

}  // namespace jointsub
