#pragma once

#include <string>

#include <json.hpp>

#include "obtl/inference.hpp"

namespace obtl {

/// Matrices are stored as {"rows": r, "cols": c, "data": [...]} with data in
/// row-major order; vectors as plain arrays.
nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);
nlohmann::json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const nlohmann::json& j);

nlohmann::json trained_obtl_to_json(const TrainedOBTL& model);
TrainedOBTL trained_obtl_from_json(const nlohmann::json& j);

nlohmann::json trained_obc_to_json(const TrainedOBC& model);
TrainedOBC trained_obc_from_json(const nlohmann::json& j);

void save_trained_obtl(const TrainedOBTL& model, const std::string& path);
TrainedOBTL load_trained_obtl(const std::string& path);

}  // namespace obtl
