#ifndef CONDGEO_SERIALIZE_HPP
#define CONDGEO_SERIALIZE_HPP

#include <string>

#include <json.hpp>

#include "condgeo/pipeline.hpp"

namespace condgeo {

/// Shortest decimal string that round-trips the double bit for bit.
std::string double_to_string(double v);
double string_to_double(const std::string& s);

/// Matrix as a row-major array of decimal strings plus its shape.
nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);

nlohmann::json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const nlohmann::json& j);

/// `condgeo.pipeline.v1` document; numbers serialize as decimal strings so
/// that save/load round-trips are bit stable.
nlohmann::json pipeline_to_json(const Pipeline& pipeline);
Pipeline pipeline_from_json(const nlohmann::json& j);

void save_pipeline(const std::string& path, const Pipeline& pipeline);
Pipeline load_pipeline(const std::string& path);

}  // namespace condgeo

#endif  // CONDGEO_SERIALIZE_HPP
