#pragma once

#include <string>

#include "json.hpp"
#include "mint/interpolation.hpp"
#include "mint/measurement.hpp"
#include "mint/protocol.hpp"

namespace mint::io {

/// Shared wire format: complex numbers are [re, im], matrices row-major
/// nested arrays of those. Loaders throw IoError for any malformed
/// document, including matrices the target type rejects.

nlohmann::json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const Measurement& m);
nlohmann::json to_json(const ProductBasis& basis);
nlohmann::json to_json(const ProtocolTree& t);
nlohmann::json to_json(const CompletionFamily& family);
nlohmann::json to_json(const InterpolationResult& result);
nlohmann::json to_json(const InterpolationReport& report);

Measurement measurement_from_json(const nlohmann::json& doc);
ProductBasis basis_from_json(const nlohmann::json& doc);
ProtocolTree tree_from_json(const nlohmann::json& doc);
CompletionFamily family_from_json(const nlohmann::json& doc);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& doc);

}  // namespace mint::io
