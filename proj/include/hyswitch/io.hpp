#pragma once

#include <string>

#include <json.hpp>

#include "hyswitch/errors.hpp"
#include "hyswitch/model.hpp"

namespace hyswitch {

using Json = nlohmann::json;

/// Raised for malformed or out-of-range configuration values.
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// Decimal rendering with 12 significant digits.
std::string format_number(double x);
/// x rounded to 12 significant digits, for JSON output. Non-finite values
/// map to null.
Json json_number(double x);
Json json_vector(const Vector& v);

Matrix parse_matrix(const Json& j, const std::string& what);
Vector parse_vector(const Json& j, const std::string& what);

/// Model section of a config:
///   {"fitness": [[w_1^1, ..., w_1^n], ...],            one row per genotype
///    "generator": {"type": "constant", "matrix": [[...], ...]}
///               | {"type": "affine", "basis": [Q^(1), ..., Q^(m)]}}
/// Only the shape is checked here; validate_model() does the rest.
ModelSpec parse_model(const Json& j);
Json model_to_json(const ModelSpec& spec);

} // namespace hyswitch
