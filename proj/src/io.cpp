#include "hyswitch/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "hyswitch/errors.hpp"

namespace hyswitch {

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

Json json_number(double x) {
    if (!std::isfinite(x))
        return nullptr;
    return std::strtod(format_number(x).c_str(), nullptr);
}

Json json_vector(const Vector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(json_number(v[i]));
    return out;
}

Vector parse_vector(const Json& j, const std::string& what) {
    if (!j.is_array() || j.empty())
        throw ConfigError(what + ": expected a non-empty array of numbers");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number())
            throw ConfigError(what + ": entry " + std::to_string(i + 1) + " is not a number");
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return v;
}

Matrix parse_matrix(const Json& j, const std::string& what) {
    if (!j.is_array() || j.empty())
        throw ConfigError(what + ": expected a non-empty array of rows");
    const auto rows = j.size();
    const auto cols = parse_vector(j[0], what + " row 1").size();
    Matrix m(static_cast<Eigen::Index>(rows), cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const Vector row = parse_vector(j[r], what + " row " + std::to_string(r + 1));
        if (row.size() != cols)
            throw ConfigError(what + ": rows have different lengths");
        m.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    return m;
}

ModelSpec parse_model(const Json& j) {
    if (!j.is_object())
        throw ConfigError("model: expected an object");
    if (!j.contains("fitness"))
        throw ConfigError("model: missing 'fitness'");
    if (!j.contains("generator") || !j["generator"].is_object())
        throw ConfigError("model: missing 'generator' object");
    ModelSpec spec;
    spec.landscape = FitnessLandscape(parse_matrix(j["fitness"], "model.fitness"));
    const auto& g = j["generator"];
    const std::string type = g.value("type", "constant");
    if (type == "constant") {
        if (!g.contains("matrix"))
            throw ConfigError("model.generator: missing 'matrix'");
        spec.generator = ConstantGenerator{parse_matrix(g["matrix"], "model.generator.matrix")};
    } else if (type == "affine") {
        if (!g.contains("basis") || !g["basis"].is_array())
            throw ConfigError("model.generator: missing 'basis' array");
        AffineGenerator a;
        for (std::size_t i = 0; i < g["basis"].size(); ++i)
            a.basis.push_back(parse_matrix(g["basis"][i], "model.generator.basis[" + std::to_string(i + 1) + "]"));
        spec.generator = std::move(a);
    } else {
        throw ConfigError("model.generator.type must be 'constant' or 'affine'");
    }
    return spec;
}

namespace {

Json matrix_to_json(const Matrix& m) {
    Json out = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        out.push_back(json_vector(m.row(r).transpose()));
    return out;
}

} // namespace

Json model_to_json(const ModelSpec& spec) {
    Json g;
    if (spec.generator.is_constant()) {
        g["type"] = "constant";
        g["matrix"] = matrix_to_json(spec.generator.constant());
    } else {
        g["type"] = "affine";
        g["basis"] = Json::array();
        for (const auto& b : spec.generator.basis())
            g["basis"].push_back(matrix_to_json(b));
    }
    return Json{{"fitness", matrix_to_json(spec.landscape.table())}, {"generator", g}};
}

} // namespace hyswitch
