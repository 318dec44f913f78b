#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "statetrace/csv.hpp"
#include "statetrace/errors.hpp"
#include "statetrace/lstm.hpp"

namespace statetrace {

namespace detail {

inline nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) {
            row.push_back(m(r, c));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty() || !j.front().is_array()) {
        throw ParseError("model: expected a 2-D numeric array");
    }
    const std::size_t rows = j.size();
    const std::size_t cols = j.front().size();
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const auto& row = j[r];
        if (!row.is_array() || row.size() != cols) {
            throw ParseError("model: ragged 2-D array");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            m(r, c) = row[c].get<double>();
        }
    }
    return m;
}

}  // namespace detail

inline nlohmann::json model_to_json(const ForecastModel& model) {
    nlohmann::json j;
    j["format_version"] = model.format_version;
    j["input_dim"] = model.input_dim;
    nlohmann::json hidden = nlohmann::json::array();
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& p : model.layers) {
        hidden.push_back(p.hidden_dim);
        layers.push_back({{"w_x", detail::matrix_to_json(p.w_x)},
                          {"w_h", detail::matrix_to_json(p.w_h)},
                          {"b", p.b}});
    }
    j["hidden_dims"] = std::move(hidden);
    j["layers"] = std::move(layers);
    j["w_out"] = detail::matrix_to_json(model.w_out);
    j["b_out"] = model.b_out;
    j["normalization"] = {{"mean", model.normalization.mean},
                          {"std", model.normalization.stddev}};
    return j;
}

inline void save_model(const ForecastModel& model, const std::filesystem::path& path) {
    validate_model(model);
    const nlohmann::json j = model_to_json(model);
    write_file_atomic(path, [&](std::ostream& out) { out << j.dump() << '\n'; });
}

inline ForecastModel model_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("format_version") ||
        !j["format_version"].is_number_integer()) {
        throw ParseError("model: missing format_version");
    }
    const int version = j["format_version"].get<int>();
    if (version != kModelFormatVersion) {
        throw VersionedFormatError("model: unsupported format_version " +
                                   std::to_string(version));
    }
    try {
        ForecastModel model;
        model.format_version = version;
        model.input_dim = j.at("input_dim").get<std::size_t>();
        std::size_t in_dim = model.input_dim;
        for (const auto& layer : j.at("layers")) {
            LstmLayerParams p;
            p.w_x = detail::matrix_from_json(layer.at("w_x"));
            p.w_h = detail::matrix_from_json(layer.at("w_h"));
            p.b = layer.at("b").get<std::vector<double>>();
            p.hidden_dim = p.w_h.cols();
            p.input_dim = in_dim;
            in_dim = p.hidden_dim;
            model.layers.push_back(std::move(p));
        }
        model.w_out = detail::matrix_from_json(j.at("w_out"));
        model.b_out = j.at("b_out").get<std::vector<double>>();
        const auto& norm = j.at("normalization");
        model.normalization.mean = norm.at("mean").get<std::vector<double>>();
        model.normalization.stddev = norm.at("std").get<std::vector<double>>();
        validate_model(model);
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("model: ") + e.what());
    }
}

inline ForecastModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model: ") + e.what());
    }
    return model_from_json(j);
}

}  // namespace statetrace
