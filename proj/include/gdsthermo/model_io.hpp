#pragma once

// JSON model files and report serialization for the command-line tool.
// Complex numbers are stored as [re, im] pairs; matrices as row-major nested
// arrays.

#include "qdbc.hpp"

#include "json.hpp"

#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>

namespace gdsthermo {

using json = nlohmann::json;

/// Input-validation failure carrying the offending field path.
struct ModelError : std::runtime_error {
    explicit ModelError(const std::string& field, const std::string& what)
        : std::runtime_error("model field '" + field + "': " + what) {}
};

inline json mat_to_json(const Mat& M) {
    json rows = json::array();
    for (int i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(row);
    }
    return rows;
}

inline json vec_to_json(const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

inline json cvec_to_json(const CVec& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i)
        a.push_back(json::array({v(i).real(), v(i).imag()}));
    return a;
}

inline json cmat_to_json(const CMat& M) {
    json rows = json::array();
    for (int i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < M.cols(); ++j)
            row.push_back(json::array({M(i, j).real(), M(i, j).imag()}));
        rows.push_back(row);
    }
    return rows;
}

inline Mat json_to_mat(const json& j, const std::string& field, int rows,
                       int cols) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows)
        throw ModelError(field, "expected " + std::to_string(rows) + " rows");
    Mat M(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const auto& row = j[i];
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw ModelError(field + "[" + std::to_string(i) + "]",
                             "expected " + std::to_string(cols) + " numbers");
        for (int k = 0; k < cols; ++k) {
            if (!row[k].is_number())
                throw ModelError(field + "[" + std::to_string(i) + "][" +
                                     std::to_string(k) + "]",
                                 "expected a number");
            M(i, k) = row[k].get<double>();
        }
    }
    return M;
}

inline Vec json_to_vec(const json& j, const std::string& field, int size) {
    if (!j.is_array() || static_cast<int>(j.size()) != size)
        throw ModelError(field, "expected " + std::to_string(size) + " numbers");
    Vec v(size);
    for (int i = 0; i < size; ++i) {
        if (!j[i].is_number())
            throw ModelError(field + "[" + std::to_string(i) + "]",
                             "expected a number");
        v(i) = j[i].get<double>();
    }
    return v;
}

inline CVec json_to_cvec(const json& j, const std::string& field, int size) {
    if (!j.is_array() || static_cast<int>(j.size()) != size)
        throw ModelError(field,
                         "expected " + std::to_string(size) + " complex pairs");
    CVec v(size);
    for (int i = 0; i < size; ++i) {
        const auto& p = j[i];
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() ||
            !p[1].is_number())
            throw ModelError(field + "[" + std::to_string(i) + "]",
                             "expected a [re, im] pair");
        v(i) = Complex(p[0].get<double>(), p[1].get<double>());
    }
    return v;
}

/// Parsed model file: a detailed-balance thermal model, optionally with an
/// explicit effective Hamiltonian / linear term / Lindblad vectors.
struct ModelFile {
    QdbcSpec qdbc;
    std::optional<Mat> B_prime;
    std::optional<Vec> xi_prime;
    std::optional<std::vector<CVec>> lindblad_vectors;

    /// Semigroup spec with defaults filled in (B' = B, xi' = 0, canonical
    /// detailed-balance Lindblad vectors).
    GdsSpec to_gds() const {
        GdsSpec g;
        g.n = qdbc.thermal.n;
        g.hbar = qdbc.thermal.hbar;
        g.B_prime = B_prime.value_or(qdbc.thermal.B);
        g.xi_prime = xi_prime.value_or(Vec::Zero(2 * g.n));
        if (lindblad_vectors)
            g.lindblad_vectors = *lindblad_vectors;
        else if (!qdbc.diffusive)
            g.lindblad_vectors = build_lindblad_vectors(qdbc).vectors;
        return g;
    }
};

inline constexpr const char* kModelSchema = "gdsthermo-model-v1";

inline ModelFile parse_model(const json& j) {
    if (!j.is_object()) throw ModelError("<root>", "expected an object");
    if (j.contains("schema") && j["schema"] != kModelSchema)
        throw ModelError("schema", "unsupported schema tag");
    auto need = [&](const char* f) -> const json& {
        if (!j.contains(f)) throw ModelError(f, "missing required field");
        return j.at(f);
    };
    ModelFile m;
    const json& jn = need("n");
    if (!jn.is_number_integer() || jn.get<int>() < 1)
        throw ModelError("n", "expected a positive integer");
    const int n = jn.get<int>();
    m.qdbc.thermal.n = n;

    auto positive = [&](const char* f, double fallback,
                        bool required) -> double {
        if (!j.contains(f)) {
            if (required) throw ModelError(f, "missing required field");
            return fallback;
        }
        if (!j.at(f).is_number() || j.at(f).get<double>() <= 0.0)
            throw ModelError(f, "expected a positive number");
        return j.at(f).get<double>();
    };
    m.qdbc.thermal.hbar = positive("hbar", 1.0, false);
    m.qdbc.thermal.beta = positive("beta", 1.0, true);
    m.qdbc.thermal.B = json_to_mat(need("B"), "B", 2 * n, 2 * n);
    if ((m.qdbc.thermal.B - m.qdbc.thermal.B.transpose()).cwiseAbs().maxCoeff() >
        1e-10 * std::max(1.0, m.qdbc.thermal.B.cwiseAbs().maxCoeff()))
        throw ModelError("B", "expected a symmetric matrix");

    if (j.contains("regime")) {
        const auto r = j.at("regime").get<std::string>();
        if (r == "diffusive")
            m.qdbc.diffusive = true;
        else if (r != "thermal")
            throw ModelError("regime", "expected \"thermal\" or \"diffusive\"");
    }
    m.qdbc.couplings = json_to_vec(need("gamma"), "gamma", n);
    if (m.qdbc.couplings.minCoeff() <= 0.0)
        throw ModelError("gamma", "couplings must be positive");

    if (j.contains("B_prime")) {
        m.B_prime = json_to_mat(j.at("B_prime"), "B_prime", 2 * n, 2 * n);
        if ((*m.B_prime - m.B_prime->transpose()).cwiseAbs().maxCoeff() >
            1e-10 * std::max(1.0, m.B_prime->cwiseAbs().maxCoeff()))
            throw ModelError("B_prime", "expected a symmetric matrix");
    }
    if (j.contains("xi_prime"))
        m.xi_prime = json_to_vec(j.at("xi_prime"), "xi_prime", 2 * n);
    if (j.contains("lindblad_vectors")) {
        const auto& lv = j.at("lindblad_vectors");
        if (!lv.is_array() || lv.empty())
            throw ModelError("lindblad_vectors", "expected a non-empty array");
        std::vector<CVec> vs;
        for (size_t k = 0; k < lv.size(); ++k)
            vs.push_back(json_to_cvec(
                lv[k], "lindblad_vectors[" + std::to_string(k) + "]", 2 * n));
        m.lindblad_vectors = std::move(vs);
    }

    try {
        if (!m.qdbc.diffusive) {
            thermal_covariance(m.qdbc.thermal); // checks positive definiteness
        }
        m.qdbc.validate();
    } catch (const std::exception& e) {
        throw ModelError("B", e.what());
    }
    return m;
}

inline ModelFile load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("<file>", "cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ModelError("<file>", std::string("JSON parse error: ") + e.what());
    }
    return parse_model(j);
}

} // namespace gdsthermo
