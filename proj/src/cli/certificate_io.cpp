#include "hypiss/cli/certificate_io.hpp"

#include <cmath>
#include <fstream>

#include "hypiss/cli/config.hpp"

namespace hypiss::cli {

using nlohmann::json;

namespace {

json matrix_json(const linalg::Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

double real(const json& doc, const std::string& key) {
    if (!doc.contains(key)) throw SchemaError(key, "missing required key");
    if (!doc[key].is_number()) throw SchemaError(key, "expected a number");
    const double v = doc[key].get<double>();
    if (!std::isfinite(v)) throw SchemaError(key, "expected a finite number");
    return v;
}

linalg::Matrix matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) throw SchemaError(path, "expected a nonempty array of rows");
    std::vector<linalg::Vector> rows;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string rp = path + "[" + std::to_string(i) + "]";
        if (!j[i].is_array() || j[i].empty()) throw SchemaError(rp, "expected a nonempty array of numbers");
        linalg::Vector row;
        for (std::size_t k = 0; k < j[i].size(); ++k) {
            if (!j[i][k].is_number()) throw SchemaError(rp + "[" + std::to_string(k) + "]", "expected a number");
            row.push_back(j[i][k].get<double>());
        }
        if (!rows.empty() && row.size() != rows.front().size()) throw SchemaError(rp, "ragged row length");
        rows.push_back(std::move(row));
    }
    return linalg::Matrix::from_rows(rows);
}

/// Accepts a list of diagonal entries or a full matrix with zero off-diagonal.
linalg::DiagMatrix diagonal(const json& j, const std::string& path) {
    if (j.is_array() && !j.empty() && j[0].is_number()) {
        linalg::Vector d;
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (!j[i].is_number()) throw SchemaError(path + "[" + std::to_string(i) + "]", "expected a number");
            d.push_back(j[i].get<double>());
        }
        return linalg::DiagMatrix(d);
    }
    const linalg::Matrix m = matrix(j, path);
    if (!m.is_square()) throw SchemaError(path, "expected a square matrix");
    linalg::Vector d(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t k = 0; k < m.cols(); ++k) {
            if (i != k && m(i, k) != 0.0) throw SchemaError(path, "expected a diagonal matrix");
        }
        d[i] = m(i, i);
    }
    return linalg::DiagMatrix(d);
}

} // namespace

void CertificateRecord::check_against(const control::Plant& plant) const {
    const std::size_t n = plant.n();
    const std::size_t m = plant.m();
    auto fail = [](const std::string& what) { throw linalg::DimensionError("certificate/config mismatch: " + what); };
    if (Q.dim() != n) fail("Q has " + std::to_string(Q.dim()) + " entries, plant has n = " + std::to_string(n));
    if (K.rows() != m || K.cols() != n) fail("K must be " + std::to_string(m) + "x" + std::to_string(n));
    if (gamma_hat.dim() != n) fail("Gamma_hat must be " + std::to_string(n) + "x" + std::to_string(n));
    if (S && S->dim() != m) fail("S must have " + std::to_string(m) + " entries");
    if (W && (W->rows() != m || W->cols() != n)) fail("W must be " + std::to_string(m) + "x" + std::to_string(n));
}

json certificate_to_json(const control::SynthesisCertificate& cert, const std::string& status) {
    json margins = json::object();
    for (const auto& [label, value] : cert.margins) margins[label] = value;
    return json{{"status", status},
                {"mu", cert.mu},
                {"alpha", cert.alpha},
                {"epsilon", cert.epsilon},
                {"chi", 1.0},
                {"c", cert.c},
                {"K", matrix_json(cert.K)},
                {"Q", cert.Q.diagonal()},
                {"S", cert.S.diagonal()},
                {"W", matrix_json(cert.W)},
                {"Gamma_hat", matrix_json(cert.gamma_hat.full())},
                {"gamma", cert.iss.gamma},
                {"omega", cert.iss.omega},
                {"kappa", cert.iss.kappa},
                {"margins", margins}};
}

CertificateRecord certificate_from_json(const json& doc) {
    if (!doc.is_object()) throw SchemaError("<root>", "expected an object");
    CertificateRecord r;
    r.status = doc.contains("status") && doc["status"].is_string() ? doc["status"].get<std::string>() : "unknown";
    r.mu = real(doc, "mu");
    r.alpha = real(doc, "alpha");
    if (!(r.mu > 0.0)) throw SchemaError("mu", "must be positive");
    if (!(r.alpha > 0.0)) throw SchemaError("alpha", "must be positive");
    if (doc.contains("epsilon")) r.epsilon = real(doc, "epsilon");
    if (doc.contains("chi")) r.chi = real(doc, "chi");
    if (!doc.contains("Q")) throw SchemaError("Q", "missing required key");
    r.Q = diagonal(doc["Q"], "Q");
    if (!r.Q.is_positive()) throw SchemaError("Q", "must be positive");
    if (!doc.contains("K")) throw SchemaError("K", "missing required key");
    r.K = matrix(doc["K"], "K");
    if (!doc.contains("Gamma_hat")) throw SchemaError("Gamma_hat", "missing required key");
    const linalg::Matrix g = matrix(doc["Gamma_hat"], "Gamma_hat");
    if (!g.is_square()) throw SchemaError("Gamma_hat", "expected a square matrix");
    r.gamma_hat = linalg::SymMatrix::symmetrize(g);
    if (doc.contains("S")) r.S = diagonal(doc["S"], "S");
    if (doc.contains("W")) r.W = matrix(doc["W"], "W");
    if (doc.contains("c")) r.c = real(doc, "c");
    return r;
}

void write_json(const std::filesystem::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << doc.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError("<root>", std::string("invalid JSON in ") + path.string() + ": " + e.what());
    }
}

CertificateRecord load_certificate(const std::filesystem::path& path) { return certificate_from_json(read_json(path)); }

json reference_certificate() {
    return json{{"status", "reference"},
                {"mu", 1.0},
                {"alpha", 0.5},
                {"chi", 1.0},
                {"Q", {12.5, 82.0}},
                {"K", {{-0.24, 0.0}, {0.33, -0.08}}},
                {"Gamma_hat", {{4.07, 0.2}, {0.19, 36.3}}}};
}

} // namespace hypiss::cli
