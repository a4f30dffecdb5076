#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "hypiss/control.hpp"

namespace hypiss::cli {

/// A certificate as read back from disk. K is authoritative; S, W and c may be
/// absent for hand-entered certificates.
struct CertificateRecord {
    std::string status;
    double mu = 0.0;
    double alpha = 0.0;
    std::optional<double> epsilon;
    double chi = 1.0;
    linalg::DiagMatrix Q;
    linalg::Matrix K;
    linalg::SymMatrix gamma_hat;
    std::optional<linalg::DiagMatrix> S;
    std::optional<linalg::Matrix> W;
    std::optional<double> c;

    /// Throws linalg::DimensionError when shapes disagree with the plant.
    void check_against(const control::Plant& plant) const;
};

nlohmann::json certificate_to_json(const control::SynthesisCertificate& cert, const std::string& status);
CertificateRecord certificate_from_json(const nlohmann::json& doc);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::filesystem::path& path);

CertificateRecord load_certificate(const std::filesystem::path& path);

/// Hand-entered reference values: Q = diag(12.5, 82), K = [[−0.24, 0], [0.33, −0.08]], μ = 1, α = 0.5.
nlohmann::json reference_certificate();

} // namespace hypiss::cli
