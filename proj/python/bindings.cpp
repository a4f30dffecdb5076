#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hypiss/control.hpp"
#include "hypiss/pde.hpp"

namespace py = pybind11;
using namespace hypiss;

namespace {

using Rows = std::vector<std::vector<double>>;

linalg::Matrix to_matrix(const Rows& rows) { return linalg::Matrix::from_rows(rows); }

py::array_t<double> to_array(const linalg::Matrix& m) {
    py::array_t<double> a({m.rows(), m.cols()});
    auto v = a.mutable_unchecked<2>();
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t k = 0; k < m.cols(); ++k) v(i, k) = m(i, k);
    return a;
}

py::array_t<double> to_array(const std::vector<double>& x) {
    py::array_t<double> a(x.size());
    std::copy(x.begin(), x.end(), a.mutable_data());
    return a;
}

py::array_t<double> to_array(const std::vector<linalg::Vector>& rows, std::size_t cols) {
    py::array_t<double> a({rows.size(), cols});
    auto v = a.mutable_unchecked<2>();
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t k = 0; k < cols; ++k) v(i, k) = rows[i][k];
    return a;
}

pde::Phase phase_of(const std::string& s) {
    if (s == "sin") return pde::Phase::Sin;
    if (s == "cos") return pde::Phase::Cos;
    throw py::value_error("phase must be 'sin' or 'cos'");
}

py::dict margins_dict(const std::vector<std::pair<std::string, double>>& margins) {
    py::dict d;
    for (const auto& [label, value] : margins) d[py::str(label)] = value;
    return d;
}

} // namespace

PYBIND11_MODULE(_hypiss, m) {
    m.doc() = "Saturated boundary control synthesis, verification and simulation for linear hyperbolic systems.";

    py::register_exception<linalg::DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<pde::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<pde::BlowUpError>(m, "BlowUpError", PyExc_RuntimeError);

    py::class_<control::Plant>(m, "Plant")
        .def(py::init([](const std::vector<double>& lambda, const Rows& H, const Rows& B, const Rows& N,
                         const std::vector<double>& u_max) {
                 control::Plant p{linalg::DiagMatrix(lambda), to_matrix(H), to_matrix(B), to_matrix(N), u_max};
                 p.validate();
                 return p;
             }),
             py::arg("lambda_"), py::arg("H"), py::arg("B"), py::arg("N"), py::arg("u_max"))
        .def_static("reference", &control::reference_plant)
        .def_property_readonly("lambda_", [](const control::Plant& p) { return to_array(p.lambda.diagonal()); })
        .def_property_readonly("H", [](const control::Plant& p) { return to_array(p.H); })
        .def_property_readonly("B", [](const control::Plant& p) { return to_array(p.B); })
        .def_property_readonly("N", [](const control::Plant& p) { return to_array(p.N); })
        .def_property_readonly("u_max", [](const control::Plant& p) { return to_array(p.u_max); })
        .def_property_readonly("n", &control::Plant::n)
        .def_property_readonly("m", &control::Plant::m)
        .def_property_readonly("q", &control::Plant::q);

    m.def("reference_gain", [] { return to_array(control::reference_gain()); });

    m.def("saturate", [](const std::vector<double>& u, const std::vector<double>& u_max) {
        return to_array(control::saturate(u, u_max));
    });
    m.def("deadzone", [](const std::vector<double>& u, const std::vector<double>& u_max) {
        return to_array(control::deadzone(u, u_max));
    });
    m.def("sector_value", [](const std::vector<double>& nu, const std::vector<double>& u_max,
                             const std::vector<double>& T) {
        return control::sector_value(nu, u_max, linalg::DiagMatrix(T));
    });
    m.def("closed_loop_matrix", [](const control::Plant& p, const Rows& K) {
        return to_array(control::closed_loop_matrix(p, to_matrix(K)));
    });

    py::class_<control::IssCoefficients>(m, "IssCoefficients")
        .def_readonly("omega", &control::IssCoefficients::omega)
        .def_readonly("kappa", &control::IssCoefficients::kappa)
        .def_readonly("gamma", &control::IssCoefficients::gamma);

    m.def(
        "iss_coefficients",
        [](const std::vector<double>& P, double mu, double alpha, double chi) {
            return control::iss_coefficients(linalg::DiagMatrix(P), mu, alpha, chi);
        },
        py::arg("P"), py::arg("mu"), py::arg("alpha"), py::arg("chi") = 1.0);

    py::class_<control::SynthesisCertificate>(m, "Certificate")
        .def_property_readonly("K", [](const control::SynthesisCertificate& c) { return to_array(c.K); })
        .def_property_readonly("Q", [](const control::SynthesisCertificate& c) { return to_array(c.Q.diagonal()); })
        .def_property_readonly("S", [](const control::SynthesisCertificate& c) { return to_array(c.S.diagonal()); })
        .def_property_readonly("W", [](const control::SynthesisCertificate& c) { return to_array(c.W); })
        .def_property_readonly("gamma_hat",
                               [](const control::SynthesisCertificate& c) { return to_array(c.gamma_hat.full()); })
        .def_property_readonly("P", [](const control::SynthesisCertificate& c) { return to_array(c.P().diagonal()); })
        .def_readonly("mu", &control::SynthesisCertificate::mu)
        .def_readonly("alpha", &control::SynthesisCertificate::alpha)
        .def_readonly("c", &control::SynthesisCertificate::c)
        .def_readonly("iss", &control::SynthesisCertificate::iss)
        .def_property_readonly("margins",
                               [](const control::SynthesisCertificate& c) { return margins_dict(c.margins); })
        .def_property_readonly("min_margin", &control::SynthesisCertificate::min_margin);

    py::class_<control::SynthesisResult>(m, "SynthesisResult")
        .def_property_readonly("status",
                               [](const control::SynthesisResult& r) { return std::string(sdp::to_string(r.status)); })
        .def_readonly("certificate", &control::SynthesisResult::certificate)
        .def_property_readonly("phase1_slack", [](const control::SynthesisResult& r) { return r.solution.phase1_slack; })
        .def_property_readonly("feasible", [](const control::SynthesisResult& r) { return r.solution.ok(); });

    m.def(
        "synthesize",
        [](const control::Plant& p, double mu, double alpha, double epsilon) {
            control::SynthesisOptions o;
            o.epsilon = epsilon;
            py::gil_scoped_release release;
            return control::synthesize(p, mu, alpha, o);
        },
        py::arg("plant"), py::arg("mu"), py::arg("alpha"), py::arg("epsilon") = 1e-6);

    m.def(
        "grid_search",
        [](const control::Plant& p, const std::vector<double>& mu_grid, const std::vector<double>& alpha_grid,
           double epsilon, unsigned workers) {
            control::GridOptions o;
            o.synthesis.epsilon = epsilon;
            o.workers = workers;
            control::FeasibilityMap map;
            {
                py::gil_scoped_release release;
                map = control::grid_search(p, mu_grid, alpha_grid, o);
            }
            py::list cells;
            for (const auto& c : map.cells) {
                py::dict d;
                d["mu"] = c.mu;
                d["alpha"] = c.alpha;
                d["status"] = std::string(sdp::to_string(c.status));
                d["c"] = c.c ? py::object(py::float_(*c.c)) : py::none();
                d["gamma"] = c.gamma ? py::object(py::float_(*c.gamma)) : py::none();
                cells.append(d);
            }
            py::dict out;
            out["cells"] = cells;
            out["best"] = map.best ? py::cast(*map.best) : py::none();
            return out;
        },
        py::arg("plant"), py::arg("mu_grid"), py::arg("alpha_grid"), py::arg("epsilon") = 1e-6,
        py::arg("workers") = 0);

    py::class_<control::WellPosednessConstants>(m, "WellPosednessConstants")
        .def_readonly("tau", &control::WellPosednessConstants::tau)
        .def_readonly("mu_wp", &control::WellPosednessConstants::mu_wp)
        .def_readonly("rho", &control::WellPosednessConstants::rho);

    m.def(
        "wellposedness_certificate",
        [](const control::Plant& p, const Rows& K, double delta) {
            return control::wellposedness_certificate(p, to_matrix(K), delta);
        },
        py::arg("plant"), py::arg("K"), py::arg("delta") = 0.01);

    m.def(
        "check_wellposedness",
        [](const control::Plant& p, const Rows& K, const control::WellPosednessConstants& w) {
            const auto c = control::check_wellposedness(p, to_matrix(K), w);
            py::dict d;
            d["tau_slack"] = c.tau_slack;
            d["mu_slack"] = c.mu_slack;
            d["rho_slack"] = c.rho_slack;
            d["contraction_slack"] = c.contraction_slack;
            d["ok"] = c.ok();
            return d;
        },
        py::arg("plant"), py::arg("K"), py::arg("constants"));

    m.def(
        "verify_analysis",
        [](const control::Plant& p, const Rows& K, const std::vector<double>& P, const Rows& Gamma, double mu,
           double chi, double alpha) {
            const auto r = control::verify_analysis(p, to_matrix(K), linalg::DiagMatrix(P),
                                                    linalg::SymMatrix::symmetrize(to_matrix(Gamma)), mu, chi, alpha);
            py::dict d;
            d["feasible"] = r.feasible;
            d["T"] = to_array(r.T.diagonal());
            d["margins"] = std::vector<double>(r.margins.begin(), r.margins.end());
            return d;
        },
        py::arg("plant"), py::arg("K"), py::arg("P"), py::arg("Gamma"), py::arg("mu"), py::arg("chi"),
        py::arg("alpha"));

    py::class_<pde::SignalSpec>(m, "Signal")
        .def_static("zero", &pde::SignalSpec::zero, py::arg("components"))
        .def_static(
            "sinusoidal_product",
            [](double amplitude, const std::vector<std::string>& phases) {
                std::vector<pde::Phase> ph;
                for (const auto& s : phases) ph.push_back(phase_of(s));
                return pde::SignalSpec::sinusoidal_product(amplitude, ph);
            },
            py::arg("amplitude"), py::arg("phases"))
        .def_static("cosine_profile", &pde::SignalSpec::cosine_profile, py::arg("amplitude"), py::arg("frequencies"))
        .def_static("tabulated", &pde::SignalSpec::tabulated, py::arg("grid"), py::arg("values"))
        .def_property_readonly("components", &pde::SignalSpec::dim)
        .def("__call__", [](const pde::SignalSpec& s, double t, double z) { return to_array(s.evaluate(t, z)); });

    m.def(
        "simulate",
        [](const control::Plant& p, const Rows& K, const pde::SignalSpec& disturbance, const pde::SignalSpec& initial,
           std::size_t cells, double t_final, double cfl, std::optional<std::vector<double>> P, double mu,
           std::size_t snapshot_stride) {
            pde::SimConfig cfg;
            cfg.grid = pde::Grid(cells);
            cfg.t_final = t_final;
            cfg.cfl = cfl;
            cfg.disturbance = disturbance;
            cfg.initial = initial;
            cfg.snapshot_stride = snapshot_stride;
            if (P) cfg.lyapunov = pde::LyapunovWeight{linalg::DiagMatrix(*P), mu};
            const linalg::Matrix gain = to_matrix(K);
            pde::Trajectory t;
            {
                py::gil_scoped_release release;
                t = pde::simulate(p, gain, cfg);
            }
            py::dict d;
            d["t"] = to_array(t.times);
            d["l2_norm"] = to_array(t.l2_norms);
            d["controls"] = to_array(t.control_traces, p.m());
            d["boundary"] = to_array(t.boundary_traces, p.n());
            d["disturbance_energy"] = to_array(t.disturbance_energy);
            d["lyapunov"] = t.lyapunov_values ? py::object(to_array(*t.lyapunov_values)) : py::none();
            d["dt"] = t.dt;
            d["steps"] = t.steps;
            return d;
        },
        py::arg("plant"), py::arg("K"), py::arg("disturbance"), py::arg("initial"), py::arg("cells") = 400,
        py::arg("t_final") = 25.0, py::arg("cfl") = 0.9, py::arg("P") = py::none(), py::arg("mu") = 0.0,
        py::arg("snapshot_stride") = 0);

    m.def(
        "iss_rhs",
        [](double t, const std::vector<double>& P, double mu, double alpha, double chi, double x0_norm,
           double energy) {
            const auto params = pde::IssBoundParams::from_weight(linalg::DiagMatrix(P), mu, alpha, chi, x0_norm);
            return pde::iss_rhs(t, params, energy);
        },
        py::arg("t"), py::arg("P"), py::arg("mu"), py::arg("alpha"), py::arg("chi"), py::arg("x0_norm"),
        py::arg("energy"));
}
