#include <optional>
#include <string>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cvclone/errors.hpp"
#include "cvclone/feasibility.hpp"
#include "cvclone/measurement.hpp"
#include "cvclone/phase_space.hpp"
#include "cvclone/protocols.hpp"
#include "cvclone/report_io.hpp"
#include "cvclone/symplectic.hpp"

namespace py = pybind11;
using namespace cvclone;

namespace {

Axis axis_from(const std::string &name) {
    if (name == "x")
        return Axis::X;
    if (name == "p")
        return Axis::P;
    throw DomainError("axis must be 'x' or 'p'");
}

OutcomeSource outcome_from(const std::string &kind, double value, std::uint64_t seed) {
    if (kind == "marginalized")
        return OutcomeSource::marginalized();
    if (kind == "mean")
        return OutcomeSource::mean_value();
    if (kind == "sampled")
        return OutcomeSource::sampled(seed);
    if (kind == "forced")
        return OutcomeSource::forced(value);
    throw DomainError("unknown outcome kind '" + kind + "'");
}

ProtocolConfig make_config(const std::string &protocol, double alpha_x, double alpha_p, double V, double kappa,
                           double gain, const std::string &outcome, double outcome_value, std::uint64_t seed,
                           std::uint64_t trials) {
    ProtocolConfig cfg;
    cfg.protocol = protocol_from_string(protocol);
    cfg.alpha_x = alpha_x;
    cfg.alpha_p = alpha_p;
    cfg.asymmetry_V = V;
    cfg.kappa = kappa;
    cfg.feedback_gain = gain;
    cfg.outcome = outcome_from(outcome, outcome_value, seed);
    cfg.trials = trials;
    cfg.validate();
    return cfg;
}

#define CONFIG_ARGS                                                                                                    \
    py::arg("protocol"), py::kw_only(), py::arg("alpha_x") = 0.0, py::arg("alpha_p") = 0.0, py::arg("V") = 0.5,         \
        py::arg("kappa") = 1.0, py::arg("gain") = 1.0, py::arg("outcome") = "marginalized",                              \
        py::arg("outcome_value") = 0.0, py::arg("seed") = 0, py::arg("trials") = 1

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Gaussian simulator for light-to-atoms coherent-state cloning";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_RuntimeError);

    py::class_<GaussianState>(m, "GaussianState")
        .def(py::init<Vector, Matrix>(), py::arg("mean"), py::arg("cov"))
        .def_property_readonly("num_modes", &GaussianState::num_modes)
        .def_property_readonly("mean", [](const GaussianState &s) { return Vector(s.mean()); })
        .def_property_readonly("cov", [](const GaussianState &s) { return Matrix(s.cov()); })
        .def("symplectic_eigenvalues", &GaussianState::symplectic_eigenvalues)
        .def("is_pure", &GaussianState::is_pure, py::arg("tol") = kStructuralTol)
        .def("reduced", [](const GaussianState &s, const std::vector<std::size_t> &modes) {
            return reduced_state(s, std::vector<ModeLabel>(modes.begin(), modes.end()));
        })
        .def("__repr__", [](const GaussianState &s) {
            return "<GaussianState modes=" + std::to_string(s.num_modes()) + ">";
        });

    m.def("vacuum", &make_vacuum, py::arg("num_modes") = 1);
    m.def("coherent", &make_coherent, py::arg("alpha_x"), py::arg("alpha_p"));
    m.def(
        "squeezed_vacuum", [](double v, const std::string &axis) { return make_squeezed_vacuum(v, axis_from(axis)); },
        py::arg("variance"), py::arg("axis") = "x");
    m.def("tensor", [](const std::vector<GaussianState> &states) { return tensor(states); });
    m.def("fidelity_with_coherent", &fidelity_with_coherent, py::arg("state"), py::arg("alpha_x"),
          py::arg("alpha_p"));

    py::class_<SymplecticOp>(m, "SymplecticOp")
        .def_property_readonly("matrix", [](const SymplecticOp &op) { return op.matrix; })
        .def_property_readonly("displacement", [](const SymplecticOp &op) { return op.displacement; })
        .def_property_readonly("modes", [](const SymplecticOp &op) {
            std::vector<std::size_t> v;
            for (const auto &l : op.modes)
                v.push_back(l.index);
            return v;
        });
    m.def("qnd_xp", [](double k, std::size_t c, std::size_t t) { return qnd_xp(k, c, t); }, py::arg("kappa"),
          py::arg("control"), py::arg("target"));
    m.def("qnd_pp", [](double k, std::size_t c, std::size_t t) { return qnd_pp(k, c, t); }, py::arg("kappa"),
          py::arg("control"), py::arg("target"));
    m.def("phase_rotation", [](double theta, std::size_t mode) { return phase_rotation(theta, mode); });
    m.def("beam_splitter", [](std::size_t a, std::size_t b) { return beam_splitter_balanced(a, b); });
    m.def("squeezer", [](double r, std::size_t mode) { return squeezer(r, mode); });
    m.def("compose", [](const std::vector<SymplecticOp> &ops) { return compose(ops); });
    m.def("inverse", &inverse);
    m.def("apply", &apply, py::arg("op"), py::arg("state"));
    m.def("is_symplectic", &is_symplectic, py::arg("matrix"), py::arg("tol") = kStructuralTol);

    m.def(
        "homodyne",
        [](const GaussianState &s, std::size_t mode, const std::string &axis, const std::string &outcome, double value,
           std::uint64_t seed) {
            auto r = homodyne(s, mode, axis_from(axis), outcome_from(outcome, value, seed));
            return py::make_tuple(r.outcome, r.post_state);
        },
        py::arg("state"), py::arg("mode"), py::arg("axis"), py::arg("outcome") = "mean",
        py::arg("outcome_value") = 0.0, py::arg("seed") = 0);

    // Reports cross the boundary as JSON text; the package wrapper decodes them.
    m.def(
        "run_protocol_json",
        [](const std::string &protocol, double ax, double ap, double V, double kappa, double gain,
           const std::string &outcome, double value, std::uint64_t seed, std::uint64_t trials) {
            auto report = run_protocol(make_config(protocol, ax, ap, V, kappa, gain, outcome, value, seed, trials));
            check_report_invariants(report);
            return report_to_json(report).dump();
        },
        CONFIG_ARGS);
    m.def(
        "sweep_json",
        [](const std::string &parameter, const std::vector<double> &values, const std::string &protocol, double ax,
           double ap, double V, double kappa, double gain, const std::string &outcome, double value,
           std::uint64_t seed, std::uint64_t trials) {
            auto cfg = make_config(protocol, ax, ap, V, kappa, gain, outcome, value, seed, trials);
            nlohmann::json rows = nlohmann::json::array();
            {
                py::gil_scoped_release release;
                for (const auto &r : sweep(sweep_parameter_from_string(parameter), values, cfg))
                    rows.push_back(report_to_json(r));
            }
            return rows.dump();
        },
        py::arg("parameter"), py::arg("values"), CONFIG_ARGS);
    m.def(
        "montecarlo_json",
        [](const std::string &protocol, double ax, double ap, double V, double kappa, double gain,
           const std::string &outcome, double value, std::uint64_t seed, std::uint64_t trials) {
            auto cfg = make_config(protocol, ax, ap, V, kappa, gain, outcome, value, seed, trials);
            MonteCarloSummary summary;
            {
                py::gil_scoped_release release;
                summary = run_montecarlo(cfg, false);
            }
            return summary_to_json(summary).dump();
        },
        CONFIG_ARGS);

    m.def(
        "feasibility_json",
        [](const std::string &params, double margin) {
            nlohmann::json j = feasibility::feasibility_check(
                feasibility::params_from_json(nlohmann::json::parse(params)), margin);
            return j.dump();
        },
        py::arg("params"), py::arg("margin") = 10.0);
    m.def("squeeze_prep_kappa", &squeeze_prep_kappa, py::arg("variance"));
}
