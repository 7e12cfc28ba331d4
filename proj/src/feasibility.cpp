#include "cvclone/feasibility.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cvclone/errors.hpp"

namespace cvclone::feasibility {
namespace {

void require_positive(double v, const char *name) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw DomainError(std::string(name) + " must be positive and finite");
}

double read(const nlohmann::json &j, const char *key) {
    if (!j.contains(key))
        throw DomainError(std::string("missing parameter '") + key + "'");
    return j.at(key).get<double>();
}

} // namespace

double cross_section(double wavelength) {
    require_positive(wavelength, "wavelength");
    return wavelength * wavelength / (2.0 * std::numbers::pi);
}

double effective_coupling(const PhysicalCoupling &p) {
    require_positive(p.linewidth, "linewidth");
    require_positive(p.beam_area, "beam_area");
    if (p.detuning == 0.0 || !std::isfinite(p.detuning))
        throw DomainError("detuning must be non-zero and finite");
    require_positive(std::abs(p.detuning), "detuning");
    return cross_section(p.wavelength) * p.linewidth / (p.beam_area * std::abs(p.detuning));
}

double kappa_from_physical(const CouplingParams &p) {
    return std::visit(
        [](const auto &c) -> double {
            using C = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<C, DirectKappa>) {
                if (!(c.kappa >= 0.0) || !std::isfinite(c.kappa))
                    throw DomainError("kappa must be non-negative and finite");
                return c.kappa;
            } else if constexpr (std::is_same_v<C, EffectiveCoupling>) {
                require_positive(c.a, "a");
                require_positive(c.photons, "N_L");
                require_positive(c.atoms, "N_A");
                return c.a * std::sqrt(c.photons * c.atoms) / 2.0;
            } else {
                require_positive(c.photons, "N_L");
                require_positive(c.atoms, "N_A");
                return effective_coupling(c) * std::sqrt(c.photons * c.atoms) / 2.0;
            }
        },
        p.coupling);
}

FeasibilityReport feasibility_check(const CouplingParams &p, double margin) {
    require_positive(margin, "margin");
    require_positive(p.optical_density, "optical density");
    FeasibilityReport r;
    r.kappa = kappa_from_physical(p);
    const double k2 = r.kappa * r.kappa;
    r.eta = k2 / p.optical_density;
    r.bound = 1.0 / (1.0 + k2);
    r.margin = margin;
    r.pass = r.eta * margin <= r.bound;
    r.required_optical_density = k2 * (1.0 + k2) * margin;
    return r;
}

CouplingParams params_from_json(const nlohmann::json &j) {
    CouplingParams p;
    if (j.contains("optical_density"))
        p.optical_density = j.at("optical_density").get<double>();
    else
        throw DomainError("missing parameter 'optical_density'");

    if (j.contains("kappa")) {
        p.coupling = DirectKappa{j.at("kappa").get<double>()};
    } else if (j.contains("a")) {
        p.coupling = EffectiveCoupling{read(j, "a"), read(j, "N_L"), read(j, "N_A")};
    } else if (j.contains("wavelength")) {
        p.coupling = PhysicalCoupling{read(j, "wavelength"), read(j, "linewidth"), read(j, "detuning"),
                                      read(j, "beam_area"),  read(j, "N_L"),       read(j, "N_A")};
    } else {
        throw DomainError("parameters need one of 'kappa', 'a' or 'wavelength'");
    }
    return p;
}

void to_json(nlohmann::json &j, const FeasibilityReport &r) {
    j = nlohmann::json{{"kappa", r.kappa},
                       {"eta", r.eta},
                       {"bound", r.bound},
                       {"margin", r.margin},
                       {"pass", r.pass},
                       {"required_optical_density", r.required_optical_density}};
}

} // namespace cvclone::feasibility
