#pragma once

#include <variant>

#include <nlohmann/json.hpp>

namespace cvclone::feasibility {

// Units: SI throughout.
//   wavelength        m
//   linewidth, detuning   rad/s (only their ratio enters)
//   beam_area         m^2
//   photon/atom counts, kappa, eta, optical density: dimensionless

/// kappa given directly.
struct DirectKappa {
    double kappa = 1.0;
};

/// kappa = a sqrt(N_L N_A) / 2 with the effective coupling a.
struct EffectiveCoupling {
    double a = 0.0;
    double photons = 0.0;
    double atoms = 0.0;
};

/// kappa = (sigma gamma / (A delta)) sqrt(N_L N_A) / 2, sigma = lambda^2 / (2 pi).
struct PhysicalCoupling {
    double wavelength = 0.0;
    double linewidth = 0.0;
    double detuning = 0.0;
    double beam_area = 0.0;
    double photons = 0.0;
    double atoms = 0.0;
};

using Coupling = std::variant<DirectKappa, EffectiveCoupling, PhysicalCoupling>;

struct CouplingParams {
    Coupling coupling = DirectKappa{};
    double optical_density = 1.0;
};

/// Resonant scattering cross section lambda^2 / (2 pi).
double cross_section(double wavelength);

/// Effective coupling a = sigma gamma / (A delta) of a physical bundle.
double effective_coupling(const PhysicalCoupling &p);

double kappa_from_physical(const CouplingParams &p);

struct FeasibilityReport {
    double kappa = 0.0;
    /// Spontaneous-emission probability implied by kappa^2 = alpha * eta.
    double eta = 0.0;
    /// eta must be << 1/(1 + kappa^2).
    double bound = 0.0;
    double margin = 10.0;
    bool pass = false;
    /// Optical density needed to pass at this margin: kappa^2 (1+kappa^2) margin.
    double required_optical_density = 0.0;
};

/// pass iff eta * margin <= bound.
FeasibilityReport feasibility_check(const CouplingParams &p, double margin = 10.0);

CouplingParams params_from_json(const nlohmann::json &j);
void to_json(nlohmann::json &j, const FeasibilityReport &r);

} // namespace cvclone::feasibility
