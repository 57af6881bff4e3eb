#pragma once

#include <complex>
#include <string>
#include <variant>
#include <vector>

#include "patr/jet.hpp"

namespace patr {

using cdouble = std::complex<double>;

// Attenuation models. Frequencies are angular, sound speed is 1.
struct ThermoViscous {
    double a = 0.0;  // viscosity time, >= 0
};

struct KSB {
    double alpha0 = 0.0;  // >= 0; zero is the attenuation-free limit
    double tau0 = 1.0;    // > 0
    double gamma = 2.0;   // in (1, 2]
};

struct Relaxation {
    double tau = 0.0;        // tau_j
    double tau_tilde = 0.0;  // tau~_j, 0 <= tau~_j <= tau_j
};

struct NSW {
    std::vector<Relaxation> processes;  // N >= 1
};

using AttenuationModel = std::variant<ThermoViscous, KSB, NSW>;

// Throws ParameterError naming the violated constraint.
void validate(const AttenuationModel& model);

std::string describe(const AttenuationModel& model);

// Small parameter of the asymptotic expansion: a for thermo-viscous, alpha0
// for KSB, max_j tau_j for NSW.
double expansion_parameter(const AttenuationModel& model);

bool is_attenuating(const AttenuationModel& model);

// Same model family with the expansion parameter set to a (NSW times are
// rescaled together, keeping their ratios).
AttenuationModel with_expansion_parameter(const AttenuationModel& model, double a);

// High-frequency front speed lim ω / Re κ(ω), used for the causality check.
double front_speed(const AttenuationModel& model);

// κ(ω). Principal branches throughout, κ(-ω) = -conj κ(ω).
cdouble kappa(const AttenuationModel& model, double omega);

// κ(ω)/ω evaluated without dividing by ω, so ω = 0 gives the analytic limit.
cdouble kappa_ratio(const AttenuationModel& model, double omega);

// Corrected wavenumber κ~ at correction order 0, 1 or 2.
cdouble kappa_tilde(const AttenuationModel& model, double omega, int order);
cdouble kappa_tilde_ratio(const AttenuationModel& model, double omega, int order);

// Weight λ(ω) of the corrected Helmholtz source.
cdouble lambda_weight(const AttenuationModel& model, double omega, int order);

// Expansion terms of κ/ω = Σ (-1)^j λ_j a^j as jets in ω.
CJet2 lambda1(const AttenuationModel& model, const CJet2& omega);
CJet2 lambda2(const AttenuationModel& model, const CJet2& omega);
cdouble lambda1(const AttenuationModel& model, double omega);
cdouble lambda2(const AttenuationModel& model, double omega);

// Closed-form first-order KSB auxiliaries, kept separate from the generic
// conditions so the two can be cross-checked.
cdouble ksb_nu1(const KSB& m, double omega);
cdouble ksb_nu2(const KSB& m, double omega);

struct ExpansionCoefficients {
    double omega = 0.0;
    double a = 0.0;        // expansion parameter the coefficients refer to
    cdouble lambda1;       // λ1(ω)
    cdouble lambda2;       // λ2(ω)
    cdouble mu2;           // λ1² - λ2
    cdouble nu1;           // λ1(-ω)
    cdouble nu2;           // ≡ β1(ω)
    cdouble gamma1;        // γ1(ω)
    cdouble gamma2;        // γ2(ω)
    cdouble beta1;         // β1(ω)
    cdouble beta2;         // β2(ω)
};

// λ0 = μ0 = β0 = γ0 = 1 are implicit.
ExpansionCoefficients correction_coefficients(const AttenuationModel& model, double omega);

// Stability cutoff for the imaging functional. Returns +inf when the model
// does not attenuate. Thermo-viscous has no formula: CapabilityError.
double rho_threshold(const AttenuationModel& model, double domain_diameter);

// Below this |ω| the coefficient formulas use their ω → 0 limits.
inline constexpr double kOmegaLimitEps = 1e-12;

}  // namespace patr
