#include "patr/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "patr/error.hpp"

namespace patr {
namespace {

constexpr cdouble kI{0.0, 1.0};

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Principal-branch power with 0^p = 0 for p > 0.
cdouble cpow(cdouble z, double p) {
    if (z == cdouble(0.0)) return cdouble(0.0);
    return std::pow(z, p);
}

template <class S>
S pow_any(const S& z, double p) {
    if constexpr (std::is_same_v<S, cdouble>) {
        return cpow(z, p);
    } else {
        return pow(z, p);
    }
}

// κ/ω as a second-order series in the expansion parameter a, centered at
// a = 0, with shape parameters held fixed. S is cdouble or an ω-jet.
template <class S>
Jet<S, 2> ratio_series(const AttenuationModel& model, const S& w) {
    using A = Jet<S, 2>;
    const A a = A::variable(S(0.0));
    const A one(S(1.0));
    return std::visit(
        Overloaded{
            [&](const ThermoViscous&) -> A {
                return pow(one - a * A(w * kI), -0.5);
            },
            [&](const KSB& m) -> A {
                const S z = w * cdouble(0.0, -m.tau0);
                const S q = pow_any(S(1.0) + pow_any(z, m.gamma - 1.0), -0.5);
                return one + a * A(q);
            },
            [&](const NSW& m) -> A {
                const double scale = expansion_parameter(model);
                A sum;
                for (const auto& p : m.processes) {
                    const double r = scale > 0.0 ? p.tau / scale : 0.0;
                    const double rt = scale > 0.0 ? p.tau_tilde / scale : 0.0;
                    sum += (one - a * A(w * cdouble(0.0, rt))) / (one - a * A(w * cdouble(0.0, r)));
                }
                return sqrt(sum / static_cast<double>(m.processes.size()));
            },
        },
        model);
}

void check_order(int order) {
    if (order < 0 || order > 2) {
        throw CapabilityError("correction order " + std::to_string(order) +
                              " is not supported (expected 0, 1 or 2)");
    }
}

cdouble nsw_mean_ratio(const NSW& m, double omega, double sign) {
    cdouble sum = 0.0;
    for (const auto& p : m.processes) {
        sum += (1.0 + sign * kI * omega * p.tau_tilde) / (1.0 + sign * kI * omega * p.tau);
    }
    return sum / static_cast<double>(m.processes.size());
}

}  // namespace

void validate(const AttenuationModel& model) {
    std::visit(Overloaded{
                   [](const ThermoViscous& m) {
                       if (!(m.a >= 0.0) || !std::isfinite(m.a))
                           throw ParameterError("thermo-viscous: a must be finite and >= 0");
                   },
                   [](const KSB& m) {
                       if (!(m.alpha0 >= 0.0) || !std::isfinite(m.alpha0))
                           throw ParameterError("KSB: alpha0 must be finite and >= 0");
                       if (!(m.tau0 > 0.0) || !std::isfinite(m.tau0))
                           throw ParameterError("KSB: tau0 must be finite and > 0");
                       if (!(m.gamma > 1.0 && m.gamma <= 2.0))
                           throw ParameterError("KSB: gamma must lie in (1, 2]");
                   },
                   [](const NSW& m) {
                       if (m.processes.empty())
                           throw ParameterError("NSW: at least one relaxation process is required");
                       for (const auto& p : m.processes) {
                           if (!(p.tau_tilde >= 0.0) || !std::isfinite(p.tau))
                               throw ParameterError("NSW: relaxation times must be finite and >= 0");
                           if (!(p.tau >= p.tau_tilde))
                               throw ParameterError(
                                   "NSW: causality violation, tau must exceed tau_tilde");
                       }
                   },
               },
               model);
}

std::string describe(const AttenuationModel& model) {
    std::ostringstream os;
    os.precision(17);
    std::visit(Overloaded{
                   [&](const ThermoViscous& m) { os << "thermo_viscous(a=" << m.a << ")"; },
                   [&](const KSB& m) {
                       os << "ksb(alpha0=" << m.alpha0 << ", tau0=" << m.tau0
                          << ", gamma=" << m.gamma << ")";
                   },
                   [&](const NSW& m) {
                       os << "nsw(";
                       for (std::size_t j = 0; j < m.processes.size(); ++j) {
                           if (j) os << "; ";
                           os << "tau=" << m.processes[j].tau
                              << ", tau_tilde=" << m.processes[j].tau_tilde;
                       }
                       os << ")";
                   },
               },
               model);
    return os.str();
}

double expansion_parameter(const AttenuationModel& model) {
    return std::visit(Overloaded{
                          [](const ThermoViscous& m) { return m.a; },
                          [](const KSB& m) { return m.alpha0; },
                          [](const NSW& m) {
                              double a = 0.0;
                              for (const auto& p : m.processes) a = std::max(a, p.tau);
                              return a;
                          },
                      },
                      model);
}

bool is_attenuating(const AttenuationModel& model) {
    return std::visit(Overloaded{
                          [](const ThermoViscous& m) { return m.a > 0.0; },
                          [](const KSB& m) { return m.alpha0 > 0.0; },
                          [](const NSW& m) {
                              for (const auto& p : m.processes)
                                  if (p.tau > p.tau_tilde) return true;
                              return false;
                          },
                      },
                      model);
}

AttenuationModel with_expansion_parameter(const AttenuationModel& model, double a) {
    if (!(a >= 0.0)) throw ParameterError("expansion parameter must be >= 0");
    return std::visit(Overloaded{
                          [&](ThermoViscous m) -> AttenuationModel {
                              m.a = a;
                              return m;
                          },
                          [&](KSB m) -> AttenuationModel {
                              m.alpha0 = a;
                              return m;
                          },
                          [&](NSW m) -> AttenuationModel {
                              const double scale = expansion_parameter(model);
                              if (!(scale > 0.0))
                                  throw ParameterError("NSW: cannot rescale zero relaxation times");
                              for (auto& p : m.processes) {
                                  p.tau *= a / scale;
                                  p.tau_tilde *= a / scale;
                              }
                              return m;
                          },
                      },
                      model);
}

double front_speed(const AttenuationModel& model) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return std::visit(Overloaded{
                          [&](const ThermoViscous& m) { return m.a > 0.0 ? inf : 1.0; },
                          [](const KSB& m) { return 1.0 / (1.0 + m.alpha0); },
                          [&](const NSW& m) {
                              double mean = 0.0;
                              for (const auto& p : m.processes)
                                  mean += p.tau > 0.0 ? p.tau_tilde / p.tau : 1.0;
                              mean /= static_cast<double>(m.processes.size());
                              return mean > 0.0 ? 1.0 / std::sqrt(mean) : inf;
                          },
                      },
                      model);
}

cdouble kappa_ratio(const AttenuationModel& model, double omega) {
    return std::visit(
        Overloaded{
            [&](const ThermoViscous& m) { return cpow(1.0 - kI * m.a * omega, -0.5); },
            [&](const KSB& m) {
                const cdouble z(0.0, -m.tau0 * omega);
                return 1.0 + m.alpha0 * cpow(1.0 + cpow(z, m.gamma - 1.0), -0.5);
            },
            [&](const NSW& m) { return std::sqrt(nsw_mean_ratio(m, omega, -1.0)); },
        },
        model);
}

cdouble kappa(const AttenuationModel& model, double omega) {
    return omega * kappa_ratio(model, omega);
}

cdouble ksb_nu1(const KSB& m, double omega) {
    const cdouble z(0.0, m.tau0 * omega);
    return -cpow(1.0 + cpow(z, m.gamma - 1.0), -0.5);
}

cdouble ksb_nu2(const KSB& m, double omega) {
    const cdouble z(0.0, m.tau0 * omega);
    const cdouble base = 1.0 + cpow(z, m.gamma - 1.0);
    return 0.5 * (7.0 - m.gamma) * cpow(base, -0.5) + 0.5 * (m.gamma - 1.0) * cpow(base, -1.5);
}

CJet2 lambda1(const AttenuationModel& model, const CJet2& omega) {
    return -ratio_series(model, omega)[1];
}

CJet2 lambda2(const AttenuationModel& model, const CJet2& omega) {
    return ratio_series(model, omega)[2];
}

cdouble lambda1(const AttenuationModel& model, double omega) {
    return -ratio_series(model, cdouble(omega))[1];
}

cdouble lambda2(const AttenuationModel& model, double omega) {
    return ratio_series(model, cdouble(omega))[2];
}

ExpansionCoefficients correction_coefficients(const AttenuationModel& model, double omega) {
    ExpansionCoefficients out;
    out.omega = omega;
    out.a = expansion_parameter(model);

    // Everything below is evaluated at w = -ω. Products of w with
    // derivatives are kept together: they vanish as w -> 0 even where the
    // derivatives themselves blow up (KSB with γ < 2).
    const double w = -omega;
    cdouble l0, m0, p1, p2, pm;
    if (std::abs(w) < kOmegaLimitEps) {
        const auto series = ratio_series(model, cdouble(0.0));
        l0 = -series[1];
        m0 = series[2];
    } else {
        const auto series = ratio_series(model, CJet2::variable(cdouble(w)));
        const CJet2 l = -series[1];
        const CJet2 m = series[2];
        l0 = l[0];
        m0 = m[0];
        p1 = w * l.derivative(1);
        p2 = w * w * l.derivative(2);
        pm = w * m.derivative(1);
    }

    const cdouble g = -2.0 * l0 - p1;      // γ1(ω)
    const cdouble w_dg = -3.0 * p1 - p2;   // w d/dw γ1(-w)
    const cdouble h = -l0 * l0 + m0 - g * l0;
    const cdouble w_dh = -2.0 * l0 * p1 + pm - w_dg * l0 - g * p1;
    const cdouble u_sq_dd = (l0 + p1) * (l0 + p1) + l0 * (2.0 * p1 + p2);  // ½ ((wλ1)²)''
    const cdouble gamma2 = 2.0 * h + w_dh - u_sq_dd;

    out.nu1 = l0;
    out.gamma1 = g;
    out.gamma2 = gamma2;
    out.beta1 = g - l0;
    out.nu2 = out.beta1;
    out.beta2 = gamma2 - g * l0 + m0;

    const auto here = ratio_series(model, cdouble(omega));
    out.lambda1 = -here[1];
    out.lambda2 = here[2];
    out.mu2 = out.lambda1 * out.lambda1 - out.lambda2;
    return out;
}

cdouble kappa_tilde_ratio(const AttenuationModel& model, double omega, int order) {
    check_order(order);
    if (order == 0) return 1.0;
    return std::visit(Overloaded{
                          [&](const KSB& m) -> cdouble {
                              if (order == 1) return 1.0 - m.alpha0 * ksb_nu1(m, omega);
                              const double a = m.alpha0;
                              return 1.0 - a * lambda1(model, -omega) +
                                     a * a * lambda2(model, -omega);
                          },
                          // Closed forms: κ~(ω) = -κ(-ω).
                          [&](const auto&) -> cdouble { return kappa_ratio(model, -omega); },
                      },
                      model);
}

cdouble kappa_tilde(const AttenuationModel& model, double omega, int order) {
    return omega * kappa_tilde_ratio(model, omega, order);
}

cdouble lambda_weight(const AttenuationModel& model, double omega, int order) {
    check_order(order);
    if (order == 0) return 1.0;
    return std::visit(Overloaded{
                          [&](const ThermoViscous&) -> cdouble { return 1.0; },
                          [&](const KSB& m) -> cdouble {
                              if (order == 1) return 1.0 + m.alpha0 * ksb_nu2(m, omega);
                              const auto c = correction_coefficients(model, omega);
                              return 1.0 + c.a * c.beta1 + c.a * c.a * c.beta2;
                          },
                          [&](const NSW& m) -> cdouble {
                              if (order == 1) {
                                  const cdouble q = nsw_mean_ratio(m, omega, 1.0);
                                  return q * q;
                              }
                              const auto c = correction_coefficients(model, omega);
                              return 1.0 + c.a * c.beta1 + c.a * c.a * c.beta2;
                          },
                      },
                      model);
}

double rho_threshold(const AttenuationModel& model, double domain_diameter) {
    if (!(domain_diameter > 0.0)) throw ParameterError("domain diameter must be > 0");
    constexpr double inf = std::numeric_limits<double>::infinity();
    return std::visit(
        Overloaded{
            [](const ThermoViscous&) -> double {
                throw CapabilityError(
                    "no stability threshold formula for the thermo-viscous model; "
                    "supply the cutoff explicitly");
            },
            [&](const KSB& m) -> double {
                if (m.alpha0 == 0.0) return inf;
                // Extended precision so the result is correctly rounded.
                using L = long double;
                const L g = m.gamma;
                const L s = std::sin((g - 1) * std::numbers::pi_v<L> / 4);
                const L num = std::pow(static_cast<L>(m.tau0), (g - 1) / (3 - g));
                const L den = std::pow(static_cast<L>(m.alpha0) * domain_diameter * s, 2 / (3 - g));
                return static_cast<double>(num / den);
            },
            [&](const NSW& m) -> double {
                double sum = 0.0;
                for (const auto& p : m.processes) sum += p.tau - p.tau_tilde;
                if (sum == 0.0) return inf;
                return std::sqrt(static_cast<double>(m.processes.size()) /
                                 (domain_diameter * sum));
            },
        },
        model);
}

}  // namespace patr
