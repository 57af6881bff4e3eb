#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "patr/dispersion.hpp"
#include "patr/error.hpp"

using namespace patr;
using cd = std::complex<double>;

namespace {

const cd I(0.0, 1.0);

// Closed forms written out independently of the library.
cd ksb_ratio(double alpha0, double tau0, double gamma, double w) {
    const cd z = -I * tau0 * w;
    const cd zp = (z == cd(0.0)) ? cd(0.0) : std::pow(z, gamma - 1.0);
    return 1.0 + alpha0 / std::sqrt(1.0 + zp);
}

cd nsw_ratio(const std::vector<Relaxation>& p, double w) {
    cd s = 0.0;
    for (const auto& r : p) s += (1.0 - I * w * r.tau_tilde) / (1.0 - I * w * r.tau);
    return std::sqrt(s / static_cast<double>(p.size()));
}

std::vector<AttenuationModel> sample_models() {
    return {
        ThermoViscous{0.02},
        KSB{0.05, 1.0, 2.0},
        KSB{0.03, 0.7, 1.5},
        KSB{0.02, 1.3, 1.2},
        NSW{{{0.2, 0.1}}},
        NSW{{{0.02, 0.01}, {0.015, 0.002}}},
    };
}

template <class F>
cd central(F f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

bool close(cd a, cd b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("kappa reference values") {
    const cd k = kappa(KSB{0.1, 1.0, 2.0}, 1.0);
    CHECK(k.real() == doctest::Approx(1.077689).epsilon(1e-6));
    CHECK(k.imag() == doctest::Approx(0.032180).epsilon(1e-5));
    CHECK(close(k, 1.0 + 0.1 / std::sqrt(cd(1.0, -1.0)), 1e-15));

    const cd n = kappa(NSW{{{0.2, 0.1}}}, 1.0);
    CHECK(n.real() == doctest::Approx(0.99154).epsilon(1e-5));
    CHECK(n.imag() == doctest::Approx(0.04850).epsilon(1e-4));

    CHECK(kappa(KSB{0.3, 1.0, 1.5}, 0.0) == cd(0.0));
}

TEST_CASE("kappa agrees with independent closed forms") {
    for (double w : {-7.0, -0.3, 0.0, 0.5, 2.0, 40.0}) {
        CHECK(close(kappa_ratio(KSB{0.03, 0.7, 1.5}, w), ksb_ratio(0.03, 0.7, 1.5, w), 1e-14));
        const std::vector<Relaxation> p{{0.02, 0.01}, {0.015, 0.002}};
        CHECK(close(kappa_ratio(NSW{p}, w), nsw_ratio(p, w), 1e-14));
        CHECK(close(kappa_ratio(ThermoViscous{0.02}, w), 1.0 / std::sqrt(1.0 - I * 0.02 * w), 1e-14));
    }
}

TEST_CASE("attenuation-free models collapse exactly") {
    const std::vector<AttenuationModel> off{ThermoViscous{0.0}, KSB{0.0, 1.0, 1.5},
                                            NSW{{{0.02, 0.02}}}};
    for (const auto& m : off) {
        CHECK_FALSE(is_attenuating(m));
        for (double w : {-3.0, 0.0, 0.25, 11.0}) {
            CHECK(kappa(m, w) == cd(w));
            for (int order = 0; order <= 2; ++order) {
                CHECK(kappa_tilde(m, w, order) == cd(w));
                CHECK(lambda_weight(m, w, order) == cd(1.0));
            }
        }
    }
}

TEST_CASE("corrected wavenumber reference values") {
    const KSB ksb{0.1, 1.0, 2.0};
    for (double w : {0.0, 0.5, 1.0, 3.0}) CHECK(kappa_tilde(ksb, w, 0) == cd(w));
    const cd nu1 = -1.0 / std::sqrt(cd(1.0, 1.0));
    CHECK(close(ksb_nu1(ksb, 1.0), nu1, 1e-15));
    CHECK(close(kappa_tilde(ksb, 1.0, 1), 1.0 - 0.1 * nu1, 1e-15));

    const NSW nsw{{{0.2, 0.1}}};
    CHECK(close(kappa_tilde(nsw, 1.0, 1), std::sqrt(cd(1.0, 0.1) / cd(1.0, 0.2)), 1e-15));
    CHECK(close(kappa_tilde(nsw, 1.0, 1), -std::conj(-kappa(nsw, 1.0)), 1e-15));
}

TEST_CASE("lambda weight reference values") {
    for (double g : {1.1, 1.5, 2.0}) {
        const KSB m{0.01, 1.0, g};
        CHECK(lambda_weight(m, 0.0, 0) == cd(1.0));
        CHECK(close(lambda_weight(m, 0.0, 1), 1.03, 1e-15));
    }
    const cd q = cd(1.0, 0.1) / cd(1.0, 0.2);
    CHECK(close(lambda_weight(NSW{{{0.2, 0.1}}}, 1.0, 1), q * q, 1e-15));
}

TEST_CASE("lambda1 reference values") {
    CHECK(close(lambda1(KSB{0.1, 1.0, 1.5}, 0.0), -1.0, 1e-15));
    CHECK(close(lambda1(KSB{0.1, 1.0, 2.0}, 1.0), -1.0 / std::sqrt(cd(1.0, -1.0)), 1e-15));
    // a λ1 = -iω(τ - τ~)/2 whatever the scale a.
    const NSW m{{{0.2, 0.1}}};
    CHECK(close(expansion_parameter(m) * lambda1(m, 1.0), -I * 0.1 / 2.0, 1e-15));
}

TEST_CASE("expansion coefficients at zero frequency") {
    for (double g : {1.2, 1.5, 2.0}) {
        const auto c = correction_coefficients(KSB{0.01, 1.0, g}, 0.0);
        CHECK(close(c.gamma1, 2.0, 1e-15));
        CHECK(close(c.beta1, 3.0, 1e-15));
        CHECK(close(c.nu2, 3.0, 1e-15));
    }
}

TEST_CASE("nu1 is lambda1 at -omega and matches the displayed KSB form") {
    for (double g : {1.2, 1.5, 2.0}) {
        const KSB m{0.02, 0.8, g};
        for (double w : {-4.0, -0.5, 0.3, 1.0, 9.0}) {
            CHECK(close(correction_coefficients(m, w).nu1, lambda1(m, -w), 1e-15));
            CHECK(close(ksb_nu1(m, w), lambda1(m, -w), 1e-14));
        }
    }
    const KSB m{0.02, 1.0, 2.0};
    for (double w : {0.3, 1.0, 5.0})
        CHECK(close(ksb_nu1(m, w), -1.0 / std::sqrt(1.0 + I * w), 1e-14));
}

TEST_CASE("displayed KSB nu2 equals the first-order condition") {
    for (double g : {1.1, 1.5, 1.8, 2.0}) {
        const KSB m{0.02, 0.9, g};
        for (double w : {-6.0, -1.0, -0.1, 0.2, 1.0, 3.0, 30.0})
            CHECK(close(ksb_nu2(m, w), correction_coefficients(m, w).nu2, 1e-13));
    }
}

TEST_CASE("NSW nu2 matches the displayed relaxation form") {
    // With τ = 2α0, τ~ = α0 the closed form ν2 = -2iω(r - r~) gives a ν2 = -2iω α0.
    const NSW m{{{0.2, 0.1}}};
    for (double w : {-2.0, 0.5, 1.0, 4.0}) {
        const auto c = correction_coefficients(m, w);
        CHECK(close(c.a * c.nu2, -2.0 * I * w * 0.1, 1e-14));
    }
}

TEST_CASE("reality symmetry") {
    for (const auto& m : sample_models()) {
        for (double w : {0.1, 0.9, 2.5, 17.0, 120.0}) {
            CHECK(close(kappa(m, -w), -std::conj(kappa(m, w)), 1e-14));
            for (int order = 0; order <= 2; ++order) {
                CHECK(close(kappa_tilde(m, -w, order), -std::conj(kappa_tilde(m, w, order)), 1e-13));
                CHECK(close(lambda_weight(m, -w, order), std::conj(lambda_weight(m, w, order)), 1e-13));
            }
        }
    }
}

TEST_CASE("damping sign") {
    const std::vector<AttenuationModel> models{KSB{0.2, 1.0, 2.0}, KSB{0.05, 0.3, 1.3},
                                               NSW{{{0.5, 0.1}}}, NSW{{{0.1, 0.09}, {0.3, 0.0}}}};
    for (const auto& m : models)
        for (int i = 0; i <= 400; ++i) CHECK(kappa(m, 0.05 * i * i).imag() >= 0.0);
}

TEST_CASE("KSB corrected wavenumber stays below the high-frequency bound") {
    for (double g : {1.2, 1.5, 2.0}) {
        const KSB m{0.05, 1.0, g};
        const double s = std::sin((g - 1.0) * std::numbers::pi / 4.0);
        for (double w = 10.0; w < 1e5; w *= 1.7)
            CHECK(std::abs(kappa_tilde(m, w, 1).imag()) <= m.alpha0 * w * s);
    }
}

TEST_CASE("jet derivatives agree with finite differences") {
    for (const auto& m : sample_models()) {
        for (double w : {0.4, 1.3, 5.0}) {
            const CJet2 l1 = lambda1(m, CJet2::variable(w));
            const CJet2 l2 = lambda2(m, CJet2::variable(w));
            auto f1 = [&](double x) { return lambda1(m, x); };
            auto f2 = [&](double x) { return lambda2(m, x); };
            const double h = 1e-4 * w;
            CHECK(close(l1.derivative(1), central(f1, w, h), 1e-6));
            CHECK(close(l2.derivative(1), central(f2, w, h), 1e-6));
            auto d1 = [&](double x) { return central(f1, x, 1e-5 * w); };
            CHECK(close(l1.derivative(2), central(d1, w, 1e-3 * w), 1e-5));
        }
    }
}

TEST_CASE("lambda2 is the second-order coefficient of the exact ratio") {
    // Even part of K(a) - 1 in a, from the closed form with a -> -a.
    const std::vector<Relaxation> p{{0.02, 0.01}, {0.015, 0.002}};
    const NSW m{p};
    const double scale = expansion_parameter(m);
    for (double w : {0.5, 2.0, 8.0}) {
        const double h = 1e-4;
        auto scaled = [&](double s) {
            std::vector<Relaxation> q;
            for (const auto& r : p) q.push_back({r.tau * s / scale, r.tau_tilde * s / scale});
            return nsw_ratio(q, w);
        };
        const cd second = (scaled(h) + scaled(-h) - 2.0) / (2.0 * h * h);
        CHECK(close(lambda2(m, w), second, 1e-5));
        const cd first = (scaled(h) - scaled(-h)) / (2.0 * h);
        CHECK(close(lambda1(m, w), -first, 1e-5));
    }
    CHECK(lambda2(KSB{0.1, 1.0, 1.5}, 2.0) == cd(0.0));
}

TEST_CASE("first-order conditions hold pointwise") {
    for (const auto& m : sample_models()) {
        for (double w : {-3.0, -0.7, 0.2, 1.0, 6.0}) {
            const CJet2 l = lambda1(m, CJet2::variable(w));
            const cd g1 = correction_coefficients(m, -w).gamma1;
            const cd nu2 = correction_coefficients(m, -w).nu2;
            CHECK(std::abs(g1 + 2.0 * l[0] + w * l.derivative(1)) < 1e-13);
            CHECK(std::abs(nu2 + 3.0 * l[0] + w * l.derivative(1)) < 1e-13);
        }
    }
}

TEST_CASE("beta2 matches the expansion of the exact weight") {
    // Oracle: β2(-w) = 3λ1² + 3λ2 + 2wλ1λ1' + wλ2', derivatives by differences.
    for (const auto& m : sample_models()) {
        for (double w : {-2.0, -0.4, 0.6, 3.0}) {
            auto f1 = [&](double x) { return lambda1(m, x); };
            auto f2 = [&](double x) { return lambda2(m, x); };
            const double h = 1e-5;
            const cd l1 = f1(w), l2 = f2(w);
            const cd expected = 3.0 * l1 * l1 + 3.0 * l2 + 2.0 * w * l1 * central(f1, w, h) +
                                w * central(f2, w, h);
            CHECK(close(correction_coefficients(m, -w).beta2, expected, 1e-7));
        }
    }
}

TEST_CASE("expansion residuals shrink at the expected rates") {
    const std::vector<AttenuationModel> families{NSW{{{2.0, 1.0}}}, ThermoViscous{1.0}};
    for (const auto& family : families) {
        for (double w : {0.5, 1.0, 2.0}) {
            std::vector<double> r1, r2;
            for (double a : {1e-1, 1e-2, 1e-3}) {
                const auto m = with_expansion_parameter(family, a);
                const cd k = kappa(m, w);
                const cd l1 = lambda1(m, w), l2 = lambda2(m, w);
                r1.push_back(std::abs(k - w * (1.0 - a * l1)));
                r2.push_back(std::abs(k - w * (1.0 - a * l1 + a * a * l2)));
            }
            CHECK(std::log10(r1[0] / r1[2]) / 2.0 >= 1.8);
            CHECK(std::log10(r2[0] / r2[2]) / 2.0 >= 2.7);
        }
    }
}

TEST_CASE("rho thresholds") {
    CHECK(rho_threshold(KSB{0.01, 1.0, 2.0}, 2.0) == 5000.0);
    CHECK(rho_threshold(NSW{{{0.02, 0.01}}}, 2.0) == doctest::Approx(7.0710678118654755));
    CHECK(rho_threshold(NSW{{{0.02, 0.02}}}, 2.0) == std::numeric_limits<double>::infinity());
    CHECK(rho_threshold(KSB{0.0, 1.0, 2.0}, 2.0) == std::numeric_limits<double>::infinity());
    // Two processes: sqrt(N / (diam Σ(τ_j - τ~_j))).
    CHECK(rho_threshold(NSW{{{0.02, 0.01}, {0.03, 0.005}}}, 2.0) ==
          doctest::Approx(std::sqrt(2.0 / (2.0 * 0.035))));
    const double g = 1.5;
    CHECK(rho_threshold(KSB{0.01, 2.0, g}, 3.0) ==
          doctest::Approx(std::pow(2.0, (g - 1) / (3 - g)) /
                          std::pow(0.01 * 3.0 * std::sin((g - 1) * std::numbers::pi / 4),
                                   2 / (3 - g))));
    CHECK_THROWS_AS(rho_threshold(ThermoViscous{0.1}, 2.0), CapabilityError);
    CHECK_THROWS_AS(rho_threshold(KSB{0.01, 1.0, 2.0}, 0.0), ParameterError);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(validate(KSB{0.01, 1.0, 2.5}), ParameterError);
    CHECK_THROWS_AS(validate(KSB{0.01, 0.0, 2.0}), ParameterError);
    CHECK_THROWS_AS(validate(KSB{-0.01, 1.0, 2.0}), ParameterError);
    CHECK_THROWS_AS(validate(NSW{{{0.01, 0.02}}}), ParameterError);
    CHECK_THROWS_AS(validate(NSW{}), ParameterError);
    CHECK_THROWS_AS(validate(ThermoViscous{-1.0}), ParameterError);
    CHECK_THROWS_AS(kappa_tilde(KSB{0.01, 1.0, 2.0}, 1.0, 3), CapabilityError);
    CHECK_THROWS_AS(lambda_weight(KSB{0.01, 1.0, 2.0}, 1.0, -1), CapabilityError);
}
