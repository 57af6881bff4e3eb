#include <doctest.h>

#include <cmath>
#include <complex>

#include "patr/jet.hpp"

using patr::Jet;
using cd = std::complex<double>;

namespace {

template <class F>
double central(F f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("jet arithmetic follows the chain rule") {
    using J = Jet<double, 2>;
    const double x0 = 0.7;
    const J x = J::variable(x0);
    const J f = sqrt(x) * x / (J(1.0) + x);
    auto value = [](double x) { return std::sqrt(x) * x / (1.0 + x); };
    CHECK(f.value() == doctest::Approx(value(x0)).epsilon(1e-14));
    CHECK(f.derivative(1) == doctest::Approx(central(value, x0, 1e-5)).epsilon(1e-8));
    auto d1 = [&](double x) { return central(value, x, 1e-5); };
    CHECK(f.derivative(2) == doctest::Approx(central(d1, x0, 1e-3)).epsilon(1e-5));
}

TEST_CASE("a jet divided by itself is the unit jet") {
    using J = Jet<cd, 2>;
    const J x = J::variable(cd(0.3, -1.2));
    const J y = pow(x, -0.5) + exp(x);
    const J u = y / y;
    CHECK(std::abs(u[0] - 1.0) < 1e-15);
    CHECK(std::abs(u[1]) < 1e-15);
    CHECK(std::abs(u[2]) < 1e-15);
}

TEST_CASE("pow and exp derivatives match closed forms") {
    using J = Jet<cd, 2>;
    const cd z0(1.3, 0.4);
    const double p = -0.25;
    const J y = pow(J::variable(z0), p);
    CHECK(std::abs(y.derivative(1) - p * std::pow(z0, p - 1.0)) < 1e-14);
    CHECK(std::abs(y.derivative(2) - p * (p - 1.0) * std::pow(z0, p - 2.0)) < 1e-14);
    const J e = exp(J::variable(z0));
    CHECK(std::abs(e.derivative(2) - std::exp(z0)) < 1e-14);
}

TEST_CASE("nested jets carry mixed partial derivatives") {
    using In = Jet<cd, 2>;
    using Out = Jet<In, 2>;
    // f(a, w) = (1 - a w)^{-1/2}; ∂²f/∂a∂w at a = 0 is 1/2.
    const Out a = Out::variable(In(0.0));
    const In w = In::variable(cd(0.8));
    const Out f = pow(Out(In(1.0)) - a * Out(w), -0.5);
    // Coefficient of a is w/2, whose ω-derivative is 1/2.
    CHECK(std::abs(f[1][0] - 0.4) < 1e-15);
    CHECK(std::abs(f[1].derivative(1) - 0.5) < 1e-15);
    // Coefficient of a² is 3w²/8.
    CHECK(std::abs(f[2][0] - 3.0 * 0.64 / 8.0) < 1e-15);
}
