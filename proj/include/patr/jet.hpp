#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

namespace patr {

// Truncated univariate Taylor polynomial. Coefficients are stored normalized,
// c[k] = f^(k)(x0) / k!, so products are plain Cauchy products.
//
// The coefficient type T only needs field arithmetic plus sqrt/pow found by
// ADL, which lets jets nest: Jet<Jet<std::complex<double>, 2>, 2> carries a
// bivariate expansion (outer variable first).
template <class T, int Order>
class Jet {
    static_assert(Order >= 0, "jet order must be non-negative");

public:
    using value_type = T;
    static constexpr int order = Order;

    Jet() : c_{} {}
    Jet(const T& constant) : c_{} { c_[0] = constant; }  // NOLINT: implicit promotion is intended

    static Jet variable(const T& center) {
        Jet j(center);
        if constexpr (Order >= 1) j.c_[1] = T(1.0);
        return j;
    }

    const T& operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
    T& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }

    const T& value() const { return c_[0]; }

    // k-th derivative at the expansion point.
    T derivative(int k) const {
        T out = c_[static_cast<std::size_t>(k)];
        double f = 1.0;
        for (int i = 2; i <= k; ++i) f *= i;
        return out * f;
    }

    Jet operator-() const {
        Jet r;
        for (int k = 0; k <= Order; ++k) r[k] = -c_[k];
        return r;
    }

    Jet& operator+=(const Jet& o) {
        for (int k = 0; k <= Order; ++k) c_[k] += o[k];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        for (int k = 0; k <= Order; ++k) c_[k] -= o[k];
        return *this;
    }
    Jet& operator*=(const Jet& o) { return *this = *this * o; }
    Jet& operator/=(const Jet& o) { return *this = *this / o; }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }

    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r;
        for (int k = 0; k <= Order; ++k) {
            T s = a[0] * b[k];
            for (int j = 1; j <= k; ++j) s += a[j] * b[k - j];
            r[k] = s;
        }
        return r;
    }

    friend Jet operator/(const Jet& a, const Jet& b) {
        Jet r;
        for (int k = 0; k <= Order; ++k) {
            T s = a[k];
            for (int j = 1; j <= k; ++j) s -= b[j] * r[k - j];
            r[k] = s / b[0];
        }
        return r;
    }

    friend Jet operator*(const Jet& a, double s) {
        Jet r;
        for (int k = 0; k <= Order; ++k) r[k] = a[k] * s;
        return r;
    }
    friend Jet operator*(double s, const Jet& a) { return a * s; }
    friend Jet operator*(const Jet& a, const T& s) {
        Jet r;
        for (int k = 0; k <= Order; ++k) r[k] = a[k] * s;
        return r;
    }
    friend Jet operator*(const T& s, const Jet& a) { return a * s; }
    friend Jet operator/(const Jet& a, double s) { return a * (1.0 / s); }

private:
    std::array<T, Order + 1> c_;
};

template <class T, int N>
Jet<T, N> sqrt(const Jet<T, N>& x) {
    using std::sqrt;
    Jet<T, N> y;
    y[0] = sqrt(x[0]);
    for (int k = 1; k <= N; ++k) {
        T s = x[k];
        for (int j = 1; j < k; ++j) s -= y[j] * y[k - j];
        y[k] = s / (y[0] * 2.0);
    }
    return y;
}

// Real power via the recurrence from x y' = p x' y. Singular when x[0] == 0
// and N >= 1; callers handle that point analytically.
template <class T, int N>
Jet<T, N> pow(const Jet<T, N>& x, double p) {
    using std::pow;
    Jet<T, N> y;
    y[0] = pow(x[0], p);
    for (int k = 1; k <= N; ++k) {
        T s = x[1] * y[k - 1] * ((p + 1.0) * 1 - k);
        for (int j = 2; j <= k; ++j) s += x[j] * y[k - j] * ((p + 1.0) * j - k);
        y[k] = s / (x[0] * static_cast<double>(k));
    }
    return y;
}

template <class T, int N>
Jet<T, N> exp(const Jet<T, N>& x) {
    using std::exp;
    Jet<T, N> y;
    y[0] = exp(x[0]);
    for (int k = 1; k <= N; ++k) {
        T s = x[1] * y[k - 1];
        for (int j = 2; j <= k; ++j) s += x[j] * y[k - j] * static_cast<double>(j);
        y[k] = s / static_cast<double>(k);
    }
    return y;
}

using CJet2 = Jet<std::complex<double>, 2>;

}  // namespace patr
