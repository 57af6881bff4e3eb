#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "patr/dispersion.hpp"

namespace patr {

// Uniform sample positions t0 + i*dt, i = 0..n-1.
struct TimeGrid {
    double t0 = 0.0;
    double dt = 1.0;
    std::size_t n = 0;

    double at(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
    double back() const { return at(n == 0 ? 0 : n - 1); }
    // Composite trapezoid weight of sample i.
    double weight(std::size_t i) const { return (i == 0 || i + 1 == n) ? 0.5 * dt : dt; }

    // n samples covering [t0, t1] inclusive.
    static TimeGrid span(double t0, double t1, std::size_t n);
};

struct TimeSignal {
    TimeGrid grid;
    std::vector<double> samples;

    static TimeSignal zeros(const TimeGrid& grid) { return {grid, std::vector<double>(grid.n, 0.0)}; }
    double l2_norm() const;  // trapezoid L2 norm
    double max_abs() const;
};

// Symmetric frequency samples ω_k = (k - n) Δω, k = 0..2n, Δω = cutoff / n.
struct FrequencyGrid {
    double cutoff = 1.0;
    std::size_t half_count = 512;

    double spacing() const { return cutoff / static_cast<double>(half_count); }
    std::size_t size() const { return 2 * half_count + 1; }
    double at(std::size_t k) const {
        return (static_cast<double>(k) - static_cast<double>(half_count)) * spacing();
    }
    double weight(std::size_t k) const {
        return (k == 0 || k + 1 == size()) ? 0.5 * spacing() : spacing();
    }

    // Grid whose trapezoid rule makes the band-limit on `time` an exact
    // discrete identity at the samples: cutoff π/dt, half_count = n.
    static FrequencyGrid nyquist(const TimeGrid& time);
};

struct Spectrum {
    FrequencyGrid grid;
    std::vector<cdouble> values;
};

// Exponent budget for e^{x}, x = |Im ω|·|t|, kept inside double range.
inline constexpr double kGrowthLimit = 700.0;

// F[φ](ω) = (2π)^{-1/2} ∫ e^{iωt} φ(t) dt by trapezoid over the support.
// Complex ω allowed, guarded by kGrowthLimit (RangeError).
cdouble fourier(const TimeSignal& signal, cdouble omega);
Spectrum fourier(const TimeSignal& signal, const FrequencyGrid& grid);

// Unnormalized moments Σ_q w_q s_q^p e^{i z_k s_q} φ(s_q) for each z_k.
std::vector<cdouble> moment_transform(const TimeSignal& signal, std::span<const cdouble> z,
                                      int power = 0);

// Σ_k c_k e^{i b_k t} at every sample of `out`.
std::vector<cdouble> exponential_sum(std::span<const cdouble> coeffs,
                                     std::span<const cdouble> b, const TimeGrid& out);

// Core of every operator below:
//   out(t) = (1/2π) Σ_k w_k m_k e^{i b_k t} Σ_q w_q e^{i a_k s_q} φ(s_q),
// with w_k the trapezoid weights of `grid`. Returns the complex result.
std::vector<cdouble> double_integral(const TimeSignal& signal, const FrequencyGrid& grid,
                                     std::span<const cdouble> inner, std::span<const cdouble> outer,
                                     std::span<const cdouble> multiplier, const TimeGrid& out);

// Drops the imaginary part after checking it is round-off relative to
// `reference` (NumericError otherwise).
TimeSignal real_part(const TimeGrid& grid, const std::vector<cdouble>& values, double reference);

// Band-limiting S_ρ.
double s_rho(const TimeSignal& signal, double rho, double t, std::size_t half_count = 512);
TimeSignal s_rho(const TimeSignal& signal, const FrequencyGrid& grid);

// L_a[φ](t) = (1/2π) ∫ (ω/κ) e^{-iωt} ∫ e^{iκ s} φ(s) ds dω.
TimeSignal apply_attenuation(const AttenuationModel& model, const TimeSignal& signal,
                             const FrequencyGrid& grid);
TimeSignal apply_attenuation(const AttenuationModel& model, const TimeSignal& signal,
                             const FrequencyGrid& grid, const TimeGrid& out);

// L~_{a,ρ}[φ](t) = (1/2π) ∫ (ωλ/κ~) e^{-iωt} ∫ e^{iκ~ s} φ(s) ds dω.
TimeSignal apply_correction(const AttenuationModel& model, const TimeSignal& signal,
                            const FrequencyGrid& grid, int order, const TimeGrid& out);

// L~*_{a,ρ}[φ](t) = (1/2π) ∫ (ωλ/κ~) e^{iκ~ t} ∫ e^{-iωs} φ(s) ds dω.
TimeSignal apply_correction_adjoint(const AttenuationModel& model, const TimeSignal& signal,
                                    const FrequencyGrid& grid, int order);
TimeSignal apply_correction_adjoint(const AttenuationModel& model, const TimeSignal& signal,
                                    const FrequencyGrid& grid, int order, const TimeGrid& out);

// Coefficient operators of L_a = Σ f_k a^k and L~*_a = Σ g_k a^k, with a the
// model's expansion parameter.
struct FirstOrderTerms {
    TimeSignal f1;
    TimeSignal g1;
};
FirstOrderTerms first_order_operators(const AttenuationModel& model, const TimeSignal& signal,
                                      const FrequencyGrid& grid);

struct SecondOrderTerms {
    TimeSignal f2;
    TimeSignal g2;
    TimeSignal g1_f1;  // g1[f1[φ]]
};
SecondOrderTerms second_order_operators(const AttenuationModel& model, const TimeSignal& signal,
                                        const FrequencyGrid& grid);

// ‖L~*_{a,ρ} L_a φ - S_ρ φ‖ / ‖φ‖ on the signal's grid.
double composition_residual(const AttenuationModel& model, const TimeSignal& signal,
                            const FrequencyGrid& grid, int order);

struct IdentityCheck {
    int order = 0;
    std::vector<double> a;
    std::vector<double> residual;
    double slope = 0.0;  // least-squares slope of log residual against log a
};

// Composition residual for a Gaussian pulse (width sigma) over a family of
// models obtained by setting the expansion parameter to each value in `a`.
IdentityCheck verify_composition_identity(const AttenuationModel& family, int order, double sigma,
                                          double rho, const std::vector<double>& a);

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// ⟨φ, ψ⟩ = ∫ φ ψ dt on a shared grid (trapezoid).
double inner_product(const TimeSignal& a, const TimeSignal& b);

}  // namespace patr
