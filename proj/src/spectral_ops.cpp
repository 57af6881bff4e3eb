#include "patr/spectral_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "patr/error.hpp"

namespace patr {
namespace {

constexpr cdouble kI{0.0, 1.0};
constexpr double kInvTwoPi = 0.5 / std::numbers::pi;
const double kInvSqrtTwoPi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

// Recompute the running phasor exactly every so many steps.
constexpr std::size_t kReanchor = 32;

void guard_growth(cdouble z, double s0, double s1, const char* what) {
    const double im = z.imag();
    const double worst = std::max({-im * s0, -im * s1, std::abs(im) * std::abs(s1 - s0)});
    if (worst > kGrowthLimit) {
        std::ostringstream os;
        os << what << ": exponential growth exceeds e^" << kGrowthLimit << " (Im omega = " << im
           << " over [" << s0 << ", " << s1 << "]); reduce the frequency cutoff";
        throw RangeError(os.str());
    }
}

std::vector<cdouble> frequencies(const FrequencyGrid& grid) {
    std::vector<cdouble> w(grid.size());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = grid.at(k);
    return w;
}

std::vector<cdouble> negated(const std::vector<cdouble>& v) {
    std::vector<cdouble> out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = -v[k];
    return out;
}

// Sampled dispersion data for one operator application.
struct SampledDispersion {
    std::vector<cdouble> kappa;       // κ or κ~
    std::vector<cdouble> multiplier;  // ω/κ or ωλ/κ~
};

SampledDispersion sample_attenuation(const AttenuationModel& model, const FrequencyGrid& grid) {
    SampledDispersion d;
    d.kappa.resize(grid.size());
    d.multiplier.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double w = grid.at(k);
        const cdouble r = kappa_ratio(model, w);
        d.kappa[k] = w * r;
        d.multiplier[k] = 1.0 / r;
    }
    return d;
}

SampledDispersion sample_correction(const AttenuationModel& model, const FrequencyGrid& grid,
                                    int order) {
    SampledDispersion d;
    d.kappa.resize(grid.size());
    d.multiplier.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double w = grid.at(k);
        const cdouble r = kappa_tilde_ratio(model, w, order);
        d.kappa[k] = w * r;
        d.multiplier[k] = lambda_weight(model, w, order) / r;
    }
    return d;
}

double max_abs(const std::vector<cdouble>& v) {
    double m = 0.0;
    for (const auto& x : v) m = std::max(m, std::abs(x));
    return m;
}

// (1/2π) Σ_k w_k x_k e^{-iω_k t}: the inverse transform of unnormalized
// spectra sampled on `grid`.
std::vector<cdouble> inverse_unnormalized(const FrequencyGrid& grid, std::vector<cdouble> x,
                                          const TimeGrid& out) {
    for (std::size_t k = 0; k < x.size(); ++k) x[k] *= grid.weight(k) * kInvTwoPi;
    return exponential_sum(x, negated(frequencies(grid)), out);
}

std::vector<cdouble> times_t(const TimeGrid& g, std::vector<cdouble> v, int power) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= std::pow(g.at(i), power);
    return v;
}

}  // namespace

TimeGrid TimeGrid::span(double t0, double t1, std::size_t n) {
    if (n < 2 || !(t1 > t0)) throw ParameterError("time grid needs n >= 2 and t1 > t0");
    return {t0, (t1 - t0) / static_cast<double>(n - 1), n};
}

FrequencyGrid FrequencyGrid::nyquist(const TimeGrid& time) {
    return {std::numbers::pi / time.dt, time.n};
}

double TimeSignal::l2_norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) s += grid.weight(i) * samples[i] * samples[i];
    return std::sqrt(s);
}

double TimeSignal::max_abs() const {
    double m = 0.0;
    for (double x : samples) m = std::max(m, std::abs(x));
    return m;
}

double inner_product(const TimeSignal& a, const TimeSignal& b) {
    if (a.samples.size() != b.samples.size()) throw ParameterError("inner_product: grid mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.samples.size(); ++i)
        s += a.grid.weight(i) * a.samples[i] * b.samples[i];
    return s;
}

std::vector<cdouble> moment_transform(const TimeSignal& signal, std::span<const cdouble> z,
                                      int power) {
    const TimeGrid& g = signal.grid;
    const std::size_t n = g.n;
    std::vector<cdouble> out(z.size(), cdouble(0.0));
    if (n == 0) return out;

    std::vector<double> c(n);
    for (std::size_t q = 0; q < n; ++q) {
        c[q] = g.weight(q) * signal.samples[q] * (power == 0 ? 1.0 : std::pow(g.at(q), power));
    }
    for (std::size_t k = 0; k < z.size(); ++k) {
        guard_growth(z[k], g.t0, g.back(), "fourier");
        const cdouble step = std::exp(kI * z[k] * g.dt);
        cdouble acc = c[n - 1];
        for (std::size_t q = n - 1; q-- > 0;) acc = acc * step + c[q];
        out[k] = acc * std::exp(kI * z[k] * g.t0);
    }
    return out;
}

std::vector<cdouble> exponential_sum(std::span<const cdouble> coeffs, std::span<const cdouble> b,
                                     const TimeGrid& out) {
    std::vector<cdouble> acc(out.n, cdouble(0.0));
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        if (coeffs[k] == cdouble(0.0)) continue;
        guard_growth(b[k], out.t0, out.back(), "inverse transform");
        const cdouble step = std::exp(kI * b[k] * out.dt);
        cdouble phase;
        for (std::size_t j = 0; j < out.n; ++j) {
            if (j % kReanchor == 0) phase = std::exp(kI * b[k] * out.at(j));
            acc[j] += coeffs[k] * phase;
            phase *= step;
        }
    }
    return acc;
}

std::vector<cdouble> double_integral(const TimeSignal& signal, const FrequencyGrid& grid,
                                     std::span<const cdouble> inner, std::span<const cdouble> outer,
                                     std::span<const cdouble> multiplier, const TimeGrid& out) {
    auto c = moment_transform(signal, inner, 0);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] *= grid.weight(k) * kInvTwoPi * multiplier[k];
    return exponential_sum(c, outer, out);
}

TimeSignal real_part(const TimeGrid& grid, const std::vector<cdouble>& values, double reference) {
    TimeSignal s{grid, std::vector<double>(values.size())};
    double im = 0.0;
    double re = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        s.samples[i] = values[i].real();
        re = std::max(re, std::abs(values[i].real()));
        im = std::max(im, std::abs(values[i].imag()));
        if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag())) {
            throw NumericError("non-finite operator output at t = " + std::to_string(grid.at(i)));
        }
    }
    if (im > 1e-8 * std::max(reference, re)) {
        throw NumericError("operator output is not real: imaginary residue " + std::to_string(im));
    }
    return s;
}

cdouble fourier(const TimeSignal& signal, cdouble omega) {
    const cdouble z[1] = {omega};
    return moment_transform(signal, z, 0)[0] * kInvSqrtTwoPi;
}

Spectrum fourier(const TimeSignal& signal, const FrequencyGrid& grid) {
    auto v = moment_transform(signal, frequencies(grid), 0);
    for (auto& x : v) x *= kInvSqrtTwoPi;
    return {grid, std::move(v)};
}

TimeSignal s_rho(const TimeSignal& signal, const FrequencyGrid& grid) {
    if (!(grid.cutoff > 0.0)) throw ParameterError("S_rho: cutoff must be > 0");
    const auto w = frequencies(grid);
    const std::vector<cdouble> ones(w.size(), cdouble(1.0));
    const auto v = double_integral(signal, grid, w, negated(w), ones, signal.grid);
    return real_part(signal.grid, v, signal.max_abs());
}

double s_rho(const TimeSignal& signal, double rho, double t, std::size_t half_count) {
    if (!(rho > 0.0)) throw ParameterError("S_rho: cutoff must be > 0");
    const FrequencyGrid grid{rho, half_count};
    const auto w = frequencies(grid);
    const std::vector<cdouble> ones(w.size(), cdouble(1.0));
    const TimeGrid at{t, 1.0, 1};
    const auto v = double_integral(signal, grid, w, negated(w), ones, at);
    return real_part(at, v, signal.max_abs()).samples[0];
}

TimeSignal apply_attenuation(const AttenuationModel& model, const TimeSignal& signal,
                             const FrequencyGrid& grid, const TimeGrid& out) {
    validate(model);
    const auto d = sample_attenuation(model, grid);
    const auto v =
        double_integral(signal, grid, d.kappa, negated(frequencies(grid)), d.multiplier, out);
    return real_part(out, v, signal.max_abs());
}

TimeSignal apply_attenuation(const AttenuationModel& model, const TimeSignal& signal,
                             const FrequencyGrid& grid) {
    return apply_attenuation(model, signal, grid, signal.grid);
}

TimeSignal apply_correction(const AttenuationModel& model, const TimeSignal& signal,
                            const FrequencyGrid& grid, int order, const TimeGrid& out) {
    validate(model);
    const auto d = sample_correction(model, grid, order);
    const auto v =
        double_integral(signal, grid, d.kappa, negated(frequencies(grid)), d.multiplier, out);
    return real_part(out, v, std::max(signal.max_abs(), max_abs(v)));
}

TimeSignal apply_correction_adjoint(const AttenuationModel& model, const TimeSignal& signal,
                                    const FrequencyGrid& grid, int order, const TimeGrid& out) {
    validate(model);
    const auto d = sample_correction(model, grid, order);
    const auto v =
        double_integral(signal, grid, negated(frequencies(grid)), d.kappa, d.multiplier, out);
    return real_part(out, v, std::max(signal.max_abs(), max_abs(v)));
}

TimeSignal apply_correction_adjoint(const AttenuationModel& model, const TimeSignal& signal,
                                    const FrequencyGrid& grid, int order) {
    return apply_correction_adjoint(model, signal, grid, order, signal.grid);
}

FirstOrderTerms first_order_operators(const AttenuationModel& model, const TimeSignal& signal,
                                      const FrequencyGrid& grid) {
    validate(model);
    const auto w = frequencies(grid);
    const auto phi0 = moment_transform(signal, w, 0);
    const auto phi1 = moment_transform(signal, w, 1);

    std::vector<cdouble> xf(w.size()), xg0(w.size()), xg1(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) {
        const double om = grid.at(k);
        const cdouble l1 = lambda1(model, om);
        const cdouble g1_neg = correction_coefficients(model, -om).gamma1;
        xf[k] = -kI * om * l1 * phi1[k] + l1 * phi0[k];
        xg0[k] = g1_neg * phi0[k];
        xg1[k] = kI * om * l1 * phi0[k];
    }
    const TimeGrid& tg = signal.grid;
    const double ref = signal.max_abs();
    const auto f1 = inverse_unnormalized(grid, xf, tg);
    auto g1 = inverse_unnormalized(grid, xg0, tg);
    const auto g1t = times_t(tg, inverse_unnormalized(grid, xg1, tg), 1);
    for (std::size_t i = 0; i < g1.size(); ++i) g1[i] += g1t[i];
    return {real_part(tg, f1, ref), real_part(tg, g1, ref)};
}

SecondOrderTerms second_order_operators(const AttenuationModel& model, const TimeSignal& signal,
                                        const FrequencyGrid& grid) {
    validate(model);
    const auto w = frequencies(grid);
    const auto phi0 = moment_transform(signal, w, 0);
    const auto phi1 = moment_transform(signal, w, 1);
    const auto phi2 = moment_transform(signal, w, 2);

    std::vector<cdouble> xf(w.size()), xg0(w.size()), xg1(w.size()), xg2(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) {
        const double om = grid.at(k);
        const auto here = correction_coefficients(model, om);
        const auto mirrored = correction_coefficients(model, -om);
        const cdouble l1 = here.lambda1;
        const cdouble l2 = here.lambda2;
        const cdouble mu2 = here.mu2;
        const cdouble half_sq = 0.5 * (kI * om * l1) * (kI * om * l1);
        xf[k] = mu2 * phi0[k] - kI * om * mu2 * phi1[k] + half_sq * phi2[k];
        xg0[k] = mirrored.gamma2 * phi0[k];
        xg1[k] = kI * om * (mirrored.gamma1 * l1 - l2) * phi0[k];
        xg2[k] = half_sq * phi0[k];
    }
    const TimeGrid& tg = signal.grid;
    const double ref = signal.max_abs();
    const auto f2 = inverse_unnormalized(grid, xf, tg);
    auto g2 = inverse_unnormalized(grid, xg0, tg);
    const auto g2t = times_t(tg, inverse_unnormalized(grid, xg1, tg), 1);
    const auto g2tt = times_t(tg, inverse_unnormalized(grid, xg2, tg), 2);
    for (std::size_t i = 0; i < g2.size(); ++i) g2[i] += g2t[i] + g2tt[i];

    const auto first = first_order_operators(model, signal, grid);
    auto nested = first_order_operators(model, first.f1, grid);
    return {real_part(tg, f2, ref), real_part(tg, g2, ref), std::move(nested.g1)};
}

}  // namespace patr

namespace patr {

double composition_residual(const AttenuationModel& model, const TimeSignal& signal,
                            const FrequencyGrid& grid, int order) {
    const auto forward = apply_attenuation(model, signal, grid);
    const auto back = apply_correction_adjoint(model, forward, grid, order);
    const auto ref = s_rho(signal, grid);
    TimeSignal diff = back;
    for (std::size_t i = 0; i < diff.samples.size(); ++i) diff.samples[i] -= ref.samples[i];
    return diff.l2_norm() / signal.l2_norm();
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ParameterError("slope needs >= 2 pairs");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return sxy / sxx;
}

IdentityCheck verify_composition_identity(const AttenuationModel& family, int order, double sigma,
                                          double rho, const std::vector<double>& a) {
    if (!(sigma > 0.0)) throw ParameterError("pulse width must be > 0");
    // The pulse sits at t = 1; the window runs long enough for the slowly
    // decaying attenuated tail.
    const double center = 1.0;
    const TimeGrid grid = TimeGrid::span(center - 10.0 * sigma, 20.0, 2101);
    TimeSignal phi = TimeSignal::zeros(grid);
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double u = (grid.at(i) - center) / sigma;
        phi.samples[i] = std::exp(-0.5 * u * u);
    }
    const FrequencyGrid freq{rho, 512};
    IdentityCheck out{order, a, {}, 0.0};
    for (double ai : a)
        out.residual.push_back(
            composition_residual(with_expansion_parameter(family, ai), phi, freq, order));
    out.slope = loglog_slope(out.a, out.residual);
    return out;
}

}  // namespace patr
