#include "patr/time_reversal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "patr/error.hpp"
#include "patr/parallel.hpp"

namespace patr {
namespace {

constexpr cdouble kI{0.0, 1.0};
constexpr double kFourPi = 4.0 * std::numbers::pi;

double checked_distance(Vec3 x, Vec3 y) {
    const double d = distance(x, y);
    if (d == 0.0) throw ParameterError("Green's function is singular at x = y");
    return d;
}

void guard_kernel(cdouble kt, double d, double omega) {
    if (-kt.imag() * d > kGrowthLimit) {
        std::ostringstream os;
        os << "corrected Green's function overflows at omega = " << omega << " (Im kappa~ = "
           << kt.imag() << ", distance " << d
           << "); lower the cutoff rho, see rho_threshold";
        throw RangeError(os.str());
    }
}

// κ~ and λ on the frequency grid.
struct CorrectedSamples {
    std::vector<double> omega;
    std::vector<cdouble> kappa;
    std::vector<cdouble> lambda;
};

CorrectedSamples sample(const AttenuationModel& model, const FrequencyGrid& grid, int order) {
    CorrectedSamples s;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double w = grid.at(k);
        s.omega.push_back(w);
        s.kappa.push_back(kappa_tilde(model, w, order));
        s.lambda.push_back(lambda_weight(model, w, order));
    }
    return s;
}

void check_config(const DataSet& data, const ReconstructionConfig& config,
                  std::vector<std::string>* warnings) {
    validate(data.model);
    if (!(config.rho > 0.0) || !std::isfinite(config.rho))
        throw ParameterError("rho must be finite and > 0");
    if (config.half_count == 0) throw ParameterError("frequency half_count must be >= 1");
    if (config.order < 0 || config.order > 2)
        throw CapabilityError("correction order " + std::to_string(config.order) +
                              " is not supported (expected 0, 1 or 2)");
    for (const auto& p : config.points) {
        if (!(norm(p) < data.sensors.radius))
            throw ParameterError("evaluation points must lie inside the sensor sphere");
    }
    if (config.order == 0 || !is_attenuating(data.model)) return;

    double threshold = 0.0;
    try {
        threshold = rho_threshold(data.model, 2.0 * data.sensors.radius);
    } catch (const CapabilityError&) {
        if (warnings) warnings->push_back("no stability threshold for " + describe(data.model));
        return;
    }
    if (config.rho <= threshold) return;
    std::ostringstream os;
    os << "rho = " << config.rho << " exceeds the stability threshold " << threshold;
    if (!config.override_rho) throw ParameterError(os.str() + "; pass an override to proceed");
    if (warnings) warnings->push_back(os.str() + " (overridden)");
}

double interpolate(const DataSet& data, std::size_t m, double t) {
    const TimeGrid& g = data.grid;
    if (t < g.t0 || t > g.back()) return 0.0;
    const double u = (t - g.t0) / g.dt;
    const auto i = std::min(static_cast<std::size_t>(u), g.n - 2);
    const double f = u - static_cast<double>(i);
    return (1.0 - f) * data.traces[m][i] + f * data.traces[m][i + 1];
}

double finish(cdouble sum, double scale, Vec3 x) {
    if (!std::isfinite(sum.real()) || !std::isfinite(sum.imag())) {
        std::ostringstream os;
        os << "non-finite imaging value at x = (" << x.x << ", " << x.y << ", " << x.z << ")";
        throw NumericError(os.str());
    }
    if (std::abs(sum.imag()) > 1e-8 * std::max(scale, std::abs(sum.real()))) {
        throw NumericError("imaging value is not real: imaginary residue " +
                           std::to_string(sum.imag()));
    }
    return sum.real();
}

}  // namespace

cdouble green_free(Vec3 x, Vec3 y, double omega) {
    const double d = checked_distance(x, y);
    return std::exp(kI * (omega * d)) / (kFourPi * d);
}

cdouble green_corrected(const AttenuationModel& model, Vec3 x, Vec3 y, double omega, int order) {
    const double d = checked_distance(x, y);
    const cdouble kt = kappa_tilde(model, omega, order);
    guard_kernel(kt, d, omega);
    return lambda_weight(model, omega, order) * std::exp(kI * kt * d) / (kFourPi * d);
}

std::vector<Vec3> line_profile(Vec3 center, Vec3 direction, double half_length, std::size_t n) {
    if (n < 2) throw ParameterError("line profile needs at least 2 points");
    const double len = norm(direction);
    if (!(len > 0.0)) throw ParameterError("line profile direction must be non-zero");
    const Vec3 u = (1.0 / len) * direction;
    std::vector<Vec3> pts;
    for (std::size_t i = 0; i < n; ++i) {
        const double s = -half_length + 2.0 * half_length * static_cast<double>(i) /
                                            static_cast<double>(n - 1);
        pts.push_back(center + s * u);
    }
    return pts;
}

double back_propagate(const DataSet& data, Vec3 x, double s, const ReconstructionConfig& config) {
    check_config(data, config, nullptr);
    const FrequencyGrid grid = config.frequencies();
    const double T = data.final_time();
    std::vector<double> g(data.sensors.size());
    for (std::size_t m = 0; m < g.size(); ++m) g[m] = interpolate(data, m, T - s);

    cdouble sum = 0.0;
    double scale = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double w = grid.at(k);
        cdouble surface = 0.0;
        for (std::size_t m = 0; m < g.size(); ++m) {
            surface += data.sensors.weights[m] *
                       green_corrected(data.model, x, data.sensors.points[m], w, config.order) *
                       g[m];
        }
        const cdouble term = grid.weight(k) * kI * w * surface * std::exp(-kI * (w * (T - s)));
        sum += term;
        scale += std::abs(term);
    }
    const double c = -0.5 / std::numbers::pi;
    return finish(c * sum, std::abs(c) * scale, x);
}

double reconstruct_literal(const DataSet& data, Vec3 x, const ReconstructionConfig& config) {
    double sum = 0.0;
    for (std::size_t j = 0; j < data.grid.n; ++j)
        sum += data.grid.weight(j) * back_propagate(data, x, data.grid.at(j), config);
    return 2.0 * sum;
}

ImagingResult reconstruct(const DataSet& data, const ReconstructionConfig& config) {
    ImagingResult result;
    check_config(data, config, &result.warnings);
    result.points = config.points;
    result.model = describe(data.model);
    result.order = config.order;
    result.rho = config.rho;
    result.half_count = config.half_count;

    const FrequencyGrid grid = config.frequencies();
    const CorrectedSamples tilde = sample(data.model, grid, config.order);
    const std::size_t nw = grid.size();
    const std::size_t M = data.sensors.size();

    // spectra[m][k] = Σ_j w_j g(y_m, t_j) e^{-iω_k t_j}
    std::vector<cdouble> minus_omega(nw);
    for (std::size_t k = 0; k < nw; ++k) minus_omega[k] = -tilde.omega[k];
    std::vector<std::vector<cdouble>> spectra(M);
    parallel_for(M, config.threads,
                 [&](std::size_t m) { spectra[m] = moment_transform(data.trace(m), minus_omega); });

    // Frequency factor w_k iω_k λ_k with the -(1/2π) prefactor and the
    // normalization 2 folded in.
    std::vector<cdouble> factor(nw);
    for (std::size_t k = 0; k < nw; ++k)
        factor[k] = -(1.0 / std::numbers::pi) * grid.weight(k) * kI * tilde.omega[k] * tilde.lambda[k];

    result.values.resize(config.points.size());
    parallel_for(config.points.size(), config.threads, [&](std::size_t p) {
        const Vec3 x = config.points[p];
        std::vector<double> dist(M), amp(M);
        for (std::size_t m = 0; m < M; ++m) {
            dist[m] = checked_distance(x, data.sensors.points[m]);
            amp[m] = data.sensors.weights[m] / (kFourPi * dist[m]);
        }
        cdouble sum = 0.0;
        double scale = 0.0;
        for (std::size_t k = 0; k < nw; ++k) {
            const cdouble kt = tilde.kappa[k];
            cdouble surface = 0.0;
            for (std::size_t m = 0; m < M; ++m) {
                guard_kernel(kt, dist[m], tilde.omega[k]);
                surface += amp[m] * std::exp(kI * kt * dist[m]) * spectra[m][k];
            }
            const cdouble term = factor[k] * surface;
            sum += term;
            scale += std::abs(term);
        }
        result.values[p] = finish(sum, scale, x);
    });

    if (!data.phantom.components.empty() && !config.points.empty()) {
        const auto ref = phantom_values(data.phantom, config.points);
        double ref_norm = 0.0;
        for (double v : ref) ref_norm += v * v;
        if (ref_norm > 0.0) result.relative_error = relative_l2_error(result.values, ref);
    }
    return result;
}

double relative_l2_error(const std::vector<double>& values, const std::vector<double>& reference) {
    if (values.size() != reference.size())
        throw ParameterError("relative_l2_error: size mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        num += (values[i] - reference[i]) * (values[i] - reference[i]);
        den += reference[i] * reference[i];
    }
    if (den == 0.0) throw ParameterError("relative_l2_error: reference is zero");
    return std::sqrt(num / den);
}

std::vector<double> phantom_values(const Phantom& phantom, const std::vector<Vec3>& points) {
    std::vector<double> v;
    v.reserve(points.size());
    for (const auto& p : points) v.push_back(phantom.value(p));
    return v;
}

std::vector<std::pair<double, double>> sweep_rho(const DataSet& data,
                                                 const ReconstructionConfig& config,
                                                 const std::vector<double>& rhos) {
    const auto ref = phantom_values(data.phantom, config.points);
    std::vector<std::pair<double, double>> table;
    for (double rho : rhos) {
        ReconstructionConfig c = config;
        c.rho = rho;
        const auto r = reconstruct(data, c);
        table.emplace_back(rho, relative_l2_error(r.values, ref));
    }
    return table;
}

}  // namespace patr
