#include "patr/forward_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "patr/error.hpp"
#include "patr/parallel.hpp"

namespace patr {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// sinh(u)/u
double sinhc(double u) { return u == 0.0 ? 1.0 : std::sinh(u) / u; }

double ball_mean(const Ball& b, double d, double r) {
    const double R = b.radius;
    if (r + d < R) return b.amplitude;
    if (r > d + R || d > r + R || r + d == R) return 0.0;
    return b.amplitude * (R * R - (r - d) * (r - d)) / (4.0 * d * r);
}

double gaussian_mean(const Gaussian& g, double d, double r) {
    const double s2 = g.sigma * g.sigma;
    const double u = r * d / s2;
    if (u < 1.0) return g.amplitude * std::exp(-(r * r + d * d) / (2.0 * s2)) * sinhc(u);
    return g.amplitude * s2 / (2.0 * r * d) *
           (std::exp(-(r - d) * (r - d) / (2.0 * s2)) - std::exp(-(r + d) * (r + d) / (2.0 * s2)));
}

// ∂_t[t M(t)] for a ball: 1 while the sphere is inside, the N-wave
// (d - t)/(2d) while it cuts the boundary.
double ball_pressure(const Ball& b, double d, double t) {
    const double R = b.radius;
    if (t + d < R) return b.amplitude;
    if (t > d + R || d > t + R || t + d == R) return 0.0;
    return b.amplitude * (d - t) / (2.0 * d);
}

double gaussian_pressure(const Gaussian& g, double d, double t) {
    const double s2 = g.sigma * g.sigma;
    const double u = t * d / s2;
    if (u < 1.0) {
        return g.amplitude * std::exp(-(t * t + d * d) / (2.0 * s2)) *
               (std::cosh(u) - (t * t / s2) * sinhc(u));
    }
    return g.amplitude / (2.0 * d) *
           ((t + d) * std::exp(-(t + d) * (t + d) / (2.0 * s2)) -
            (t - d) * std::exp(-(t - d) * (t - d) / (2.0 * s2)));
}

double time_constant(const AttenuationModel& model) {
    return std::visit(Overloaded{
                          [](const ThermoViscous& m) { return m.a; },
                          [](const KSB& m) { return m.alpha0 > 0.0 ? m.tau0 : 0.0; },
                          [&](const NSW&) { return expansion_parameter(model); },
                      },
                      model);
}

}  // namespace

double Phantom::value(Vec3 y) const {
    double f = 0.0;
    for (const auto& c : components) {
        f += std::visit(Overloaded{
                            [&](const Ball& b) {
                                return distance(y, b.center) < b.radius ? b.amplitude : 0.0;
                            },
                            [&](const Gaussian& g) {
                                const double d = distance(y, g.center);
                                return g.amplitude * std::exp(-d * d / (2.0 * g.sigma * g.sigma));
                            },
                        },
                        c);
    }
    return f;
}

std::string Phantom::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << "phantom(support_radius=" << support_radius;
    for (const auto& c : components) {
        std::visit(Overloaded{
                       [&](const Ball& b) {
                           os << "; ball(center=" << b.center.x << " " << b.center.y << " "
                              << b.center.z << ", radius=" << b.radius
                              << ", amplitude=" << b.amplitude << ")";
                       },
                       [&](const Gaussian& g) {
                           os << "; gaussian(center=" << g.center.x << " " << g.center.y << " "
                              << g.center.z << ", sigma=" << g.sigma
                              << ", amplitude=" << g.amplitude << ")";
                       },
                   },
                   c);
    }
    os << ")";
    return os.str();
}

double Phantom::natural_support(const std::vector<PhantomComponent>& components) {
    double r = 0.0;
    for (const auto& c : components) {
        r = std::max(r, std::visit(Overloaded{
                                       [](const Ball& b) { return norm(b.center) + b.radius; },
                                       [](const Gaussian& g) {
                                           return norm(g.center) + 5.0 * g.sigma;
                                       },
                                   },
                                   c));
    }
    return r;
}

void validate(const Phantom& phantom, double domain_radius) {
    for (const auto& c : phantom.components) {
        std::visit(Overloaded{
                       [](const Ball& b) {
                           if (!(b.radius > 0.0)) throw ParameterError("ball radius must be > 0");
                       },
                       [](const Gaussian& g) {
                           if (!(g.sigma > 0.0))
                               throw ParameterError("gaussian sigma must be > 0");
                       },
                   },
                   c);
    }
    if (!(phantom.support_radius >= 0.0))
        throw ParameterError("phantom support radius must be >= 0");
    if (!(phantom.support_radius < domain_radius)) {
        throw ParameterError("phantom support must lie strictly inside the sensor sphere");
    }
}

SensorArray SensorArray::fibonacci(std::size_t count, double radius) {
    if (count == 0) throw ParameterError("sensor count must be >= 1");
    if (!(radius > 0.0)) throw ParameterError("sensor radius must be > 0");
    SensorArray s;
    s.radius = radius;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    const double m = static_cast<double>(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / m;
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * static_cast<double>(i);
        s.points.push_back({radius * rho * std::cos(phi), radius * rho * std::sin(phi), radius * z});
    }
    s.weights.assign(count, 4.0 * std::numbers::pi * radius * radius / m);
    return s;
}

void validate(const SensorArray& sensors) {
    if (sensors.points.empty()) throw ParameterError("sensor array is empty");
    if (sensors.points.size() != sensors.weights.size())
        throw ParameterError("sensor points and weights differ in length");
    for (std::size_t m = 0; m < sensors.size(); ++m) {
        if (std::abs(norm(sensors.points[m]) - sensors.radius) > 1e-12 * sensors.radius)
            throw ParameterError("sensor " + std::to_string(m) + " is off the measurement sphere");
        if (!(sensors.weights[m] > 0.0))
            throw ParameterError("sensor " + std::to_string(m) + " has a non-positive weight");
    }
}

double DataSet::max_abs() const {
    double m = 0.0;
    for (const auto& tr : traces)
        for (double v : tr) m = std::max(m, std::abs(v));
    return m;
}

double spherical_mean(const Phantom& phantom, Vec3 x, double r) {
    if (r < 0.0) throw ParameterError("spherical mean radius must be >= 0");
    if (r == 0.0) return phantom.value(x);
    double sum = 0.0;
    for (const auto& c : phantom.components) {
        sum += std::visit(Overloaded{
                              [&](const Ball& b) {
                                  const double d = distance(x, b.center);
                                  if (d == 0.0) return r < b.radius ? b.amplitude : 0.0;
                                  return ball_mean(b, d, r);
                              },
                              [&](const Gaussian& g) {
                                  return gaussian_mean(g, distance(x, g.center), r);
                              },
                          },
                          c);
    }
    return sum;
}

double freespace_pressure(const Phantom& phantom, Vec3 x, double t) {
    if (t < 0.0) throw ParameterError("free-space pressure needs t >= 0");
    double sum = 0.0;
    for (const auto& c : phantom.components) {
        sum += std::visit(Overloaded{
                              [&](const Ball& b) {
                                  const double d = distance(x, b.center);
                                  if (d == 0.0) return t < b.radius ? b.amplitude : 0.0;
                                  return ball_pressure(b, d, t);
                              },
                              [&](const Gaussian& g) {
                                  return gaussian_pressure(g, distance(x, g.center), t);
                              },
                          },
                          c);
    }
    return sum;
}

double default_final_time(const AttenuationModel& model, const Phantom& phantom,
                          const SensorArray& sensors) {
    return sensors.radius + phantom.support_radius + 5.0 * time_constant(model);
}

DataSet synthesize_dataset(const Phantom& phantom, const SensorArray& sensors,
                           const AttenuationModel& model, const TimeGrid& grid,
                           const SynthesisOptions& options) {
    validate(model);
    validate(sensors);
    validate(phantom, sensors.radius);
    if (grid.n < 2 || grid.t0 != 0.0 || !(grid.dt > 0.0))
        throw ParameterError("data time grid must start at 0 with n >= 2 and dt > 0");

    const FrequencyGrid freq = options.frequencies.value_or(FrequencyGrid::nyquist(grid));
    DataSet data{sensors, grid, std::vector<std::vector<double>>(sensors.size()), model, phantom};

    parallel_for(sensors.size(), options.threads, [&](std::size_t m) {
        TimeSignal free = TimeSignal::zeros(grid);
        for (std::size_t i = 0; i < grid.n; ++i)
            free.samples[i] = freespace_pressure(phantom, sensors.points[m], grid.at(i));
        data.traces[m] = apply_attenuation(model, free, freq).samples;
    });

    const double peak = data.max_abs();
    for (std::size_t m = 0; m < sensors.size(); ++m) {
        const double tail = std::abs(data.traces[m].back());
        if (tail > options.quiescence_tolerance * peak) {
            std::ostringstream os;
            os << "T too small: trace " << m << " is " << tail / peak << " of the maximum at T = "
               << grid.back() << " (tolerance " << options.quiescence_tolerance << ")";
            throw NumericError(os.str());
        }
    }

    if (options.noise_level > 0.0) {
        std::mt19937_64 rng(options.seed);
        std::normal_distribution<double> noise(0.0, options.noise_level * peak);
        for (auto& tr : data.traces)
            for (double& v : tr) v += noise(rng);
    }
    return data;
}

}  // namespace patr
