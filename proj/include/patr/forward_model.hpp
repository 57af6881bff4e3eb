#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "patr/dispersion.hpp"
#include "patr/geometry.hpp"
#include "patr/spectral_ops.hpp"

namespace patr {

// Uniform ball: amplitude inside |y - center| < radius.
struct Ball {
    Vec3 center;
    double radius = 0.5;
    double amplitude = 1.0;
};

// amplitude * exp(-|y - center|² / 2σ²)
struct Gaussian {
    Vec3 center;
    double sigma = 0.1;
    double amplitude = 1.0;
};

using PhantomComponent = std::variant<Ball, Gaussian>;

struct Phantom {
    std::vector<PhantomComponent> components;
    double support_radius = 0.0;  // f vanishes (numerically) outside |y| <= support_radius

    double value(Vec3 y) const;
    std::string describe() const;
    // Smallest origin-centered radius covering every component: ball radius,
    // or 5σ for Gaussians.
    static double natural_support(const std::vector<PhantomComponent>& components);
};

// Throws ParameterError when the phantom is malformed or not strictly inside
// the sphere of radius `domain_radius`.
void validate(const Phantom& phantom, double domain_radius);

struct SensorArray {
    double radius = 1.0;
    std::vector<Vec3> points;
    std::vector<double> weights;

    std::size_t size() const { return points.size(); }
    // Fibonacci-sphere points with equal weights 4πR²/M.
    static SensorArray fibonacci(std::size_t count, double radius);
};

void validate(const SensorArray& sensors);

struct DataSet {
    SensorArray sensors;
    TimeGrid grid;                            // common grid [0, T]
    std::vector<std::vector<double>> traces;  // traces[m][i] = g_a(y_m, t_i)
    AttenuationModel model;
    Phantom phantom;

    double final_time() const { return grid.back(); }
    TimeSignal trace(std::size_t m) const { return {grid, traces[m]}; }
    double max_abs() const;
};

// Average of f over the sphere |y - x| = r.
double spherical_mean(const Phantom& phantom, Vec3 x, double r);

// Unattenuated pressure p(x,t) = ∂_t[t M_f(x,t)], derivative taken analytically.
double freespace_pressure(const Phantom& phantom, Vec3 x, double t);

struct SynthesisOptions {
    // Frequency grid for the attenuation operator; defaults to the Nyquist
    // grid of the time grid.
    std::optional<FrequencyGrid> frequencies;
    double quiescence_tolerance = 1e-6;  // relative to the dataset maximum
    double noise_level = 0.0;            // Gaussian noise std, relative to the dataset maximum
    std::uint64_t seed = 0;
    int threads = 1;
};

// T = R_Ω + support radius + 5 attenuation time constants.
double default_final_time(const AttenuationModel& model, const Phantom& phantom,
                          const SensorArray& sensors);

// Free-space traces attenuated by L_a on `grid` (which must start at 0).
// Throws NumericError("T too small ...") if traces have not died out at T.
DataSet synthesize_dataset(const Phantom& phantom, const SensorArray& sensors,
                           const AttenuationModel& model, const TimeGrid& grid,
                           const SynthesisOptions& options = {});

}  // namespace patr
