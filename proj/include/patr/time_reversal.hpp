#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "patr/dispersion.hpp"
#include "patr/forward_model.hpp"
#include "patr/geometry.hpp"

namespace patr {

// Γ_ω(x,y) = e^{iω|x-y|} / (4π|x-y|).
cdouble green_free(Vec3 x, Vec3 y, double omega);

// Γ~_ω(x,y) = λ(ω) e^{iκ~(ω)|x-y|} / (4π|x-y|).
cdouble green_corrected(const AttenuationModel& model, Vec3 x, Vec3 y, double omega, int order);

struct ReconstructionConfig {
    double rho = 40.0;
    std::size_t half_count = 512;  // ω samples on (0, ρ]
    int order = 0;
    std::vector<Vec3> points;
    bool override_rho = false;  // allow ρ above the model's stability threshold
    int threads = 1;

    FrequencyGrid frequencies() const { return {rho, half_count}; }
};

struct ImagingResult {
    std::vector<Vec3> points;
    std::vector<double> values;
    std::string model;
    int order = 0;
    double rho = 0.0;
    std::size_t half_count = 0;
    std::vector<std::string> warnings;
    std::optional<double> relative_error;  // against the dataset phantom
};

// n points from center - h·dir to center + h·dir (dir is normalized).
std::vector<Vec3> line_profile(Vec3 center, Vec3 direction, double half_length, std::size_t n);

// v^a_{s,ρ}(x, T) evaluated literally: sensor sum, then ω sum. Data between
// samples is linearly interpolated.
double back_propagate(const DataSet& data, Vec3 x, double s, const ReconstructionConfig& config);

// Imaging functional on config.points. The s-integral is folded into
// per-sensor spectra; values carry the factor 2 that makes the functional
// converge to f (see README).
ImagingResult reconstruct(const DataSet& data, const ReconstructionConfig& config);

// The same value at one point as 2∫ back_propagate ds, trapezoid over the
// data grid. Slow; used to cross-check reconstruct.
double reconstruct_literal(const DataSet& data, Vec3 x, const ReconstructionConfig& config);

double relative_l2_error(const std::vector<double>& values, const std::vector<double>& reference);

std::vector<double> phantom_values(const Phantom& phantom, const std::vector<Vec3>& points);

// One reconstruct per ρ, error against the dataset phantom.
std::vector<std::pair<double, double>> sweep_rho(const DataSet& data,
                                                 const ReconstructionConfig& config,
                                                 const std::vector<double>& rhos);

}  // namespace patr
