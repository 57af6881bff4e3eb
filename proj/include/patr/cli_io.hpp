#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "patr/error.hpp"
#include "patr/forward_model.hpp"
#include "patr/time_reversal.hpp"

namespace patr {

inline constexpr const char* kToolVersion = "0.1.0";

// Bad configuration input; `line` is 0 when not tied to a line.
class ConfigError : public ParameterError {
public:
    ConfigError(const std::string& message, int line = 0);
    int line() const { return line_; }

private:
    int line_;
};

struct RunConfig {
    AttenuationModel model;
    Phantom phantom;
    std::size_t sensor_count = 256;
    double sensor_radius = 2.0;
    double final_time = 0.0;
    std::size_t time_samples = 1025;
    std::optional<double> rho;
    std::size_t frequency_samples = 512;
    int order = 0;
    Vec3 profile_center;
    Vec3 profile_direction{1.0, 0.0, 0.0};
    double profile_half_length = 1.0;
    std::size_t profile_points = 64;
    std::vector<double> sweep_rhos{10.0, 20.0, 40.0};
    std::uint64_t seed = 0;
    double noise_level = 0.0;
    double quiescence_tolerance = 1e-6;
    std::optional<std::string> dataset;
    double verify_sigma = 0.2;
    double verify_rho = 40.0;

    // Parsed key/value pairs as written, used for hashing and file headers.
    std::map<std::string, std::string> entries;

    std::string hash() const;  // FNV-1a of the canonical entries, hex
    TimeGrid time_grid() const;
    SensorArray sensors() const;
    // ρ from the config, else the model threshold; throws ConfigError if neither.
    double cutoff() const;
    ReconstructionConfig reconstruction(int threads, std::optional<double> override_rho) const;
};

RunConfig parse_config_text(std::string_view text);
RunConfig parse_config(const std::filesystem::path& path);

// Model and phantom from the config keys that describe them (also used to
// rebuild both from a file header).
AttenuationModel model_from_entries(const std::map<std::string, std::string>& entries);
Phantom phantom_from_entries(const std::map<std::string, std::string>& entries);

// Key/value lines describing model and phantom in config syntax.
std::map<std::string, std::string> model_entries(const AttenuationModel& model);
std::map<std::string, std::string> phantom_entries(const Phantom& phantom);

std::string format_double(double v);  // 17 significant digits

void write_dataset(const std::filesystem::path& path, const DataSet& data,
                   const std::string& config_hash);
DataSet read_dataset(const std::filesystem::path& path);

void write_result(const std::filesystem::path& path, const ImagingResult& result,
                  const std::string& config_hash);
// Returns the points and values of a result file.
ImagingResult read_result(const std::filesystem::path& path);

void write_sweep(const std::filesystem::path& path,
                 const std::vector<std::pair<double, double>>& table, const std::string& model,
                 const std::string& config_hash);

}  // namespace patr
