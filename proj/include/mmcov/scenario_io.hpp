#pragma once

#include "mmcov/analysis.hpp"
#include "mmcov/presets.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmcov {

// Scenario file problem; path is a JSON-pointer-like location such as
// "$.tiers[0].bs_antenna.beamwidth_deg".
class SchemaError : public std::runtime_error {
public:
    SchemaError(std::string path, const std::string& msg)
        : std::runtime_error(path + ": " + msg), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

struct ThresholdGrid {
    double start_db = -20.0;
    double stop_db = 40.0;
    double step_db = 1.0;

    std::vector<double> db_values() const;
    void validate() const;
};

// "start:stop:step" in dB, e.g. "-20:40:1".
ThresholdGrid parse_t_grid(const std::string& text);

struct SimSettings {
    std::uint64_t realizations = 100000;
    std::uint64_t seed = 1;
    double window_radius = 0.0;  // 0 = automatic
    bool interference = true;
};

struct ScenarioFile {
    std::optional<Preset> preset;
    Scenario scenario;
    SimSettings simulation;
    std::vector<double> cell_radii;  // sweep over tier 0; empty = as given
    ThresholdGrid t_grid;
    std::optional<Preset> baseline;  // reference network for rate ratios
};

// Parses a scenario document. Units are human units (m, dB, dBm, Hz, degrees);
// conversion to linear values happens here. Unknown keys are rejected.
ScenarioFile parse_scenario(const std::string& json_text);
ScenarioFile load_scenario_file(const std::string& path);

// Either a path to a scenario file or the name of a built-in preset.
ScenarioFile resolve_scenario(const std::string& path_or_preset);

ScenarioFile preset_file(Preset p);

}  // namespace mmcov
