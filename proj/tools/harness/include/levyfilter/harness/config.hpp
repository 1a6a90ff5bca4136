#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "levyfilter/density.hpp"
#include "levyfilter/filter_zakai.hpp"
#include "levyfilter/functions.hpp"
#include "levyfilter/grid.hpp"
#include "levyfilter/levy.hpp"
#include "levyfilter/nonlocal_operator.hpp"

namespace levyfilter::harness {

/// Invalid scenario; `field()` is the dotted path of the offending key.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& message)
        : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

enum class ObservationMode { None, Discrete, Continuous };

std::string to_string(ObservationMode mode);
ObservationMode observation_mode_from_string(const std::string& name);

struct DriftConfig {
    /// double_well | zero | polynomial
    std::string kind = "double_well";
    /// Ascending powers, used when kind == polynomial.
    std::vector<double> coefficients;

    DriftFn make() const;
};

struct GridConfig {
    double x_min = -2.5;
    double x_max = 2.5;
    double dx = 0.05;

    Grid1D make() const { return Grid1D::from_spacing(x_min, x_max, dx); }
};

/// Runs start at t = 0.
struct TimeConfig {
    double t_end = 10.0;
    double dt = 1e-3;
    std::size_t store_stride = 10;
};

struct ObservationConfig {
    ObservationMode mode = ObservationMode::Discrete;
    /// h as ascending polynomial coefficients; {0, 1} is h(x) = x.
    std::vector<double> h = {0.0, 1.0};
    // discrete
    double variance = 0.1;
    double spacing = 0.1;
    // continuous
    double noise_scale = 0.22360679774997896;  // sqrt(0.05)
    double path_dt = 1e-3;
    ZakaiGain gain = ZakaiGain::Likelihood;
    std::size_t renormalize_every = 1;

    ObservationFn make_h() const;
};

struct TruthConfig {
    /// Start of the true path; drawn from the initial law when empty.
    std::optional<double> x0;
    /// Imported observations (CSV) replacing the synthetic ones.
    std::optional<std::filesystem::path> observations_file;
};

struct AnalysisConfig {
    std::vector<double> wells = {-1.0, 1.0};
    double deadband = 0.3;
    /// Confirmation time for a change of well; 0 is plain hysteresis.
    double min_dwell = 0.0;
    double burn_in = 0.5;
    double event_tolerance = 0.5;
    bool refine_orbit = false;
};

struct OracleConfig {
    bool enabled = false;
    std::size_t particles = 10000;
    /// Times at which the oracle density is recorded and compared.
    std::vector<double> times;
};

struct ScenarioConfig {
    std::string name = "custom";
    DriftConfig drift;
    StableParams noise{1.5, 0.4898979485566356};  // sqrt(0.24)
    GridConfig grid;
    TimeConfig time;
    InitSpec init = GaussianInit{};
    ObservationConfig observation;
    TruthConfig truth;
    AnalysisConfig analysis;
    OracleConfig oracle;
    DriftScheme drift_scheme = DriftScheme::Hybrid;
    std::uint64_t seed = 1;
    std::optional<std::filesystem::path> output_dir;

    /// Every numeric constraint of the downstream modules that can be checked
    /// without assembling an operator. Throws ConfigError.
    void validate() const;
};

/// Parses a scenario; unknown keys and wrong types raise ConfigError with the
/// field path. Absent keys take the defaults above.
ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Complete echo of a scenario, every defaulted value spelled out.
nlohmann::json to_json(const ScenarioConfig& config);

}  // namespace levyfilter::harness
