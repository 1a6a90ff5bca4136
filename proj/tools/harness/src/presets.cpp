#include "levyfilter/harness/presets.hpp"

#include <cmath>
#include <functional>
#include <map>

namespace levyfilter::harness {

namespace {

// Double-well system dX = 4(X - X^3) dt + sqrt(0.24) dL, observed through
// h(x) = x; truth starts in the left well.
ScenarioConfig double_well_base() {
    ScenarioConfig c;
    c.drift.kind = "double_well";
    c.noise = StableParams{1.5, std::sqrt(0.24)};
    c.grid = GridConfig{-2.5, 2.5, 0.05};
    c.time = TimeConfig{10.0, 1e-3, 10};
    c.init = GaussianInit{-1.0, 0.1};
    c.truth.x0 = -1.0;
    return c;
}

ScenarioConfig example1_discrete() {
    ScenarioConfig c = double_well_base();
    c.name = "example1-discrete-alpha1.5";
    c.observation.mode = ObservationMode::Discrete;
    c.observation.variance = 0.1;
    c.observation.spacing = 0.1;
    c.oracle.times = {1.0, 5.0, 10.0};
    return c;
}

ScenarioConfig example1_discrete_uniform() {
    ScenarioConfig c = example1_discrete();
    c.name = "example1-discrete-alpha0.75-uniform";
    c.noise.alpha = 0.75;
    c.init = UniformInit{-1.25, -0.75};
    return c;
}

ScenarioConfig example1_fokker_planck() {
    ScenarioConfig c = double_well_base();
    c.name = "example1-fokker-planck-alpha1.5";
    c.observation.mode = ObservationMode::None;
    c.oracle.particles = 100000;
    c.oracle.times = {0.5, 1.0, 2.0};
    return c;
}

ScenarioConfig example2_continuous() {
    ScenarioConfig c = double_well_base();
    c.name = "example2-continuous-alpha1.5";
    c.time.t_end = 50.0;
    c.observation.mode = ObservationMode::Continuous;
    c.observation.noise_scale = std::sqrt(0.05);
    c.observation.path_dt = 1e-3;
    c.oracle.times = {10.0, 25.0, 50.0};
    // The argmax of a near-balanced bimodal posterior flips between wells for
    // a few snapshots around each transition; require 0.2 time units of hold.
    c.analysis.min_dwell = 0.2;
    return c;
}

ScenarioConfig example2_continuous_uniform() {
    ScenarioConfig c = example2_continuous();
    c.name = "example2-continuous-alpha1.5-uniform";
    c.init = UniformInit{-2.0, 2.0};
    return c;
}

// Free 1-stable motion from a point mass: the density at time t is the
// Cauchy law t / (pi (x^2 + t^2)).
ScenarioConfig cauchy_free_space() {
    ScenarioConfig c;
    c.name = "cauchy-free-space";
    c.drift.kind = "zero";
    c.noise = StableParams{1.0, 1.0};
    c.grid = GridConfig{-20.0, 20.0, 0.02};
    c.time = TimeConfig{0.5, 2e-4, 250};
    c.init = PointMassInit{0.0};
    c.observation.mode = ObservationMode::None;
    c.truth.x0 = 0.0;
    return c;
}

const std::map<std::string, std::function<ScenarioConfig()>>& registry() {
    static const std::map<std::string, std::function<ScenarioConfig()>> r = {
        {"example1-discrete-alpha1.5", example1_discrete},
        {"example1-discrete-alpha0.75-uniform", example1_discrete_uniform},
        {"example1-fokker-planck-alpha1.5", example1_fokker_planck},
        {"example2-continuous-alpha1.5", example2_continuous},
        {"example2-continuous-alpha1.5-uniform", example2_continuous_uniform},
        {"cauchy-free-space", cauchy_free_space},
    };
    return r;
}

}  // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [name, make] : registry()) names.push_back(name);
    return names;
}

ScenarioConfig preset(const std::string& name) {
    const auto it = registry().find(name);
    if (it == registry().end()) {
        std::string known;
        for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
        throw ConfigError("--preset", "unknown preset '" + name + "' (known: " + known + ")");
    }
    ScenarioConfig c = it->second();
    c.validate();
    return c;
}

}  // namespace levyfilter::harness
