#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "levyfilter/density.hpp"
#include "levyfilter/orbit.hpp"

namespace levyfilter::harness {

enum class Metric { L1Density, OrbitSignAgreement, EventMatch };

std::string to_string(Metric metric);
Metric metric_from_string(const std::string& name);

struct CompareOptions {
    /// l1_density: compare normalized copies (filters); raw values otherwise.
    bool normalize = false;
    /// orbit_sign_agreement: samples before this time are ignored.
    double burn_in = 0.0;
    /// event_match: largest accepted |t_cross difference|.
    double event_tolerance = 0.5;
    /// Two times are the same axis point when they differ by at most this.
    double time_tolerance = 1e-6;
};

/// Scalars plus a per-time (or per-event) series.
struct CompareReport {
    Metric metric = Metric::L1Density;
    nlohmann::json scalars;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Writes <stem>.csv (series) and <stem>.json (scalars) into `dir`.
    void write(const std::filesystem::path& dir, const std::string& stem) const;
};

/// L1 distance at every time of the sparser evolution; each such time must
/// exist in the other one. AxisMismatchError on differing grids or times.
CompareReport compare_densities(const DensityEvolution& a, const DensityEvolution& b,
                                const CompareOptions& options);
/// Sign agreement on the time axis of the sparser series, every time of
/// which must be present in the denser one.
CompareReport compare_orbits(const std::vector<double>& times_a, const std::vector<double>& a,
                             const std::vector<double>& times_b, const std::vector<double>& b,
                             const CompareOptions& options);
CompareReport compare_events(const std::vector<TransitionEvent>& a,
                             const std::vector<TransitionEvent>& b, const CompareOptions& options);

/// Loads what `metric` needs from two run directories: density.csv,
/// orbit.csv (or trajectory.csv for a truth directory), events.csv.
CompareReport compare_runs(const std::filesystem::path& run_a, const std::filesystem::path& run_b,
                           Metric metric, const CompareOptions& options);

}  // namespace levyfilter::harness
