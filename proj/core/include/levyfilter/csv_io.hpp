#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "levyfilter/density.hpp"
#include "levyfilter/filter_cd.hpp"
#include "levyfilter/filter_zakai.hpp"
#include "levyfilter/orbit.hpp"
#include "levyfilter/sde_sim.hpp"

namespace levyfilter::csv {

/// Ordered key=value pairs written as the first line of every file:
///   # levyfilter key1=value1 key2=value2 ...
/// Values must not contain spaces or '='.
using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

/// Numeric table: optional metadata line, one header line, numeric rows.
struct Table {
    std::map<std::string, std::string> metadata;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Column index by name; DomainError when absent.
    std::size_t column(const std::string& name) const;
};

Table read_table(const std::filesystem::path& path);
Table read_table(std::istream& in);

void write_metadata(std::ostream& out, const Metadata& meta);

/// density.csv: header `t,<x_0>,...,<x_{n-1}>[,log_norm]`; one row per snapshot.
void write_density(std::ostream& out, const DensityEvolution& evo, const Metadata& meta);
void write_density(const std::filesystem::path& path, const DensityEvolution& evo, const Metadata& meta);
/// Pre-update (prior) densities of a filtered evolution, same layout.
void write_prior_density(const std::filesystem::path& path, const DensityEvolution& evo,
                         const Metadata& meta);
/// updates.csv: `t,phase,row,log_evidence`; phase is pre (row in
/// prior_density.csv) or post (row in density.csv).
void write_updates(const std::filesystem::path& path, const DensityEvolution& evo,
                   const Metadata& meta);
/// Reads density.csv back; the grid is rebuilt from the header nodes.
DensityEvolution read_density(const std::filesystem::path& path);

/// trajectory.csv: `t,x`.
void write_trajectory(const std::filesystem::path& path, const Trajectory& traj, const Metadata& meta);
Trajectory read_trajectory(const std::filesystem::path& path);

/// observations.csv (discrete): `t,y,R`.
void write_discrete_observations(const std::filesystem::path& path, const DiscreteObservations& obs,
                                 const Metadata& meta);
DiscreteObservations read_discrete_observations(const std::filesystem::path& path,
                                                const ObservationFn& h);

/// observations.csv (continuous): `t,Y`; metadata carries obs_noise_scale.
void write_observation_path(const std::filesystem::path& path, const ContinuousObservationPath& obs,
                            const Metadata& meta);
ContinuousObservationPath read_observation_path(const std::filesystem::path& path,
                                                const ObservationFn& h, double obs_noise_scale);

/// orbit.csv: `t,x_star,peak_value`.
void write_orbit(const std::filesystem::path& path, const MostProbableOrbit& orbit, const Metadata& meta);
MostProbableOrbit read_orbit(const std::filesystem::path& path);

/// events.csv: `t_cross,from,to,dwell_before`.
void write_events(const std::filesystem::path& path, const std::vector<TransitionEvent>& events,
                  const Metadata& meta);
std::vector<TransitionEvent> read_events(const std::filesystem::path& path);

}  // namespace levyfilter::csv
