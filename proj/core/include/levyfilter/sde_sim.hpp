#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "levyfilter/density.hpp"
#include "levyfilter/filter_cd.hpp"
#include "levyfilter/filter_zakai.hpp"
#include "levyfilter/functions.hpp"
#include "levyfilter/levy.hpp"

namespace levyfilter {

/// Seeded ground-truth path of dX = f(X,t) dt + epsilon dL^alpha.
struct Trajectory {
    std::vector<double> times;
    std::vector<double> states;
    std::uint64_t seed = 0;
    StableParams params;
    std::string drift_name;
    double dt = 0.0;
    /// Set when |x| exceeded the overflow bound; the path stops there.
    bool truncated = false;

    std::size_t size() const noexcept { return times.size(); }
    /// State at the node nearest t (within dt/2); DomainError otherwise.
    double state_at(double t) const;
};

inline constexpr double kTrajectoryOverflow = 1e6;

/// Euler-Maruyama x <- x + f(x,t) dt + epsilon dt^(1/alpha) Z with Z drawn by
/// CMS from the Stream::State substream of `seed`. `mirrored` flips the sign
/// of every noise increment.
Trajectory simulate_state(double x0, const DriftFn& drift, const StableParams& params, double dt,
                          double T, std::uint64_t seed, bool mirrored = false);

/// y_k = h(x(t_k), t_k) + sqrt(r) v_k, v_k from the Stream::Observation substream.
/// Observation times snap to the nearest trajectory node (within dt/2).
DiscreteObservations generate_discrete_obs(const Trajectory& traj, const ObservationFn& h,
                                           double r, const std::vector<double>& obs_times,
                                           std::uint64_t seed);

/// Y(0) = 0, Y <- Y + h(x(t), t) dt + scale sqrt(dt) N(0,1), left endpoint in x.
/// dt must be a multiple of the trajectory step.
ContinuousObservationPath generate_continuous_obs(const Trajectory& traj, const ObservationFn& h,
                                                  double obs_noise_scale, double dt,
                                                  std::uint64_t seed);

/// Evenly spaced observation times t0 + k * spacing within [t0, t_end].
std::vector<double> regular_times(double t0, double t_end, double spacing);

/// Weighted particle cloud. `weights` sum to one over the surviving particles;
/// `surviving_mass` is the fraction of probability not killed at the domain
/// boundary (meaningful for unconditioned ensembles).
/// One draw from the law of an initial-density spec (point masses return x0).
double sample_initial_state(const InitSpec& spec, SplitMix64& rng);

struct ParticleEnsemble {
    double time = 0.0;
    std::vector<double> positions;
    std::vector<double> weights;
    double surviving_mass = 1.0;

    double effective_sample_size() const;
};

struct ParticleFilterOptions {
    std::size_t n_particles = 10000;
    std::uint64_t seed = 0;
    double dt = 1e-3;
    double t0 = 0.0;
    /// End time for runs without observations; observation runs end at the last sample.
    double t_end = 0.0;
    InitSpec initial = GaussianInit{};
    /// Particles leaving (x_min, x_max) are killed, matching the zero exterior.
    double x_min = -2.5;
    double x_max = 2.5;
    /// Extra times at which the ensemble is recorded (snapped to the step lattice).
    std::vector<double> record_times;
};

struct ParticleFilterResult {
    std::vector<ParticleEnsemble> ensembles;
    std::size_t resamplings = 0;
    /// Number of steps with effective sample size below 10.
    std::size_t collapse_warnings = 0;

    /// Ensemble recorded at t (within tol); DomainError when absent.
    const ParticleEnsemble& at(double t, double tol = 1e-9) const;
};

/// Bootstrap filter for discrete observations: propagate with the state
/// dynamics, weight by the Gaussian likelihood at each t_k, systematic
/// resampling when the effective sample size drops below n/2. With no
/// observations this is a plain Monte-Carlo ensemble run to options.t_end.
/// Ensembles are recorded at every observation time and at options.record_times.
ParticleFilterResult bootstrap_particle_filter(const DiscreteObservations& obs,
                                               const DriftFn& drift, const StableParams& params,
                                               const ParticleFilterOptions& options);

/// Bootstrap filter for a continuous observation path, log weight increment
/// (h dY - h^2 dt / 2) / scale^2 per step at the pre-step position.
/// Ensembles are recorded at options.record_times and the final time.
ParticleFilterResult bootstrap_particle_filter(const ContinuousObservationPath& obs,
                                               const DriftFn& drift, const StableParams& params,
                                               const ParticleFilterOptions& options);

/// Histogram projection onto the grid: cells of width dx centred on nodes
/// (half cells at the ends), scaled by surviving_mass when `include_killed`
/// is set so the result is a sub-probability density.
DensityField project_histogram(const ParticleEnsemble& ensemble, const Grid1D& grid,
                               bool include_killed = true);

}  // namespace levyfilter
