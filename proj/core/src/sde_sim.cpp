#include "levyfilter/sde_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "levyfilter/errors.hpp"
#include "levyfilter/fp_solver.hpp"
#include "levyfilter/rng.hpp"

namespace levyfilter {

double Trajectory::state_at(double t) const {
    if (times.empty()) {
        throw DomainError("empty trajectory");
    }
    const double s = std::round((t - times.front()) / dt);
    if (s < 0.0 || s >= static_cast<double>(times.size()) ||
        std::abs(times.front() + s * dt - t) > 0.5 * dt + 1e-12) {
        std::ostringstream msg;
        msg << "time " << t << " is not covered by the trajectory";
        throw DomainError(msg.str());
    }
    return states[static_cast<std::size_t>(s)];
}

Trajectory simulate_state(double x0, const DriftFn& drift, const StableParams& params, double dt,
                          double T, std::uint64_t seed, bool mirrored) {
    params.validate();
    if (!(dt > 0.0)) {
        throw DomainError("simulation step must be positive");
    }
    if (T < 0.0) {
        throw DomainError("simulation horizon must be non-negative");
    }
    const std::size_t steps = static_cast<std::size_t>(std::llround(T / dt));
    Trajectory traj;
    traj.seed = seed;
    traj.params = params;
    traj.drift_name = drift.name;
    traj.dt = dt;
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);

    StableIncrementSampler noise(params, dt, make_stream(seed, Stream::State), mirrored);
    double x = x0;
    traj.times.push_back(0.0);
    traj.states.push_back(x);
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        x = x + drift(x, t) * dt + noise.next();
        if (!(std::abs(x) <= kTrajectoryOverflow)) {
            traj.truncated = true;
            break;
        }
        traj.times.push_back(static_cast<double>(k + 1) * dt);
        traj.states.push_back(x);
    }
    return traj;
}

std::vector<double> regular_times(double t0, double t_end, double spacing) {
    if (!(spacing > 0.0)) {
        throw DomainError("observation spacing must be positive");
    }
    std::vector<double> out;
    const auto count = static_cast<std::size_t>(std::floor((t_end - t0) / spacing + 1e-9));
    for (std::size_t k = 0; k <= count; ++k) {
        out.push_back(t0 + static_cast<double>(k) * spacing);
    }
    return out;
}

DiscreteObservations generate_discrete_obs(const Trajectory& traj, const ObservationFn& h,
                                           double r, const std::vector<double>& obs_times,
                                           std::uint64_t seed) {
    if (!(r > 0.0)) {
        throw DomainError("observation variance must be positive");
    }
    SplitMix64 rng = make_stream(seed, Stream::Observation);
    std::normal_distribution<double> normal(0.0, 1.0);
    DiscreteObservations obs;
    obs.h = h;
    const double sd = std::sqrt(r);
    for (double t : obs_times) {
        const double x = traj.state_at(t);
        obs.times.push_back(t);
        obs.values.push_back(h(x, t) + sd * normal(rng));
        obs.variances.push_back(r);
    }
    obs.validate();
    return obs;
}

ContinuousObservationPath generate_continuous_obs(const Trajectory& traj, const ObservationFn& h,
                                                  double obs_noise_scale, double dt,
                                                  std::uint64_t seed) {
    if (!(obs_noise_scale >= 0.0)) {
        throw DomainError("observation noise scale must be non-negative");
    }
    const double ratio = dt / traj.dt;
    const double m = std::round(ratio);
    if (m < 1.0 || std::abs(ratio - m) > 1e-9 * m) {
        throw DomainError("observation step must be a multiple of the trajectory step");
    }
    const auto stride = static_cast<std::size_t>(m);
    SplitMix64 rng = make_stream(seed, Stream::Observation);
    std::normal_distribution<double> normal(0.0, 1.0);
    ContinuousObservationPath path;
    path.obs_noise_scale = obs_noise_scale;
    path.h = h;
    const double sd = obs_noise_scale * std::sqrt(dt);
    double y = 0.0;
    path.times.push_back(traj.times.front());
    path.y_values.push_back(y);
    for (std::size_t k = 0; k + stride < traj.size(); k += stride) {
        const double t = traj.times[k];
        const double noise = normal(rng);
        y += h(traj.states[k], t) * dt + sd * noise;
        path.times.push_back(traj.times[k + stride]);
        path.y_values.push_back(y);
    }
    return path;
}

double ParticleEnsemble::effective_sample_size() const {
    double s2 = 0.0;
    for (double w : weights) s2 += w * w;
    return s2 > 0.0 ? 1.0 / s2 : 0.0;
}

const ParticleEnsemble& ParticleFilterResult::at(double t, double tol) const {
    for (const auto& e : ensembles) {
        if (std::abs(e.time - t) <= tol) return e;
    }
    std::ostringstream msg;
    msg << "no particle ensemble recorded at t=" << t;
    throw DomainError(msg.str());
}

double sample_initial_state(const InitSpec& spec, SplitMix64& rng) {
    if (const auto* g = std::get_if<GaussianInit>(&spec)) {
        std::normal_distribution<double> normal(g->center, g->sigma);
        return normal(rng);
    }
    if (const auto* u = std::get_if<UniformInit>(&spec)) {
        return u->a + (u->b - u->a) * rng.uniform_open();
    }
    return std::get<PointMassInit>(spec).x0;
}

namespace {

/// Particle cloud with per-slot noise streams, log weights and a kill mask.
class ParticleSystem {
public:
    ParticleSystem(const DriftFn& drift, const StableParams& params,
                   const ParticleFilterOptions& options)
        : drift_(drift), options_(options) {
        const std::size_t n = options.n_particles;
        if (n < 100) {
            throw DomainError("particle filter needs at least 100 particles");
        }
        if (!(options.x_min < options.x_max)) {
            throw DomainError("particle domain needs x_min < x_max");
        }
        positions_.resize(n);
        log_w_.assign(n, 0.0);
        alive_.assign(n, 1);
        noise_.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            noise_.emplace_back(params, options.dt, make_stream(options.seed, Stream::Particles, i));
            positions_[i] = sample_initial(i);
            if (!(positions_[i] > options.x_min && positions_[i] < options.x_max)) {
                alive_[i] = 0;
                log_w_[i] = -std::numeric_limits<double>::infinity();
            }
        }
        surviving_mass_ = static_cast<double>(alive_count()) / static_cast<double>(n);
        if (alive_count() == 0) {
            throw DegenerateEvidenceError("no particle starts inside the domain");
        }
        normalize();
    }

    void propagate(double t, double dt) {
        const std::size_t n = positions_.size();
        const double before = alive_weight();
        for (std::size_t i = 0; i < n; ++i) {
            if (!alive_[i]) continue;
            double& x = positions_[i];
            x = x + drift_(x, t) * dt + noise_[i].next();
            if (!(x > options_.x_min && x < options_.x_max)) {
                alive_[i] = 0;
                log_w_[i] = -std::numeric_limits<double>::infinity();
            }
        }
        const double after = alive_weight();
        if (after <= 0.0) {
            throw DegenerateEvidenceError("every particle left the domain");
        }
        surviving_mass_ *= after / before;
        normalize();
    }

    template <typename LogLikelihood>
    void reweight(LogLikelihood&& log_like) {
        for (std::size_t i = 0; i < positions_.size(); ++i) {
            if (alive_[i]) log_w_[i] += log_like(positions_[i]);
        }
        normalize();
    }

    void maybe_resample(ParticleFilterResult& result) {
        const double ess = ess_value();
        const double n = static_cast<double>(positions_.size());
        if (ess < 10.0) {
            ++result.collapse_warnings;
        }
        if (ess >= 0.5 * n) return;

        // Systematic resampling.
        std::vector<double> cumulative(positions_.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < positions_.size(); ++i) {
            acc += alive_[i] ? std::exp(log_w_[i]) : 0.0;
            cumulative[i] = acc;
        }
        const double u0 = resample_rng_.uniform_open() / n;
        std::vector<double> fresh(positions_.size());
        std::size_t j = 0;
        for (std::size_t i = 0; i < positions_.size(); ++i) {
            const double u = (u0 + static_cast<double>(i) / n) * acc;
            while (j + 1 < positions_.size() && cumulative[j] < u) ++j;
            fresh[i] = positions_[j];
        }
        positions_ = std::move(fresh);
        std::fill(alive_.begin(), alive_.end(), 1);
        std::fill(log_w_.begin(), log_w_.end(), -std::log(n));
        ++result.resamplings;
    }

    ParticleEnsemble snapshot(double t) const {
        ParticleEnsemble e;
        e.time = t;
        e.surviving_mass = surviving_mass_;
        for (std::size_t i = 0; i < positions_.size(); ++i) {
            if (!alive_[i]) continue;
            e.positions.push_back(positions_[i]);
            e.weights.push_back(std::exp(log_w_[i]));
        }
        double s = 0.0;
        for (double w : e.weights) s += w;
        for (double& w : e.weights) w /= s;
        return e;
    }

private:
    double sample_initial(std::size_t i) const {
        SplitMix64 rng = make_stream(options_.seed, Stream::InitialCondition, i);
        return sample_initial_state(options_.initial, rng);
    }

    std::size_t alive_count() const {
        return static_cast<std::size_t>(std::count(alive_.begin(), alive_.end(), 1));
    }

    double alive_weight() const {
        double s = 0.0;
        for (std::size_t i = 0; i < log_w_.size(); ++i) {
            if (alive_[i]) s += std::exp(log_w_[i]);
        }
        return s;
    }

    double ess_value() const {
        double s2 = 0.0;
        for (std::size_t i = 0; i < log_w_.size(); ++i) {
            if (alive_[i]) s2 += std::exp(2.0 * log_w_[i]);
        }
        return s2 > 0.0 ? 1.0 / s2 : 0.0;
    }

    /// Shift log weights so the alive ones sum to one.
    void normalize() {
        double peak = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < log_w_.size(); ++i) {
            if (alive_[i]) peak = std::max(peak, log_w_[i]);
        }
        if (!std::isfinite(peak)) {
            throw DegenerateEvidenceError("particle weights collapsed to zero");
        }
        double s = 0.0;
        for (std::size_t i = 0; i < log_w_.size(); ++i) {
            if (alive_[i]) s += std::exp(log_w_[i] - peak);
        }
        const double log_total = peak + std::log(s);
        for (std::size_t i = 0; i < log_w_.size(); ++i) {
            if (alive_[i]) log_w_[i] -= log_total;
        }
    }

    const DriftFn& drift_;
    const ParticleFilterOptions& options_;
    std::vector<double> positions_;
    std::vector<double> log_w_;
    std::vector<char> alive_;
    std::vector<StableIncrementSampler> noise_;
    SplitMix64 resample_rng_ = make_stream(options_.seed, Stream::Resampling);
    double surviving_mass_ = 1.0;
};

std::vector<std::size_t> lattice_steps(const std::vector<double>& times, double t0, double dt) {
    std::vector<std::size_t> steps;
    for (double t : times) {
        const double s = std::round((t - t0) / dt);
        if (s >= 0.0) steps.push_back(static_cast<std::size_t>(s));
    }
    std::sort(steps.begin(), steps.end());
    return steps;
}

bool contains(const std::vector<std::size_t>& sorted, std::size_t v) {
    return std::binary_search(sorted.begin(), sorted.end(), v);
}

}  // namespace

ParticleFilterResult bootstrap_particle_filter(const DiscreteObservations& obs,
                                               const DriftFn& drift, const StableParams& params,
                                               const ParticleFilterOptions& options) {
    obs.validate();
    params.validate();
    const double t0 = options.t0;
    const double dt = options.dt;
    const double t_end = obs.size() > 0 ? std::max(obs.times.back(), options.t_end) : options.t_end;
    const std::size_t steps = step_count(t0, t_end, dt);
    const auto obs_steps = lattice_steps(obs.times, t0, dt);
    const auto record_steps = lattice_steps(options.record_times, t0, dt);

    ParticleFilterResult result;
    ParticleSystem system(drift, params, options);
    std::size_t next_obs = 0;

    auto assimilate = [&](std::size_t step, double t) {
        bool any = false;
        while (next_obs < obs.size() && obs_steps[next_obs] == step) {
            const double y = obs.values[next_obs];
            const double r = obs.variances[next_obs];
            const double tk = obs.times[next_obs];
            system.reweight(
                [&](double x) { return log_gaussian_likelihood(y, x, tk, r, obs.h); });
            ++next_obs;
            any = true;
        }
        if (any || contains(record_steps, step) || step == steps) {
            result.ensembles.push_back(system.snapshot(t));
        }
        if (any) {
            system.maybe_resample(result);
        }
    };

    assimilate(0, t0);
    for (std::size_t k = 1; k <= steps; ++k) {
        const double t_prev = t0 + static_cast<double>(k - 1) * dt;
        system.propagate(t_prev, dt);
        assimilate(k, t0 + static_cast<double>(k) * dt);
    }
    return result;
}

ParticleFilterResult bootstrap_particle_filter(const ContinuousObservationPath& obs,
                                               const DriftFn& drift, const StableParams& params,
                                               const ParticleFilterOptions& options) {
    obs.validate();
    params.validate();
    const double dt = options.dt;
    const double ratio = obs.dt_obs() / dt;
    const double sub = std::round(ratio);
    if (sub < 1.0 || std::abs(ratio - sub) > 1e-6 * sub) {
        throw DomainError("particle step must divide the observation spacing");
    }
    const auto substeps = static_cast<std::size_t>(sub);
    const double t0 = obs.times.front();
    const std::size_t total = (obs.size() - 1) * substeps;
    const auto record_steps = lattice_steps(options.record_times, t0, dt);
    const double inv_var = 1.0 / (obs.obs_noise_scale * obs.obs_noise_scale);

    ParticleFilterResult result;
    ParticleSystem system(drift, params, options);
    if (contains(record_steps, 0)) {
        result.ensembles.push_back(system.snapshot(t0));
    }
    std::size_t step = 0;
    for (std::size_t k = 0; k + 1 < obs.size(); ++k) {
        const double dY = (obs.y_values[k + 1] - obs.y_values[k]) / static_cast<double>(substeps);
        for (std::size_t s = 0; s < substeps; ++s) {
            const double t = t0 + static_cast<double>(step) * dt;
            system.reweight([&](double x) {
                const double hx = obs.h(x, t);
                return (hx * dY - 0.5 * hx * hx * dt) * inv_var;
            });
            system.propagate(t, dt);
            ++step;
            const double t_now = step == total ? obs.times.back() : t0 + static_cast<double>(step) * dt;
            if (contains(record_steps, step) || step == total) {
                result.ensembles.push_back(system.snapshot(t_now));
            }
            system.maybe_resample(result);
        }
    }
    return result;
}

DensityField project_histogram(const ParticleEnsemble& ensemble, const Grid1D& grid,
                               bool include_killed) {
    const std::size_t n = grid.size();
    std::vector<double> v(n, 0.0);
    const double h = grid.dx();
    for (std::size_t i = 0; i < ensemble.positions.size(); ++i) {
        const double x = ensemble.positions[i];
        if (x < grid.x_min() || x > grid.x_max()) continue;
        v[grid.nearest_index(x)] += ensemble.weights[i];
    }
    const double scale = include_killed ? ensemble.surviving_mass : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double cell = (i == 0 || i + 1 == n) ? 0.5 * h : h;
        v[i] *= scale / cell;
    }
    return DensityField(grid, std::move(v), !include_killed);
}

}  // namespace levyfilter
