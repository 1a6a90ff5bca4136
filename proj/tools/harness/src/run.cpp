#include "levyfilter/harness/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "levyfilter/csv_io.hpp"
#include "levyfilter/errors.hpp"
#include "levyfilter/nonlocal_operator.hpp"
#include "levyfilter/rng.hpp"

#ifndef LEVYFILTER_VERSION
#define LEVYFILTER_VERSION "unknown"
#endif

namespace levyfilter::harness {

namespace fs = std::filesystem;

namespace {

// Substream member reserved for the truth's initial state; particles use
// members 0..n-1 of the same stream.
constexpr std::uint64_t kTruthInitIndex = ~std::uint64_t{0};

// Relative pre-clip negative mass per step above which a run is flagged.
constexpr double kClipWarnThreshold = 1e-8;

bool needs_truth(Command command, const ScenarioConfig& c) {
    switch (command) {
        case Command::Simulate:
        case Command::Twin: return true;
        case Command::FokkerPlanck: return false;
        case Command::FilterDiscrete:
        case Command::FilterZakai: return !c.truth.observations_file.has_value();
    }
    return false;
}

ObservationMode effective_mode(Command command, const ScenarioConfig& c) {
    switch (command) {
        case Command::FokkerPlanck: return ObservationMode::None;
        case Command::FilterDiscrete:
            if (c.observation.mode != ObservationMode::Discrete) {
                throw ConfigError("observation.mode", "filter-discrete needs mode 'discrete'");
            }
            return ObservationMode::Discrete;
        case Command::FilterZakai:
            if (c.observation.mode != ObservationMode::Continuous) {
                throw ConfigError("observation.mode", "filter-zakai needs mode 'continuous'");
            }
            return ObservationMode::Continuous;
        case Command::Simulate:
        case Command::Twin: return c.observation.mode;
    }
    return c.observation.mode;
}

double truth_start(const ScenarioConfig& c) {
    if (c.truth.x0) return *c.truth.x0;
    SplitMix64 rng = make_stream(c.seed, Stream::InitialCondition, kTruthInitIndex);
    return sample_initial_state(c.init, rng);
}

DensityEvolution run_oracle(const ScenarioConfig& c, ObservationMode mode, const DriftFn& drift,
                            ScenarioResult& r) {
    const Grid1D grid = c.grid.make();
    ParticleFilterOptions po;
    po.n_particles = c.oracle.particles;
    po.seed = c.seed;
    po.dt = c.time.dt;
    po.t0 = 0.0;
    po.t_end = c.time.t_end;
    po.initial = c.init;
    po.x_min = c.grid.x_min;
    po.x_max = c.grid.x_max;
    po.record_times = c.oracle.times;

    ParticleFilterResult pf;
    if (mode == ObservationMode::Continuous) {
        pf = bootstrap_particle_filter(*r.continuous_obs, drift, c.noise, po);
    } else if (mode == ObservationMode::Discrete) {
        pf = bootstrap_particle_filter(*r.discrete_obs, drift, c.noise, po);
    } else {
        DiscreteObservations none;
        none.h = c.observation.make_h();
        pf = bootstrap_particle_filter(none, drift, c.noise, po);
    }
    r.oracle_resamplings = pf.resamplings;
    r.oracle_collapse_warnings = pf.collapse_warnings;

    std::vector<double> times = c.oracle.times;
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    DensityEvolution evo(grid, 1);
    for (double t : times) {
        const bool filtered = mode != ObservationMode::None;
        DensityField h = project_histogram(pf.at(t, 0.5 * c.time.dt), grid, !filtered);
        if (filtered) h.normalize();
        evo.push(t, std::move(h));
    }
    return evo;
}

csv::Metadata base_metadata(const ScenarioConfig& c) {
    return {{"scenario", c.name},
            {"seed", std::to_string(c.seed)},
            {"alpha", csv::format_double(c.noise.alpha)},
            {"epsilon", csv::format_double(c.noise.epsilon)},
            {"drift", c.drift.make().name},
            {"dt", csv::format_double(c.time.dt)}};
}

csv::Metadata with(csv::Metadata meta, std::initializer_list<std::pair<std::string, std::string>> extra) {
    meta.insert(meta.end(), extra.begin(), extra.end());
    return meta;
}

// SOURCE_DATE_EPOCH pins the timestamp for reproducible artifacts.
std::string utc_now() {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
        now = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    }
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

}  // namespace

std::string to_string(Command command) {
    switch (command) {
        case Command::Simulate: return "simulate";
        case Command::FokkerPlanck: return "fokker-planck";
        case Command::FilterDiscrete: return "filter-discrete";
        case Command::FilterZakai: return "filter-zakai";
        case Command::Twin: return "twin";
    }
    return "twin";
}

Command default_command(const ScenarioConfig& config) {
    switch (config.observation.mode) {
        case ObservationMode::None: return Command::FokkerPlanck;
        case ObservationMode::Discrete: return Command::FilterDiscrete;
        case ObservationMode::Continuous: return Command::FilterZakai;
    }
    return Command::FokkerPlanck;
}

ScenarioResult execute(const ScenarioConfig& config, Command command) {
    config.validate();
    ScenarioResult r;
    r.config = config;
    r.command = command;
    const ScenarioConfig& c = r.config;
    const ObservationMode mode = effective_mode(command, c);

    const Grid1D grid = c.grid.make();
    const DriftFn drift = c.drift.make();
    const ObservationFn h = c.observation.make_h();
    const OperatorMatrix op = assemble_adjoint(grid, c.noise, drift, 0.0, c.drift_scheme);
    r.stability_limit = op.stability_limit();
    if (c.time.dt > r.stability_limit) {
        std::ostringstream msg;
        msg << "time step " << c.time.dt << " exceeds the explicit stability limit "
            << r.stability_limit << " of this grid and noise";
        throw ConfigError("time.dt", msg.str());
    }

    try {
        // Truth and observations.
        if (needs_truth(command, c)) {
            r.truth = simulate_state(truth_start(c), drift, c.noise, c.time.dt, c.time.t_end, c.seed);
            if (r.truth->truncated) {
                r.warnings.push_back("true path exceeded |x| = 1e6 and was truncated at t = " +
                                     csv::format_double(r.truth->times.back()));
            }
        }
        if (mode == ObservationMode::Discrete) {
            if (c.truth.observations_file) {
                r.discrete_obs = csv::read_discrete_observations(*c.truth.observations_file, h);
            } else if (r.truth) {
                // A truncated truth only supports observations up to its last node.
                const double end = std::min(c.time.t_end, r.truth->times.back());
                const auto times = regular_times(c.observation.spacing, end, c.observation.spacing);
                r.discrete_obs = generate_discrete_obs(*r.truth, h, c.observation.variance, times, c.seed);
            }
        } else if (mode == ObservationMode::Continuous) {
            if (c.truth.observations_file) {
                r.continuous_obs =
                    csv::read_observation_path(*c.truth.observations_file, h, c.observation.noise_scale);
            } else if (r.truth) {
                r.continuous_obs = generate_continuous_obs(*r.truth, h, c.observation.noise_scale,
                                                           c.observation.path_dt, c.seed);
            }
        }
        if (command == Command::Simulate) return r;

        // Density estimate.
        const DensityField p0 = init_density(grid, c.init);
        if (mode == ObservationMode::None) {
            r.estimate = solve_fp(p0, op, drift, 0.0, c.time.t_end, c.time.dt, c.time.store_stride,
                                  &r.diagnostics);
        } else if (mode == ObservationMode::Discrete) {
            CdFilterOptions o;
            o.store_stride = c.time.store_stride;
            o.scheme = c.drift_scheme;
            o.diagnostics = &r.diagnostics;
            r.estimate = run_cd_filter(p0, *r.discrete_obs, drift, c.noise, 0.0, c.time.dt,
                                       c.time.t_end, o);
        } else {
            ZakaiOptions o;
            o.dt = c.time.dt;
            o.renormalize_every = c.observation.renormalize_every;
            o.store_stride = c.time.store_stride;
            o.scheme = c.drift_scheme;
            o.gain = c.observation.gain;
            o.diagnostics = &r.diagnostics;
            r.estimate = run_zakai(p0, *r.continuous_obs, drift, c.noise, o);
        }
        if (r.diagnostics.max_relative_clip > kClipWarnThreshold) {
            std::ostringstream msg;
            msg << "explicit steps clipped up to " << r.diagnostics.max_relative_clip
                << " of the mass in one step";
            r.warnings.push_back(msg.str());
        }

        OrbitOptions oo;
        oo.refine = c.analysis.refine_orbit;
        r.orbit = most_probable_orbit(*r.estimate, oo);
        r.events = detect_transitions(*r.orbit, c.analysis.wells, c.analysis.deadband,
                                      c.analysis.min_dwell);

        CompareOptions co;
        co.burn_in = c.analysis.burn_in;
        co.event_tolerance = c.analysis.event_tolerance;
        co.normalize = mode != ObservationMode::None;
        co.time_tolerance = 1e-9 * std::max(1.0, c.time.t_end);

        if (c.oracle.enabled && !c.oracle.times.empty() && r.truth && r.truth->truncated) {
            r.warnings.push_back("oracle skipped: the observations stop where the truth was truncated");
        } else if (c.oracle.enabled && !c.oracle.times.empty()) {
            for (double t : c.oracle.times) {
                if (!r.estimate->find_time(t, 1e-9 * std::max(1.0, t))) {
                    throw ConfigError("oracle.times", "time " + csv::format_double(t) +
                                                          " is not a stored snapshot time");
                }
            }
            r.oracle = run_oracle(c, mode, drift, r);
            r.oracle_report = compare_densities(*r.oracle, *r.estimate, co);
            if (r.oracle_collapse_warnings > 0) {
                r.warnings.push_back("particle oracle weight collapse (ESS < 10) on " +
                                     std::to_string(r.oracle_collapse_warnings) + " steps");
            }
        }

        if (command != Command::Twin) return r;

        // Scoring against the truth on the orbit's time axis.
        if (!r.truth->truncated) {
            for (double t : r.orbit->times) r.truth_on_orbit.push_back(r.truth->state_at(t));
            r.truth_events = detect_transitions(r.orbit->times, r.truth_on_orbit, c.analysis.wells,
                                                c.analysis.deadband, c.analysis.min_dwell);
            r.sign_report = compare_orbits(r.orbit->times, r.orbit->x_star, r.orbit->times,
                                           r.truth_on_orbit, co);
            r.event_report = compare_events(r.events, r.truth_events, co);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const InstabilityError& e) {
        throw InstabilityError("scenario '" + c.name + "': " + e.what());
    } catch (const DegenerateEvidenceError& e) {
        throw DegenerateEvidenceError("scenario '" + c.name + "': " + e.what());
    }
    return r;
}

fs::path resolve_output_dir(const ScenarioConfig& config, const std::optional<fs::path>& cli_out) {
    if (cli_out) return *cli_out;
    if (config.output_dir) return *config.output_dir;
    if (const char* root = std::getenv("LEVYFILTER_OUT_ROOT"); root && *root) {
        return fs::path(root) / config.name;
    }
    return fs::path("runs") / config.name;
}

nlohmann::json make_manifest(const RunOutcome& outcome, const std::string& created_at) {
    const ScenarioResult& r = outcome.result;
    const ScenarioConfig& c = r.config;
    nlohmann::json m;
    m["tool"] = "levyfilter";
    m["version"] = LEVYFILTER_VERSION;
    m["command"] = to_string(r.command);
    nlohmann::json cfg = to_json(c);
    cfg.erase("output_dir");
    m["config"] = cfg;

    nlohmann::json d;
    const Grid1D grid = c.grid.make();
    d["grid_nodes"] = grid.size();
    d["noise_intensity"] = c.noise.intensity();
    d["levy_constant"] = levy_constant(c.noise.alpha);
    d["stability_limit"] = r.stability_limit;
    d["init"] = describe(c.init);
    d["drift_name"] = c.drift.make().name;
    d["observation_name"] = c.observation.make_h().name;
    if (r.truth) {
        d["truth_x0"] = r.truth->states.front();
        d["truth_x0_source"] = c.truth.x0 ? "config" : "initial-law";
        d["truth_truncated"] = r.truth->truncated;
    }
    if (r.discrete_obs) d["observation_count"] = r.discrete_obs->size();
    if (r.continuous_obs) d["observation_count"] = r.continuous_obs->size();
    if (r.orbit) d["tie_rule"] = r.orbit->tie_rule;
    d["stream_rule"] =
        "substream seed = mix64(mix64(seed ^ stream*0xD1B54A32D192ED03) + index*0x9E3779B97F4A7C15); "
        "streams: state=1 observation=2 particles=3 resampling=4 initial=5 montecarlo=6";
    m["derived"] = d;

    nlohmann::json diag;
    diag["steps"] = r.diagnostics.steps;
    diag["clipped_mass"] = r.diagnostics.clipped_mass;
    diag["max_relative_clip"] = r.diagnostics.max_relative_clip;
    if (r.oracle) {
        diag["oracle_resamplings"] = r.oracle_resamplings;
        diag["oracle_collapse_warnings"] = r.oracle_collapse_warnings;
    }
    m["diagnostics"] = diag;

    nlohmann::json metrics = nlohmann::json::object();
    if (r.orbit) metrics["event_count"] = r.events.size();
    if (r.sign_report) metrics["orbit_sign_agreement"] = r.sign_report->scalars;
    if (r.event_report) metrics["event_match"] = r.event_report->scalars;
    if (r.oracle_report) metrics["l1_density_vs_oracle"] = r.oracle_report->scalars;
    m["metrics"] = metrics;
    m["outputs"] = outcome.files;
    m["warnings"] = outcome.warnings;
    m["created_at"] = created_at;
    return m;
}

RunOutcome run_scenario(const ScenarioConfig& config, Command command, const fs::path& out_dir,
                        const RunOptions& options) {
    RunOutcome outcome;
    outcome.out_dir = out_dir;
    outcome.result = execute(config, command);
    const ScenarioResult& r = outcome.result;
    const ScenarioConfig& c = r.config;
    outcome.warnings = r.warnings;

    fs::create_directories(out_dir);
    auto note = [&](const fs::path& rel) { outcome.files.push_back(rel.generic_string()); };
    const csv::Metadata meta = base_metadata(c);
    const std::string stride = std::to_string(c.time.store_stride);
    const bool twin = command == Command::Twin;

    if (r.truth) {
        const fs::path rel = twin ? fs::path("truth") / "trajectory.csv" : fs::path("trajectory.csv");
        fs::create_directories((out_dir / rel).parent_path());
        csv::write_trajectory(out_dir / rel, *r.truth,
                              with(meta, {{"x0", csv::format_double(r.truth->states.front())},
                                          {"truncated", r.truth->truncated ? "true" : "false"}}));
        note(rel);
    }
    if (r.discrete_obs && !c.truth.observations_file) {
        csv::write_discrete_observations(out_dir / "observations.csv", *r.discrete_obs,
                                         with(meta, {{"h", r.discrete_obs->h.name}}));
        note("observations.csv");
    }
    if (r.continuous_obs && !c.truth.observations_file) {
        csv::write_observation_path(
            out_dir / "observations.csv", *r.continuous_obs,
            with(meta, {{"h", r.continuous_obs->h.name},
                        {"obs_noise_scale", csv::format_double(r.continuous_obs->obs_noise_scale)},
                        {"path_dt", csv::format_double(c.observation.path_dt)}}));
        note("observations.csv");
    }
    if (r.estimate) {
        const auto dmeta = with(meta, {{"store_stride", stride},
                                       {"dx", csv::format_double(c.grid.dx)},
                                       {"noise_intensity", csv::format_double(c.noise.intensity())},
                                       {"drift_scheme", to_string(c.drift_scheme)}});
        csv::write_density(out_dir / "density.csv", *r.estimate, dmeta);
        note("density.csv");
        if (!r.estimate->updates().empty()) {
            csv::write_prior_density(out_dir / "prior_density.csv", *r.estimate, dmeta);
            csv::write_updates(out_dir / "updates.csv", *r.estimate, meta);
            note("prior_density.csv");
            note("updates.csv");
        }
        csv::write_orbit(out_dir / "orbit.csv", *r.orbit,
                         with(meta, {{"tie_rule", "nearest-previous,first-smallest-x"},
                                     {"refined", r.orbit->refined ? "true" : "false"}}));
        note("orbit.csv");
        const auto emeta = with(meta, {{"deadband", csv::format_double(c.analysis.deadband)}});
        csv::write_events(out_dir / "events.csv", r.events, emeta);
        note("events.csv");
        if (twin && !r.truth_on_orbit.empty()) {
            csv::write_events(out_dir / "truth" / "events.csv", r.truth_events, emeta);
            note("truth/events.csv");
        }
    }
    if (r.sign_report) {
        r.sign_report->write(out_dir / "compare", "orbit_sign_agreement");
        note("compare/orbit_sign_agreement.csv");
        note("compare/orbit_sign_agreement.json");
    }
    if (r.event_report) {
        r.event_report->write(out_dir / "compare", "event_match");
        note("compare/event_match.csv");
        note("compare/event_match.json");
    }
    if (r.oracle) {
        fs::create_directories(out_dir / "oracle");
        csv::write_density(out_dir / "oracle" / "density.csv", *r.oracle,
                           with(meta, {{"particles", std::to_string(c.oracle.particles)},
                                       {"store_stride", "1"}}));
        note("oracle/density.csv");
        r.oracle_report->write(out_dir / "compare", "l1_density");
        note("compare/l1_density.csv");
        note("compare/l1_density.json");
    }
    note("manifest.json");

    const nlohmann::json manifest = make_manifest(outcome, options.created_at.value_or(utc_now()));
    std::ofstream out(out_dir / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << '\n';
    return outcome;
}

RunOutcome run_scenario(const ScenarioConfig& config, const fs::path& out_dir,
                        const RunOptions& options) {
    return run_scenario(config, default_command(config), out_dir, options);
}

}  // namespace levyfilter::harness
