#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "levyfilter/filter_cd.hpp"
#include "levyfilter/filter_zakai.hpp"
#include "levyfilter/fp_solver.hpp"
#include "levyfilter/orbit.hpp"
#include "levyfilter/sde_sim.hpp"
#include "levyfilter/harness/compare.hpp"
#include "levyfilter/harness/config.hpp"

namespace levyfilter::harness {

/// What a CLI subcommand runs.
enum class Command { Simulate, FokkerPlanck, FilterDiscrete, FilterZakai, Twin };

std::string to_string(Command command);

/// Everything a scenario computes, kept in memory.
struct ScenarioResult {
    ScenarioConfig config;
    Command command = Command::Twin;

    std::optional<Trajectory> truth;
    std::optional<DiscreteObservations> discrete_obs;
    std::optional<ContinuousObservationPath> continuous_obs;

    std::optional<DensityEvolution> estimate;
    std::optional<MostProbableOrbit> orbit;
    std::vector<TransitionEvent> events;

    /// Truth path sampled on the orbit's time axis, and its events.
    std::vector<double> truth_on_orbit;
    std::vector<TransitionEvent> truth_events;

    /// Oracle densities at config.oracle.times (particle filter, or plain
    /// Monte Carlo without observations).
    std::optional<DensityEvolution> oracle;
    std::size_t oracle_resamplings = 0;
    std::size_t oracle_collapse_warnings = 0;

    double stability_limit = 0.0;
    StepDiagnostics diagnostics;
    std::vector<std::string> warnings;

    std::optional<CompareReport> sign_report;
    std::optional<CompareReport> event_report;
    std::optional<CompareReport> oracle_report;
};

/// Runs `command` for `config` without touching the filesystem (except to
/// read truth.observations_file). Numerical failures carry the scenario name.
ScenarioResult execute(const ScenarioConfig& config, Command command);

/// The command implied by the observation mode: fokker-planck, filter-discrete
/// or filter-zakai.
Command default_command(const ScenarioConfig& config);

struct RunOptions {
    /// Manifest timestamp override (tests pin it); current UTC time otherwise.
    std::optional<std::string> created_at;
};

struct RunOutcome {
    std::filesystem::path out_dir;
    std::vector<std::string> files;
    std::vector<std::string> warnings;
    ScenarioResult result;
};

/// Executes and writes the artifact directory: manifest.json plus the CSV
/// outputs of the command.
RunOutcome run_scenario(const ScenarioConfig& config, Command command,
                        const std::filesystem::path& out_dir, const RunOptions& options = {});
RunOutcome run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir,
                        const RunOptions& options = {});

/// --out, else config.output_dir, else $LEVYFILTER_OUT_ROOT/<name>, else runs/<name>.
std::filesystem::path resolve_output_dir(const ScenarioConfig& config,
                                         const std::optional<std::filesystem::path>& cli_out);

/// Manifest JSON (without writing it).
nlohmann::json make_manifest(const RunOutcome& outcome, const std::string& created_at);

}  // namespace levyfilter::harness
