#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <iostream>
#include <mutex>
#include <thread>

#ifdef LEVYFILTER_CLI11_PACKAGED
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif

#include "levyfilter/errors.hpp"
#include "levyfilter/harness/compare.hpp"
#include "levyfilter/harness/presets.hpp"
#include "levyfilter/harness/run.hpp"

namespace fs = std::filesystem;
using namespace levyfilter;
using namespace levyfilter::harness;

namespace {

// Exit codes.
constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kBadConfig = 2;
constexpr int kWarnings = 3;

struct ScenarioFlags {
    std::string config;
    std::string preset;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> stride;
    std::string batch;
    bool quiet = false;
};

void add_scenario_flags(CLI::App* app, ScenarioFlags& f) {
    app->add_option("--config", f.config, "Scenario file (JSON)")->check(CLI::ExistingFile);
    app->add_option("--preset", f.preset, "Built-in scenario name");
    app->add_option("--seed", f.seed, "Override the scenario seed");
    app->add_option("--out", f.out, "Output directory");
    app->add_option("--stride", f.stride, "Snapshot stride in solver steps")->check(CLI::PositiveNumber);
    app->add_option("--batch", f.batch, "Run every *.json scenario in this directory")
        ->check(CLI::ExistingDirectory);
    app->add_flag("--quiet,-q", f.quiet, "Only report errors");
}

ScenarioConfig load(const ScenarioFlags& f, const std::string& config_path) {
    if (!config_path.empty() && !f.preset.empty()) {
        throw ConfigError("--config", "give either --config or --preset, not both");
    }
    ScenarioConfig c;
    if (!config_path.empty()) {
        c = load_config(config_path);
    } else if (!f.preset.empty()) {
        c = preset(f.preset);
    } else {
        throw ConfigError("--config", "a scenario is required (--config, --preset or --batch)");
    }
    if (f.seed) c.seed = *f.seed;
    if (f.stride) c.time.store_stride = *f.stride;
    c.validate();
    return c;
}

int run_one(Command command, const ScenarioFlags& f, const std::string& config_path,
            const std::optional<fs::path>& out_override, std::mutex& io) {
    try {
        const ScenarioConfig c = load(f, config_path);
        const Command cmd = command;
        const fs::path out = resolve_output_dir(c, out_override);
        const RunOutcome o = run_scenario(c, cmd, out);
        std::lock_guard lock(io);
        for (const auto& w : o.warnings) std::cerr << "warning: " << c.name << ": " << w << '\n';
        if (!f.quiet) {
            std::cout << to_string(cmd) << ' ' << c.name << " -> " << out.string() << " ("
                      << o.files.size() << " files)\n";
            const auto& r = o.result;
            if (r.sign_report) {
                std::cout << "  orbit sign agreement: " << r.sign_report->scalars["agreement"] << '\n';
            }
            if (r.event_report) {
                std::cout << "  events estimate/truth: " << r.event_report->scalars["count_a"] << '/'
                          << r.event_report->scalars["count_b"]
                          << " matched=" << r.event_report->scalars["matched"] << '\n';
            }
            if (r.oracle_report) {
                std::cout << "  max l1 vs oracle: " << r.oracle_report->scalars["max"] << '\n';
            }
        }
        return o.warnings.empty() ? kOk : kWarnings;
    } catch (const ConfigError& e) {
        std::lock_guard lock(io);
        std::cerr << "config error: " << e.what() << '\n';
        return kBadConfig;
    } catch (const std::exception& e) {
        std::lock_guard lock(io);
        std::cerr << "error: " << e.what() << '\n';
        return kFailed;
    }
}

int run_command(Command command, const ScenarioFlags& f) {
    std::mutex io;
    if (f.batch.empty()) {
        std::optional<fs::path> out;
        if (f.out) out = *f.out;
        return run_one(command, f, f.config, out, io);
    }
    if (!f.config.empty() || !f.preset.empty()) {
        std::cerr << "config error: --batch: cannot be combined with --config or --preset\n";
        return kBadConfig;
    }
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(f.batch)) {
        if (e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());

    // Each scenario is independent; a fixed pool of workers pulls from the list.
    std::atomic<std::size_t> next{0};
    std::vector<int> codes(files.size(), kOk);
    auto worker = [&] {
        for (std::size_t i = next++; i < files.size(); i = next++) {
            std::optional<fs::path> out;
            if (f.out) out = fs::path(*f.out) / files[i].stem();
            codes[i] = run_one(command, f, files[i].string(), out, io);
        }
    };
    const unsigned n_workers =
        std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                        static_cast<unsigned>(files.size())));
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < n_workers; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    int worst = kOk;
    for (int code : codes) {
        if (code == kFailed || code == kBadConfig) return code;
        worst = std::max(worst, code);
    }
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Filtering and most-probable orbits for SDEs with alpha-stable noise"};
    app.require_subcommand(1);
    app.set_version_flag("--version", LEVYFILTER_VERSION);

    struct Sub {
        Command command;
        const char* name;
        const char* help;
    };
    const Sub subs[] = {
        {Command::Simulate, "simulate", "Simulate a true path and its observations"},
        {Command::FokkerPlanck, "fokker-planck", "Solve the nonlocal Fokker-Planck equation"},
        {Command::FilterDiscrete, "filter-discrete", "Continuous-discrete filter on discrete observations"},
        {Command::FilterZakai, "filter-zakai", "Zakai filter on a continuous observation path"},
        {Command::Twin, "twin", "Simulate, observe, filter and score against the truth"},
    };
    std::vector<ScenarioFlags> flags(std::size(subs));
    std::vector<CLI::App*> apps;
    for (std::size_t k = 0; k < std::size(subs); ++k) {
        auto* sub = app.add_subcommand(subs[k].name, subs[k].help);
        add_scenario_flags(sub, flags[k]);
        apps.push_back(sub);
    }

    auto* cmp = app.add_subcommand("compare", "Compare two run directories");
    std::string run_a, run_b, metric_name = "l1_density";
    std::optional<std::string> cmp_out;
    CompareOptions copts;
    bool cmp_quiet = false;
    cmp->add_option("run_a", run_a, "First run directory")->required()->check(CLI::ExistingDirectory);
    cmp->add_option("run_b", run_b, "Second run directory")->required()->check(CLI::ExistingDirectory);
    cmp->add_option("--metric", metric_name, "l1_density | orbit_sign_agreement | event_match");
    cmp->add_option("--out", cmp_out, "Directory for the report (default: print only)");
    cmp->add_flag("--normalize", copts.normalize, "l1_density on normalized densities");
    cmp->add_option("--burn-in", copts.burn_in, "Ignore orbit samples before this time");
    cmp->add_option("--tolerance", copts.event_tolerance, "Event time tolerance");
    cmp->add_flag("--quiet,-q", cmp_quiet, "Only report errors");

    auto* pre = app.add_subcommand("presets", "List built-in scenarios or print one as JSON");
    std::string dump;
    pre->add_option("--dump", dump, "Preset to print");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help and --version exit 0; any other usage error counts as a bad config.
        return app.exit(e) == 0 ? kOk : kBadConfig;
    }

    for (std::size_t k = 0; k < apps.size(); ++k) {
        if (apps[k]->parsed()) return run_command(subs[k].command, flags[k]);
    }
    if (cmp->parsed()) {
        try {
            const Metric metric = metric_from_string(metric_name);
            const CompareReport report = compare_runs(run_a, run_b, metric, copts);
            if (cmp_out) report.write(*cmp_out, to_string(metric));
            if (!cmp_quiet) std::cout << report.scalars.dump(2) << '\n';
            return kOk;
        } catch (const DomainError& e) {
            std::cerr << "config error: --metric: " << e.what() << '\n';
            return kBadConfig;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kFailed;
        }
    }
    if (pre->parsed()) {
        try {
            if (dump.empty()) {
                for (const auto& n : preset_names()) std::cout << n << '\n';
            } else {
                auto j = to_json(preset(dump));
                std::cout << j.dump(2) << '\n';
            }
            return kOk;
        } catch (const ConfigError& e) {
            std::cerr << "config error: " << e.what() << '\n';
            return kBadConfig;
        }
    }
    return kOk;
}
