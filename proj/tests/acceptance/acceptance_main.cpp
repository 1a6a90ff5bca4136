// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failures, so ctest reports the binary red when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "levyfilter/filter_cd.hpp"
#include "levyfilter/filter_zakai.hpp"
#include "levyfilter/fp_solver.hpp"
#include "levyfilter/levy.hpp"
#include "levyfilter/nonlocal_operator.hpp"
#include "levyfilter/orbit.hpp"
#include "levyfilter/sde_sim.hpp"
#include "levyfilter/harness/presets.hpp"
#include "levyfilter/harness/run.hpp"
#include "oracles.hpp"

using namespace levyfilter;
using namespace levyfilter::harness;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

double normalized_l1(const DensityField& a, const DensityField& b) {
    return l1_distance(a.normalized_copy(), b.normalized_copy());
}

Verdict ac1_cauchy() {
    const auto c = preset("cauchy-free-space");
    const auto r = execute(c, Command::FokkerPlanck);
    const DensityField& p = r.estimate->back();
    const double t = r.estimate->times().back();
    std::vector<double> exact;
    for (double x : p.grid().nodes()) exact.push_back(oracle::cauchy_density(x, t));
    const double l1 = l1_distance(p, DensityField(p.grid(), exact));
    return {l1 < 0.05, "t=" + fmt(t) + " L1=" + fmt(l1) + " (< 0.05)"};
}

Verdict ac2_fp_vs_monte_carlo() {
    auto c = preset("example1-fokker-planck-alpha1.5");
    c.time.t_end = 2.0;
    c.oracle.enabled = true;
    c.oracle.particles = 100000;
    c.oracle.times = {0.5, 1.0, 2.0};
    const auto r = execute(c, Command::FokkerPlanck);
    if (!r.oracle) return {false, "no Monte-Carlo oracle was produced"};
    bool ok = true;
    std::string detail;
    for (double t : c.oracle.times) {
        const auto i = r.estimate->find_time(t);
        const auto k = r.oracle->find_time(t);
        if (!i || !k) return {false, "time " + fmt(t) + " missing"};
        const double l1 = l1_distance(r.estimate->snapshot(*i), r.oracle->snapshot(*k));
        ok = ok && l1 < 0.05;
        detail += "t=" + fmt(t) + " L1=" + fmt(l1) + " ";
    }
    return {ok, detail + "(each < 0.05, 1e5 samples)"};
}

Verdict ac3_conjugate() {
    const Grid1D grid(-2.5, 2.5, 101);
    const auto prior = init_density(grid, GaussianInit{-1.0, 0.1});
    const auto post = bayes_update(prior, -0.8, 0.0, 0.1, identity_observation());
    const double expect = oracle::conjugate_mean(-1.0, 0.01, 0.1, -0.8);
    const double err = std::abs(post.mean() - expect);
    const double mass_err = std::abs(post.mass() - 1.0);
    return {err <= 2.0 * grid.dx() && mass_err <= 1e-9,
            "mean error " + fmt(err) + " (<= " + fmt(2.0 * grid.dx()) + "), mass error " + fmt(mass_err) +
                " (<= 1e-9)"};
}

Verdict ac4_zakai_vs_particle_filter() {
    auto c = preset("example2-continuous-alpha1.5");
    c.oracle.enabled = true;
    c.oracle.particles = 10000;
    c.oracle.times = {10.0, 25.0, 50.0};
    const auto r = execute(c, Command::Twin);
    if (!r.oracle) return {false, "particle filter oracle skipped (truncated truth?)"};
    bool ok = true;
    std::string detail;
    for (double t : c.oracle.times) {
        const auto i = r.estimate->find_time(t);
        const auto k = r.oracle->find_time(t);
        if (!i || !k) return {false, "time " + fmt(t) + " missing"};
        const double l1 = normalized_l1(r.estimate->snapshot(*i), r.oracle->snapshot(*k));
        ok = ok && l1 < 0.1;
        detail += "t=" + fmt(t) + " L1=" + fmt(l1) + " ";
    }
    return {ok, detail + "(each < 0.1, 1e4 particles, seed " + std::to_string(c.seed) + ")"};
}

Verdict ac5_transition_capture() {
    auto c = preset("example1-discrete-alpha1.5");
    c.oracle.enabled = false;
    constexpr std::size_t kRuns = 10;
    std::size_t runs = 0, matched = 0;
    double agreement = 0.0;
    std::string seeds;
    // Deterministic scan: the first ten seeds whose untruncated truth has a transition.
    for (std::uint64_t seed = 1; runs < kRuns && seed <= 1000; ++seed) {
        c.seed = seed;
        const auto r = execute(c, Command::Twin);
        if (r.truth->truncated || r.truth_events.empty()) continue;
        ++runs;
        const auto m = match_events(r.events, r.truth_events, c.analysis.event_tolerance);
        if (m.matched) ++matched;
        agreement += r.sign_report->scalars.at("agreement").get<double>();
        seeds += std::to_string(seed) + (m.matched ? "" : "*") + ",";
    }
    if (runs < kRuns) return {false, "only " + std::to_string(runs) + " seeds with transitions"};
    agreement /= static_cast<double>(runs);
    seeds.pop_back();
    return {matched >= 8 && agreement >= 0.9,
            std::to_string(matched) + "/10 event lists matched (>= 8, |dt| <= " +
                fmt(c.analysis.event_tolerance) + "), mean sign agreement " + fmt(agreement) +
                " (>= 0.9); seeds " + seeds + " (* = unmatched)"};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Verdict ac6_invariants() {
    const Grid1D grid(-2.5, 2.5, 101);
    const StableParams params{1.5, std::sqrt(0.24)};
    const auto drift = double_well_drift();
    const auto h = identity_observation();
    std::vector<std::pair<std::string, std::function<bool()>>> checks;

    checks.emplace_back("adjointness", [&] {
        const Grid1D g(-6.0, 6.0, 241);
        Eigen::VectorXd phi(g.size()), p(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double x = g.node(i);
            phi[static_cast<Eigen::Index>(i)] = std::abs(x) < 1.5 ? std::pow(std::cos(x * M_PI / 3.0), 4) : 0.0;
            p[static_cast<Eigen::Index>(i)] = std::exp(-8.0 * (x + 0.5) * (x + 0.5));
        }
        const auto op = assemble_adjoint(g, params, drift, 0.0);
        const double lhs = apply_generator(g, params, drift, 0.0, phi).dot(p) * g.dx();
        const double rhs = phi.dot(op.apply(p)) * g.dx();
        return std::abs(lhs - rhs) <= 1e-8;
    });
    checks.emplace_back("fp-mass-monotone", [&] {
        const auto evo = solve_fp(init_density(grid, GaussianInit{-1.0, 0.1}), drift, params, 0.0, 5.0, 1e-3, 10);
        for (std::size_t k = 1; k < evo.size(); ++k) {
            if (evo.snapshot(k).mass() > evo.snapshot(k - 1).mass() + 1e-12) return false;
        }
        return true;
    });
    checks.emplace_back("bayes-normalization", [&] {
        const auto prior = init_density(grid, GaussianInit{-1.0, 0.3});
        for (double y : {-40.0, -1.0, 0.0, 0.8, 30.0}) {
            for (double r : {1e-4, 0.1, 10.0}) {
                if (std::abs(bayes_update(prior, y, 0.0, r, h).mass() - 1.0) > 1e-9) return false;
            }
        }
        return true;
    });
    const auto traj = simulate_state(-1.0, drift, params, 1e-3, 2.0, 3);
    const auto path = generate_continuous_obs(traj, h, std::sqrt(0.05), 1e-3, 3);
    const auto p0 = init_density(grid, GaussianInit{-1.0, 0.1});
    checks.emplace_back("zakai-scaling-and-stride", [&] {
        DensityField scaled = p0;
        for (double& v : scaled.values()) v *= 5.0;
        ZakaiOptions every, tenth;
        tenth.renormalize_every = 10;
        const auto a = run_zakai(p0, path, drift, params, every);
        const auto b = run_zakai(scaled, path, drift, params, every);
        const auto s = run_zakai(p0, path, drift, params, tenth);
        for (std::size_t k = 0; k < a.size(); ++k) {
            for (std::size_t i = 0; i < grid.size(); ++i) {
                if (std::abs(a.snapshot(k)[i] - b.snapshot(k)[i]) > 1e-12) return false;
                if (std::abs(a.snapshot(k)[i] - s.snapshot(k)[i]) > 1e-8) return false;
            }
            if (std::abs(b.log_norm()[k] - a.log_norm()[k] - std::log(5.0)) > 1e-10) return false;
        }
        return true;
    });
    checks.emplace_back("argmax-scaling", [&] {
        const auto evo = solve_fp(p0, drift, params, 0.0, 2.0, 1e-3, 50);
        DensityEvolution scaled(grid, 50);
        for (std::size_t k = 0; k < evo.size(); ++k) {
            DensityField f = evo.snapshot(k);
            for (double& v : f.values()) v *= 0.37;
            scaled.push(evo.times()[k], f);
        }
        return most_probable_orbit(evo).x_star == most_probable_orbit(scaled).x_star;
    });
    checks.emplace_back("byte-identical-reruns", [&] {
        auto c = preset("example1-discrete-alpha1.5");
        c.time.t_end = 1.0;
        c.oracle.enabled = false;
        RunOptions o;
        o.created_at = "2000-01-01T00:00:00Z";
        const auto root = fs::temp_directory_path() / "levyfilter_acceptance";
        fs::remove_all(root);
        const auto a = run_scenario(c, Command::Twin, root / "a", o);
        const auto b = run_scenario(c, Command::Twin, root / "b", o);
        if (a.files != b.files) return false;
        for (const auto& f : a.files) {
            if (slurp(a.out_dir / f) != slurp(b.out_dir / f)) return false;
        }
        return true;
    });
    checks.emplace_back("epsilon-scaling", [&] {
        for (double alpha : {0.75, 1.5}) {
            const auto unit = assemble_nonlocal(grid, {alpha, 1.0});
            const StableParams p{alpha, std::sqrt(0.24)};
            const Eigen::MatrixXd expect = p.intensity() * unit.nonlocal_part();
            if (!(assemble_nonlocal(grid, p).nonlocal_part() == expect)) return false;
        }
        return true;
    });

    std::string failed, passed;
    for (const auto& [name, check] : checks) {
        bool ok = false;
        try {
            ok = check();
        } catch (const std::exception&) {
            ok = false;
        }
        (ok ? passed : failed) += name + " ";
    }
    if (failed.empty()) return {true, std::to_string(checks.size()) + " suites: " + passed};
    return {false, "failed: " + failed};
}

Verdict ac7_sampler() {
    bool ok = true;
    std::string detail;
    for (double alpha : {0.75, 1.5}) {
        const auto xs = sample_stable_increments({alpha, 1.0}, 1.0, 100000, 2024);
        const double dev = oracle::max_cf_deviation(xs, alpha, {0.5, 1.0, 2.0});
        ok = ok && dev < 0.02;
        detail += "alpha=" + fmt(alpha) + " max|ECF-CF|=" + fmt(dev) + " ";
    }
    return {ok, detail + "(< 0.02, 1e5 draws)"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"AC1", ac1_cauchy},
        {"AC2", ac2_fp_vs_monte_carlo},
        {"AC3", ac3_conjugate},
        {"AC4", ac4_zakai_vs_particle_filter},
        {"AC5", ac5_transition_capture},
        {"AC6", ac6_invariants},
        {"AC7", ac7_sampler},
    };
    int failures = 0;
    for (const auto& [id, run] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %s %s [%.1fs]\n", id.c_str(), v.pass ? "PASS" : "FAIL", v.detail.c_str(), secs);
        std::fflush(stdout);
        if (!v.pass) ++failures;
    }
    return failures;
}
