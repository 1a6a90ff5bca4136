#include "levyfilter/harness/compare.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "levyfilter/csv_io.hpp"
#include "levyfilter/errors.hpp"

namespace levyfilter::harness {

namespace {

// Index in sorted `times` within tol of t.
std::optional<std::size_t> locate(const std::vector<double>& times, double t, double tol) {
    auto it = std::lower_bound(times.begin(), times.end(), t - tol);
    if (it != times.end() && std::abs(*it - t) <= tol) {
        return static_cast<std::size_t>(it - times.begin());
    }
    return std::nullopt;
}

std::string fmt_time(double t) { return csv::format_double(t); }

}  // namespace

std::string to_string(Metric metric) {
    switch (metric) {
        case Metric::L1Density: return "l1_density";
        case Metric::OrbitSignAgreement: return "orbit_sign_agreement";
        case Metric::EventMatch: return "event_match";
    }
    return "l1_density";
}

Metric metric_from_string(const std::string& name) {
    if (name == "l1_density") return Metric::L1Density;
    if (name == "orbit_sign_agreement") return Metric::OrbitSignAgreement;
    if (name == "event_match") return Metric::EventMatch;
    throw DomainError("unknown metric '" + name +
                      "' (expected l1_density, orbit_sign_agreement or event_match)");
}

void CompareReport::write(const std::filesystem::path& dir, const std::string& stem) const {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / (stem + ".csv"), std::ios::binary);
        csv::write_metadata(out, {{"metric", to_string(metric)}});
        for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
        out << '\n';
        for (const auto& row : rows) {
            for (std::size_t k = 0; k < row.size(); ++k) {
                out << (k ? "," : "") << csv::format_double(row[k]);
            }
            out << '\n';
        }
    }
    std::ofstream out(dir / (stem + ".json"), std::ios::binary);
    nlohmann::json j = scalars;
    j["metric"] = to_string(metric);
    out << j.dump(2) << '\n';
}

CompareReport compare_densities(const DensityEvolution& a, const DensityEvolution& b,
                                const CompareOptions& options) {
    if (!(a.grid() == b.grid())) {
        throw AxisMismatchError("l1_density: runs use different grids");
    }
    const bool a_sparse = a.size() <= b.size();
    const DensityEvolution& ref = a_sparse ? a : b;
    const DensityEvolution& other = a_sparse ? b : a;
    if (ref.empty()) throw AxisMismatchError("l1_density: empty evolution");

    CompareReport report;
    report.metric = Metric::L1Density;
    report.header = {"t", "l1"};
    double max_l1 = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        const double t = ref.times()[i];
        const auto j = locate(other.times(), t, options.time_tolerance);
        if (!j) throw AxisMismatchError("l1_density: time " + fmt_time(t) + " missing from one run");
        const DensityField& p = ref.snapshot(i);
        const DensityField& q = other.snapshot(*j);
        const double d = options.normalize ? l1_distance(p.normalized_copy(), q.normalized_copy())
                                           : l1_distance(p, q);
        report.rows.push_back({t, d});
        max_l1 = std::max(max_l1, d);
        sum += d;
    }
    report.scalars = {{"times", ref.size()},
                      {"max", max_l1},
                      {"mean", sum / static_cast<double>(ref.size())},
                      {"normalized", options.normalize}};
    return report;
}

CompareReport compare_orbits(const std::vector<double>& times_a, const std::vector<double>& a,
                             const std::vector<double>& times_b, const std::vector<double>& b,
                             const CompareOptions& options) {
    if (times_a.size() != a.size() || times_b.size() != b.size()) {
        throw AxisMismatchError("orbit_sign_agreement: series and time axis lengths differ");
    }
    const bool a_sparse = times_a.size() <= times_b.size();
    const auto& t_ref = a_sparse ? times_a : times_b;
    const auto& t_other = a_sparse ? times_b : times_a;
    const auto& v_ref = a_sparse ? a : b;
    const auto& v_other = a_sparse ? b : a;

    std::vector<double> common_t, va, vb;
    for (std::size_t i = 0; i < t_ref.size(); ++i) {
        const auto j = locate(t_other, t_ref[i], options.time_tolerance);
        if (!j) {
            throw AxisMismatchError("orbit_sign_agreement: time " + fmt_time(t_ref[i]) +
                                    " missing from one run");
        }
        common_t.push_back(t_ref[i]);
        va.push_back(a_sparse ? v_ref[i] : v_other[*j]);
        vb.push_back(a_sparse ? v_other[*j] : v_ref[i]);
    }

    CompareReport report;
    report.metric = Metric::OrbitSignAgreement;
    report.header = {"t", "a", "b", "agree"};
    auto sgn = [](double v) { return (v > 0.0) - (v < 0.0); };
    for (std::size_t i = 0; i < common_t.size(); ++i) {
        report.rows.push_back({common_t[i], va[i], vb[i], sgn(va[i]) == sgn(vb[i]) ? 1.0 : 0.0});
    }
    report.scalars = {{"samples", common_t.size()},
                      {"burn_in", options.burn_in},
                      {"agreement", sign_agreement(common_t, va, vb, options.burn_in)}};
    return report;
}

CompareReport compare_events(const std::vector<TransitionEvent>& a,
                             const std::vector<TransitionEvent>& b, const CompareOptions& options) {
    const EventMatch m = match_events(a, b, options.event_tolerance);
    CompareReport report;
    report.metric = Metric::EventMatch;
    report.header = {"index", "t_cross_a", "t_cross_b", "abs_error"};
    for (std::size_t k = 0; k < m.time_errors.size(); ++k) {
        report.rows.push_back(
            {static_cast<double>(k), a[k].t_cross, b[k].t_cross, m.time_errors[k]});
    }
    report.scalars = {{"count_a", m.count_a},
                      {"count_b", m.count_b},
                      {"counts_equal", m.counts_equal},
                      {"max_time_error", m.max_time_error},
                      {"tolerance", options.event_tolerance},
                      {"matched", m.matched}};
    return report;
}

CompareReport compare_runs(const std::filesystem::path& run_a, const std::filesystem::path& run_b,
                           Metric metric, const CompareOptions& options) {
    namespace fs = std::filesystem;
    auto need = [](const fs::path& p) {
        if (!fs::exists(p)) throw std::runtime_error("missing run file " + p.string());
        return p;
    };
    switch (metric) {
        case Metric::L1Density:
            return compare_densities(csv::read_density(need(run_a / "density.csv")),
                                     csv::read_density(need(run_b / "density.csv")), options);
        case Metric::OrbitSignAgreement: {
            auto load = [&](const fs::path& dir, std::vector<double>& t, std::vector<double>& x) {
                if (fs::exists(dir / "orbit.csv")) {
                    const auto o = csv::read_orbit(dir / "orbit.csv");
                    t = o.times;
                    x = o.x_star;
                } else {
                    const auto tr = csv::read_trajectory(need(dir / "trajectory.csv"));
                    t = tr.times;
                    x = tr.states;
                }
            };
            std::vector<double> ta, xa, tb, xb;
            load(run_a, ta, xa);
            load(run_b, tb, xb);
            return compare_orbits(ta, xa, tb, xb, options);
        }
        case Metric::EventMatch:
            return compare_events(csv::read_events(need(run_a / "events.csv")),
                                  csv::read_events(need(run_b / "events.csv")), options);
    }
    throw DomainError("unknown metric");
}

}  // namespace levyfilter::harness
