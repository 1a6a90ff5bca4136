#include "levyfilter/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "levyfilter/errors.hpp"

namespace levyfilter {

std::size_t argmax_index(const DensityField& field, const double* previous) {
    const auto& v = field.values();
    double peak = 0.0;
    for (double x : v) peak = std::max(peak, x);
    if (!(peak > 0.0)) {
        throw ZeroDensityError("most probable point of an all-zero density is undefined");
    }
    const Grid1D& grid = field.grid();
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] != peak) continue;
        if (!best) {
            best = i;
            if (!previous) break;  // smallest x wins on the first snapshot
            continue;
        }
        // Strictly closer to the previous argmax; equidistant keeps the smaller x.
        if (std::abs(grid.node(i) - *previous) < std::abs(grid.node(*best) - *previous)) {
            best = i;
        }
    }
    return *best;
}

MostProbableOrbit most_probable_orbit(const DensityEvolution& evo, const OrbitOptions& options) {
    if (evo.empty()) {
        throw ZeroDensityError("most probable orbit of an empty evolution");
    }
    MostProbableOrbit orbit;
    orbit.refined = options.refine;
    const Grid1D& grid = evo.grid();
    std::optional<double> prev_node;
    for (std::size_t s = 0; s < evo.size(); ++s) {
        const DensityField& field = evo.snapshot(s);
        const double* prev = prev_node ? &*prev_node : nullptr;
        const std::size_t i = argmax_index(field, prev);
        double x = grid.node(i);
        double peak = field[i];
        prev_node = x;
        if (options.refine && i > 0 && i + 1 < field.size()) {
            const double l = field[i - 1], c = field[i], r = field[i + 1];
            const double denom = l - 2.0 * c + r;
            if (denom < 0.0) {
                const double offset = 0.5 * (l - r) / denom;
                x += offset * grid.dx();
                peak = c - 0.25 * (l - r) * offset;
            }
        }
        orbit.times.push_back(evo.times()[s]);
        orbit.x_star.push_back(x);
        orbit.peak_value.push_back(peak);
    }
    return orbit;
}

std::vector<TransitionEvent> detect_transitions(const std::vector<double>& times,
                                                const std::vector<double>& values,
                                                const std::vector<double>& wells, double deadband,
                                                double min_dwell) {
    if (times.size() != values.size()) {
        throw AxisMismatchError("transition detection needs equal-length times and values");
    }
    if (wells.size() < 2) {
        throw DomainError("transition detection needs at least two wells");
    }
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < wells.size(); ++a) {
        for (std::size_t b = a + 1; b < wells.size(); ++b) {
            min_gap = std::min(min_gap, std::abs(wells[a] - wells[b]));
        }
    }
    if (!(min_gap > 0.0)) {
        throw DomainError("well centres must be distinct");
    }
    if (!(deadband > 0.0) || !(deadband < 0.5 * min_gap)) {
        throw DomainError("deadband must lie in (0, half the well separation)");
    }
    if (!(min_dwell >= 0.0)) {
        throw DomainError("minimum dwell must be non-negative");
    }

    std::vector<TransitionEvent> events;
    std::optional<std::size_t> committed;
    double committed_since = times.empty() ? 0.0 : times.front();
    // Candidate change of well awaiting confirmation: well and entry time.
    std::optional<std::size_t> pending;
    double pending_since = 0.0;

    auto confirm = [&] {
        events.push_back(TransitionEvent{pending_since, wells[*committed], wells[*pending],
                                         pending_since - committed_since});
        committed = pending;
        committed_since = pending_since;
        pending.reset();
    };

    for (std::size_t k = 0; k < values.size(); ++k) {
        std::optional<std::size_t> inside;
        for (std::size_t w = 0; w < wells.size(); ++w) {
            if (std::abs(values[k] - wells[w]) <= deadband) {
                inside = w;
                break;
            }
        }
        if (inside) {
            if (!committed) {
                // Dwell of the first event counts from the start of the record.
                committed = inside;
            } else if (*inside == *committed) {
                pending.reset();  // back home before the candidate held
            } else if (!pending || *pending != *inside) {
                pending = inside;
                pending_since = times[k];
            }
        }
        if (pending && times[k] - pending_since >= min_dwell) confirm();
    }
    if (pending) confirm();
    return events;
}

std::vector<TransitionEvent> detect_transitions(const MostProbableOrbit& orbit,
                                                const std::vector<double>& wells, double deadband,
                                                double min_dwell) {
    return detect_transitions(orbit.times, orbit.x_star, wells, deadband, min_dwell);
}

double sign_agreement(const std::vector<double>& times, const std::vector<double>& a,
                      const std::vector<double>& b, double burn_in) {
    if (times.size() != a.size() || a.size() != b.size()) {
        throw AxisMismatchError("sign agreement needs series on one time axis");
    }
    std::size_t total = 0, agree = 0;
    auto sign = [](double v) { return (v > 0.0) - (v < 0.0); };
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] < burn_in) continue;
        ++total;
        if (sign(a[k]) == sign(b[k])) ++agree;
    }
    if (total == 0) {
        throw DomainError("no samples after the burn-in time");
    }
    return static_cast<double>(agree) / static_cast<double>(total);
}

EventMatch match_events(const std::vector<TransitionEvent>& a,
                        const std::vector<TransitionEvent>& b, double time_tolerance) {
    EventMatch m;
    m.count_a = a.size();
    m.count_b = b.size();
    m.counts_equal = a.size() == b.size();
    bool wells_agree = true;
    for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) {
        const double err = std::abs(a[k].t_cross - b[k].t_cross);
        m.time_errors.push_back(err);
        m.max_time_error = std::max(m.max_time_error, err);
        wells_agree = wells_agree && a[k].from_well == b[k].from_well && a[k].to_well == b[k].to_well;
    }
    m.matched = m.counts_equal && wells_agree && m.max_time_error <= time_tolerance;
    return m;
}

}  // namespace levyfilter
